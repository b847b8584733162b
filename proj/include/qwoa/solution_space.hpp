#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace qwoa {

using Solution = std::vector<int>;
using Index = std::uint64_t;

enum class SpaceKind { Binary, Integer, Permutation };

// Enumeration ceiling for exhaustive distance partitions; larger spaces must
// supply an explicit sample budget.
inline constexpr Index kEnumerationCeiling = 1ull << 22;

// The feasible solution set together with its indexing and mixing-graph
// structure. Binary and integer spaces contain all k^n value vectors; the
// permutation space contains the n! repetition-free vectors. Indexing is
// mixed-radix with variable 1 most significant for binary/integer spaces and
// lexicographic Lehmer ranking for permutations.
class SolutionSpace {
 public:
  static SolutionSpace binary(int n);
  static SolutionSpace integer(int n, int k);  // k >= 2
  static SolutionSpace permutation(int n);

  SpaceKind kind() const { return kind_; }
  int n() const { return n_; }
  int k() const { return k_; }
  Index size() const { return size_; }           // N
  std::uint64_t degree() const { return degree_; }  // mixing-graph degree d
  int diameter() const { return diameter_; }        // mixing-graph diameter D

  bool is_valid(const Solution& x) const;
  void check_valid(const Solution& x) const;  // throws std::invalid_argument

  Index index_of(const Solution& x) const;
  Solution solution_of(Index i) const;
  void solution_of(Index i, Solution& out) const;  // allocation-free variant

  // Nearest neighbours in canonical order (position-major, value-ascending;
  // transpositions in lexicographic pair order). Always exactly d results.
  std::vector<Solution> neighbors(const Solution& x) const;

  // Index-level neighbour enumeration; out is resized to d.
  void neighbor_indices(Index i, std::vector<Index>& out) const;

  // Hamming distance for binary/integer, Cayley distance for permutations.
  int graph_distance(const Solution& u, const Solution& v) const;
  int index_distance(Index i, Index j) const;

  // Number of solutions at distance h from any fixed solution (the graph is
  // vertex transitive, so the count does not depend on the centre).
  Index subset_size(int h) const;

  bool operator==(const SolutionSpace& other) const = default;

 private:
  SolutionSpace(SpaceKind kind, int n, int k);

  SpaceKind kind_;
  int n_ = 0;
  int k_ = 0;
  Index size_ = 0;
  std::uint64_t degree_ = 0;
  int diameter_ = 0;
};

// Partition of the space around a centre solution by graph distance.
// Exhaustive mode lists every index; sampled mode draws `budget` uniform
// members per non-empty subset and reports the exact subset sizes.
struct DistancePartition {
  bool exhaustive = true;
  std::vector<Index> counts;               // counts[h], h = 0..D
  std::vector<std::vector<Index>> members;  // full or sampled, per h
};

DistancePartition distance_partition(const SolutionSpace& space,
                                     const Solution& centre);
DistancePartition distance_partition_sampled(const SolutionSpace& space,
                                             const Solution& centre,
                                             Index budget_per_subset,
                                             std::uint64_t seed);

// Uniform member of the distance-h subset around `centre`. For permutations
// this samples a uniform relative permutation with n-h cycles.
Solution sample_at_distance(const SolutionSpace& space, const Solution& centre,
                            int h, std::mt19937_64& rng);

}  // namespace qwoa
