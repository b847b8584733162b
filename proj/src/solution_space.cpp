#include "qwoa/solution_space.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>
#include <string>

#include "qwoa/random.hpp"

namespace qwoa {

namespace {

std::uint64_t checked_pow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / base)
      throw std::invalid_argument("solution space size overflows 64 bits");
    r *= base;
  }
  return r;
}

std::uint64_t checked_factorial(int n) {
  std::uint64_t r = 1;
  for (int i = 2; i <= n; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(i))
      throw std::invalid_argument("solution space size overflows 64 bits");
    r *= static_cast<std::uint64_t>(i);
  }
  return r;
}

std::uint64_t binomial(int n, int h) {
  if (h < 0 || h > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= h; ++i)
    r = r * static_cast<std::uint64_t>(n - h + i) / static_cast<std::uint64_t>(i);
  return r;
}

// Unsigned Stirling numbers of the first kind: permutations of m elements
// with exactly j cycles. Row-major table up to m = n.
std::vector<std::vector<std::uint64_t>> stirling_first(int n) {
  std::vector<std::vector<std::uint64_t>> c(static_cast<std::size_t>(n) + 1);
  c[0] = {1};
  for (int m = 1; m <= n; ++m) {
    c[static_cast<std::size_t>(m)].assign(static_cast<std::size_t>(m) + 1, 0);
    for (int j = 1; j <= m; ++j) {
      std::uint64_t v = c[static_cast<std::size_t>(m - 1)]
                         [static_cast<std::size_t>(j - 1)];
      if (j <= m - 1)
        v += static_cast<std::uint64_t>(m - 1) *
             c[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(j)];
      c[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)] = v;
    }
  }
  return c;
}

int cycle_count(const Solution& perm) {
  const int n = static_cast<int>(perm.size());
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  int cycles = 0;
  for (int i = 0; i < n; ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    ++cycles;
    int j = i;
    while (!seen[static_cast<std::size_t>(j)]) {
      seen[static_cast<std::size_t>(j)] = 1;
      j = perm[static_cast<std::size_t>(j)];
    }
  }
  return cycles;
}

}  // namespace

SolutionSpace::SolutionSpace(SpaceKind kind, int n, int k)
    : kind_(kind), n_(n), k_(k) {
  if (n <= 0) throw std::invalid_argument("variable count must be positive");
  switch (kind) {
    case SpaceKind::Binary:
      size_ = checked_pow(2, n);
      degree_ = static_cast<std::uint64_t>(n);
      diameter_ = n;
      break;
    case SpaceKind::Integer:
      if (k < 2) throw std::invalid_argument("integer alphabet needs k >= 2");
      size_ = checked_pow(static_cast<std::uint64_t>(k), n);
      degree_ = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(k - 1);
      diameter_ = n;
      break;
    case SpaceKind::Permutation:
      if (n < 2) throw std::invalid_argument("permutation space needs n >= 2");
      size_ = checked_factorial(n);
      degree_ = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1) / 2;
      diameter_ = n - 1;
      break;
  }
}

SolutionSpace SolutionSpace::binary(int n) {
  return SolutionSpace(SpaceKind::Binary, n, 2);
}

SolutionSpace SolutionSpace::integer(int n, int k) {
  return SolutionSpace(SpaceKind::Integer, n, k);
}

SolutionSpace SolutionSpace::permutation(int n) {
  return SolutionSpace(SpaceKind::Permutation, n, n);
}

bool SolutionSpace::is_valid(const Solution& x) const {
  if (static_cast<int>(x.size()) != n_) return false;
  for (int v : x)
    if (v < 0 || v >= k_) return false;
  if (kind_ == SpaceKind::Permutation) {
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    for (int v : x) {
      if (seen[static_cast<std::size_t>(v)]) return false;
      seen[static_cast<std::size_t>(v)] = 1;
    }
  }
  return true;
}

void SolutionSpace::check_valid(const Solution& x) const {
  if (!is_valid(x))
    throw std::invalid_argument("solution is not a member of the space");
}

Index SolutionSpace::index_of(const Solution& x) const {
  check_valid(x);
  if (kind_ == SpaceKind::Permutation) {
    // Lexicographic Lehmer ranking.
    Index rank = 0;
    std::uint64_t fact = checked_factorial(n_ - 1);
    std::vector<char> used(static_cast<std::size_t>(n_), 0);
    for (int pos = 0; pos < n_; ++pos) {
      int smaller = 0;
      for (int v = 0; v < x[static_cast<std::size_t>(pos)]; ++v)
        if (!used[static_cast<std::size_t>(v)]) ++smaller;
      rank += static_cast<Index>(smaller) * fact;
      used[static_cast<std::size_t>(x[static_cast<std::size_t>(pos)])] = 1;
      if (pos + 1 < n_) fact /= static_cast<std::uint64_t>(n_ - 1 - pos);
    }
    return rank;
  }
  Index i = 0;
  for (int pos = 0; pos < n_; ++pos)
    i = i * static_cast<Index>(k_) + static_cast<Index>(x[static_cast<std::size_t>(pos)]);
  return i;
}

void SolutionSpace::solution_of(Index i, Solution& out) const {
  if (i >= size_) throw std::out_of_range("solution index out of range");
  out.resize(static_cast<std::size_t>(n_));
  if (kind_ == SpaceKind::Permutation) {
    std::uint64_t fact = checked_factorial(n_ - 1);
    std::vector<int> pool(static_cast<std::size_t>(n_));
    for (int v = 0; v < n_; ++v) pool[static_cast<std::size_t>(v)] = v;
    for (int pos = 0; pos < n_; ++pos) {
      const auto digit = static_cast<std::size_t>(i / fact);
      i %= fact;
      out[static_cast<std::size_t>(pos)] = pool[digit];
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
      if (pos + 1 < n_) fact /= static_cast<std::uint64_t>(n_ - 1 - pos);
    }
    return;
  }
  for (int pos = n_ - 1; pos >= 0; --pos) {
    out[static_cast<std::size_t>(pos)] = static_cast<int>(i % static_cast<Index>(k_));
    i /= static_cast<Index>(k_);
  }
}

Solution SolutionSpace::solution_of(Index i) const {
  Solution out;
  solution_of(i, out);
  return out;
}

std::vector<Solution> SolutionSpace::neighbors(const Solution& x) const {
  check_valid(x);
  std::vector<Solution> result;
  result.reserve(static_cast<std::size_t>(degree_));
  switch (kind_) {
    case SpaceKind::Binary:
      for (int pos = 0; pos < n_; ++pos) {
        Solution y = x;
        y[static_cast<std::size_t>(pos)] ^= 1;
        result.push_back(std::move(y));
      }
      break;
    case SpaceKind::Integer:
      for (int pos = 0; pos < n_; ++pos)
        for (int v = 0; v < k_; ++v) {
          if (v == x[static_cast<std::size_t>(pos)]) continue;
          Solution y = x;
          y[static_cast<std::size_t>(pos)] = v;
          result.push_back(std::move(y));
        }
      break;
    case SpaceKind::Permutation:
      for (int p = 0; p < n_; ++p)
        for (int q = p + 1; q < n_; ++q) {
          Solution y = x;
          std::swap(y[static_cast<std::size_t>(p)], y[static_cast<std::size_t>(q)]);
          result.push_back(std::move(y));
        }
      break;
  }
  return result;
}

void SolutionSpace::neighbor_indices(Index i, std::vector<Index>& out) const {
  out.clear();
  out.reserve(static_cast<std::size_t>(degree_));
  switch (kind_) {
    case SpaceKind::Binary:
      for (int pos = 0; pos < n_; ++pos)
        out.push_back(i ^ (Index{1} << (n_ - 1 - pos)));
      break;
    case SpaceKind::Integer: {
      Index stride = size_ / static_cast<Index>(k_);
      for (int pos = 0; pos < n_; ++pos) {
        const auto digit = static_cast<int>((i / stride) % static_cast<Index>(k_));
        for (int v = 0; v < k_; ++v) {
          if (v == digit) continue;
          out.push_back(i + (static_cast<Index>(v) - static_cast<Index>(digit)) * stride);
        }
        stride /= static_cast<Index>(k_);
      }
      break;
    }
    case SpaceKind::Permutation: {
      Solution x;
      solution_of(i, x);
      for (int p = 0; p < n_; ++p)
        for (int q = p + 1; q < n_; ++q) {
          std::swap(x[static_cast<std::size_t>(p)], x[static_cast<std::size_t>(q)]);
          out.push_back(index_of(x));
          std::swap(x[static_cast<std::size_t>(p)], x[static_cast<std::size_t>(q)]);
        }
      break;
    }
  }
}

int SolutionSpace::graph_distance(const Solution& u, const Solution& v) const {
  check_valid(u);
  check_valid(v);
  if (kind_ == SpaceKind::Permutation) {
    // Cayley distance: n minus the cycle count of the relative permutation.
    std::vector<int> pos_u(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
      pos_u[static_cast<std::size_t>(u[static_cast<std::size_t>(i)])] = i;
    Solution rel(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
      rel[static_cast<std::size_t>(i)] =
          pos_u[static_cast<std::size_t>(v[static_cast<std::size_t>(i)])];
    return n_ - cycle_count(rel);
  }
  int h = 0;
  for (int i = 0; i < n_; ++i)
    if (u[static_cast<std::size_t>(i)] != v[static_cast<std::size_t>(i)]) ++h;
  return h;
}

int SolutionSpace::index_distance(Index i, Index j) const {
  if (kind_ == SpaceKind::Binary) return std::popcount(i ^ j);
  if (kind_ == SpaceKind::Integer) {
    int h = 0;
    for (int pos = 0; pos < n_; ++pos) {
      if (i % static_cast<Index>(k_) != j % static_cast<Index>(k_)) ++h;
      i /= static_cast<Index>(k_);
      j /= static_cast<Index>(k_);
    }
    return h;
  }
  Solution u, v;
  solution_of(i, u);
  solution_of(j, v);
  return graph_distance(u, v);
}

Index SolutionSpace::subset_size(int h) const {
  if (h < 0 || h > diameter_) return 0;
  switch (kind_) {
    case SpaceKind::Binary:
      return binomial(n_, h);
    case SpaceKind::Integer:
      return binomial(n_, h) * checked_pow(static_cast<std::uint64_t>(k_ - 1), h);
    case SpaceKind::Permutation: {
      const auto table = stirling_first(n_);
      return table[static_cast<std::size_t>(n_)][static_cast<std::size_t>(n_ - h)];
    }
  }
  return 0;
}

DistancePartition distance_partition(const SolutionSpace& space,
                                     const Solution& centre) {
  space.check_valid(centre);
  if (space.size() > kEnumerationCeiling)
    throw std::invalid_argument(
        "space too large to enumerate; supply a sample budget");
  DistancePartition part;
  part.exhaustive = true;
  part.counts.assign(static_cast<std::size_t>(space.diameter()) + 1, 0);
  part.members.assign(static_cast<std::size_t>(space.diameter()) + 1, {});
  Solution v;
  for (Index i = 0; i < space.size(); ++i) {
    space.solution_of(i, v);
    const auto h = static_cast<std::size_t>(space.graph_distance(centre, v));
    ++part.counts[h];
    part.members[h].push_back(i);
  }
  return part;
}

Solution sample_at_distance(const SolutionSpace& space, const Solution& centre,
                            int h, std::mt19937_64& rng) {
  const int n = space.n();
  if (h < 0 || h > space.diameter())
    throw std::invalid_argument("distance outside [0, diameter]");
  if (h == 0) return centre;
  if (space.kind() != SpaceKind::Permutation) {
    // Choose h positions, then a differing value for each; this is uniform
    // over the Hamming sphere.
    std::vector<int> positions(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) positions[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < h; ++i) {
      const auto j = static_cast<std::size_t>(
          i + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n - i))));
      std::swap(positions[static_cast<std::size_t>(i)], positions[j]);
    }
    Solution y = centre;
    for (int i = 0; i < h; ++i) {
      const auto pos = static_cast<std::size_t>(positions[static_cast<std::size_t>(i)]);
      const int offset =
          1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(space.k() - 1)));
      y[pos] = (y[pos] + offset) % space.k();
    }
    return y;
  }
  // Permutations: draw a uniform relative permutation with exactly n - h
  // cycles via the Stirling-number decomposition c(m, j) =
  // c(m-1, j-1) + (m-1) c(m-1, j), then compose with the centre.
  static thread_local std::vector<std::vector<std::uint64_t>> table;
  if (static_cast<int>(table.size()) <= n) table = stirling_first(n);
  const int cycles_target = n - h;
  std::vector<int> decision(static_cast<std::size_t>(n));  // -1 = new cycle, else insert-after index
  int j = cycles_target;
  for (int m = n; m >= 1; --m) {
    const std::uint64_t total = table[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)];
    const std::uint64_t new_cycle_ways =
        (j >= 1) ? table[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(j - 1)] : 0;
    if (uniform_below(rng, total) < new_cycle_ways) {
      decision[static_cast<std::size_t>(m - 1)] = -1;
      --j;
    } else {
      decision[static_cast<std::size_t>(m - 1)] =
          static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(m - 1)));
    }
  }
  std::vector<int> succ(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    const int d = decision[static_cast<std::size_t>(m)];
    if (d < 0) {
      succ[static_cast<std::size_t>(m)] = m;
    } else {
      succ[static_cast<std::size_t>(m)] = succ[static_cast<std::size_t>(d)];
      succ[static_cast<std::size_t>(d)] = m;
    }
  }
  Solution y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    y[static_cast<std::size_t>(i)] =
        centre[static_cast<std::size_t>(succ[static_cast<std::size_t>(i)])];
  return y;
}

DistancePartition distance_partition_sampled(const SolutionSpace& space,
                                             const Solution& centre,
                                             Index budget_per_subset,
                                             std::uint64_t seed) {
  space.check_valid(centre);
  if (budget_per_subset == 0)
    throw std::invalid_argument("sample budget must be positive");
  DistancePartition part;
  part.exhaustive = false;
  const int D = space.diameter();
  part.counts.assign(static_cast<std::size_t>(D) + 1, 0);
  part.members.assign(static_cast<std::size_t>(D) + 1, {});
  std::mt19937_64 rng(seed);
  for (int h = 0; h <= D; ++h) {
    const Index count = space.subset_size(h);
    part.counts[static_cast<std::size_t>(h)] = count;
    const Index draws = std::min(budget_per_subset, count);
    auto& bucket = part.members[static_cast<std::size_t>(h)];
    bucket.reserve(static_cast<std::size_t>(draws));
    for (Index s = 0; s < draws; ++s)
      bucket.push_back(space.index_of(sample_at_distance(space, centre, h, rng)));
  }
  return part;
}

}  // namespace qwoa
