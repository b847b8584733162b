#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qwoa/statevector.hpp"

namespace qwoa {

// Hamming-graph mixers are applied in a product form that differs from
// exp(-itA) by the global phase exp(-int). PhaseFree keeps the cheap form;
// Exact restores the phase so the operator equals exp(-itA) elementwise.
enum class PhaseConvention { PhaseFree, Exact };

inline constexpr Index kDenseOracleCeiling = 4096;

// Flattened adjacency list of the mixing graph, row u at [u*d, (u+1)*d).
struct NeighborTable {
  Index vertices = 0;
  std::uint32_t degree = 0;
  std::vector<std::uint32_t> flat;

  std::span<const std::uint32_t> row(Index u) const {
    return {flat.data() + u * degree, degree};
  }
};

NeighborTable build_neighbor_table(const SolutionSpace& space, int workers = 1);

// out_u = sum over neighbours w of v_w; the walk generator A applied to v.
std::vector<Amplitude> adjacency_matvec(const SolutionSpace& space,
                                        std::span<const Amplitude> v);

// Walk on the n-dimensional hypercube: per-variable rotation pairs, exactly
// exp(-itA). Binary spaces only.
void apply_hypercube_mixer(StateVector& state, double t);

// Walk on the Hamming graph H(n, k): per-variable complete-graph walk in the
// product form a_j -> a_j + ((e^{-ikt}-1)/k) sum_l a_l. Integer spaces only.
void apply_hamming_mixer(StateVector& state, double t,
                         PhaseConvention convention = PhaseConvention::PhaseFree);

// Walk on the transposition graph via a truncated Chebyshev expansion of
// exp(-itA) on the spectral interval [-d, d]. The result is within `tol` of
// the exact action in the 2-norm. Permutation spaces only.
void apply_transposition_mixer(StateVector& state, double t, double tol,
                               const NeighborTable* table = nullptr);

// Chebyshev truncation degree needed for a 2-norm error below tol at
// z = t * d; throws numerical_error beyond the configured degree ceiling.
int chebyshev_degree(double z, double tol);

// Dense exp(-itA) by eigendecomposition of the real symmetric adjacency
// matrix; verification oracle for spaces with at most kDenseOracleCeiling
// solutions. Row-major N x N.
std::vector<Amplitude> dense_mixer_oracle(const SolutionSpace& space, double t);

// Eigendecomposition held once so repeated walk times are cheap.
class DenseAdjacencyOracle {
 public:
  explicit DenseAdjacencyOracle(const SolutionSpace& space);
  std::vector<Amplitude> matrix(double t) const;
  std::vector<Amplitude> apply(double t, std::span<const Amplitude> v) const;
  Index size() const { return n_; }

 private:
  Index n_;
  std::vector<double> eigenvalues_;
  std::vector<double> eigenvectors_;  // column-major N x N
};

// Kind-dispatching facade used by the engine; owns the neighbour table for
// permutation spaces so repeated applications amortise its construction.
class Mixer {
 public:
  explicit Mixer(const SolutionSpace& space, double tol = 1e-10,
                 PhaseConvention convention = PhaseConvention::PhaseFree,
                 int workers = 1);

  void apply(StateVector& state, double t) const;
  const SolutionSpace& space() const { return space_; }

 private:
  SolutionSpace space_;
  double tol_;
  PhaseConvention convention_;
  std::optional<NeighborTable> table_;
};

}  // namespace qwoa
