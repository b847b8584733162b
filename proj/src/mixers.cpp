#include "qwoa/mixers.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "qwoa/errors.hpp"
#include "qwoa/parallel.hpp"

namespace qwoa {

namespace {

void require_kind(const StateVector& state, SpaceKind kind, const char* what) {
  if (state.space().kind() != kind)
    throw std::invalid_argument(std::string(what) + " requires a matching space kind");
}

}  // namespace

NeighborTable build_neighbor_table(const SolutionSpace& space, int workers) {
  if (space.size() > kEnumerationCeiling)
    throw std::invalid_argument("space too large for a neighbour table");
  NeighborTable table;
  table.vertices = space.size();
  table.degree = static_cast<std::uint32_t>(space.degree());
  table.flat.resize(static_cast<std::size_t>(table.vertices) * table.degree);
  parallel_for_chunks(0, table.vertices, workers,
                      [&](std::uint64_t, Index lo, Index hi) {
                        std::vector<Index> nbrs;
                        for (Index u = lo; u < hi; ++u) {
                          space.neighbor_indices(u, nbrs);
                          auto* row = table.flat.data() +
                                      static_cast<std::size_t>(u) * table.degree;
                          for (std::uint32_t j = 0; j < table.degree; ++j)
                            row[j] = static_cast<std::uint32_t>(nbrs[j]);
                        }
                      });
  return table;
}

std::vector<Amplitude> adjacency_matvec(const SolutionSpace& space,
                                        std::span<const Amplitude> v) {
  if (static_cast<Index>(v.size()) != space.size())
    throw std::invalid_argument("adjacency_matvec length mismatch");
  std::vector<Amplitude> out(v.size(), Amplitude{0.0, 0.0});
  std::vector<Index> nbrs;
  for (Index u = 0; u < space.size(); ++u) {
    space.neighbor_indices(u, nbrs);
    Amplitude acc{0.0, 0.0};
    for (Index w : nbrs) acc += v[static_cast<std::size_t>(w)];
    out[static_cast<std::size_t>(u)] = acc;
  }
  return out;
}

void apply_hypercube_mixer(StateVector& state, double t) {
  require_kind(state, SpaceKind::Binary, "hypercube mixer");
  const Index n_states = state.size();
  const int n = state.space().n();
  const double c = std::cos(t);
  const double s = std::sin(t);
  const Amplitude mis{0.0, -s};  // -i sin t
  auto amps = state.amplitudes();
  for (int axis = 0; axis < n; ++axis) {
    const Index block = Index{1} << (n - 1 - axis);
    for (Index g = 0; g < n_states; g += block * 2) {
      for (Index i = g; i < g + block; ++i) {
        const Amplitude a0 = amps[static_cast<std::size_t>(i)];
        const Amplitude a1 = amps[static_cast<std::size_t>(i + block)];
        amps[static_cast<std::size_t>(i)] = c * a0 + mis * a1;
        amps[static_cast<std::size_t>(i + block)] = mis * a0 + c * a1;
      }
    }
  }
}

void apply_hamming_mixer(StateVector& state, double t, PhaseConvention convention) {
  require_kind(state, SpaceKind::Integer, "Hamming mixer");
  const Index n_states = state.size();
  const int n = state.space().n();
  const int k = state.space().k();
  const Amplitude coupling =
      (std::exp(Amplitude{0.0, -static_cast<double>(k) * t}) - 1.0) /
      static_cast<double>(k);
  auto amps = state.amplitudes();
  Index stride = n_states / static_cast<Index>(k);
  for (int axis = 0; axis < n; ++axis) {
    const Index group = stride * static_cast<Index>(k);
    for (Index g = 0; g < n_states; g += group) {
      for (Index off = 0; off < stride; ++off) {
        const Index base = g + off;
        Amplitude sum{0.0, 0.0};
        for (int l = 0; l < k; ++l)
          sum += amps[static_cast<std::size_t>(base + static_cast<Index>(l) * stride)];
        const Amplitude shift = coupling * sum;
        for (int l = 0; l < k; ++l)
          amps[static_cast<std::size_t>(base + static_cast<Index>(l) * stride)] += shift;
      }
    }
    stride /= static_cast<Index>(k);
  }
  // The product form realises exp(-int) exp(-itA); undo the global phase
  // when the exact operator is requested.
  if (convention == PhaseConvention::Exact) {
    const Amplitude phase = std::exp(Amplitude{0.0, static_cast<double>(n) * t});
    for (auto& a : amps) a *= phase;
  }
}

int chebyshev_degree(double z, double tol) {
  if (z < 0.0) throw std::invalid_argument("chebyshev_degree needs z >= 0");
  const int ceiling = static_cast<int>(10.0 * (z + 30.0));
  const double half = z / 2.0;
  // Coefficients are 2 J_m(z); |J_m(z)| <= (z/2)^m / m!, so once the
  // geometric majorant of the tail drops below tol the truncation is safe.
  double term = 1.0;  // (z/2)^m / m! at m = 0
  for (int m = 0; m <= ceiling; ++m) {
    const double ratio = half / static_cast<double>(m + 2);
    if (ratio < 1.0) {
      const double tail = 2.0 * term * ratio * (m + 2) / (m + 1) / (1.0 - ratio);
      // tail majorises 2 * sum_{j>m} (z/2)^j / j!
      if (tail <= tol) return m;
    }
    term *= half / static_cast<double>(m + 1);
  }
  throw numerical_error("transposition mixer: expansion degree ceiling reached");
}

void apply_transposition_mixer(StateVector& state, double t, double tol,
                               const NeighborTable* table) {
  require_kind(state, SpaceKind::Permutation, "transposition mixer");
  if (!(tol > 0.0)) throw std::invalid_argument("mixer tolerance must be positive");
  if (t < 0.0) throw std::invalid_argument("walk time must be non-negative");
  const SolutionSpace& space = state.space();
  NeighborTable local;
  if (table == nullptr) {
    local = build_neighbor_table(space);
    table = &local;
  }
  const auto n_states = static_cast<std::size_t>(space.size());
  const double d = static_cast<double>(space.degree());
  const double z = t * d;
  const int degree = chebyshev_degree(z, tol);

  // Clenshaw-style forward accumulation of exp(-iz x) =
  //   J_0(z) + 2 sum_m (-i)^m J_m(z) T_m(x) on the scaled operator A/d.
  const double inv_d = 1.0 / d;
  auto scaled_matvec = [&](const std::vector<Amplitude>& v,
                           std::vector<Amplitude>& out) {
    for (std::size_t u = 0; u < n_states; ++u) {
      const auto row = table->row(static_cast<Index>(u));
      Amplitude acc{0.0, 0.0};
      for (const std::uint32_t w : row) acc += v[w];
      out[u] = acc * inv_d;
    }
  };

  const auto amps = state.amplitudes();
  std::vector<Amplitude> w_prev(amps.begin(), amps.end());
  std::vector<Amplitude> result(n_states);
  const double j0 = std::cyl_bessel_j(0, z);
  for (std::size_t u = 0; u < n_states; ++u) result[u] = j0 * w_prev[u];
  if (degree >= 1) {
    std::vector<Amplitude> w_cur(n_states);
    std::vector<Amplitude> w_next(n_states);
    scaled_matvec(w_prev, w_cur);
    Amplitude unit{0.0, -1.0};  // (-i)^m, updated per term
    for (int m = 1; m <= degree; ++m) {
      const Amplitude coeff = 2.0 * unit * std::cyl_bessel_j(m, z);
      for (std::size_t u = 0; u < n_states; ++u) result[u] += coeff * w_cur[u];
      if (m < degree) {
        scaled_matvec(w_cur, w_next);
        for (std::size_t u = 0; u < n_states; ++u)
          w_next[u] = 2.0 * w_next[u] - w_prev[u];
        w_prev.swap(w_cur);
        w_cur.swap(w_next);
      }
      unit *= Amplitude{0.0, -1.0};
    }
  }
  std::copy(result.begin(), result.end(), amps.begin());
}

namespace {

Eigen::MatrixXd dense_adjacency(const SolutionSpace& space) {
  const auto n_states = static_cast<Eigen::Index>(space.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_states, n_states);
  std::vector<Index> nbrs;
  for (Index u = 0; u < space.size(); ++u) {
    space.neighbor_indices(u, nbrs);
    for (Index w : nbrs) a(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(u)) = 1.0;
  }
  return a;
}

}  // namespace

DenseAdjacencyOracle::DenseAdjacencyOracle(const SolutionSpace& space)
    : n_(space.size()) {
  if (space.size() > kDenseOracleCeiling)
    throw std::invalid_argument("space exceeds the dense oracle ceiling");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_adjacency(space));
  if (solver.info() != Eigen::Success)
    throw numerical_error("adjacency eigendecomposition failed");
  const auto n = static_cast<std::size_t>(n_);
  eigenvalues_.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n_);
  eigenvectors_.resize(n * n);
  Eigen::Map<Eigen::MatrixXd>(eigenvectors_.data(), n_, n_) = solver.eigenvectors();
}

std::vector<Amplitude> DenseAdjacencyOracle::matrix(double t) const {
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::Map<const Eigen::MatrixXd> v(eigenvectors_.data(), n, n);
  Eigen::VectorXcd phases(n);
  for (Eigen::Index j = 0; j < n; ++j)
    phases(j) = std::exp(Amplitude{0.0, -t * eigenvalues_[static_cast<std::size_t>(j)]});
  Eigen::MatrixXcd u = v * phases.asDiagonal() * v.transpose();
  std::vector<Amplitude> out(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_));
  // Row-major output.
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      out[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_) +
          static_cast<std::size_t>(c)] = u(r, c);
  return out;
}

std::vector<Amplitude> DenseAdjacencyOracle::apply(double t,
                                                   std::span<const Amplitude> v) const {
  if (static_cast<Index>(v.size()) != n_)
    throw std::invalid_argument("oracle apply length mismatch");
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::Map<const Eigen::MatrixXd> vecs(eigenvectors_.data(), n, n);
  Eigen::Map<const Eigen::VectorXcd> x(v.data(), n);
  Eigen::VectorXcd y = vecs.transpose() * x;
  for (Eigen::Index j = 0; j < n; ++j)
    y(j) *= std::exp(Amplitude{0.0, -t * eigenvalues_[static_cast<std::size_t>(j)]});
  Eigen::VectorXcd z = vecs * y;
  return std::vector<Amplitude>(z.data(), z.data() + n);
}

std::vector<Amplitude> dense_mixer_oracle(const SolutionSpace& space, double t) {
  return DenseAdjacencyOracle(space).matrix(t);
}

Mixer::Mixer(const SolutionSpace& space, double tol, PhaseConvention convention,
             int workers)
    : space_(space), tol_(tol), convention_(convention) {
  if (space_.kind() == SpaceKind::Permutation) {
    if (!(tol_ > 0.0))
      throw std::invalid_argument("permutation mixer needs a positive tolerance");
    table_ = build_neighbor_table(space_, workers);
  }
}

void Mixer::apply(StateVector& state, double t) const {
  if (!(state.space() == space_))
    throw std::invalid_argument("state space does not match mixer space");
  switch (space_.kind()) {
    case SpaceKind::Binary:
      apply_hypercube_mixer(state, t);
      break;
    case SpaceKind::Integer:
      apply_hamming_mixer(state, t, convention_);
      break;
    case SpaceKind::Permutation:
      apply_transposition_mixer(state, t, tol_, &*table_);
      break;
  }
}

}  // namespace qwoa
