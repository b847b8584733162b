#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qwoa/mixers.hpp"
#include "qwoa/random.hpp"

using namespace qwoa;

namespace {

StateVector random_state(const SolutionSpace& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Amplitude> amps(static_cast<std::size_t>(space.size()));
  double norm = 0.0;
  for (auto& a : amps) {
    a = {normal01(rng), normal01(rng)};
    norm += std::norm(a);
  }
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& a : amps) a *= scale;
  return StateVector(space, std::move(amps));
}

std::vector<Amplitude> dense_apply(const std::vector<Amplitude>& matrix,
                                   std::span<const Amplitude> v) {
  const std::size_t n = v.size();
  std::vector<Amplitude> out(n, Amplitude{0.0, 0.0});
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r] += matrix[r * n + c] * v[c];
  return out;
}

// Max-norm difference after aligning b to a by one global phase, chosen at
// a's largest component.
double max_norm_phase_adjusted(std::span<const Amplitude> a,
                               std::span<const Amplitude> b) {
  std::size_t pivot = 0;
  for (std::size_t i = 1; i < a.size(); ++i)
    if (std::abs(a[i]) > std::abs(a[pivot])) pivot = i;
  const Amplitude ratio = a[pivot] / b[pivot];
  const Amplitude phase = ratio / std::abs(ratio);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - phase * b[i]));
  return worst;
}

double principal_angle(double x) {
  const double pi = 3.14159265358979323846;
  while (x > pi) x -= 2.0 * pi;
  while (x < -pi) x += 2.0 * pi;
  return x;
}

}  // namespace

TEST_CASE("t = 0 is the identity for all three mixers") {
  const auto spaces = std::vector<SolutionSpace>{
      SolutionSpace::binary(4), SolutionSpace::integer(3, 3),
      SolutionSpace::permutation(4)};
  for (const auto& space : spaces) {
    auto psi = random_state(space, 5);
    const std::vector<Amplitude> before(psi.amplitudes().begin(),
                                        psi.amplitudes().end());
    Mixer(space, 1e-12).apply(psi, 0.0);
    for (Index i = 0; i < psi.size(); ++i)
      CHECK(std::abs(psi[i] - before[static_cast<std::size_t>(i)]) < 1e-14);
  }
}

TEST_CASE("single-qubit hypercube walk: |0> at t = pi/2 becomes -i|1>") {
  auto psi = StateVector::basis_state(SolutionSpace::binary(1), 0);
  apply_hypercube_mixer(psi, 3.14159265358979323846 / 2.0);
  CHECK(std::abs(psi[0]) < 1e-15);
  CHECK(std::abs(psi[1] - Amplitude{0.0, -1.0}) < 1e-15);
}

TEST_CASE("hypercube mixer matches the dense exponential") {
  const auto space = SolutionSpace::binary(8);
  const DenseAdjacencyOracle oracle(space);
  auto psi = random_state(space, 11);
  const auto expected = oracle.apply(0.37, psi.amplitudes());
  apply_hypercube_mixer(psi, 0.37);
  for (Index i = 0; i < psi.size(); ++i)
    CHECK(std::abs(psi[i] - expected[static_cast<std::size_t>(i)]) < 1e-10);
}

TEST_CASE("dense oracle: identity at t = 0 and unitarity") {
  const auto space = SolutionSpace::integer(2, 3);
  const auto id = dense_mixer_oracle(space, 0.0);
  const std::size_t n = static_cast<std::size_t>(space.size());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      CHECK(std::abs(id[r * n + c] - (r == c ? 1.0 : 0.0)) < 1e-12);

  const auto u = dense_mixer_oracle(space, 0.83);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      Amplitude acc{0.0, 0.0};
      for (std::size_t m = 0; m < n; ++m) acc += u[r * n + m] * std::conj(u[c * n + m]);
      CHECK(std::abs(acc - (r == c ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("dense oracle matches the hypercube tensor-product closed form") {
  const int n = 3;
  const auto space = SolutionSpace::binary(n);
  const double t = 0.41;
  const auto u = dense_mixer_oracle(space, t);
  const std::size_t dim = static_cast<std::size_t>(space.size());
  const double c = std::cos(t), s = std::sin(t);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t col = 0; col < dim; ++col) {
      const int h = std::popcount(r ^ col);
      Amplitude expected{1.0, 0.0};
      for (int b = 0; b < h; ++b) expected *= Amplitude{0.0, -s};
      for (int b = h; b < n; ++b) expected *= c;
      CHECK(std::abs(u[r * dim + col] - expected) < 1e-12);
    }
}

TEST_CASE("Hamming mixer equals the dense exponential times exp(-int)") {
  const auto space = SolutionSpace::integer(2, 3);
  const double t = 0.29;
  const auto u = dense_mixer_oracle(space, t);
  const std::size_t dim = static_cast<std::size_t>(space.size());
  const Amplitude global = std::exp(Amplitude{0.0, space.n() * t});
  for (std::size_t col = 0; col < dim; ++col) {
    auto basis = StateVector::basis_state(space, static_cast<Index>(col));
    apply_hamming_mixer(basis, t, PhaseConvention::PhaseFree);
    for (std::size_t r = 0; r < dim; ++r)
      CHECK(std::abs(global * basis[static_cast<Index>(r)] - u[r * dim + col]) < 1e-12);
  }
  // Exact convention needs no phase correction at all.
  auto psi = random_state(space, 3);
  const auto expected = dense_apply(u, psi.amplitudes());
  apply_hamming_mixer(psi, t, PhaseConvention::Exact);
  for (Index i = 0; i < psi.size(); ++i)
    CHECK(std::abs(psi[i] - expected[static_cast<std::size_t>(i)]) < 1e-12);
}

TEST_CASE("Hamming mixer with k = 2 reduces to the hypercube mixer") {
  for (const int n : {3, 10}) {
    const auto binary = SolutionSpace::binary(n);
    const auto integer = SolutionSpace::integer(n, 2);
    const double t = 0.77;
    auto a = random_state(binary, 17);
    auto b = StateVector(integer, std::vector<Amplitude>(a.amplitudes().begin(),
                                                         a.amplitudes().end()));
    apply_hypercube_mixer(a, t);
    apply_hamming_mixer(b, t);
    CHECK(max_norm_phase_adjusted(a.amplitudes(), b.amplitudes()) < 1e-12);
  }
}

TEST_CASE("single-axis Hamming walk at t = pi/k is the Grover reflection") {
  const double pi = 3.14159265358979323846;
  for (const int k : {2, 4, 8, 16}) {
    const auto space = SolutionSpace::integer(1, k);
    for (int col = 0; col < k; ++col) {
      auto basis = StateVector::basis_state(space, static_cast<Index>(col));
      apply_hamming_mixer(basis, pi / k);
      // Reflection 2|s><s| - I has entries 2/k - delta.
      for (int r = 0; r < k; ++r) {
        const double expected = 2.0 / k - (r == col ? 1.0 : 0.0);
        // The product form realises minus the reflection; align by -1.
        CHECK(std::abs(-basis[static_cast<Index>(r)] - expected) < 1e-12);
      }
    }
  }
}

TEST_CASE("adjacency_matvec basics and dense cross-check") {
  const auto space = SolutionSpace::permutation(4);
  const auto n = static_cast<std::size_t>(space.size());

  const std::vector<Amplitude> ones(n, Amplitude{1.0, 0.0});
  const auto regular = adjacency_matvec(space, ones);
  for (const auto& v : regular)
    CHECK(std::abs(v - static_cast<double>(space.degree())) < 1e-12);

  std::vector<Amplitude> indicator(n, Amplitude{0.0, 0.0});
  indicator[5] = 1.0;
  const auto row = adjacency_matvec(space, indicator);
  std::vector<Index> nbrs;
  space.neighbor_indices(5, nbrs);
  for (std::size_t i = 0; i < n; ++i) {
    const bool is_neighbor =
        std::find(nbrs.begin(), nbrs.end(), static_cast<Index>(i)) != nbrs.end();
    CHECK(std::abs(row[i] - (is_neighbor ? 1.0 : 0.0)) < 1e-12);
  }

  // Random vector against an explicitly assembled dense A.
  auto psi = random_state(space, 23);
  const auto via_matvec = adjacency_matvec(space, psi.amplitudes());
  std::vector<Amplitude> expected(n, Amplitude{0.0, 0.0});
  for (Index u = 0; u < space.size(); ++u) {
    space.neighbor_indices(u, nbrs);
    for (const Index w : nbrs)
      expected[static_cast<std::size_t>(w)] += psi[u];
  }
  for (std::size_t i = 0; i < n; ++i)
    CHECK(std::abs(via_matvec[i] - expected[i]) < 1e-12);
}

TEST_CASE("transposition mixer matches the dense exponential") {
  const auto space = SolutionSpace::permutation(4);
  const DenseAdjacencyOracle oracle(space);
  auto psi = random_state(space, 31);
  const auto expected = oracle.apply(0.3, psi.amplitudes());
  apply_transposition_mixer(psi, 0.3, 1e-10);
  for (Index i = 0; i < psi.size(); ++i)
    CHECK(std::abs(psi[i] - expected[static_cast<std::size_t>(i)]) < 1e-9);
}

TEST_CASE("transposition walk spreads symmetrically to distance-1 states") {
  const auto space = SolutionSpace::permutation(3);
  auto psi = StateVector::basis_state(space, space.index_of({0, 1, 2}));
  apply_transposition_mixer(psi, 0.05, 1e-12);
  std::vector<Amplitude> at_distance_one;
  Solution x;
  for (Index i = 0; i < space.size(); ++i) {
    space.solution_of(i, x);
    if (space.graph_distance({0, 1, 2}, x) == 1)
      at_distance_one.push_back(psi[i]);
  }
  REQUIRE(at_distance_one.size() == 3);
  for (const auto& a : at_distance_one)
    CHECK(std::abs(a - at_distance_one[0]) < 1e-12);
}

TEST_CASE("oracle equivalence over random states and times") {
  std::mt19937_64 rng(2024);
  const auto spaces = std::vector<SolutionSpace>{
      SolutionSpace::binary(6), SolutionSpace::integer(4, 3),
      SolutionSpace::permutation(4)};
  for (const auto& space : spaces) {
    const DenseAdjacencyOracle oracle(space);
    const Mixer mixer(space, 1e-10);
    for (int trial = 0; trial < 20; ++trial) {
      const double t = 2.0 * uniform01(rng) + 1e-6;
      auto psi = random_state(space, 1000 + static_cast<std::uint64_t>(trial));
      const auto expected = oracle.apply(t, psi.amplitudes());
      mixer.apply(psi, t);
      CHECK(max_norm_phase_adjusted(expected, psi.amplitudes()) < 1e-9);
    }
  }
}

TEST_CASE("unitarity: repeated applications preserve the norm") {
  std::mt19937_64 rng(5150);
  const auto spaces = std::vector<SolutionSpace>{
      SolutionSpace::binary(9), SolutionSpace::integer(5, 3),
      SolutionSpace::permutation(5)};
  for (const auto& space : spaces) {
    auto psi = StateVector::equal_superposition(space);
    const Mixer mixer(space, 1e-12);
    for (int rep = 0; rep < 20; ++rep) mixer.apply(psi, 0.1 + 0.05 * rep);
    CHECK(std::abs(psi.norm_sq() - 1.0) < 1e-10);
  }
}

TEST_CASE("semigroup property: walking t1 then t2 equals walking t1 + t2") {
  const auto spaces = std::vector<SolutionSpace>{
      SolutionSpace::binary(6), SolutionSpace::integer(4, 3),
      SolutionSpace::permutation(4)};
  for (const auto& space : spaces) {
    const Mixer mixer(space, 1e-11);
    auto two_step = random_state(space, 404);
    auto one_step = StateVector(space,
                                std::vector<Amplitude>(two_step.amplitudes().begin(),
                                                       two_step.amplitudes().end()));
    mixer.apply(two_step, 0.35);
    mixer.apply(two_step, 0.41);
    mixer.apply(one_step, 0.76);
    for (Index i = 0; i < two_step.size(); ++i)
      CHECK(std::abs(two_step[i] - one_step[i]) < 1e-9);
  }
}

TEST_CASE("phase-distance condition: hypercube closed form is exact") {
  const int n = 10;
  const auto space = SolutionSpace::binary(n);
  const double t = 0.3;
  const Index start = 0b1011001010;
  auto psi = StateVector::basis_state(space, start);
  apply_hypercube_mixer(psi, t);
  const double c = std::cos(t), s = std::sin(t);
  for (Index v = 0; v < space.size(); ++v) {
    const int h = std::popcount(start ^ v);
    Amplitude expected{1.0, 0.0};
    for (int b = 0; b < h; ++b) expected *= Amplitude{0.0, -s};
    for (int b = h; b < n; ++b) expected *= c;
    CHECK(std::abs(psi[v] - expected) < 1e-12);
  }
}

TEST_CASE("phase-distance condition: subsets share a phase, affine in h") {
  struct Case {
    SolutionSpace space;
    double phase_tol;
  };
  const double mixer_tol = 1e-12;
  const std::vector<Case> cases{{SolutionSpace::integer(5, 3), 1e-6},
                                {SolutionSpace::permutation(4), 10.0 * mixer_tol * 1e2}};
  for (const auto& [space, phase_tol] : cases) {
    const Index start = space.size() / 3;
    const Solution centre = space.solution_of(start);
    auto psi = StateVector::basis_state(space, start);
    Mixer(space, mixer_tol).apply(psi, 0.15);

    const int diameter = space.diameter();
    std::vector<Amplitude> representative(static_cast<std::size_t>(diameter) + 1,
                                          Amplitude{0.0, 0.0});
    Solution x;
    for (Index v = 0; v < space.size(); ++v) {
      space.solution_of(v, x);
      const auto h = static_cast<std::size_t>(space.graph_distance(centre, x));
      if (representative[h] == Amplitude{0.0, 0.0}) {
        representative[h] = psi[v];
        continue;
      }
      // Same-subset amplitudes must agree in phase (not necessarily in
      // magnitude); compare the args of a * conj(rep).
      const double delta = std::arg(psi[v] * std::conj(representative[h]));
      CHECK(std::abs(delta) < phase_tol);
    }
    // Consecutive-distance phase steps must all be equal.
    std::vector<double> steps;
    for (int h = 0; h < diameter; ++h) {
      const auto a = representative[static_cast<std::size_t>(h)];
      const auto b = representative[static_cast<std::size_t>(h) + 1];
      steps.push_back(std::arg(b * std::conj(a)));
    }
    for (std::size_t i = 1; i < steps.size(); ++i)
      CHECK(std::abs(principal_angle(steps[i] - steps[0])) < phase_tol);
    // The step is a genuine phase advance within (0, pi) in magnitude.
    CHECK(std::abs(steps[0]) > 1e-3);
    CHECK(std::abs(steps[0]) < 3.14159265358979323846);
  }
}

TEST_CASE("chebyshev degree grows with z and shrinks with looser tolerance") {
  CHECK(chebyshev_degree(0.0, 1e-10) == 0);
  CHECK(chebyshev_degree(1.0, 1e-10) < chebyshev_degree(10.0, 1e-10));
  CHECK(chebyshev_degree(5.0, 1e-6) <= chebyshev_degree(5.0, 1e-12));
}

TEST_CASE("mixers reject mismatched space kinds") {
  auto binary = StateVector::equal_superposition(SolutionSpace::binary(3));
  auto integer = StateVector::equal_superposition(SolutionSpace::integer(3, 3));
  auto perm = StateVector::equal_superposition(SolutionSpace::permutation(3));
  CHECK_THROWS_AS(apply_hypercube_mixer(integer, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(apply_hamming_mixer(perm, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(apply_transposition_mixer(binary, 0.1, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(apply_transposition_mixer(perm, 0.1, -1.0), std::invalid_argument);
}
