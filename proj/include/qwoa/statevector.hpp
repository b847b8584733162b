#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qwoa/solution_space.hpp"

namespace qwoa {

using Amplitude = std::complex<double>;

enum class Sign { Maximize, Minimize };

// Memory ceiling for dense states (2^24 amplitudes = 256 MiB).
inline constexpr Index kStateCeiling = 1ull << 24;

// Dense complex state over the feasible space. Amplitudes are owned and the
// (small, value-type) space descriptor is carried along for indexing.
class StateVector {
 public:
  StateVector(SolutionSpace space, std::vector<Amplitude> amplitudes);

  static StateVector equal_superposition(const SolutionSpace& space);
  static StateVector basis_state(const SolutionSpace& space, Index i);

  const SolutionSpace& space() const { return space_; }
  Index size() const { return static_cast<Index>(amps_.size()); }

  std::span<const Amplitude> amplitudes() const { return amps_; }
  std::span<Amplitude> amplitudes() { return amps_; }
  const Amplitude& operator[](Index i) const { return amps_[static_cast<std::size_t>(i)]; }
  Amplitude& operator[](Index i) { return amps_[static_cast<std::size_t>(i)]; }

  double norm_sq() const;

 private:
  SolutionSpace space_;
  std::vector<Amplitude> amps_;
};

double probability_of(const StateVector& state, const Solution& x);

// Exact expectation sum_i |a_i|^2 f(i) from a precomputed value table.
double expectation(const StateVector& state, std::span<const double> values);
double expectation(const StateVector& state,
                   const std::function<double(const Solution&)>& f);

// Conditional value at risk: mean of f over the best-alpha tail of the exact
// measurement distribution, fractional boundary weight included.
double cvar(const StateVector& state, std::span<const double> values,
            double alpha, Sign sign);
double cvar_from_samples(std::span<const double> values, double alpha, Sign sign);

// Seeded measurement sampling by inverse-CDF over the cumulative probability
// array; bit-reproducible for a fixed seed.
std::vector<Index> sample(const StateVector& state, std::uint64_t shots,
                          std::uint64_t seed);
std::vector<Solution> sample_solutions(const StateVector& state,
                                       std::uint64_t shots, std::uint64_t seed);

}  // namespace qwoa
