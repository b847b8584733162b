#include "qwoa/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qwoa/random.hpp"

namespace qwoa {

StateVector::StateVector(SolutionSpace space, std::vector<Amplitude> amplitudes)
    : space_(space), amps_(std::move(amplitudes)) {
  if (static_cast<Index>(amps_.size()) != space_.size())
    throw std::invalid_argument("amplitude count does not match space size");
}

StateVector StateVector::equal_superposition(const SolutionSpace& space) {
  if (space.size() > kStateCeiling)
    throw std::invalid_argument("space exceeds the dense state ceiling");
  const double amp = 1.0 / std::sqrt(static_cast<double>(space.size()));
  return StateVector(space, std::vector<Amplitude>(static_cast<std::size_t>(space.size()),
                                                   Amplitude{amp, 0.0}));
}

StateVector StateVector::basis_state(const SolutionSpace& space, Index i) {
  if (space.size() > kStateCeiling)
    throw std::invalid_argument("space exceeds the dense state ceiling");
  if (i >= space.size()) throw std::out_of_range("basis index out of range");
  std::vector<Amplitude> amps(static_cast<std::size_t>(space.size()), Amplitude{0.0, 0.0});
  amps[static_cast<std::size_t>(i)] = Amplitude{1.0, 0.0};
  return StateVector(space, std::move(amps));
}

double StateVector::norm_sq() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

double probability_of(const StateVector& state, const Solution& x) {
  return std::norm(state[state.space().index_of(x)]);
}

double expectation(const StateVector& state, std::span<const double> values) {
  if (values.size() != state.amplitudes().size())
    throw std::invalid_argument("value table length mismatch");
  double s = 0.0;
  const auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) s += std::norm(amps[i]) * values[i];
  return s;
}

double expectation(const StateVector& state,
                   const std::function<double(const Solution&)>& f) {
  double s = 0.0;
  Solution x;
  const auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    state.space().solution_of(static_cast<Index>(i), x);
    s += std::norm(amps[i]) * f(x);
  }
  return s;
}

namespace {

double cvar_of_distribution(std::vector<std::pair<double, double>>& outcome,
                            double alpha, Sign sign) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("cvar alpha must lie in (0, 1]");
  // Best outcomes first: descending f for maximisation, ascending otherwise.
  if (sign == Sign::Maximize)
    std::sort(outcome.begin(), outcome.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
  else
    std::sort(outcome.begin(), outcome.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  double mass = 0.0, acc = 0.0;
  for (const auto& [value, weight] : outcome) {
    if (mass >= alpha) break;
    const double take = std::min(weight, alpha - mass);
    acc += take * value;
    mass += take;
  }
  return acc / alpha;
}

}  // namespace

double cvar(const StateVector& state, std::span<const double> values,
            double alpha, Sign sign) {
  if (values.size() != state.amplitudes().size())
    throw std::invalid_argument("value table length mismatch");
  std::vector<std::pair<double, double>> outcome(values.size());
  const auto amps = state.amplitudes();
  for (std::size_t i = 0; i < values.size(); ++i)
    outcome[i] = {values[i], std::norm(amps[i])};
  return cvar_of_distribution(outcome, alpha, sign);
}

double cvar_from_samples(std::span<const double> values, double alpha, Sign sign) {
  if (values.empty()) throw std::invalid_argument("empty sample set");
  const double w = 1.0 / static_cast<double>(values.size());
  std::vector<std::pair<double, double>> outcome(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) outcome[i] = {values[i], w};
  return cvar_of_distribution(outcome, alpha, sign);
}

std::vector<Index> sample(const StateVector& state, std::uint64_t shots,
                          std::uint64_t seed) {
  const auto amps = state.amplitudes();
  std::vector<double> cum(amps.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    acc += std::norm(amps[i]);
    cum[i] = acc;
  }
  std::mt19937_64 rng(seed);
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(shots));
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double r = uniform01(rng) * acc;
    const auto it = std::upper_bound(cum.begin(), cum.end(), r);
    out.push_back(static_cast<Index>(
        std::min<std::ptrdiff_t>(it - cum.begin(),
                                 static_cast<std::ptrdiff_t>(cum.size()) - 1)));
  }
  return out;
}

std::vector<Solution> sample_solutions(const StateVector& state,
                                       std::uint64_t shots, std::uint64_t seed) {
  const auto indices = sample(state, shots, seed);
  std::vector<Solution> out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i)
    state.space().solution_of(indices[i], out[i]);
  return out;
}

}  // namespace qwoa
