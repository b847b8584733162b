#include "qwoa/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qwoa {

void RunParams::validate() const {
  if (p < 1) throw std::invalid_argument("iteration count p must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(t > 0.0)) throw std::invalid_argument("walk time t must be positive");
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("beta must lie in (0, 1)");
  if (!(mixer_tol > 0.0)) throw std::invalid_argument("mixer_tol must be positive");
}

std::pair<std::vector<double>, std::vector<double>> schedule(int p, double gamma,
                                                             double t, double beta) {
  if (p < 1) throw std::invalid_argument("iteration count p must be >= 1");
  if (!(gamma > 0.0 && t > 0.0)) throw std::invalid_argument("gamma, t must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
  std::vector<double> gammas(static_cast<std::size_t>(p));
  std::vector<double> times(static_cast<std::size_t>(p));
  if (p == 1) {
    gammas[0] = gamma;
    times[0] = t;
    return {gammas, times};
  }
  // Convex combination so endpoints are exact in floating point.
  for (int i = 0; i < p; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(p - 1);
    gammas[static_cast<std::size_t>(i)] = (beta * gamma) * (1.0 - s) + gamma * s;
    times[static_cast<std::size_t>(i)] = t * (1.0 - s) + (beta * t) * s;
  }
  return {gammas, times};
}

void apply_phase_separation(StateVector& state, std::span<const double> values,
                            double angle, Sign sign) {
  if (values.size() != state.amplitudes().size())
    throw std::invalid_argument("phase table length mismatch");
  if (!std::isfinite(angle)) throw std::invalid_argument("phase angle must be finite");
  const double s = sign == Sign::Maximize ? 1.0 : -1.0;
  auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i)
    amps[i] *= std::exp(Amplitude{0.0, -s * angle * values[i]});
}

namespace {

ProblemInstance with_lambda_t(const ProblemInstance& instance,
                              const RunParams& params) {
  if (!params.lambda_t.has_value()) return instance;
  ProblemInstance copy = instance;
  copy.lambda_t = *params.lambda_t;
  return copy;
}

}  // namespace

PreparedState prepare_amplified_state(const ProblemInstance& instance,
                                      const RunParams& params,
                                      const std::vector<Index>* tracked) {
  params.validate();
  const ProblemInstance inst = with_lambda_t(instance, params);
  const auto phase_values = objective_table(inst, ObjectiveKind::LambdaT, params.workers);
  const bool same_lambda = inst.lambda_t == inst.lambda_f;
  const auto eval_values =
      same_lambda ? phase_values : objective_table(inst, ObjectiveKind::LambdaF, params.workers);

  double sigma = params.sigma;
  if (!(sigma > 0.0)) sigma = sigma_exact(inst, phase_values);
  if (!(sigma > 0.0))
    throw std::invalid_argument("phase objective is constant; sigma is zero");

  std::vector<Index> tracked_set;
  if (tracked != nullptr) {
    tracked_set = *tracked;
  } else {
    tracked_set = optimum_of_table(inst, eval_values).argopt;
  }

  const auto [gammas, times] = schedule(params.p, params.gamma, params.t, params.beta);
  Mixer mixer(inst.space, params.mixer_tol, params.convention, params.workers);

  PreparedState out{StateVector::equal_superposition(inst.space), {}, sigma};
  out.trace.tracked = tracked_set;
  auto record = [&](const StateVector& psi) {
    std::vector<double> probs;
    probs.reserve(tracked_set.size());
    for (Index i : tracked_set) probs.push_back(std::norm(psi[i]));
    out.trace.tracked_probability.push_back(std::move(probs));
    out.trace.expectation.push_back(expectation(psi, eval_values));
    out.trace.norm_drift.push_back(std::abs(psi.norm_sq() - 1.0));
  };
  record(out.state);
  for (int i = 0; i < params.p; ++i) {
    apply_phase_separation(out.state, phase_values,
                           gammas[static_cast<std::size_t>(i)] / sigma, inst.sign);
    mixer.apply(out.state, times[static_cast<std::size_t>(i)]);
    record(out.state);
  }
  return out;
}

SolveResult solve(const ProblemInstance& instance, const RunParams& params,
                  std::uint64_t shot_budget, ObjectiveKind selector) {
  if (shot_budget < 1) throw std::invalid_argument("shot budget must be >= 1");
  SolveResult result{{}, 0.0, 0.0, {}, prepare_amplified_state(instance, params)};
  const auto shots = sample(result.prepared.state, shot_budget, params.seed);
  std::map<Index, std::uint64_t> counts;
  for (Index s : shots) ++counts[s];

  const bool maximize = instance.sign == Sign::Maximize;
  bool have_best = false;
  Index best_index = 0;
  double best_value = 0.0;
  Solution x;
  for (const auto& [idx, count] : counts) {
    result.sample_counts.emplace_back(idx, count);
    instance.space.solution_of(idx, x);
    const double v = evaluate(instance, x, selector);
    if (!have_best || (maximize ? v > best_value : v < best_value)) {
      have_best = true;
      best_value = v;
      best_index = idx;
    }
  }
  instance.space.solution_of(best_index, result.best);
  result.best_value = best_value;
  result.best_value_lambda_f = evaluate(instance, result.best, ObjectiveKind::LambdaF);
  return result;
}

}  // namespace qwoa
