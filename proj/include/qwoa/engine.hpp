#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qwoa/mixers.hpp"
#include "qwoa/problems.hpp"
#include "qwoa/statevector.hpp"

namespace qwoa {

// Parameters of one amplified-state preparation: iteration count p, the
// (gamma, t, beta) schedule controls, the objective spread sigma used to
// normalise phase angles, and the sampling setup.
struct RunParams {
  int p = 10;
  double gamma = 1.0;
  double t = 0.1;
  double beta = 0.5;
  double sigma = 0.0;  // <= 0 requests the exact value from the phase table
  std::optional<std::vector<double>> lambda_t;  // overrides instance lambda_t
  std::uint64_t shots = 0;
  std::uint64_t seed = 1;
  double mixer_tol = 1e-10;
  PhaseConvention convention = PhaseConvention::PhaseFree;
  int workers = 1;

  void validate() const;
};

// gamma_i rises linearly over [beta*gamma, gamma] while t_i falls over
// [beta*t, t]; endpoints are attained exactly. p = 1 degenerates to (gamma, t).
std::pair<std::vector<double>, std::vector<double>> schedule(int p, double gamma,
                                                             double t, double beta);

// Diagonal phase unitary: amplitude_x *= exp(-i * s * angle * f(x)) with
// s = +1 for maximisation and -1 for minimisation.
void apply_phase_separation(StateVector& state, std::span<const double> values,
                            double angle, Sign sign);

// Per-iteration record of an amplified-state preparation; entry 0 describes
// the initial equal superposition, so all rows have length p + 1.
struct IterationTrace {
  std::vector<Index> tracked;
  std::vector<std::vector<double>> tracked_probability;  // (p+1) x |tracked|
  std::vector<double> expectation;                       // of f_lambda_F
  std::vector<double> norm_drift;                        // | ||psi||^2 - 1 |
};

struct PreparedState {
  StateVector state;
  IterationTrace trace;
  double sigma = 0.0;
};

// Alternates phase separation (with the lambda_T objective) and the mixing
// walk for p iterations starting from the equal superposition. `tracked`
// defaults to the brute-force optimum set of the lambda_F objective.
PreparedState prepare_amplified_state(const ProblemInstance& instance,
                                      const RunParams& params,
                                      const std::vector<Index>* tracked = nullptr);

struct SolveResult {
  Solution best;
  double best_value = 0.0;          // under the selector objective
  double best_value_lambda_f = 0.0; // always reported for comparison
  std::vector<std::pair<Index, std::uint64_t>> sample_counts;  // ascending index
  PreparedState prepared;
};

// Prepares the amplified state once, measures `shot_budget` samples and
// returns the best solution by the selector objective (lambda_F by default).
SolveResult solve(const ProblemInstance& instance, const RunParams& params,
                  std::uint64_t shot_budget,
                  ObjectiveKind selector = ObjectiveKind::LambdaF);

}  // namespace qwoa
