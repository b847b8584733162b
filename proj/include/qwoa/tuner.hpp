#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qwoa/engine.hpp"
#include "qwoa/problems.hpp"

namespace qwoa {

enum class TuneObjective { Expectation, CVar };
enum class EvaluationMode { ExactStatevector, ShotBased };
enum class TuneMethod { NelderMead, Bfgs };

// Point in tuning space: the schedule controls plus, for constrained
// problems, the tunable penalty coefficients used in the phase unitary.
struct TunePoint {
  double gamma = 1.0;
  double t = 0.1;
  double beta = 0.5;
  std::vector<double> lambda_t;  // empty when penalties are not tuned
};

struct TuneSpec {
  TuneObjective objective = TuneObjective::Expectation;
  double cvar_alpha = 0.1;
  std::optional<TunePoint> initial;  // default (1, 0.1, 1/p, lambda_F)
  bool tune_lambda = false;
  EvaluationMode mode = EvaluationMode::ExactStatevector;
  std::uint64_t shots = 1000;  // per evaluation in shot mode
  std::uint64_t budget = 300;  // max state preparations (evaluations)
  std::uint64_t seed = 1;
  TuneMethod method = TuneMethod::NelderMead;
  double mixer_tol = 1e-10;
  int workers = 1;
};

struct TuneEvaluation {
  std::uint64_t index = 0;
  TunePoint point;
  double objective = 0.0;
  double best_so_far = 0.0;
};

struct TuneResult {
  TunePoint best;
  double best_objective = 0.0;
  std::vector<TuneEvaluation> log;
  bool converged = false;     // false when the budget ran out first
  std::uint64_t evaluations = 0;
};

// One amplified-state preparation evaluated under the lambda_F objective
// (expectation or CVaR), exactly from the statevector or from seeded shots.
double evaluate_params(const ProblemInstance& instance, int p,
                       const TunePoint& point, const TuneSpec& spec,
                       std::uint64_t evaluation_index = 0);

// Bounded derivative-free local search over {gamma, t, beta} (and lambda_T
// when enabled), initialised at (1, 0.1, 1/p, lambda_F). gamma and t move in
// log space and beta through a logit so the bound constraints are implicit.
TuneResult tune(const ProblemInstance& instance, int p, const TuneSpec& spec);

}  // namespace qwoa
