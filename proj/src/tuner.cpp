#include "qwoa/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qwoa/random.hpp"

namespace qwoa {

namespace {

// Zero-valued lambda_F components are floored here before the log transform
// so the search can still move them in either direction.
constexpr double kLambdaFloor = 0.05;
constexpr double kRelativeImprovement = 1e-6;

double logit(double x) { return std::log(x / (1.0 - x)); }
double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

// Shared state for one tune call: the mixer and the evaluation table are
// built once; the phase table is rebuilt only when lambda_T moves.
class Evaluator {
 public:
  Evaluator(const ProblemInstance& instance, int p, const TuneSpec& spec)
      : instance_(instance),
        p_(p),
        spec_(spec),
        mixer_(instance.space, spec.mixer_tol, PhaseConvention::PhaseFree,
               spec.workers),
        eval_values_(objective_table(instance, ObjectiveKind::LambdaF,
                                     spec.workers)) {
    if (p_ < 1) throw std::invalid_argument("iteration count p must be >= 1");
  }

  int dim() const {
    return 3 + (spec_.tune_lambda ? static_cast<int>(instance_.lambda_f.size()) : 0);
  }

  Sign sign() const { return instance_.sign; }

  TunePoint decode(std::span<const double> u) const {
    TunePoint pt;
    pt.gamma = std::exp(u[0]);
    pt.t = std::exp(u[1]);
    pt.beta = sigmoid(u[2]);
    if (spec_.tune_lambda) {
      pt.lambda_t.resize(u.size() - 3);
      for (std::size_t i = 3; i < u.size(); ++i) pt.lambda_t[i - 3] = std::exp(u[i]);
    }
    return pt;
  }

  std::vector<double> encode(const TunePoint& pt) const {
    std::vector<double> u{std::log(pt.gamma), std::log(pt.t), logit(pt.beta)};
    if (spec_.tune_lambda)
      for (const double l : pt.lambda_t) u.push_back(std::log(std::max(l, kLambdaFloor)));
    return u;
  }

  double evaluate(const TunePoint& pt, std::uint64_t evaluation_index) {
    refresh_phase_table(pt.lambda_t);
    StateVector psi = StateVector::equal_superposition(instance_.space);
    const auto [gammas, times] = schedule(p_, pt.gamma, pt.t, pt.beta);
    for (int i = 0; i < p_; ++i) {
      apply_phase_separation(psi, phase_values_,
                             gammas[static_cast<std::size_t>(i)] / sigma_,
                             instance_.sign);
      mixer_.apply(psi, times[static_cast<std::size_t>(i)]);
    }
    if (spec_.mode == EvaluationMode::ExactStatevector) {
      if (spec_.objective == TuneObjective::Expectation)
        return expectation(psi, eval_values_);
      return cvar(psi, eval_values_, spec_.cvar_alpha, instance_.sign);
    }
    const auto indices =
        sample(psi, spec_.shots, derive_seed(spec_.seed, evaluation_index));
    std::vector<double> observed(indices.size());
    for (std::size_t s = 0; s < indices.size(); ++s)
      observed[s] = eval_values_[static_cast<std::size_t>(indices[s])];
    if (spec_.objective == TuneObjective::Expectation)
      return mean_of_table(observed);
    return cvar_from_samples(observed, spec_.cvar_alpha, instance_.sign);
  }

 private:
  void refresh_phase_table(const std::vector<double>& lambda_t) {
    const std::vector<double>& effective =
        lambda_t.empty() ? instance_.lambda_f : lambda_t;
    if (have_phase_ && effective == phase_lambda_) return;
    ProblemInstance inst = instance_;
    inst.lambda_t = effective;
    phase_values_ = objective_table(inst, ObjectiveKind::LambdaT, spec_.workers);
    sigma_ = sigma_exact(inst, phase_values_);
    if (!(sigma_ > 0.0))
      throw std::invalid_argument("phase objective is constant; cannot tune");
    phase_lambda_ = effective;
    have_phase_ = true;
  }

  const ProblemInstance& instance_;
  int p_;
  TuneSpec spec_;
  Mixer mixer_;
  std::vector<double> eval_values_;
  std::vector<double> phase_values_;
  std::vector<double> phase_lambda_;
  double sigma_ = 0.0;
  bool have_phase_ = false;
};

// Evaluation bookkeeping shared by both optimisers. Values are minimised
// internally: maximisation problems are negated on the way in and restored
// in the log.
class SearchState {
 public:
  SearchState(Evaluator& eval, const TuneSpec& spec) : eval_(eval), spec_(spec) {}

  bool budget_left() const { return result_.evaluations < spec_.budget; }

  double probe(const TunePoint& pt) {
    const double user_value = eval_.evaluate(pt, result_.evaluations);
    const double signed_value =
        eval_.sign() == Sign::Maximize ? -user_value : user_value;
    if (result_.evaluations == 0 || signed_value < best_signed_) {
      best_signed_ = signed_value;
      result_.best = pt;
      result_.best_objective = user_value;
    }
    TuneEvaluation entry;
    entry.index = result_.evaluations;
    entry.point = pt;
    entry.objective = user_value;
    entry.best_so_far = result_.best_objective;
    result_.log.push_back(entry);
    ++result_.evaluations;
    return signed_value;
  }

  double best_signed() const { return best_signed_; }
  TuneResult& result() { return result_; }

 private:
  Evaluator& eval_;
  const TuneSpec& spec_;
  TuneResult result_;
  double best_signed_ = 0.0;
};

TuneResult nelder_mead(Evaluator& eval, const TuneSpec& spec,
                       const std::vector<double>& u0) {
  const int dim = eval.dim();
  const auto d = static_cast<double>(dim);
  // Adaptive simplex coefficients.
  const double refl = 1.0;
  const double expand = 1.0 + 2.0 / d;
  const double contract = 0.75 - 1.0 / (2.0 * d);
  const double shrink = 1.0 - 1.0 / d;
  const double step = 0.5;

  SearchState search(eval, spec);
  std::vector<std::vector<double>> vertex;
  std::vector<double> value;
  vertex.push_back(u0);
  value.push_back(search.probe(eval.decode(u0)));
  for (int i = 0; i < dim && search.budget_left(); ++i) {
    auto v = u0;
    v[static_cast<std::size_t>(i)] += step;
    vertex.push_back(v);
    value.push_back(search.probe(eval.decode(v)));
  }

  auto order = [&] {
    std::vector<std::size_t> idx(vertex.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return value[a] < value[b];
    });
    std::vector<std::vector<double>> v2(vertex.size());
    std::vector<double> f2(value.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      v2[i] = std::move(vertex[idx[i]]);
      f2[i] = value[idx[i]];
    }
    vertex.swap(v2);
    value.swap(f2);
  };

  double cycle_best = search.best_signed();
  std::uint64_t since_cycle = 0;
  const auto cycle_length = static_cast<std::uint64_t>(dim + 1);

  while (search.budget_left() &&
         vertex.size() == static_cast<std::size_t>(dim) + 1) {
    order();
    std::vector<double> centroid(static_cast<std::size_t>(dim), 0.0);
    for (std::size_t i = 0; i + 1 < vertex.size(); ++i)
      for (int c = 0; c < dim; ++c)
        centroid[static_cast<std::size_t>(c)] +=
            vertex[i][static_cast<std::size_t>(c)] / d;
    const auto worst = vertex.back();
    auto blend = [&](double w) {
      std::vector<double> u(static_cast<std::size_t>(dim));
      for (int c = 0; c < dim; ++c)
        u[static_cast<std::size_t>(c)] =
            centroid[static_cast<std::size_t>(c)] +
            w * (centroid[static_cast<std::size_t>(c)] -
                 worst[static_cast<std::size_t>(c)]);
      return u;
    };

    const auto reflected = blend(refl);
    const double f_r = search.probe(eval.decode(reflected));
    if (f_r < value.front() && search.budget_left()) {
      const auto expanded = blend(refl * expand);
      const double f_e = search.probe(eval.decode(expanded));
      if (f_e < f_r) {
        vertex.back() = expanded;
        value.back() = f_e;
      } else {
        vertex.back() = reflected;
        value.back() = f_r;
      }
    } else if (f_r < value[value.size() - 2]) {
      vertex.back() = reflected;
      value.back() = f_r;
    } else if (search.budget_left()) {
      const bool outside = f_r < value.back();
      const auto contracted = blend(outside ? refl * contract : -contract);
      const double f_c = search.probe(eval.decode(contracted));
      if (f_c < std::min(f_r, value.back())) {
        vertex.back() = contracted;
        value.back() = f_c;
      } else {
        for (std::size_t i = 1; i < vertex.size() && search.budget_left(); ++i) {
          for (int c = 0; c < dim; ++c)
            vertex[i][static_cast<std::size_t>(c)] =
                vertex[0][static_cast<std::size_t>(c)] +
                shrink * (vertex[i][static_cast<std::size_t>(c)] -
                          vertex[0][static_cast<std::size_t>(c)]);
          value[i] = search.probe(eval.decode(vertex[i]));
        }
      }
    }

    ++since_cycle;
    if (since_cycle >= cycle_length) {
      const double improvement = cycle_best - search.best_signed();
      if (improvement <= kRelativeImprovement * (std::abs(cycle_best) + 1e-12)) {
        search.result().converged = true;
        break;
      }
      cycle_best = search.best_signed();
      since_cycle = 0;
    }
  }
  return search.result();
}

// Quasi-Newton with central finite differences; exact-statevector mode only,
// mirroring how reference parameter values are usually produced in
// simulation studies.
TuneResult bfgs(Evaluator& eval, const TuneSpec& spec,
                const std::vector<double>& u0) {
  if (spec.mode != EvaluationMode::ExactStatevector)
    throw std::invalid_argument("bfgs tuning requires exact-statevector mode");
  const int dim = eval.dim();
  const auto nd = static_cast<std::size_t>(dim);
  const double fd_step = 1e-5;

  SearchState search(eval, spec);
  std::vector<double> u = u0;
  double f = search.probe(eval.decode(u));

  // Inverse Hessian approximation, started at identity.
  std::vector<double> h(nd * nd, 0.0);
  for (std::size_t i = 0; i < nd; ++i) h[i * nd + i] = 1.0;

  auto gradient = [&](const std::vector<double>& at, std::vector<double>& g) {
    for (std::size_t i = 0; i < nd && search.budget_left(); ++i) {
      auto plus = at, minus = at;
      plus[i] += fd_step;
      minus[i] -= fd_step;
      const double fp = search.probe(eval.decode(plus));
      if (!search.budget_left()) return false;
      const double fm = search.probe(eval.decode(minus));
      g[i] = (fp - fm) / (2.0 * fd_step);
    }
    return search.budget_left();
  };

  std::vector<double> g(nd, 0.0), g_new(nd, 0.0);
  if (!gradient(u, g)) return search.result();

  while (search.budget_left()) {
    std::vector<double> direction(nd, 0.0);
    for (std::size_t i = 0; i < nd; ++i)
      for (std::size_t j = 0; j < nd; ++j) direction[i] -= h[i * nd + j] * g[j];

    double slope = 0.0;
    for (std::size_t i = 0; i < nd; ++i) slope += direction[i] * g[i];
    if (slope >= 0.0) {  // reset to steepest descent
      for (std::size_t i = 0; i < nd; ++i) {
        std::fill(h.begin() + static_cast<std::ptrdiff_t>(i * nd),
                  h.begin() + static_cast<std::ptrdiff_t>((i + 1) * nd), 0.0);
        h[i * nd + i] = 1.0;
        direction[i] = -g[i];
      }
      slope = 0.0;
      for (std::size_t i = 0; i < nd; ++i) slope += direction[i] * g[i];
      if (slope >= 0.0) break;
    }

    // Backtracking Armijo line search.
    double step = 1.0;
    double f_new = f;
    std::vector<double> u_new = u;
    bool accepted = false;
    while (search.budget_left() && step > 1e-10) {
      for (std::size_t i = 0; i < nd; ++i) u_new[i] = u[i] + step * direction[i];
      f_new = search.probe(eval.decode(u_new));
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    if (!gradient(u_new, g_new)) break;

    // BFGS update of the inverse Hessian.
    std::vector<double> s(nd), y(nd);
    double sy = 0.0;
    for (std::size_t i = 0; i < nd; ++i) {
      s[i] = u_new[i] - u[i];
      y[i] = g_new[i] - g[i];
      sy += s[i] * y[i];
    }
    if (sy > 1e-12) {
      std::vector<double> hy(nd, 0.0);
      for (std::size_t i = 0; i < nd; ++i)
        for (std::size_t j = 0; j < nd; ++j) hy[i] += h[i * nd + j] * y[j];
      double yhy = 0.0;
      for (std::size_t i = 0; i < nd; ++i) yhy += y[i] * hy[i];
      for (std::size_t i = 0; i < nd; ++i)
        for (std::size_t j = 0; j < nd; ++j)
          h[i * nd + j] += (sy + yhy) * s[i] * s[j] / (sy * sy) -
                           (hy[i] * s[j] + s[i] * hy[j]) / sy;
    }

    const double improvement = f - f_new;
    u = u_new;
    f = f_new;
    g = g_new;
    if (improvement <= kRelativeImprovement * (std::abs(f) + 1e-12)) {
      search.result().converged = true;
      break;
    }
  }
  return search.result();
}

}  // namespace

double evaluate_params(const ProblemInstance& instance, int p,
                       const TunePoint& point, const TuneSpec& spec,
                       std::uint64_t evaluation_index) {
  Evaluator eval(instance, p, spec);
  return eval.evaluate(point, evaluation_index);
}

TuneResult tune(const ProblemInstance& instance, int p, const TuneSpec& spec) {
  if (spec.budget < 1) throw std::invalid_argument("budget must be >= 1");
  if (spec.tune_lambda && instance.lambda_f.empty())
    throw std::invalid_argument("instance has no penalty coefficients to tune");
  Evaluator eval(instance, p, spec);
  TunePoint init;
  if (spec.initial.has_value()) {
    init = *spec.initial;
  } else {
    init.gamma = 1.0;
    init.t = 0.1;
    init.beta = 1.0 / static_cast<double>(std::max(p, 2));
    if (spec.tune_lambda) init.lambda_t = instance.lambda_f;
  }
  if (spec.tune_lambda && init.lambda_t.empty()) init.lambda_t = instance.lambda_f;
  const auto u0 = eval.encode(init);

  if (spec.method == TuneMethod::NelderMead) return nelder_mead(eval, spec, u0);
  return bfgs(eval, spec, u0);
}

}  // namespace qwoa
