#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qwoa/analysis.hpp"
#include "qwoa/engine.hpp"
#include "qwoa/errors.hpp"
#include "qwoa/parallel.hpp"
#include "qwoa/problems.hpp"
#include "qwoa/random.hpp"
#include "qwoa/serialization.hpp"
#include "qwoa/tuner.hpp"

namespace fs = std::filesystem;
using namespace qwoa;

namespace {

// Digest over the full flag set so every emitted file can be traced back to
// the exact invocation that produced it.
std::string config_digest(const std::vector<std::string>& parts) {
  std::ostringstream joined;
  for (const auto& p : parts) joined << p << '\n';
  return fnv1a_hex(joined.str());
}

struct GenerateArgs {
  std::string family;
  int n = 0;
  int k = 3;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_generate(const GenerateArgs& args) {
  const Family family = family_from_name(args.family);
  const ProblemInstance instance = generate_instance(family, args.n, args.k, args.seed);
  const fs::path out(args.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_instance(instance, out);
  std::cout << "instance " << out.string() << " digest=" << instance_digest(instance)
            << " N=" << instance.space.size() << "\n";
  return 0;
}

struct RunArgs {
  std::string instance;
  int p = 10;
  double gamma = 1.0;
  double t = 0.1;
  double beta = 0.5;
  std::vector<double> lambda_t;
  std::uint64_t shots = 10000;
  std::uint64_t seed = 1;
  double sigma = 0.0;
  std::uint64_t sigma_samples = 0;
  double mixer_tol = 1e-10;
  int bins = 200;
  int workers = default_worker_count();
  std::string out;
};

int cmd_run(const RunArgs& args) {
  const ProblemInstance instance = load_instance(args.instance);
  RunParams params;
  params.p = args.p;
  params.gamma = args.gamma;
  params.t = args.t;
  params.beta = args.beta;
  if (!args.lambda_t.empty()) params.lambda_t = args.lambda_t;
  params.shots = args.shots;
  params.seed = args.seed;
  params.mixer_tol = args.mixer_tol;
  params.workers = args.workers;
  params.sigma = args.sigma;
  if (args.sigma_samples > 0 && !(args.sigma > 0.0))
    params.sigma = sigma_estimate(instance, args.sigma_samples,
                                  derive_seed(args.seed, 0xabcdULL));

  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);
  const std::string digest = config_digest(
      {"run", instance_digest(instance), std::to_string(args.p),
       format_double(args.gamma), format_double(args.t), format_double(args.beta),
       format_double(params.sigma), std::to_string(args.shots),
       std::to_string(args.seed), format_double(args.mixer_tol),
       std::to_string(args.bins)});

  RunManifest manifest;
  manifest.config_digest = digest;
  manifest.instance_digest = instance_digest(instance);
  manifest.instance_path = args.instance;
  manifest.params = params;

  TraceTable table;
  if (args.shots > 0) {
    const SolveResult result = solve(instance, params, args.shots);
    manifest.sigma = result.prepared.sigma;
    manifest.trace = result.prepared.trace;
    manifest.sample_counts = result.sample_counts;
    manifest.best = result.best;
    manifest.best_value = result.best_value;
    manifest.best_value_lambda_f = result.best_value_lambda_f;
    manifest.has_samples = true;
    table.tracked = result.prepared.trace.tracked;
    table.probability = result.prepared.trace.tracked_probability;
    table.expectation = result.prepared.trace.expectation;
    table.norm_drift = result.prepared.trace.norm_drift;
    write_histogram_csv(out_dir / "histogram.csv", digest,
                        ratio_histogram(result.prepared.state, instance, args.bins));
  } else {
    const PreparedState prepared = prepare_amplified_state(instance, params);
    manifest.sigma = prepared.sigma;
    manifest.trace = prepared.trace;
    manifest.has_samples = false;
    table.tracked = prepared.trace.tracked;
    table.probability = prepared.trace.tracked_probability;
    table.expectation = prepared.trace.expectation;
    table.norm_drift = prepared.trace.norm_drift;
    write_histogram_csv(out_dir / "histogram.csv", digest,
                        ratio_histogram(prepared.state, instance, args.bins));
  }
  write_trace_csv(out_dir / "trace.csv", digest, table);
  save_manifest(manifest, out_dir / "manifest.json");
  std::cout << "run " << out_dir.string() << " digest=" << digest << "\n";
  return 0;
}

struct TuneArgs {
  std::string instance;
  int p = 10;
  std::string objective = "expectation";
  double cvar_alpha = 0.1;
  std::string mode = "exact";
  std::uint64_t shots = 1000;
  std::uint64_t budget = 300;
  std::uint64_t seed = 1;
  bool tune_lambda = false;
  std::string method = "nelder-mead";
  double mixer_tol = 1e-10;
  int workers = default_worker_count();
  std::string out;
};

int cmd_tune(const TuneArgs& args) {
  const ProblemInstance instance = load_instance(args.instance);
  TuneSpec spec;
  if (args.objective == "expectation") {
    spec.objective = TuneObjective::Expectation;
  } else if (args.objective == "cvar") {
    spec.objective = TuneObjective::CVar;
    spec.cvar_alpha = args.cvar_alpha;
  } else {
    throw CLI::ValidationError("--objective must be expectation or cvar");
  }
  if (args.mode == "exact") {
    spec.mode = EvaluationMode::ExactStatevector;
  } else if (args.mode == "shots") {
    spec.mode = EvaluationMode::ShotBased;
    spec.shots = args.shots;
  } else {
    throw CLI::ValidationError("--mode must be exact or shots");
  }
  if (args.method == "nelder-mead") {
    spec.method = TuneMethod::NelderMead;
  } else if (args.method == "bfgs") {
    spec.method = TuneMethod::Bfgs;
  } else {
    throw CLI::ValidationError("--method must be nelder-mead or bfgs");
  }
  spec.budget = args.budget;
  spec.seed = args.seed;
  spec.tune_lambda = args.tune_lambda;
  spec.mixer_tol = args.mixer_tol;
  spec.workers = args.workers;

  const TuneResult result = tune(instance, args.p, spec);

  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);
  TuneReport report;
  report.config_digest = config_digest(
      {"tune", instance_digest(instance), std::to_string(args.p), args.objective,
       args.mode, args.method, std::to_string(args.budget), std::to_string(args.seed),
       args.tune_lambda ? "lambda" : "nolambda"});
  report.instance_digest = instance_digest(instance);
  report.p = args.p;
  report.spec = spec;
  report.result = result;
  save_tune_report(report, out_dir / "tune_report.json");
  std::cout << "tune " << out_dir.string() << " best gamma=" << result.best.gamma
            << " t=" << result.best.t << " beta=" << result.best.beta
            << " objective=" << result.best_objective
            << (result.converged ? "" : " (budget exhausted)") << "\n";
  return 0;
}

struct AnalyzeArgs {
  std::string instance;
  bool exhaustive = false;
  std::uint64_t refs = 256;
  std::uint64_t members = 4096;
  std::uint64_t seed = 1;
  int bins = 200;
  bool emit_bins = false;
  std::string objective = "lambda_f";
  int workers = default_worker_count();
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& args) {
  const ProblemInstance instance = load_instance(args.instance);
  ConditionFitOptions options;
  options.exhaustive = args.exhaustive;
  options.reference_count = args.refs;
  options.members_per_subset = args.members;
  options.seed = args.seed;
  options.workers = args.workers;
  if (args.objective == "lambda_f") {
    options.objective = ObjectiveKind::LambdaF;
  } else if (args.objective == "lambda_t") {
    options.objective = ObjectiveKind::LambdaT;
  } else if (args.objective == "raw") {
    options.objective = ObjectiveKind::Raw;
  } else {
    throw CLI::ValidationError("--objective must be raw, lambda_f or lambda_t");
  }

  const ConditionFit fit = condition_fit_all(instance, options);
  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);
  const std::string digest = config_digest(
      {"analyze", instance_digest(instance), args.exhaustive ? "exhaustive" : "sampled",
       std::to_string(args.refs), std::to_string(args.members),
       std::to_string(args.seed), std::to_string(args.bins), args.objective});
  write_condition_fit_csv(out_dir / "condition_fit.csv", digest, fit);
  if (args.emit_bins)
    write_condition_bins_csv(out_dir / "condition_bins.csv", digest,
                             binned_condition_summary(fit, args.bins));
  std::cout << "analyze " << out_dir.string() << " digest=" << digest << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and experiment harness for non-variational "
               "quantum-walk optimisation"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a random problem instance");
  generate->add_option("--family", gen.family,
                       "Problem family: maxcut, mis, kmeans, cflp, qap")->required();
  generate->add_option("--n", gen.n, "Variable count")->required();
  generate->add_option("--k", gen.k, "Alphabet size (kmeans/cflp only)");
  generate->add_option("--seed", gen.seed, "Generator seed");
  generate->add_option("--out", gen.out, "Output instance path")->required();

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Prepare an amplified state, sample it, "
                                            "and emit trace/histogram tables");
  run_cmd->add_option("--instance", run.instance, "Instance file")->required();
  run_cmd->add_option("--p", run.p, "Iteration count");
  run_cmd->add_option("--gamma", run.gamma, "Phase-separation magnitude")->required();
  run_cmd->add_option("--t", run.t, "Walk time")->required();
  run_cmd->add_option("--beta", run.beta, "Schedule shape in (0,1)")->required();
  run_cmd->add_option("--lambda-t", run.lambda_t,
                      "Tunable penalty coefficients for the phase objective");
  run_cmd->add_option("--shots", run.shots, "Shot budget (0 = analysis only)");
  run_cmd->add_option("--seed", run.seed, "Sampling seed");
  run_cmd->add_option("--sigma", run.sigma, "Override sigma (default: exact)");
  run_cmd->add_option("--sigma-samples", run.sigma_samples,
                      "Estimate sigma from this many uniform samples");
  run_cmd->add_option("--tol", run.mixer_tol, "Permutation mixer tolerance");
  run_cmd->add_option("--bins", run.bins, "Histogram bin count");
  run_cmd->add_option("--workers", run.workers, "Data-parallel worker cap");
  run_cmd->add_option("--out", run.out, "Output directory")->required();

  TuneArgs tun;
  auto* tune_cmd = app.add_subcommand("tune", "Locally optimise gamma, t, beta "
                                              "(and lambda_T) for an instance");
  tune_cmd->add_option("--instance", tun.instance, "Instance file")->required();
  tune_cmd->add_option("--p", tun.p, "Iteration count");
  tune_cmd->add_option("--objective", tun.objective, "expectation or cvar");
  tune_cmd->add_option("--cvar-alpha", tun.cvar_alpha, "CVaR tail fraction");
  tune_cmd->add_option("--mode", tun.mode, "exact or shots");
  tune_cmd->add_option("--shots", tun.shots, "Shots per evaluation (shot mode)");
  tune_cmd->add_option("--budget", tun.budget, "Max evaluations");
  tune_cmd->add_option("--seed", tun.seed, "Seed for shot-mode sampling");
  tune_cmd->add_flag("--tune-lambda", tun.tune_lambda,
                     "Also tune the penalty coefficients");
  tune_cmd->add_option("--method", tun.method, "nelder-mead or bfgs");
  tune_cmd->add_option("--tol", tun.mixer_tol, "Permutation mixer tolerance");
  tune_cmd->add_option("--workers", tun.workers, "Data-parallel worker cap");
  tune_cmd->add_option("--out", tun.out, "Output directory")->required();

  AnalyzeArgs ana;
  auto* analyze_cmd = app.add_subcommand("analyze", "Fit the distance-subset "
                                                    "objective statistics");
  analyze_cmd->add_option("--instance", ana.instance, "Instance file")->required();
  analyze_cmd->add_flag("--exhaustive", ana.exhaustive, "Use every solution");
  analyze_cmd->add_option("--refs", ana.refs, "Reference solutions (sampled mode)");
  analyze_cmd->add_option("--members", ana.members,
                          "Sampled members per subset (sampled mode)");
  analyze_cmd->add_option("--seed", ana.seed, "Sampling seed");
  analyze_cmd->add_option("--bins", ana.bins, "Bin count for the binned summary");
  analyze_cmd->add_flag("--emit-bins", ana.emit_bins, "Also write condition_bins.csv");
  analyze_cmd->add_option("--objective", ana.objective, "raw, lambda_f or lambda_t");
  analyze_cmd->add_option("--workers", ana.workers, "Data-parallel worker cap");
  analyze_cmd->add_option("--out", ana.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
    if (*generate) return cmd_generate(gen);
    if (*run_cmd) return cmd_run(run);
    if (*tune_cmd) return cmd_tune(tun);
    if (*analyze_cmd) return cmd_analyze(ana);
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
