#include "qwoa/serialization.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qwoa/errors.hpp"

namespace qwoa {

using ordered_json = nlohmann::ordered_json;

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string format_double(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw io_error("write failed: " + path.string());
}

namespace {

ordered_json payload_to_json(const ProblemInstance& instance) {
  ordered_json payload;
  switch (instance.family) {
    case Family::Maxcut: {
      const auto& data = std::get<MaxcutData>(instance.data);
      ordered_json edges = ordered_json::array();
      for (const auto& e : data.edges) edges.push_back({e.u, e.v, e.w});
      payload["edges"] = std::move(edges);
      break;
    }
    case Family::Mis: {
      const auto& data = std::get<MisData>(instance.data);
      ordered_json edges = ordered_json::array();
      for (const auto& [u, v] : data.edges) edges.push_back({u, v});
      payload["edges"] = std::move(edges);
      break;
    }
    case Family::KMeans: {
      const auto& data = std::get<KMeansData>(instance.data);
      payload["dim"] = data.dim;
      payload["points"] = data.points;
      break;
    }
    case Family::Cflp: {
      const auto& data = std::get<CflpData>(instance.data);
      payload["opening_costs"] = data.opening_costs;
      payload["transport_costs"] = data.transport;
      payload["demands"] = data.demands;
      payload["capacities"] = data.capacities;
      payload["reference_assignment"] = data.reference;
      break;
    }
    case Family::Qap: {
      const auto& data = std::get<QapData>(instance.data);
      payload["distances"] = data.distances;
      payload["flows"] = data.flows;
      break;
    }
  }
  return payload;
}

ProblemData payload_from_json(Family family, const ordered_json& payload, int n) {
  switch (family) {
    case Family::Maxcut: {
      MaxcutData data;
      for (const auto& e : payload.at("edges"))
        data.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
      return data;
    }
    case Family::Mis: {
      MisData data;
      for (const auto& e : payload.at("edges"))
        data.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      return data;
    }
    case Family::KMeans: {
      KMeansData data;
      data.dim = payload.at("dim").get<int>();
      data.points = payload.at("points").get<std::vector<std::vector<double>>>();
      if (static_cast<int>(data.points.size()) != n)
        throw io_error("k-means point count does not match n");
      return data;
    }
    case Family::Cflp: {
      CflpData data;
      data.opening_costs = payload.at("opening_costs").get<std::vector<double>>();
      data.transport = payload.at("transport_costs").get<std::vector<std::vector<double>>>();
      data.demands = payload.at("demands").get<std::vector<int>>();
      data.capacities = payload.at("capacities").get<std::vector<int>>();
      data.reference = payload.at("reference_assignment").get<Solution>();
      return data;
    }
    case Family::Qap: {
      QapData data;
      data.distances = payload.at("distances").get<std::vector<std::vector<double>>>();
      data.flows = payload.at("flows").get<std::vector<std::vector<double>>>();
      return data;
    }
  }
  throw io_error("unknown family in payload");
}

}  // namespace

std::string instance_to_json(const ProblemInstance& instance) {
  ordered_json doc;
  doc["format"] = "qwoa-instance/1";
  doc["family"] = family_name(instance.family);
  doc["seed"] = instance.seed;
  doc["n"] = instance.space.n();
  doc["k"] = instance.space.k();
  doc["sign"] = instance.sign == Sign::Maximize ? "max" : "min";
  doc["lambda_f"] = instance.lambda_f;
  doc["payload"] = payload_to_json(instance);
  return doc.dump(2) + "\n";
}

ProblemInstance instance_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("instance parse error: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "qwoa-instance/1")
      throw io_error("unsupported instance format");
    ProblemInstance instance;
    instance.family = family_from_name(doc.at("family").get<std::string>());
    instance.seed = doc.at("seed").get<std::uint64_t>();
    const int n = doc.at("n").get<int>();
    const int k = doc.at("k").get<int>();
    switch (instance.family) {
      case Family::Maxcut:
      case Family::Mis:
        instance.space = SolutionSpace::binary(n);
        instance.sign = Sign::Maximize;
        break;
      case Family::KMeans:
      case Family::Cflp:
        instance.space = SolutionSpace::integer(n, k);
        instance.sign = Sign::Minimize;
        break;
      case Family::Qap:
        instance.space = SolutionSpace::permutation(n);
        instance.sign = Sign::Minimize;
        break;
    }
    const std::string sign = doc.at("sign").get<std::string>();
    if (sign != (instance.sign == Sign::Maximize ? "max" : "min"))
      throw io_error("instance sign does not match its family");
    instance.lambda_f = doc.at("lambda_f").get<std::vector<double>>();
    instance.data = payload_from_json(instance.family, doc.at("payload"), n);
    finalize_instance(instance);
    return instance;
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("instance field error: ") + e.what());
  }
}

void save_instance(const ProblemInstance& instance, const std::filesystem::path& path) {
  write_text_file(path, instance_to_json(instance));
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_text_file(path));
}

std::string instance_digest(const ProblemInstance& instance) {
  return fnv1a_hex(instance_to_json(instance));
}

namespace {

ordered_json params_to_json(const RunParams& params) {
  ordered_json j;
  j["p"] = params.p;
  j["gamma"] = params.gamma;
  j["t"] = params.t;
  j["beta"] = params.beta;
  if (params.lambda_t.has_value()) j["lambda_t"] = *params.lambda_t;
  j["shots"] = params.shots;
  j["seed"] = params.seed;
  j["mixer_tol"] = params.mixer_tol;
  j["convention"] =
      params.convention == PhaseConvention::PhaseFree ? "phase_free" : "exact";
  return j;
}

ordered_json trace_to_json(const IterationTrace& trace) {
  ordered_json j;
  j["tracked"] = trace.tracked;
  j["tracked_probability"] = trace.tracked_probability;
  j["expectation"] = trace.expectation;
  j["norm_drift"] = trace.norm_drift;
  return j;
}

}  // namespace

std::string manifest_to_json(const RunManifest& manifest) {
  ordered_json doc;
  doc["format"] = "qwoa-run/1";
  doc["config_digest"] = manifest.config_digest;
  doc["instance_digest"] = manifest.instance_digest;
  doc["instance_path"] = manifest.instance_path;
  doc["params"] = params_to_json(manifest.params);
  doc["sigma"] = manifest.sigma;
  doc["trace"] = trace_to_json(manifest.trace);
  if (manifest.has_samples) {
    ordered_json samples = ordered_json::array();
    for (const auto& [index, count] : manifest.sample_counts)
      samples.push_back({index, count});
    doc["samples"] = std::move(samples);
    ordered_json best;
    best["solution"] = manifest.best;
    best["value"] = manifest.best_value;
    best["value_lambda_f"] = manifest.best_value_lambda_f;
    doc["best"] = std::move(best);
  }
  return doc.dump(2) + "\n";
}

void save_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  write_text_file(path, manifest_to_json(manifest));
}

std::string tune_report_to_json(const TuneReport& report) {
  ordered_json doc;
  doc["format"] = "qwoa-tune/1";
  doc["config_digest"] = report.config_digest;
  doc["instance_digest"] = report.instance_digest;
  doc["p"] = report.p;
  ordered_json spec;
  spec["objective"] =
      report.spec.objective == TuneObjective::Expectation ? "expectation" : "cvar";
  if (report.spec.objective == TuneObjective::CVar)
    spec["cvar_alpha"] = report.spec.cvar_alpha;
  spec["tune_lambda"] = report.spec.tune_lambda;
  spec["mode"] = report.spec.mode == EvaluationMode::ExactStatevector ? "exact" : "shots";
  if (report.spec.mode == EvaluationMode::ShotBased) spec["shots"] = report.spec.shots;
  spec["budget"] = report.spec.budget;
  spec["seed"] = report.spec.seed;
  spec["method"] =
      report.spec.method == TuneMethod::NelderMead ? "nelder-mead" : "bfgs";
  doc["spec"] = std::move(spec);
  ordered_json log = ordered_json::array();
  for (const auto& entry : report.result.log) {
    ordered_json e;
    e["index"] = entry.index;
    e["gamma"] = entry.point.gamma;
    e["t"] = entry.point.t;
    e["beta"] = entry.point.beta;
    if (!entry.point.lambda_t.empty()) e["lambda_t"] = entry.point.lambda_t;
    e["objective"] = entry.objective;
    e["best_so_far"] = entry.best_so_far;
    log.push_back(std::move(e));
  }
  doc["evaluations"] = std::move(log);
  ordered_json best;
  best["gamma"] = report.result.best.gamma;
  best["t"] = report.result.best.t;
  best["beta"] = report.result.best.beta;
  if (!report.result.best.lambda_t.empty())
    best["lambda_t"] = report.result.best.lambda_t;
  best["objective"] = report.result.best_objective;
  doc["best"] = std::move(best);
  doc["converged"] = report.result.converged;
  doc["evaluations_used"] = report.result.evaluations;
  return doc.dump(2) + "\n";
}

void save_tune_report(const TuneReport& report, const std::filesystem::path& path) {
  write_text_file(path, tune_report_to_json(report));
}

void write_trace_csv(const std::filesystem::path& path, const std::string& digest,
                     const TraceTable& table) {
  std::ostringstream out;
  out << "# digest=" << digest << "\n";
  out << "iteration,expectation,norm_drift";
  for (const Index i : table.tracked) out << ",p_" << i;
  out << "\n";
  for (std::size_t row = 0; row < table.expectation.size(); ++row) {
    out << row << ',' << format_double(table.expectation[row]) << ','
        << format_double(table.norm_drift[row]);
    for (const double p : table.probability[row]) out << ',' << format_double(p);
    out << "\n";
  }
  write_text_file(path, out.str());
}

void write_histogram_csv(const std::filesystem::path& path, const std::string& digest,
                         const Histogram& histogram) {
  std::ostringstream out;
  out << "# digest=" << digest << "\n";
  out << "# axis=" << histogram.axis << "\n";
  out << "bin_lo,bin_hi,mass\n";
  for (std::size_t b = 0; b < histogram.masses.size(); ++b)
    out << format_double(histogram.edges[b]) << ','
        << format_double(histogram.edges[b + 1]) << ','
        << format_double(histogram.masses[b]) << "\n";
  write_text_file(path, out.str());
}

void write_condition_fit_csv(const std::filesystem::path& path,
                             const std::string& digest, const ConditionFit& fit) {
  std::ostringstream out;
  out << "# digest=" << digest << "\n";
  out << "# mu=" << format_double(fit.mu) << "\n";
  out << "h,count,mu_h,alpha,alpha_stderr,residual_rms,refs,members\n";
  for (const auto& row : fit.rows) {
    out << row.h << ',' << row.count << ',' << format_double(row.mu_h) << ','
        << format_double(row.alpha) << ',' << format_double(row.alpha_stderr)
        << ',' << format_double(row.residual_rms) << ',' << row.refs << ','
        << row.members << "\n";
  }
  write_text_file(path, out.str());
}

void write_condition_bins_csv(const std::filesystem::path& path,
                              const std::string& digest,
                              const std::vector<ConditionBinRow>& rows) {
  std::ostringstream out;
  out << "# digest=" << digest << "\n";
  out << "h,bin,f_lo,f_hi,count,mean,stddev\n";
  for (const auto& row : rows) {
    out << row.h << ',' << row.bin << ',' << format_double(row.f_lo) << ','
        << format_double(row.f_hi) << ',' << row.count << ','
        << format_double(row.mean) << ',' << format_double(row.stddev) << "\n";
  }
  write_text_file(path, out.str());
}

}  // namespace qwoa
