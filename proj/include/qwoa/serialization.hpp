#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qwoa/analysis.hpp"
#include "qwoa/engine.hpp"
#include "qwoa/problems.hpp"
#include "qwoa/tuner.hpp"

namespace qwoa {

// 64-bit FNV-1a over a byte string, rendered as 16 hex digits. Used to stamp
// every emitted file with the configuration it came from.
std::string fnv1a_hex(const std::string& bytes);

// Canonical instance document: fixed field order, full-precision reals,
// byte-stable for a given instance.
std::string instance_to_json(const ProblemInstance& instance);
ProblemInstance instance_from_json(const std::string& text);
void save_instance(const ProblemInstance& instance, const std::filesystem::path& path);
ProblemInstance load_instance(const std::filesystem::path& path);
std::string instance_digest(const ProblemInstance& instance);

struct RunManifest {
  std::string config_digest;
  std::string instance_digest;
  std::string instance_path;
  RunParams params;
  double sigma = 0.0;
  IterationTrace trace;
  std::vector<std::pair<Index, std::uint64_t>> sample_counts;
  Solution best;
  double best_value = 0.0;
  double best_value_lambda_f = 0.0;
  bool has_samples = false;
};

std::string manifest_to_json(const RunManifest& manifest);
void save_manifest(const RunManifest& manifest, const std::filesystem::path& path);

struct TuneReport {
  std::string config_digest;
  std::string instance_digest;
  int p = 0;
  TuneSpec spec;
  TuneResult result;
};

std::string tune_report_to_json(const TuneReport& report);
void save_tune_report(const TuneReport& report, const std::filesystem::path& path);

// CSV emitters; every file starts with "# digest=<hex>".
void write_trace_csv(const std::filesystem::path& path, const std::string& digest,
                     const TraceTable& table);
void write_histogram_csv(const std::filesystem::path& path, const std::string& digest,
                         const Histogram& histogram);
void write_condition_fit_csv(const std::filesystem::path& path,
                             const std::string& digest, const ConditionFit& fit);
void write_condition_bins_csv(const std::filesystem::path& path,
                              const std::string& digest,
                              const std::vector<ConditionBinRow>& rows);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Full-precision decimal rendering (round-trips doubles exactly).
std::string format_double(double value);

}  // namespace qwoa
