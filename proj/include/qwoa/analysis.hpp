#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qwoa/engine.hpp"
#include "qwoa/problems.hpp"

namespace qwoa {

// Through-origin fit of (mu_hx - f(x)) against -(f(x) - mu) for one
// distance h, over a set of reference solutions.
struct SubsetStatsRow {
  int h = 0;
  Index count = 0;         // |h_x|, identical for every reference
  double mu_h = 0.0;       // mean of mu_hx over references
  double alpha = 0.0;
  double alpha_stderr = 0.0;
  double residual_rms = 0.0;
  std::uint64_t refs = 0;      // reference solutions used
  Index members = 0;           // sampled members per subset (0 = exhaustive)
};

struct ConditionFit {
  double mu = 0.0;  // global objective mean
  std::vector<SubsetStatsRow> rows;  // h = 1..D
  // Per-reference raw data, kept so binned summaries can be emitted.
  std::vector<double> ref_values;                     // f(x) per reference
  std::vector<std::vector<double>> ref_subset_means;  // refs x D, mu_hx
};

// How permutation-space subset members are sampled in sampled mode: either
// composing h random transpositions and keeping hits at exact distance h, or
// drawing uniform members by cycle count.
enum class PermutationSampling { ComposeFilter, Uniform };

struct ConditionFitOptions {
  bool exhaustive = true;
  std::uint64_t reference_count = 256;  // sampled mode
  Index members_per_subset = 4096;      // sampled mode
  std::uint64_t seed = 1;
  ObjectiveKind objective = ObjectiveKind::LambdaF;
  PermutationSampling permutation_sampling = PermutationSampling::ComposeFilter;
  int workers = 1;
};

ConditionFit condition_fit_all(const ProblemInstance& instance,
                               const ConditionFitOptions& options);
SubsetStatsRow condition_fit(const ProblemInstance& instance, int h,
                             const ConditionFitOptions& options);

// Mean/std of mu_hx per objective-value bin; the shape plotted in the
// subset-mean figures. Only non-empty bins are returned.
struct ConditionBinRow {
  int h = 0;
  int bin = 0;
  double f_lo = 0.0;
  double f_hi = 0.0;
  std::uint64_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

std::vector<ConditionBinRow> binned_condition_summary(const ConditionFit& fit,
                                                      int bins);

// Iteration-indexed probabilities of a tracked solution set (brute-force
// optima by default); row 0 is the equal superposition.
struct TraceTable {
  std::vector<Index> tracked;
  std::vector<std::vector<double>> probability;  // (p+1) x |tracked|
  std::vector<double> expectation;
  std::vector<double> norm_drift;
};

TraceTable iteration_probability_trace(const ProblemInstance& instance,
                                       const RunParams& params,
                                       const std::vector<Index>* tracked = nullptr);

struct Histogram {
  std::string axis;            // "ratio" or "value"
  std::vector<double> edges;   // bins + 1 ascending edges
  std::vector<double> masses;  // bins, summing to 1
};

// Probability mass of the state binned by approximation ratio f/optimum, or
// by penalised objective value for constrained families (and whenever the
// optimum is zero).
Histogram ratio_histogram(const StateVector& state, const ProblemInstance& instance,
                          int bins);
Histogram value_histogram(const StateVector& state, std::span<const double> values,
                          int bins, const std::string& axis);

}  // namespace qwoa
