#include "qwoa/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "qwoa/parallel.hpp"
#include "qwoa/random.hpp"

namespace qwoa {

namespace {

// Packed digit strings (one byte per variable) for fast pairwise distances.
std::vector<std::uint8_t> pack_digits(const SolutionSpace& space) {
  const auto n = static_cast<std::size_t>(space.n());
  std::vector<std::uint8_t> packed(static_cast<std::size_t>(space.size()) * n);
  Solution x;
  for (Index i = 0; i < space.size(); ++i) {
    space.solution_of(i, x);
    for (std::size_t j = 0; j < n; ++j)
      packed[static_cast<std::size_t>(i) * n + j] = static_cast<std::uint8_t>(x[j]);
  }
  return packed;
}

int packed_hamming(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  int h = 0;
  for (std::size_t j = 0; j < n; ++j) h += a[j] != b[j];
  return h;
}

// Cycle count of pos_u[v[i]] with a bitmask visited set (n <= 16).
int packed_cayley(const std::uint8_t* pos_u, const std::uint8_t* v, int n) {
  std::uint32_t seen = 0;
  int cycles = 0;
  for (int i = 0; i < n; ++i) {
    if (seen & (1u << i)) continue;
    ++cycles;
    int j = i;
    while (!(seen & (1u << j))) {
      seen |= 1u << j;
      j = pos_u[v[j]];
    }
  }
  return n - cycles;
}

struct FitAccumulator {
  double sum_mu = 0.0;   // sum of mu_hx
  double sum_yz = 0.0;   // y = mu_hx - f(x), z = mu - f(x)
  double sum_yy = 0.0;
  std::uint64_t refs = 0;
};

ConditionFit assemble_fit(const ProblemInstance& instance,
                          std::vector<std::vector<double>> ref_subset_means,
                          std::vector<double> ref_values, double mu,
                          Index members_per_subset) {
  const int diameter = instance.space.diameter();
  ConditionFit fit;
  fit.mu = mu;
  fit.ref_values = std::move(ref_values);
  fit.ref_subset_means = std::move(ref_subset_means);
  const auto refs = fit.ref_values.size();

  double sum_zz = 0.0;
  for (const double f : fit.ref_values) sum_zz += (mu - f) * (mu - f);

  for (int h = 1; h <= diameter; ++h) {
    FitAccumulator acc;
    for (std::size_t r = 0; r < refs; ++r) {
      const double f = fit.ref_values[r];
      const double mu_h = fit.ref_subset_means[r][static_cast<std::size_t>(h - 1)];
      const double y = mu_h - f;
      const double z = mu - f;
      acc.sum_mu += mu_h;
      acc.sum_yz += y * z;
      acc.sum_yy += y * y;
    }
    SubsetStatsRow row;
    row.h = h;
    row.count = instance.space.subset_size(h);
    row.refs = refs;
    row.members = members_per_subset;
    row.mu_h = acc.sum_mu / static_cast<double>(refs);
    row.alpha = sum_zz > 0.0 ? acc.sum_yz / sum_zz : 0.0;
    const double ss_resid =
        std::max(0.0, acc.sum_yy - row.alpha * row.alpha * sum_zz);
    row.residual_rms = std::sqrt(ss_resid / static_cast<double>(refs));
    if (refs > 1 && sum_zz > 0.0)
      row.alpha_stderr =
          std::sqrt(ss_resid / static_cast<double>(refs - 1) / sum_zz);
    fit.rows.push_back(row);
  }
  return fit;
}

ConditionFit condition_fit_exhaustive(const ProblemInstance& instance,
                                      const ConditionFitOptions& options) {
  const SolutionSpace& space = instance.space;
  if (space.size() > kEnumerationCeiling)
    throw std::invalid_argument("exhaustive condition fit beyond enumeration ceiling");
  const auto values = objective_table(instance, options.objective, options.workers);
  const double mu = mean_of_table(values);
  const auto n_states = static_cast<std::size_t>(space.size());
  const int diameter = space.diameter();
  const auto n = static_cast<std::size_t>(space.n());

  std::vector<std::vector<double>> subset_means(
      n_states, std::vector<double>(static_cast<std::size_t>(diameter), 0.0));

  std::vector<Index> counts(static_cast<std::size_t>(diameter) + 1);
  for (int h = 0; h <= diameter; ++h)
    counts[static_cast<std::size_t>(h)] = space.subset_size(h);

  const bool binary = space.kind() == SpaceKind::Binary;
  std::vector<std::uint8_t> digits, positions;
  if (!binary) {
    digits = pack_digits(space);
    if (space.kind() == SpaceKind::Permutation) {
      positions.resize(n_states * n);
      for (std::size_t i = 0; i < n_states; ++i)
        for (std::size_t j = 0; j < n; ++j)
          positions[i * n + digits[i * n + j]] = static_cast<std::uint8_t>(j);
    }
  }

  parallel_for_chunks(0, space.size(), options.workers,
                      [&](std::uint64_t, Index lo, Index hi) {
    std::vector<double> sums(static_cast<std::size_t>(diameter) + 1, 0.0);
    for (Index r = lo; r < hi; ++r) {
      std::fill(sums.begin(), sums.end(), 0.0);
      const auto ri = static_cast<std::size_t>(r);
      if (binary) {
        for (std::size_t v = 0; v < n_states; ++v)
          sums[static_cast<std::size_t>(std::popcount(r ^ static_cast<Index>(v)))] += values[v];
      } else if (space.kind() == SpaceKind::Integer) {
        const std::uint8_t* a = digits.data() + ri * n;
        for (std::size_t v = 0; v < n_states; ++v)
          sums[static_cast<std::size_t>(packed_hamming(a, digits.data() + v * n, n))] += values[v];
      } else {
        const std::uint8_t* pos = positions.data() + ri * n;
        for (std::size_t v = 0; v < n_states; ++v)
          sums[static_cast<std::size_t>(
              packed_cayley(pos, digits.data() + v * n, static_cast<int>(n)))] += values[v];
      }
      for (int h = 1; h <= diameter; ++h)
        subset_means[ri][static_cast<std::size_t>(h - 1)] =
            sums[static_cast<std::size_t>(h)] /
            static_cast<double>(counts[static_cast<std::size_t>(h)]);
    }
  });

  return assemble_fit(instance, std::move(subset_means),
                      std::vector<double>(values.begin(), values.end()), mu, 0);
}

Solution sample_member(const ProblemInstance& instance, const Solution& centre,
                       int h, PermutationSampling mode, std::mt19937_64& rng) {
  const SolutionSpace& space = instance.space;
  if (space.kind() != SpaceKind::Permutation || mode == PermutationSampling::Uniform)
    return sample_at_distance(space, centre, h, rng);
  // Compose h random transpositions, retrying until the walk lands at exact
  // distance h.
  const int n = space.n();
  Solution y(centre.size());
  while (true) {
    y = centre;
    for (int s = 0; s < h; ++s) {
      const auto p = static_cast<std::size_t>(uniform_below(rng, static_cast<std::uint64_t>(n)));
      auto q = static_cast<std::size_t>(uniform_below(rng, static_cast<std::uint64_t>(n - 1)));
      if (q >= p) ++q;
      std::swap(y[p], y[q]);
    }
    if (space.graph_distance(centre, y) == h) return y;
  }
}

ConditionFit condition_fit_sampled(const ProblemInstance& instance,
                                   const ConditionFitOptions& options) {
  const SolutionSpace& space = instance.space;
  const auto values = objective_table(instance, options.objective, options.workers);
  const double mu = mean_of_table(values);
  const int diameter = space.diameter();
  const auto refs = options.reference_count;
  if (refs < 2) throw std::invalid_argument("need at least two reference solutions");

  std::vector<double> ref_values(refs);
  std::vector<std::vector<double>> subset_means(
      refs, std::vector<double>(static_cast<std::size_t>(diameter), 0.0));

  std::mt19937_64 rng(options.seed);
  Solution centre;
  for (std::uint64_t r = 0; r < refs; ++r) {
    const Index ref_index = uniform_below(rng, space.size());
    space.solution_of(ref_index, centre);
    ref_values[r] = values[static_cast<std::size_t>(ref_index)];
    for (int h = 1; h <= diameter; ++h) {
      const Index available = space.subset_size(h);
      const Index draws = std::min<Index>(options.members_per_subset, available);
      double acc = 0.0;
      for (Index s = 0; s < draws; ++s) {
        const Solution member =
            sample_member(instance, centre, h, options.permutation_sampling, rng);
        acc += values[static_cast<std::size_t>(space.index_of(member))];
      }
      subset_means[r][static_cast<std::size_t>(h - 1)] = acc / static_cast<double>(draws);
    }
  }
  return assemble_fit(instance, std::move(subset_means), std::move(ref_values), mu,
                      options.members_per_subset);
}

}  // namespace

ConditionFit condition_fit_all(const ProblemInstance& instance,
                               const ConditionFitOptions& options) {
  return options.exhaustive ? condition_fit_exhaustive(instance, options)
                            : condition_fit_sampled(instance, options);
}

SubsetStatsRow condition_fit(const ProblemInstance& instance, int h,
                             const ConditionFitOptions& options) {
  if (h < 1 || h > instance.space.diameter())
    throw std::invalid_argument("distance h must lie in [1, diameter]");
  const auto fit = condition_fit_all(instance, options);
  return fit.rows[static_cast<std::size_t>(h - 1)];
}

std::vector<ConditionBinRow> binned_condition_summary(const ConditionFit& fit,
                                                      int bins) {
  if (bins < 1) throw std::invalid_argument("bin count must be positive");
  std::vector<ConditionBinRow> out;
  if (fit.ref_values.empty()) return out;
  const auto [min_it, max_it] =
      std::minmax_element(fit.ref_values.begin(), fit.ref_values.end());
  const double lo = *min_it, hi = *max_it;
  const double width = (hi - lo) > 0.0 ? (hi - lo) / bins : 1.0;
  const auto diameter = fit.ref_subset_means.empty()
                            ? 0
                            : static_cast<int>(fit.ref_subset_means[0].size());
  for (int h = 1; h <= diameter; ++h) {
    std::vector<std::uint64_t> count(static_cast<std::size_t>(bins), 0);
    std::vector<double> sum(static_cast<std::size_t>(bins), 0.0);
    std::vector<double> sumsq(static_cast<std::size_t>(bins), 0.0);
    for (std::size_t r = 0; r < fit.ref_values.size(); ++r) {
      auto b = static_cast<std::size_t>((fit.ref_values[r] - lo) / width);
      if (b >= static_cast<std::size_t>(bins)) b = static_cast<std::size_t>(bins) - 1;
      const double m = fit.ref_subset_means[r][static_cast<std::size_t>(h - 1)];
      ++count[b];
      sum[b] += m;
      sumsq[b] += m * m;
    }
    for (int b = 0; b < bins; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      if (count[bi] == 0) continue;
      ConditionBinRow row;
      row.h = h;
      row.bin = b;
      row.f_lo = lo + b * width;
      row.f_hi = lo + (b + 1) * width;
      row.count = count[bi];
      row.mean = sum[bi] / static_cast<double>(count[bi]);
      const double var = std::max(
          0.0, sumsq[bi] / static_cast<double>(count[bi]) - row.mean * row.mean);
      row.stddev = std::sqrt(var);
      out.push_back(row);
    }
  }
  return out;
}

TraceTable iteration_probability_trace(const ProblemInstance& instance,
                                       const RunParams& params,
                                       const std::vector<Index>* tracked) {
  const auto prepared = prepare_amplified_state(instance, params, tracked);
  TraceTable table;
  table.tracked = prepared.trace.tracked;
  table.probability = prepared.trace.tracked_probability;
  table.expectation = prepared.trace.expectation;
  table.norm_drift = prepared.trace.norm_drift;
  return table;
}

Histogram value_histogram(const StateVector& state, std::span<const double> values,
                          int bins, const std::string& axis) {
  if (bins < 1) throw std::invalid_argument("bin count must be positive");
  if (values.size() != state.amplitudes().size())
    throw std::invalid_argument("value table length mismatch");
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *min_it, hi = *max_it;
  const double width = (hi - lo) > 0.0 ? (hi - lo) / bins : 1.0;
  Histogram hist;
  hist.axis = axis;
  hist.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b)
    hist.edges[static_cast<std::size_t>(b)] = lo + b * width;
  hist.masses.assign(static_cast<std::size_t>(bins), 0.0);
  const auto amps = state.amplitudes();
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto b = static_cast<std::size_t>((values[i] - lo) / width);
    if (b >= static_cast<std::size_t>(bins)) b = static_cast<std::size_t>(bins) - 1;
    hist.masses[b] += std::norm(amps[i]);
  }
  return hist;
}

Histogram ratio_histogram(const StateVector& state, const ProblemInstance& instance,
                          int bins) {
  const bool penalised = !instance.lambda_f.empty();
  const auto values = objective_table(instance, ObjectiveKind::LambdaF);
  if (penalised)
    return value_histogram(state, values, bins, "value");
  const auto optimum = optimum_of_table(instance, values);
  if (optimum.value == 0.0)
    return value_histogram(state, values, bins, "value");
  std::vector<double> ratios(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) ratios[i] = values[i] / optimum.value;
  return value_histogram(state, ratios, bins, "ratio");
}

}  // namespace qwoa
