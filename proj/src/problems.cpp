#include "qwoa/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "qwoa/parallel.hpp"
#include "qwoa/random.hpp"

namespace qwoa {

std::string family_name(Family family) {
  switch (family) {
    case Family::Maxcut: return "maxcut";
    case Family::Mis: return "mis";
    case Family::KMeans: return "kmeans";
    case Family::Cflp: return "cflp";
    case Family::Qap: return "qap";
  }
  throw std::invalid_argument("unknown family");
}

Family family_from_name(const std::string& name) {
  if (name == "maxcut") return Family::Maxcut;
  if (name == "mis") return Family::Mis;
  if (name == "kmeans") return Family::KMeans;
  if (name == "cflp") return Family::Cflp;
  if (name == "qap") return Family::Qap;
  throw std::invalid_argument("unknown problem family: " + name);
}

double evaluate_maxcut(const MaxcutData& data, const Solution& x) {
  double total = 0.0;
  for (const auto& e : data.edges) {
    const int diff = x[static_cast<std::size_t>(e.u)] - x[static_cast<std::size_t>(e.v)];
    total += e.w * static_cast<double>(diff * diff);
  }
  return total;
}

double evaluate_mis(const MisData& data, const Solution& x,
                    std::span<const double> lambda) {
  int size = 0;
  for (int v : x) size += v;
  int conflicts = 0;
  for (const auto& [u, v] : data.edges)
    conflicts += x[static_cast<std::size_t>(u)] * x[static_cast<std::size_t>(v)];
  double value = static_cast<double>(size);
  if (!lambda.empty()) value -= lambda[0] * static_cast<double>(conflicts);
  if (lambda.size() > 1 && conflicts > 0) value -= lambda[1];
  return value;
}

double evaluate_kmeans_raw(const KMeansData& data, const Solution& x) {
  // Within-cluster sum of squared distances to the centroid, accumulated via
  // per-cluster moments.
  const int k = 1 + *std::max_element(x.begin(), x.end());
  const auto dim = static_cast<std::size_t>(data.dim);
  std::vector<int> count(static_cast<std::size_t>(k), 0);
  std::vector<double> sum(static_cast<std::size_t>(k) * dim, 0.0);
  std::vector<double> sumsq(static_cast<std::size_t>(k), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto c = static_cast<std::size_t>(x[j]);
    ++count[c];
    const auto& p = data.points[j];
    for (std::size_t a = 0; a < dim; ++a) {
      sum[c * dim + a] += p[a];
      sumsq[c] += p[a] * p[a];
    }
  }
  double total = 0.0;
  for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
    if (count[c] == 0) continue;
    double centroid_sq = 0.0;
    for (std::size_t a = 0; a < dim; ++a) centroid_sq += sum[c * dim + a] * sum[c * dim + a];
    total += sumsq[c] - centroid_sq / static_cast<double>(count[c]);
  }
  return total;
}

int kmeans_nonempty_clusters(const KMeansData& data, const Solution& x, int k) {
  (void)data;
  std::vector<char> used(static_cast<std::size_t>(k), 0);
  for (int v : x) used[static_cast<std::size_t>(v)] = 1;
  int c = 0;
  for (char u : used) c += u;
  return c;
}

double evaluate_cflp_unpenalized(const CflpData& data, const Solution& x) {
  const auto k = data.opening_costs.size();
  double transport = 0.0;
  std::vector<char> used(k, 0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto i = static_cast<std::size_t>(x[j]);
    transport += static_cast<double>(data.demands[j]) * data.transport[j][i];
    used[i] = 1;
  }
  double opening = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    if (used[i]) opening += data.opening_costs[i];
  return transport + opening;
}

namespace {

double cflp_penalized_g(const CflpData& data, const Solution& x,
                        std::span<const double> lambda) {
  const auto k = data.opening_costs.size();
  const auto n = x.size();
  double g = evaluate_cflp_unpenalized(data, x);
  if (lambda.empty()) return g;
  std::vector<long long> load(k, 0);
  for (std::size_t j = 0; j < n; ++j)
    load[static_cast<std::size_t>(x[j])] += data.demands[j];
  double mean_opening = 0.0;
  for (double f : data.opening_costs) mean_opening += f;
  mean_opening /= static_cast<double>(k);
  double mean_transport = 0.0;
  for (const auto& row : data.transport)
    for (double l : row) mean_transport += l;
  mean_transport /= static_cast<double>(n * k);
  for (std::size_t i = 0; i < k; ++i) {
    const long long excess = load[i] - data.capacities[i];
    if (excess <= 0) continue;
    const long long cap = data.capacities[i];
    const auto ceil_factor = static_cast<double>((excess + cap - 1) / cap);
    if (!lambda.empty()) g += lambda[0] * mean_opening * ceil_factor;
    if (lambda.size() > 1)
      g += lambda[1] * mean_transport * static_cast<double>(excess);
  }
  return g;
}

bool cflp_is_valid(const CflpData& data, const Solution& x) {
  std::vector<long long> load(data.capacities.size(), 0);
  for (std::size_t j = 0; j < x.size(); ++j)
    load[static_cast<std::size_t>(x[j])] += data.demands[j];
  for (std::size_t i = 0; i < load.size(); ++i)
    if (load[i] > data.capacities[i]) return false;
  return true;
}

}  // namespace

double evaluate_cflp(const CflpData& data, const Solution& x,
                     std::span<const double> lambda) {
  const double g = cflp_penalized_g(data, x, lambda);
  if (lambda.size() < 3 || lambda[2] == 0.0 || cflp_is_valid(data, x)) return g;
  const double g_ref = cflp_penalized_g(data, data.reference, lambda);
  return g - lambda[2] * (g - g_ref);
}

double evaluate_qap(const QapData& data, const Solution& x) {
  const auto n = x.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = static_cast<std::size_t>(x[i]);
    for (std::size_t j = 0; j < n; ++j)
      total += data.flows[i][j] * data.distances[xi][static_cast<std::size_t>(x[j])];
  }
  return total;
}

double evaluate(const ProblemInstance& instance, const Solution& x,
                ObjectiveKind kind) {
  const std::vector<double>& lambda =
      kind == ObjectiveKind::LambdaT ? instance.lambda_t : instance.lambda_f;
  switch (instance.family) {
    case Family::Maxcut:
      return evaluate_maxcut(std::get<MaxcutData>(instance.data), x);
    case Family::Mis: {
      const auto& data = std::get<MisData>(instance.data);
      if (kind == ObjectiveKind::Raw) return evaluate_mis(data, x, {});
      return evaluate_mis(data, x, lambda);
    }
    case Family::KMeans: {
      const auto& data = std::get<KMeansData>(instance.data);
      const double raw = evaluate_kmeans_raw(data, x);
      if (kind == ObjectiveKind::Raw) return raw;
      const int c = kmeans_nonempty_clusters(data, x, instance.space.k());
      const auto& mu = instance.kmeans_cluster_means;
      if (mu.size() != static_cast<std::size_t>(instance.space.k()) + 1)
        throw std::logic_error("k-means cluster means not initialised");
      return raw - (mu[static_cast<std::size_t>(c)] - mu[static_cast<std::size_t>(instance.space.k())]);
    }
    case Family::Cflp: {
      const auto& data = std::get<CflpData>(instance.data);
      if (kind == ObjectiveKind::Raw) return evaluate_cflp_unpenalized(data, x);
      return evaluate_cflp(data, x, lambda);
    }
    case Family::Qap:
      return evaluate_qap(std::get<QapData>(instance.data), x);
  }
  throw std::logic_error("unreachable");
}

std::vector<double> objective_table(const ProblemInstance& instance,
                                    ObjectiveKind kind, int workers) {
  const Index n_states = instance.space.size();
  if (n_states > kBruteForceCeiling)
    throw std::invalid_argument("space too large for a dense objective table");
  std::vector<double> table(static_cast<std::size_t>(n_states));
  parallel_for_chunks(0, n_states, workers, [&](std::uint64_t, Index lo, Index hi) {
    Solution x;
    for (Index i = lo; i < hi; ++i) {
      instance.space.solution_of(i, x);
      table[static_cast<std::size_t>(i)] = evaluate(instance, x, kind);
    }
  });
  return table;
}

bool is_valid(const ProblemInstance& instance, const Solution& x) {
  switch (instance.family) {
    case Family::Mis: {
      const auto& data = std::get<MisData>(instance.data);
      for (const auto& [u, v] : data.edges)
        if (x[static_cast<std::size_t>(u)] && x[static_cast<std::size_t>(v)]) return false;
      return true;
    }
    case Family::Cflp:
      return cflp_is_valid(std::get<CflpData>(instance.data), x);
    default:
      return true;
  }
}

namespace {

void check_size(Family family, int n, int k) {
  switch (family) {
    case Family::Maxcut:
    case Family::Mis:
      if (n < 2 || n > 18)
        throw std::invalid_argument("binary families support 2 <= n <= 18");
      break;
    case Family::KMeans:
    case Family::Cflp:
      if (n < 2 || n > 12 || k < 2 || k > 3)
        throw std::invalid_argument("integer families support n <= 12, k <= 3");
      break;
    case Family::Qap:
      if (n < 2 || n > 9) throw std::invalid_argument("qap supports 2 <= n <= 9");
      break;
  }
}

MaxcutData generate_maxcut(int n, std::mt19937_64& rng) {
  MaxcutData data;
  // Erdos-Renyi edge probability 0.5 with uniform (0, 1] weights; redraw the
  // whole graph in the unlikely event it comes out empty, keeping the
  // objective non-constant.
  do {
    data.edges.clear();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (uniform01(rng) < 0.5)
          data.edges.push_back({i, j, 1.0 - uniform01(rng)});
  } while (data.edges.empty());
  return data;
}

MisData generate_mis(int n, std::mt19937_64& rng) {
  MisData data;
  do {
    data.edges.clear();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (uniform01(rng) < 0.3) data.edges.emplace_back(i, j);
  } while (data.edges.empty());
  return data;
}

KMeansData generate_kmeans(int n, int k, std::mt19937_64& rng) {
  KMeansData data;
  data.dim = 2;
  // k blob centres with unit separation between adjacent centres, points
  // assigned round-robin with isotropic 0.3 spread.
  const double pi = 3.14159265358979323846;
  std::vector<std::array<double, 2>> centres(static_cast<std::size_t>(k));
  if (k == 1) {
    centres[0] = {0.0, 0.0};
  } else {
    const double radius = 0.5 / std::sin(pi / static_cast<double>(k));
    for (int c = 0; c < k; ++c) {
      const double angle = 2.0 * pi * static_cast<double>(c) / static_cast<double>(k);
      centres[static_cast<std::size_t>(c)] = {radius * std::cos(angle),
                                              radius * std::sin(angle)};
    }
  }
  data.points.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto& c = centres[static_cast<std::size_t>(j % k)];
    data.points[static_cast<std::size_t>(j)] = {c[0] + 0.3 * normal01(rng),
                                                c[1] + 0.3 * normal01(rng)};
  }
  return data;
}

CflpData generate_cflp(int n, int k, std::mt19937_64& rng) {
  CflpData data;
  std::vector<std::array<double, 2>> customers(static_cast<std::size_t>(n));
  std::vector<std::array<double, 2>> sites(static_cast<std::size_t>(k));
  for (auto& c : customers) c = {uniform01(rng), uniform01(rng)};
  for (auto& s : sites) s = {uniform01(rng), uniform01(rng)};
  data.transport.assign(static_cast<std::size_t>(n),
                        std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < k; ++i) {
      const double dx = customers[static_cast<std::size_t>(j)][0] - sites[static_cast<std::size_t>(i)][0];
      const double dy = customers[static_cast<std::size_t>(j)][1] - sites[static_cast<std::size_t>(i)][1];
      data.transport[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
          std::sqrt(dx * dx + dy * dy);
    }
  data.demands.resize(static_cast<std::size_t>(n));
  long long total_demand = 0;
  for (auto& r : data.demands) {
    r = 1 + static_cast<int>(uniform_below(rng, 5));
    total_demand += r;
  }
  // Equal capacities totalling ~1.3x demand, so instances are feasible but
  // capacity still binds.
  const int capacity = static_cast<int>(
      std::ceil(1.3 * static_cast<double>(total_demand) / static_cast<double>(k)));
  data.capacities.assign(static_cast<std::size_t>(k), capacity);
  // Opening costs comparable to the transport cost a facility typically
  // carries: utilities drawn uniform in (0.5, 1.5) times that scale.
  double scale = 0.0;
  for (int j = 0; j < n; ++j) {
    double mean_l = 0.0;
    for (int i = 0; i < k; ++i)
      mean_l += data.transport[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    scale += static_cast<double>(data.demands[static_cast<std::size_t>(j)]) * mean_l /
             static_cast<double>(k);
  }
  scale /= static_cast<double>(k);
  data.opening_costs.resize(static_cast<std::size_t>(k));
  for (auto& f : data.opening_costs) f = (0.5 + uniform01(rng)) * scale;
  return data;
}

QapData generate_qap(int n, std::mt19937_64& rng) {
  QapData data;
  std::vector<std::array<double, 2>> sites(static_cast<std::size_t>(n));
  for (auto& s : sites) s = {uniform01(rng), uniform01(rng)};
  data.distances.assign(static_cast<std::size_t>(n),
                        std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double dx = sites[static_cast<std::size_t>(i)][0] - sites[static_cast<std::size_t>(j)][0];
      const double dy = sites[static_cast<std::size_t>(i)][1] - sites[static_cast<std::size_t>(j)][1];
      const double dist = std::sqrt(dx * dx + dy * dy);
      data.distances[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = dist;
      data.distances[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = dist;
    }
  data.flows.assign(static_cast<std::size_t>(n),
                    std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double f = uniform01(rng);
      data.flows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = f;
      data.flows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = f;
    }
  return data;
}

}  // namespace

void finalize_instance(ProblemInstance& instance) {
  if (instance.lambda_t.empty()) instance.lambda_t = instance.lambda_f;
  if (instance.family != Family::KMeans) return;
  const auto& data = std::get<KMeansData>(instance.data);
  const int k = instance.space.k();
  // Mean raw objective per non-empty-cluster count, computed exhaustively;
  // small-count strata are far too rare for uniform sampling to reach.
  std::vector<double> sums(static_cast<std::size_t>(k) + 1, 0.0);
  std::vector<Index> counts(static_cast<std::size_t>(k) + 1, 0);
  Solution x;
  for (Index i = 0; i < instance.space.size(); ++i) {
    instance.space.solution_of(i, x);
    const auto c = static_cast<std::size_t>(kmeans_nonempty_clusters(data, x, k));
    sums[c] += evaluate_kmeans_raw(data, x);
    ++counts[c];
  }
  instance.kmeans_cluster_means.assign(static_cast<std::size_t>(k) + 1, 0.0);
  for (std::size_t c = 1; c <= static_cast<std::size_t>(k); ++c)
    if (counts[c] > 0)
      instance.kmeans_cluster_means[c] = sums[c] / static_cast<double>(counts[c]);
}

ProblemInstance generate_instance(Family family, int n, int k, std::uint64_t seed) {
  check_size(family, n, k);
  std::mt19937_64 rng(seed);
  ProblemInstance instance;
  instance.family = family;
  instance.seed = seed;
  switch (family) {
    case Family::Maxcut:
      instance.space = SolutionSpace::binary(n);
      instance.sign = Sign::Maximize;
      instance.data = generate_maxcut(n, rng);
      break;
    case Family::Mis:
      instance.space = SolutionSpace::binary(n);
      instance.sign = Sign::Maximize;
      instance.lambda_f = {1.5, 0.0};
      instance.data = generate_mis(n, rng);
      break;
    case Family::KMeans:
      instance.space = SolutionSpace::integer(n, k);
      instance.sign = Sign::Minimize;
      instance.data = generate_kmeans(n, k, rng);
      break;
    case Family::Cflp: {
      instance.space = SolutionSpace::integer(n, k);
      instance.sign = Sign::Minimize;
      instance.lambda_f = {1.0, 1.0, 0.0};
      instance.data = generate_cflp(n, k, rng);
      // Reference solution: exact optimum of the uncapacitated objective.
      auto& data = std::get<CflpData>(instance.data);
      double best = 0.0;
      Solution x, best_x;
      for (Index i = 0; i < instance.space.size(); ++i) {
        instance.space.solution_of(i, x);
        const double v = evaluate_cflp_unpenalized(data, x);
        if (i == 0 || v < best) {
          best = v;
          best_x = x;
        }
      }
      data.reference = best_x;
      break;
    }
    case Family::Qap:
      instance.space = SolutionSpace::permutation(n);
      instance.sign = Sign::Minimize;
      instance.data = generate_qap(n, rng);
      break;
  }
  finalize_instance(instance);
  return instance;
}

Optimum optimum_of_table(const ProblemInstance& instance,
                         std::span<const double> values) {
  Optimum best;
  const bool maximize = instance.sign == Sign::Maximize;
  best.value = values[0];
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (maximize ? values[i] > best.value : values[i] < best.value)
      best.value = values[i];
  }
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == best.value) best.argopt.push_back(static_cast<Index>(i));
  return best;
}

Optimum brute_force_optimum(const ProblemInstance& instance, ObjectiveKind kind,
                            int workers) {
  if (instance.space.size() > kBruteForceCeiling)
    throw std::invalid_argument("space too large for brute force");
  const auto values = objective_table(instance, kind, workers);
  return optimum_of_table(instance, values);
}

double mean_of_table(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double sigma_exact(const ProblemInstance& instance,
                   std::span<const double> values) {
  (void)instance;
  const double mu = mean_of_table(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

double sigma_estimate(const ProblemInstance& instance, std::uint64_t samples,
                      std::uint64_t seed, ObjectiveKind kind) {
  if (samples < 2) throw std::invalid_argument("sigma estimate needs >= 2 samples");
  std::mt19937_64 rng(seed);
  double sum = 0.0, sumsq = 0.0;
  Solution x;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const Index i = uniform_below(rng, instance.space.size());
    instance.space.solution_of(i, x);
    const double v = evaluate(instance, x, kind);
    sum += v;
    sumsq += v * v;
  }
  const double m = static_cast<double>(samples);
  const double var = std::max(0.0, (sumsq - sum * sum / m) / (m - 1.0));
  return std::sqrt(var);
}

}  // namespace qwoa
