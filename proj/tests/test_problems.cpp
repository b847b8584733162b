#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "qwoa/problems.hpp"

using namespace qwoa;

namespace {

// Independent re-statement of the cut value: iterate every vertex pair with a
// weight lookup instead of the edge list.
double maxcut_oracle(const MaxcutData& data, const Solution& x) {
  std::map<std::pair<int, int>, double> weight;
  for (const auto& e : data.edges) weight[{e.u, e.v}] += e.w;
  double total = 0.0;
  const int n = static_cast<int>(x.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto it = weight.find({i, j});
      if (it == weight.end()) continue;
      if (x[static_cast<std::size_t>(i)] != x[static_cast<std::size_t>(j)])
        total += it->second;
    }
  return total;
}

// Literal pairwise form of the clustering objective: (1/|C|) sum over
// unordered within-cluster pairs of squared distance.
double kmeans_pairwise_oracle(const KMeansData& data, const Solution& x, int k) {
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x[j] == c) members.push_back(j);
    if (members.empty()) continue;
    double pair_sum = 0.0;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        double d2 = 0.0;
        for (int axis = 0; axis < data.dim; ++axis) {
          const double diff = data.points[members[a]][static_cast<std::size_t>(axis)] -
                              data.points[members[b]][static_cast<std::size_t>(axis)];
          d2 += diff * diff;
        }
        pair_sum += d2;
      }
    total += pair_sum / static_cast<double>(members.size());
  }
  return total;
}

double qap_oracle(const QapData& data, const Solution& x) {
  double total = 0.0;
  const auto n = x.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      total += data.flows[i][j] *
               data.distances[static_cast<std::size_t>(x[i])][static_cast<std::size_t>(x[j])];
  return total;
}

}  // namespace

TEST_CASE("maxcut evaluation: fixed values and oracle agreement") {
  MaxcutData single{{{0, 1, 2.5}}};
  CHECK(evaluate_maxcut(single, {0, 1}) == doctest::Approx(2.5));
  CHECK(evaluate_maxcut(single, {0, 0}) == 0.0);

  const auto instance = generate_instance(Family::Maxcut, 10, 2, 3);
  const auto& data = std::get<MaxcutData>(instance.data);
  Solution x;
  for (Index i = 0; i < instance.space.size(); i += 37) {
    instance.space.solution_of(i, x);
    CHECK(evaluate_maxcut(data, x) == doctest::Approx(maxcut_oracle(data, x)).epsilon(1e-12));
  }
  CHECK(evaluate_maxcut(data, Solution(10, 0)) == 0.0);
}

TEST_CASE("mis evaluation: penalties and fixed values") {
  // Triangle graph.
  MisData triangle{{{0, 1}, {1, 2}, {0, 2}}};
  const std::vector<double> lambda{1.5, 0.0};
  CHECK(evaluate_mis(triangle, {1, 1, 1}, lambda) == doctest::Approx(3.0 - 1.5 * 3.0));
  CHECK(evaluate_mis(triangle, {1, 0, 0}, lambda) == doctest::Approx(1.0));
  CHECK(evaluate_mis(triangle, {0, 0, 0}, lambda) == doctest::Approx(0.0));
  // Second penalty term flags any conflict once.
  const std::vector<double> both{1.0, 0.5};
  CHECK(evaluate_mis(triangle, {1, 1, 0}, both) == doctest::Approx(2.0 - 1.0 - 0.5));
  CHECK(evaluate_mis(triangle, {1, 1, 1}, both) == doctest::Approx(3.0 - 3.0 - 0.5));
}

TEST_CASE("mis with the fixed penalties: every optimum is a valid set") {
  for (const std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const auto instance = generate_instance(Family::Mis, 10, 2, seed);
    const auto optimum = brute_force_optimum(instance, ObjectiveKind::LambdaF);
    REQUIRE(!optimum.argopt.empty());
    for (const Index i : optimum.argopt)
      CHECK(is_valid(instance, instance.space.solution_of(i)));
  }
}

TEST_CASE("kmeans evaluation: degenerate cases") {
  // Each point alone in its own cluster: raw objective zero.
  KMeansData solo{2, {{0.0, 0.0}, {5.0, 5.0}, {1.0, -1.0}}};
  CHECK(evaluate_kmeans_raw(solo, {0, 1, 2}) == doctest::Approx(0.0));
  // Two identical points in one cluster contribute nothing.
  KMeansData twin{2, {{1.0, 2.0}, {1.0, 2.0}}};
  CHECK(evaluate_kmeans_raw(twin, {0, 0}) == doctest::Approx(0.0));
  CHECK(kmeans_nonempty_clusters(twin, {0, 0}, 2) == 1);
  CHECK(kmeans_nonempty_clusters(twin, {0, 1}, 2) == 2);
}

TEST_CASE("kmeans raw objective matches the literal pairwise oracle") {
  const auto instance = generate_instance(Family::KMeans, 6, 2, 11);
  const auto& data = std::get<KMeansData>(instance.data);
  Solution x;
  for (Index i = 0; i < instance.space.size(); ++i) {
    instance.space.solution_of(i, x);
    CHECK(evaluate_kmeans_raw(data, x) ==
          doctest::Approx(kmeans_pairwise_oracle(data, x, 2)).epsilon(1e-9));
  }
}

TEST_CASE("kmeans adjustment: strata means collapse onto the full-k mean") {
  const auto instance = generate_instance(Family::KMeans, 6, 2, 19);
  const auto& data = std::get<KMeansData>(instance.data);
  const int k = instance.space.k();
  std::map<int, double> sum;
  std::map<int, Index> count;
  Solution x;
  for (Index i = 0; i < instance.space.size(); ++i) {
    instance.space.solution_of(i, x);
    const int c = kmeans_nonempty_clusters(data, x, k);
    sum[c] += evaluate(instance, x, ObjectiveKind::LambdaF);
    ++count[c];
  }
  const double mu_k = instance.kmeans_cluster_means[static_cast<std::size_t>(k)];
  for (const auto& [c, s] : sum)
    CHECK(s / static_cast<double>(count[c]) == doctest::Approx(mu_k).epsilon(1e-9));
}

TEST_CASE("cflp evaluation: no violations reduces to transport plus opening") {
  CflpData data;
  data.opening_costs = {2.0, 3.0};
  data.transport = {{0.5, 1.5}, {1.0, 0.25}};
  data.demands = {2, 4};
  data.capacities = {100, 100};
  data.reference = {0, 1};
  const std::vector<double> lambda{1.0, 1.0, 0.5};
  // Both facilities used: 2*0.5 + 4*0.25 + 2 + 3 = 7.
  CHECK(evaluate_cflp(data, {0, 1}, lambda) == doctest::Approx(7.0));
  // Only facility 0: 2*0.5 + 4*1.0 + 2 = 7.
  CHECK(evaluate_cflp(data, {0, 0}, lambda) == doctest::Approx(7.0));
  CHECK(evaluate_cflp_unpenalized(data, {0, 1}) == doctest::Approx(7.0));
}

TEST_CASE("cflp penalties: double load gives a unit ceiling factor") {
  CflpData data;
  data.opening_costs = {2.0, 4.0};
  data.transport = {{0.5, 1.5}, {1.0, 0.25}};
  data.demands = {3, 3};
  data.capacities = {3, 3};
  data.reference = {0, 1};
  // Both customers on facility 0: load 6 = 2 * capacity, excess 3.
  const double mean_f = 3.0;
  const double mean_l = (0.5 + 1.5 + 1.0 + 0.25) / 4.0;
  const double base = 3 * 0.5 + 3 * 1.0 + 2.0;
  const std::vector<double> l1{1.3};
  CHECK(evaluate_cflp(data, {0, 0}, l1) == doctest::Approx(base + 1.3 * mean_f * 1.0));
  const std::vector<double> l12{1.3, 0.7};
  CHECK(evaluate_cflp(data, {0, 0}, l12) ==
        doctest::Approx(base + 1.3 * mean_f + 0.7 * mean_l * 3.0));
  // Exactly at capacity: no penalty.
  const std::vector<double> lambda{5.0, 5.0, 0.0};
  CHECK(evaluate_cflp(data, {0, 1}, lambda) ==
        doctest::Approx(evaluate_cflp_unpenalized(data, {0, 1})));
}

TEST_CASE("cflp lambda3 blends toward the reference value for invalid solutions") {
  CflpData data;
  data.opening_costs = {2.0, 4.0};
  data.transport = {{0.5, 1.5}, {1.0, 0.25}};
  data.demands = {3, 3};
  data.capacities = {3, 3};
  data.reference = {0, 1};
  const std::vector<double> no_blend{1.0, 1.0, 0.0};
  const std::vector<double> blend{1.0, 1.0, 0.25};
  // lambda3 = 0 collapses to g everywhere.
  const double g = evaluate_cflp(data, {0, 0}, no_blend);
  const double g_ref = evaluate_cflp(data, {0, 1}, no_blend);
  CHECK(evaluate_cflp(data, {0, 0}, blend) ==
        doctest::Approx(g - 0.25 * (g - g_ref)));
  // Valid solutions are untouched by lambda3.
  CHECK(evaluate_cflp(data, {0, 1}, blend) == doctest::Approx(g_ref));
}

TEST_CASE("cflp with the fixed penalties: every optimum is a valid assignment") {
  for (const std::uint64_t seed : {1, 2, 3}) {
    const auto instance = generate_instance(Family::Cflp, 7, 3, seed);
    const auto optimum = brute_force_optimum(instance, ObjectiveKind::LambdaF);
    REQUIRE(!optimum.argopt.empty());
    for (const Index i : optimum.argopt)
      CHECK(is_valid(instance, instance.space.solution_of(i)));
  }
}

TEST_CASE("qap evaluation: fixed values and oracle agreement") {
  QapData data;
  data.distances = {{0.0, 1.0, 2.0}, {1.0, 0.0, 3.0}, {2.0, 3.0, 0.0}};
  data.flows = {{0.0, 5.0, 1.0}, {5.0, 0.0, 2.0}, {1.0, 2.0, 0.0}};
  double identity_value = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      identity_value += data.flows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                        data.distances[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  CHECK(evaluate_qap(data, {0, 1, 2}) == doctest::Approx(identity_value));

  QapData zero_flow = data;
  for (auto& row : zero_flow.flows) std::fill(row.begin(), row.end(), 0.0);
  CHECK(evaluate_qap(zero_flow, {2, 0, 1}) == 0.0);

  const auto instance = generate_instance(Family::Qap, 4, 4, 7);
  const auto& gen = std::get<QapData>(instance.data);
  Solution x;
  for (Index i = 0; i < instance.space.size(); ++i) {
    instance.space.solution_of(i, x);
    CHECK(evaluate_qap(gen, x) == doctest::Approx(qap_oracle(gen, x)).epsilon(1e-12));
  }
}

TEST_CASE("generation is reproducible and respects documented distributions") {
  for (const Family family :
       {Family::Maxcut, Family::Mis, Family::KMeans, Family::Cflp, Family::Qap}) {
    const int n = family == Family::Qap ? 5 : 8;
    const auto a = generate_instance(family, n, 3, 42);
    const auto b = generate_instance(family, n, 3, 42);
    const auto c = generate_instance(family, n, 3, 43);
    const auto table_a = objective_table(a, ObjectiveKind::LambdaF);
    const auto table_b = objective_table(b, ObjectiveKind::LambdaF);
    const auto table_c = objective_table(c, ObjectiveKind::LambdaF);
    CHECK(table_a == table_b);
    CHECK(table_a != table_c);
  }

  const auto maxcut = generate_instance(Family::Maxcut, 12, 2, 9);
  for (const auto& e : std::get<MaxcutData>(maxcut.data).edges) {
    CHECK(e.w > 0.0);
    CHECK(e.w <= 1.0);
  }

  const auto cflp = generate_instance(Family::Cflp, 9, 3, 9);
  const auto& data = std::get<CflpData>(cflp.data);
  long long demand = 0, capacity = 0;
  for (const int r : data.demands) {
    demand += r;
    CHECK(r >= 1);
    CHECK(r <= 5);
  }
  for (const int c : data.capacities) capacity += c;
  CHECK(capacity >= demand);
}

TEST_CASE("generation enforces the desk-scale ceilings") {
  CHECK_THROWS_AS(generate_instance(Family::Maxcut, 19, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_instance(Family::KMeans, 13, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_instance(Family::Cflp, 8, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_instance(Family::Qap, 10, 10, 1), std::invalid_argument);
}

TEST_CASE("brute force optimum: fixed examples") {
  // MIS on a triangle: optimum 1 with three optimal solutions.
  ProblemInstance mis;
  mis.family = Family::Mis;
  mis.space = SolutionSpace::binary(3);
  mis.sign = Sign::Maximize;
  mis.lambda_f = {1.5, 0.0};
  mis.data = MisData{{{0, 1}, {1, 2}, {0, 2}}};
  finalize_instance(mis);
  const auto mis_opt = brute_force_optimum(mis);
  CHECK(mis_opt.value == doctest::Approx(1.0));
  CHECK(mis_opt.argopt.size() == 3);

  // Single positive edge: optimum w with two symmetric solutions.
  ProblemInstance cut;
  cut.family = Family::Maxcut;
  cut.space = SolutionSpace::binary(2);
  cut.sign = Sign::Maximize;
  cut.data = MaxcutData{{{0, 1, 0.75}}};
  finalize_instance(cut);
  const auto cut_opt = brute_force_optimum(cut);
  CHECK(cut_opt.value == doctest::Approx(0.75));
  CHECK(cut_opt.argopt == std::vector<Index>{1, 2});

  // QAP: scan agrees with a direct loop over the oracle.
  const auto qap = generate_instance(Family::Qap, 4, 4, 3);
  const auto& data = std::get<QapData>(qap.data);
  const auto opt = brute_force_optimum(qap);
  double best = 1e300;
  Solution x;
  for (Index i = 0; i < qap.space.size(); ++i) {
    qap.space.solution_of(i, x);
    best = std::min(best, qap_oracle(data, x));
  }
  CHECK(opt.value == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("sigma: exact, sampled, and penalty sensitivity") {
  // Constant objective: sigma is zero.
  ProblemInstance flat;
  flat.family = Family::Maxcut;
  flat.space = SolutionSpace::binary(4);
  flat.sign = Sign::Maximize;
  flat.data = MaxcutData{{}};
  finalize_instance(flat);
  const auto flat_table = objective_table(flat, ObjectiveKind::LambdaT);
  CHECK(sigma_exact(flat, flat_table) == 0.0);

  // Sampled estimate lands within 10% of the exhaustive value.
  const auto maxcut = generate_instance(Family::Maxcut, 12, 2, 5);
  const auto table = objective_table(maxcut, ObjectiveKind::LambdaT);
  const double exact = sigma_exact(maxcut, table);
  const double sampled = sigma_estimate(maxcut, 10000, 77);
  CHECK(std::abs(sampled - exact) / exact < 0.10);

  // Changing lambda_T moves sigma when penalties bind.
  auto mis = generate_instance(Family::Mis, 10, 2, 5);
  const double sigma_f = sigma_exact(mis, objective_table(mis, ObjectiveKind::LambdaT));
  mis.lambda_t = {8.0, 4.0};
  const double sigma_t = sigma_exact(mis, objective_table(mis, ObjectiveKind::LambdaT));
  CHECK(sigma_f != doctest::Approx(sigma_t));
}

TEST_CASE("objective tables are independent of the worker count") {
  const auto instance = generate_instance(Family::KMeans, 7, 3, 13);
  const auto serial = objective_table(instance, ObjectiveKind::LambdaF, 1);
  const auto parallel = objective_table(instance, ObjectiveKind::LambdaF, 4);
  CHECK(serial == parallel);
  const auto opt_serial = brute_force_optimum(instance, ObjectiveKind::LambdaF, 1);
  const auto opt_parallel = brute_force_optimum(instance, ObjectiveKind::LambdaF, 4);
  CHECK(opt_serial.value == opt_parallel.value);
  CHECK(opt_serial.argopt == opt_parallel.argopt);
}
