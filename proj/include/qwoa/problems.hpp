#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qwoa/solution_space.hpp"
#include "qwoa/statevector.hpp"

namespace qwoa {

enum class Family { Maxcut, Mis, KMeans, Cflp, Qap };

std::string family_name(Family family);
Family family_from_name(const std::string& name);

inline constexpr Index kBruteForceCeiling = 1ull << 24;

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double w = 0.0;
};

struct MaxcutData {
  std::vector<WeightedEdge> edges;
};

struct MisData {
  std::vector<std::pair<int, int>> edges;
};

struct KMeansData {
  int dim = 2;
  std::vector<std::vector<double>> points;  // n rows of `dim` coordinates
};

struct CflpData {
  std::vector<double> opening_costs;            // k
  std::vector<std::vector<double>> transport;   // n x k
  std::vector<int> demands;                     // n
  std::vector<int> capacities;                  // k
  Solution reference;  // unconstrained optimum y used by the bimodality term
};

struct QapData {
  std::vector<std::vector<double>> distances;  // n x n location distances
  std::vector<std::vector<double>> flows;      // n x n facility flows
};

using ProblemData = std::variant<MaxcutData, MisData, KMeansData, CflpData, QapData>;

// Which objective variant to evaluate: the bare problem objective, the
// penalised objective with the fixed coefficients (the evaluation objective),
// or with the tunable coefficients (the phase objective). For k-means the
// penalised variants apply the cluster-count adjustment.
enum class ObjectiveKind { Raw, LambdaF, LambdaT };

struct ProblemInstance {
  Family family = Family::Maxcut;
  SolutionSpace space = SolutionSpace::binary(1);
  Sign sign = Sign::Maximize;
  std::uint64_t seed = 0;
  std::vector<double> lambda_f;
  std::vector<double> lambda_t;  // defaults to lambda_f
  ProblemData data;

  // Mean raw k-means objective per non-empty-cluster count, indexed 1..k;
  // filled at construction/load time for k-means instances.
  std::vector<double> kmeans_cluster_means;
};

// Family evaluators (Raw variants; penalties applied by `evaluate`).
double evaluate_maxcut(const MaxcutData& data, const Solution& x);
double evaluate_mis(const MisData& data, const Solution& x,
                    std::span<const double> lambda);
double evaluate_kmeans_raw(const KMeansData& data, const Solution& x);
int kmeans_nonempty_clusters(const KMeansData& data, const Solution& x, int k);
double evaluate_cflp_unpenalized(const CflpData& data, const Solution& x);
double evaluate_cflp(const CflpData& data, const Solution& x,
                     std::span<const double> lambda);
double evaluate_qap(const QapData& data, const Solution& x);

double evaluate(const ProblemInstance& instance, const Solution& x,
                ObjectiveKind kind);

// Length-N table of objective values shared by phase separation, expectation
// and diagnostics.
std::vector<double> objective_table(const ProblemInstance& instance,
                                    ObjectiveKind kind, int workers = 1);

// True when x satisfies the problem constraints (independence for MIS,
// capacity limits for CFLP; unconstrained families are always valid).
bool is_valid(const ProblemInstance& instance, const Solution& x);

// Seeded random instance with the documented default distributions; sizes
// enforce the desk-scale ceilings (maxcut/MIS n <= 18, k-means/CFLP n <= 12
// and k <= 3, QAP n <= 9). k is ignored for binary and permutation families.
ProblemInstance generate_instance(Family family, int n, int k, std::uint64_t seed);

// Recomputes derived fields (k-means cluster means) after loading from disk.
void finalize_instance(ProblemInstance& instance);

struct Optimum {
  double value = 0.0;
  std::vector<Index> argopt;  // every optimal index, ascending
};

Optimum brute_force_optimum(const ProblemInstance& instance,
                            ObjectiveKind kind = ObjectiveKind::LambdaF,
                            int workers = 1);
Optimum optimum_of_table(const ProblemInstance& instance,
                         std::span<const double> values);

// Standard deviation of the phase objective: exact population sigma in
// exhaustive mode, Bessel-corrected sample estimate otherwise.
double sigma_exact(const ProblemInstance& instance,
                   std::span<const double> values);
double sigma_estimate(const ProblemInstance& instance, std::uint64_t samples,
                      std::uint64_t seed,
                      ObjectiveKind kind = ObjectiveKind::LambdaT);

double mean_of_table(std::span<const double> values);

}  // namespace qwoa
