#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcoal/engine.hpp"
#include "lcoal/geometry.hpp"
#include "lcoal/kingman.hpp"
#include "lcoal/rates.hpp"
#include "lcoal/stats.hpp"

namespace lcoal {

using GeoPtr = std::shared_ptr<const GeographySpec>;

struct EstimateReport {
  double estimate = 0.0;
  double standard_error = 0.0;
  long replicas = 0;
  double confidence = 0.95;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> per_replica;
  std::vector<std::string> warnings;
};

EstimateReport make_estimate(std::vector<double> samples, double confidence = 0.95);

struct DistributionComparison {
  std::vector<double> empirical;
  std::vector<double> reference;
  double ks = 0.0;  // sup distance of the CDFs
  double tv = 0.0;
  double chi_square_p = 1.0;
  double chi_square = 0.0;
  int dof = 0;
  long sample_size = 0;
};

// Compares integer outcomes with a reference law on {0, 1, ...}.
DistributionComparison compare_counts(const std::vector<int>& outcomes, const std::vector<double>& reference);

// Common knobs of the Monte Carlo drivers.
struct RunOptions {
  long replicas = 1000;
  std::uint64_t seed = 1;
  long event_budget = 0;  // per replica, 0 = unlimited
};

// Green function of the walk from both methods and kappa from the lattice sum.
struct KappaInfo {
  GreenEstimate lattice;
  GreenEstimate monte_carlo;
  bool methods_agree = false;
  double kappa = 0.0;
  double lambda22 = 0.0;
};
KappaInfo kappa_from_green(const WalkSpec& walk, double lambda22, bool with_monte_carlo = true,
                           const GreenOptions& mc_options = {});

// ---- T_n^(k) ----

struct TnkReport {
  int n = 0;
  int k = 0;
  int sites = 0;
  EstimateReport time;
  double theorem_bound = 0.0;  // sum_{b>=k} 1/gamma_b + k/gamma_k
  double lemma_bound = 0.0;    // sum_{b>=2} 3 v^{rho+1}/gamma_b (k = 2 form)
  double rho = 0.0;
  CdiTag verdict = CdiTag::Inconclusive;
  bool upper_ci_below_bound = false;
};

TnkReport estimate_Tnk(int n, int k, const GeoPtr& geography, const KernelPtr& kernel, const RunOptions& run,
                       int classifier_b_max = 2000);

// ---- stay-infinite trend ----

struct TrendPoint {
  int n = 0;
  EstimateReport blocks;
  EstimateReport killed_variant;  // empty unless killing was requested
};

struct TrendReport {
  double t_probe = 0.0;
  std::vector<TrendPoint> points;
  double growth_exponent = 0.0;  // slope of log E[#Pi(t)] against log n
  bool increasing = false;       // each estimate above the previous one
  bool saturated = false;        // last two estimates within 3 joint SE
  double killed_growth_exponent = 0.0;
  CdiTag verdict = CdiTag::Inconclusive;
};

TrendReport stay_infinite_trend(const KernelPtr& kernel, const GeoPtr& geography, const std::vector<int>& n_grid,
                                double t_probe, const RunOptions& run, bool with_killing = false);

// ---- pairwise scaling on the torus ----

struct PairwiseOptions {
  double kappa = 0.0;        // 0: from the lattice-sum Green function
  bool same_site = false;    // start both blocks at the origin
  int separation = 0;        // 0: N along the first axis
};

struct PairwiseReport {
  int N = 0;
  long volume = 0;
  double kappa = 0.0;
  std::vector<double> rescaled_times;
  EstimateReport mean;
  double ks = 0.0;
  double ks_p_value = 0.0;
  double fitted_rate = 0.0;  // 1 / mean
};

PairwiseReport pairwise_torus_experiment(int N, const WalkSpec& walk, const KernelPtr& kernel, const RunOptions& run,
                                         const PairwiseOptions& options = {});

// ---- block-count limit ----

enum class ProbeMode { Direct, TwoStage };
std::string to_string(ProbeMode m);

struct BlockCountOptions {
  double kappa = 0.0;
  ProbeMode mode = ProbeMode::Direct;
  bool two_time_test = true;
  bool collapse_probe = true;
  int collapse_k = 5;          // reported P(#Pi(N^{3/2}) >= collapse_k)
  long total_event_budget = 0; // projected total over all replicas, 0 = unlimited
};

struct BlockCountReport {
  int N = 0;
  long volume = 0;
  double kappa = 0.0;
  std::vector<double> times;
  std::vector<DistributionComparison> direct;
  std::vector<DistributionComparison> two_stage;  // probes at t V + N^{3/2}
  DistributionComparison two_time;                // joint law at (t_0, t_last), flattened
  double collapse_time = 0.0;                     // N^{3/2}
  double collapse_tail = 0.0;                     // P(#Pi(N^{3/2}) >= collapse_k)
  EstimateReport collapse_blocks;
  long pilot_events = 0;
  long projected_events = 0;
};

BlockCountReport block_count_limit_experiment(int N, const WalkSpec& walk, const KernelPtr& kernel, int n_per_site,
                                              const std::vector<double>& times, const RunOptions& run,
                                              const BlockCountOptions& options = {});

// ---- partition structure ----

// Mutually separated starting sites on the torus: n = 2 at 0 and N e1;
// n = 3 at a e1, a e2, a e3; n = 4 on the tetrahedron 0, a(e1+e2), a(e1+e3),
// a(e2+e3); a = round(N^{3/4}).
std::vector<int> separated_sites(const GeographySpec& torus, int n);

struct PartitionStructureReport {
  int N = 0;
  int n = 0;
  double kappa = 0.0;
  std::vector<double> inter_coalescence_ks;    // step j: waiting time with n-j blocks vs Exp(kappa C(n-j,2))
  std::vector<double> inter_coalescence_ks_p;
  std::vector<std::vector<long>> pair_counts;  // step j: counts over pairs of remaining blocks (rank order)
  std::vector<double> pair_chi_square_p;
  long merges = 0;
  long multiple_merges = 0;
  double multiple_fraction = 0.0;
};

PartitionStructureReport partition_structure_experiment(int N, const WalkSpec& walk, const KernelPtr& kernel,
                                                        const LabeledPartition& initial, const RunOptions& run,
                                                        double kappa = 0.0);

// ---- class coupling ----

struct ClassCouplingReport {
  long replicas = 0;
  long checks = 0;      // state comparisons over all replicas
  long violations = 0;  // #Pi(t) > sum_j #Pi^j(t)
  bool equality_everywhere = false;
  EstimateReport full_at_t;
  EstimateReport classes_at_t;
};

ClassCouplingReport class_coupling_check(const GeoPtr& geography, const KernelPtr& kernel,
                                         const LabeledPartition& initial, const std::vector<int>& block_class,
                                         double t, const RunOptions& run);

struct DecayFitReport {
  std::vector<int> Ns;
  std::vector<double> times;
  std::vector<std::vector<double>> ratio;  // E[#Pi(t)] / max(1, #Pi(0)/t), per N and t
  std::vector<double> sup_ratio;           // per N
  bool stable = false;                     // sup ratios within a factor 2 across N
};

DecayFitReport block_decay_fit(const std::vector<int>& Ns, const WalkSpec& walk, const KernelPtr& kernel,
                               const std::vector<double>& times, const RunOptions& run);

// JSON forms used by the reports.
nlohmann::json to_json(const EstimateReport& r, bool with_samples = false);
nlohmann::json to_json(const DistributionComparison& r);
nlohmann::json to_json(const KappaInfo& r);
nlohmann::json to_json(const TnkReport& r);
nlohmann::json to_json(const TrendReport& r);
nlohmann::json to_json(const PairwiseReport& r);
nlohmann::json to_json(const BlockCountReport& r);
nlohmann::json to_json(const PartitionStructureReport& r);
nlohmann::json to_json(const ClassCouplingReport& r);
nlohmann::json to_json(const DecayFitReport& r);

}  // namespace lcoal
