#include "lcoal/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/normal.hpp>

#include "lcoal/lemmas.hpp"
#include "lcoal/rng.hpp"

namespace lcoal {

using nlohmann::json;

EstimateReport make_estimate(std::vector<double> samples, double confidence) {
  EstimateReport r;
  const MeanEstimate m = mean_estimate(samples);
  r.estimate = m.mean;
  r.standard_error = m.standard_error;
  r.replicas = m.n;
  r.confidence = confidence;
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * confidence);
  r.lower = m.lower(z);
  r.upper = m.upper(z);
  r.per_replica = std::move(samples);
  return r;
}

DistributionComparison compare_counts(const std::vector<int>& outcomes, const std::vector<double>& reference) {
  DistributionComparison c;
  c.sample_size = static_cast<long>(outcomes.size());
  c.empirical = empirical_distribution(outcomes, reference.size());
  c.reference = reference;
  c.reference.resize(c.empirical.size(), 0.0);
  double fe = 0.0, fr = 0.0;
  for (std::size_t i = 0; i < c.empirical.size(); ++i) {
    fe += c.empirical[i];
    fr += c.reference[i];
    c.ks = std::max(c.ks, std::fabs(fe - fr));
  }
  c.tv = total_variation(c.empirical, c.reference);
  if (!outcomes.empty()) {
    std::vector<double> counts(c.empirical.size());
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] = c.empirical[i] * static_cast<double>(outcomes.size());
    const ChiSquareResult chi = chi_square_test(counts, c.reference);
    c.chi_square = chi.statistic;
    c.chi_square_p = chi.p_value;
    c.dof = chi.dof;
  }
  return c;
}

KappaInfo kappa_from_green(const WalkSpec& walk, double lambda22, bool with_monte_carlo, const GreenOptions& mc_options) {
  KappaInfo k;
  k.lambda22 = lambda22;
  GreenOptions ls;
  ls.method = GreenMethod::LatticeSum;
  k.lattice = green_function(walk, ls);
  if (with_monte_carlo) {
    GreenOptions mc = mc_options;
    mc.method = GreenMethod::MonteCarlo;
    k.monte_carlo = green_function(walk, mc);
    k.methods_agree =
        std::fabs(k.lattice.estimate - k.monte_carlo.estimate) <= k.lattice.error + k.monte_carlo.error;
  }
  k.kappa = kappa(k.lattice.estimate, lambda22);
  return k;
}

namespace {

SimulationConfig base_config(const KernelPtr& kernel, const GeoPtr& geo, const RunOptions& run) {
  SimulationConfig c;
  c.kernel = kernel;
  c.geography = geo;
  c.event_budget = run.event_budget;
  c.track_elements = false;
  c.record_events = false;
  if (kernel && !kernel->measure().is_zero()) c.merge_law = std::make_shared<MergeLaw>(kernel);
  return c;
}

void check_replicas(const RunOptions& run) {
  if (run.replicas < 2) throw Error(ErrorCode::ValidationError, "experiments need at least 2 replicas");
}

double resolve_kappa(double given, const WalkSpec& walk, const KernelPtr& kernel) {
  if (given > 0.0) return given;
  return kappa_from_green(walk, kernel->lambda22(), false).kappa;
}

}  // namespace

// ---- T_n^(k) ----

TnkReport estimate_Tnk(int n, int k, const GeoPtr& geography, const KernelPtr& kernel, const RunOptions& run,
                       int classifier_b_max) {
  if (n < 2 || k < 2) throw Error(ErrorCode::ValidationError, "T_n^(k) needs n >= 2 and k >= 2");
  check_replicas(run);
  TnkReport r;
  r.n = n;
  r.k = k;
  r.sites = geography->sites();
  const BoundEstimate bound = tn_uniform_bound(*kernel, k, classifier_b_max);
  r.theorem_bound = bound.value;
  r.verdict = bound.verdict;
  r.rho = estimate_rho(*kernel, classifier_b_max);
  const double sum_from_2 = tn_uniform_bound(*kernel, 2, classifier_b_max).value - 2.0 / kernel->gamma_total(2).value;
  r.lemma_bound = 3.0 * std::pow(static_cast<double>(r.sites), r.rho + 1.0) * sum_from_2;

  SimulationConfig cfg = base_config(kernel, geography, run);
  cfg.stop = StopRule::BlocksAtMost;
  cfg.stop_blocks = k * r.sites;
  const LabeledPartition init = LabeledPartition::per_site(n, r.sites);
  std::vector<double> times;
  for (long i = 0; i < run.replicas; ++i) {
    cfg.seed = derive_seed(run.seed, static_cast<std::uint64_t>(i));
    times.push_back(simulate(init, cfg).end_time);
  }
  r.time = make_estimate(std::move(times));
  if (r.verdict != CdiTag::ComesDown) r.time.warnings.push_back("STAYS_INFINITE_WARNING");
  r.upper_ci_below_bound = r.time.upper < r.theorem_bound;
  return r;
}

// ---- stay-infinite trend ----

TrendReport stay_infinite_trend(const KernelPtr& kernel, const GeoPtr& geography, const std::vector<int>& n_grid,
                                double t_probe, const RunOptions& run, bool with_killing) {
  if (n_grid.size() < 2) throw Error(ErrorCode::ValidationError, "trend needs at least two values of n");
  if (!(t_probe > 0.0)) throw Error(ErrorCode::ValidationError, "probe time must be > 0");
  check_replicas(run);
  TrendReport r;
  r.t_probe = t_probe;
  r.verdict = cdi_classify(*kernel, 2000).verdict;
  SimulationConfig cfg = base_config(kernel, geography, run);
  cfg.horizon = t_probe;
  SimulationConfig kill = cfg;
  kill.killing = true;
  for (int n : n_grid) {
    const LabeledPartition init = LabeledPartition::per_site(n, geography->sites());
    TrendPoint p;
    p.n = n;
    std::vector<double> counts, killed;
    // Same replica seeds for every n.
    for (long i = 0; i < run.replicas; ++i) {
      cfg.seed = kill.seed = derive_seed(run.seed, static_cast<std::uint64_t>(i));
      counts.push_back(simulate(init, cfg).alive_blocks);
      if (with_killing) killed.push_back(simulate(init, kill).alive_blocks);
    }
    p.blocks = make_estimate(std::move(counts));
    if (with_killing) p.killed_variant = make_estimate(std::move(killed));
    r.points.push_back(std::move(p));
  }
  const auto slope = [&](bool killed) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(r.points.size());
    for (const auto& p : r.points) {
      const double x = std::log(static_cast<double>(p.n));
      const double y = std::log(std::max(killed ? p.killed_variant.estimate : p.blocks.estimate, 1e-300));
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
  };
  r.growth_exponent = slope(false);
  if (with_killing) r.killed_growth_exponent = slope(true);
  r.increasing = true;
  for (std::size_t i = 1; i < r.points.size(); ++i)
    if (!(r.points[i].blocks.estimate > r.points[i - 1].blocks.estimate)) r.increasing = false;
  const auto& a = r.points[r.points.size() - 2].blocks;
  const auto& b = r.points.back().blocks;
  r.saturated = std::fabs(b.estimate - a.estimate) <=
                3.0 * std::hypot(a.standard_error, b.standard_error);
  return r;
}

// ---- pairwise ----

PairwiseReport pairwise_torus_experiment(int N, const WalkSpec& walk, const KernelPtr& kernel, const RunOptions& run,
                                         const PairwiseOptions& options) {
  check_replicas(run);
  auto geo = std::make_shared<const GeographySpec>(build_torus(N, walk));
  PairwiseReport r;
  r.N = N;
  r.volume = geo->sites();
  r.kappa = resolve_kappa(options.kappa, walk, kernel);
  std::vector<int> origin(static_cast<std::size_t>(walk.dim), 0), other = origin;
  if (!options.same_site) other[0] = options.separation > 0 ? options.separation : N;
  const LabeledPartition init = LabeledPartition::singletons({geo->site_of(origin), geo->site_of(other)});

  SimulationConfig cfg = base_config(kernel, geo, run);
  cfg.stop = StopRule::BlocksAtMost;
  cfg.stop_blocks = 1;
  for (long i = 0; i < run.replicas; ++i) {
    cfg.seed = derive_seed(run.seed, static_cast<std::uint64_t>(i));
    r.rescaled_times.push_back(simulate(init, cfg).end_time / static_cast<double>(r.volume));
  }
  const double kap = r.kappa;
  r.ks = ks_statistic(r.rescaled_times, [kap](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-kap * x); });
  r.ks_p_value = ks_pvalue(r.ks, run.replicas);
  r.mean = make_estimate(r.rescaled_times);
  r.mean.per_replica.clear();
  r.fitted_rate = 1.0 / r.mean.estimate;
  return r;
}

// ---- block-count limit ----

std::string to_string(ProbeMode m) { return m == ProbeMode::Direct ? "DIRECT" : "TWO_STAGE"; }

BlockCountReport block_count_limit_experiment(int N, const WalkSpec& walk, const KernelPtr& kernel, int n_per_site,
                                              const std::vector<double>& times, const RunOptions& run,
                                              const BlockCountOptions& options) {
  if (times.empty()) throw Error(ErrorCode::ValidationError, "block-count experiment needs probe times");
  if (!std::is_sorted(times.begin(), times.end()) || !(times.front() > 0.0))
    throw Error(ErrorCode::ValidationError, "probe times must be positive and sorted");
  check_replicas(run);
  auto geo = std::make_shared<const GeographySpec>(build_torus(N, walk));
  BlockCountReport r;
  r.N = N;
  r.volume = geo->sites();
  r.kappa = resolve_kappa(options.kappa, walk, kernel);
  r.times = times;
  r.collapse_time = std::pow(static_cast<double>(N), 1.5);
  const double V = static_cast<double>(r.volume);

  // Probe slots: direct, then two-stage, then the collapse window.
  std::vector<std::pair<double, int>> slots;
  for (std::size_t i = 0; i < times.size(); ++i) {
    slots.push_back({times[i] * V, static_cast<int>(i)});
    slots.push_back({times[i] * V + r.collapse_time, static_cast<int>(times.size() + i)});
  }
  slots.push_back({r.collapse_time, static_cast<int>(2 * times.size())});
  std::sort(slots.begin(), slots.end());

  SimulationConfig cfg = base_config(kernel, geo, run);
  for (const auto& s : slots) cfg.probe_times.push_back(s.first);
  cfg.horizon = slots.back().first;
  const LabeledPartition init = LabeledPartition::per_site(n_per_site, geo->sites());

  std::vector<std::vector<int>> outcomes(2 * times.size() + 1);
  for (long i = 0; i < run.replicas; ++i) {
    cfg.seed = derive_seed(run.seed, static_cast<std::uint64_t>(i));
    const TrajectoryRecord rec = simulate(init, cfg);
    if (i == 0) {
      r.pilot_events = rec.event_count;
      r.projected_events = rec.event_count * run.replicas;
      if (options.total_event_budget > 0 && r.projected_events > options.total_event_budget)
        throw Error(ErrorCode::BudgetExceeded, "projected " + std::to_string(r.projected_events) +
                                                   " events exceed the budget of " +
                                                   std::to_string(options.total_event_budget));
    }
    for (std::size_t j = 0; j < slots.size(); ++j)
      outcomes[static_cast<std::size_t>(slots[j].second)].push_back(rec.probe_counts[j]);
  }

  for (std::size_t i = 0; i < times.size(); ++i) {
    const BlockCountLaw ref = kingman_entrance_reference(r.kappa * times[i]);
    r.direct.push_back(compare_counts(outcomes[i], ref.probs));
    r.two_stage.push_back(compare_counts(outcomes[times.size() + i], ref.probs));
  }

  if (options.two_time_test && times.size() >= 2) {
    const auto joint = kingman_two_time_law(r.kappa * times.front(), r.kappa * times.back());
    const auto& first = options.mode == ProbeMode::Direct ? outcomes.front() : outcomes[times.size()];
    const auto& last = options.mode == ProbeMode::Direct ? outcomes[times.size() - 1] : outcomes[2 * times.size() - 1];
    std::size_t M = joint.size();
    for (std::size_t i = 0; i < first.size(); ++i)
      M = std::max({M, static_cast<std::size_t>(first[i]) + 1, static_cast<std::size_t>(last[i]) + 1});
    std::vector<double> ref(M * M, 0.0);
    for (std::size_t i = 0; i < joint.size(); ++i)
      for (std::size_t j = 0; j < joint[i].size(); ++j) ref[i * M + j] = joint[i][j];
    std::vector<int> flat;
    for (std::size_t i = 0; i < first.size(); ++i)
      flat.push_back(first[i] * static_cast<int>(M) + last[i]);
    r.two_time = compare_counts(flat, ref);
    r.two_time.empirical.clear();
    r.two_time.reference.clear();
  }

  if (options.collapse_probe) {
    const auto& c = outcomes.back();
    long hits = 0;
    std::vector<double> xs;
    for (int x : c) {
      if (x >= options.collapse_k) ++hits;
      xs.push_back(x);
    }
    r.collapse_tail = static_cast<double>(hits) / static_cast<double>(c.size());
    r.collapse_blocks = make_estimate(std::move(xs));
    r.collapse_blocks.per_replica.clear();
  }
  return r;
}

// ---- partition structure ----

std::vector<int> separated_sites(const GeographySpec& torus, int n) {
  if (torus.topology() != Topology::Torus || torus.dim() < 3)
    throw Error(ErrorCode::InvalidArgument, "separated placements need a torus of dimension >= 3");
  const int N = torus.torus_n();
  const int a = std::max(1, static_cast<int>(std::lround(std::pow(static_cast<double>(N), 0.75))));
  std::vector<std::vector<int>> pts;
  const auto axis = [&](int i, int len) {
    std::vector<int> v(static_cast<std::size_t>(torus.dim()), 0);
    v[static_cast<std::size_t>(i)] = len;
    return v;
  };
  const auto add = [](std::vector<int> x, const std::vector<int>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    return x;
  };
  switch (n) {
    case 2: pts = {axis(0, 0), axis(0, N)}; break;
    case 3: pts = {axis(0, a), axis(1, a), axis(2, a)}; break;
    case 4: pts = {axis(0, 0), add(axis(0, a), axis(1, a)), add(axis(0, a), axis(2, a)), add(axis(1, a), axis(2, a))}; break;
    default: throw Error(ErrorCode::InvalidArgument, "separated placements exist for n = 2, 3, 4");
  }
  std::vector<int> sites;
  for (const auto& p : pts) sites.push_back(torus.site_of(p));
  return sites;
}

PartitionStructureReport partition_structure_experiment(int N, const WalkSpec& walk, const KernelPtr& kernel,
                                                        const LabeledPartition& initial, const RunOptions& run,
                                                        double kappa_value) {
  const int n = static_cast<int>(initial.alive_count());
  if (n < 2 || n > 8) throw Error(ErrorCode::ValidationError, "partition structure needs 2 to 8 blocks");
  check_replicas(run);
  auto geo = std::make_shared<const GeographySpec>(build_torus(N, walk));
  PartitionStructureReport r;
  r.N = N;
  r.n = n;
  r.kappa = resolve_kappa(kappa_value, walk, kernel);
  const double V = static_cast<double>(geo->sites());

  SimulationConfig cfg = base_config(kernel, geo, run);
  cfg.record_events = true;
  cfg.stop = StopRule::BlocksAtMost;
  cfg.stop_blocks = 1;

  // Indexed by the number of blocks b before the merge.
  std::vector<std::vector<double>> waits(static_cast<std::size_t>(n) + 1);
  r.pair_counts.assign(static_cast<std::size_t>(n) - 1, {});
  for (int b = n; b >= 2; --b) r.pair_counts[static_cast<std::size_t>(n - b)].assign(static_cast<std::size_t>(b * (b - 1) / 2), 0);

  for (long i = 0; i < run.replicas; ++i) {
    cfg.seed = derive_seed(run.seed, static_cast<std::uint64_t>(i));
    const TrajectoryRecord rec = simulate(initial, cfg);
    std::vector<int> live;
    for (const auto& blk : initial.blocks())
      if (blk.site != kCemetery) live.push_back(blk.elements.front());
    double last = 0.0;
    for (const auto& e : rec.events) {
      if (e.kind != EventKind::Merge) continue;
      const int b = static_cast<int>(live.size());
      waits[static_cast<std::size_t>(b)].push_back((e.time - last) / V);
      last = e.time;
      ++r.merges;
      if (e.k > 2) {
        ++r.multiple_merges;
      } else {
        const auto rank = [&](int m) {
          return static_cast<int>(std::lower_bound(live.begin(), live.end(), m) - live.begin());
        };
        int x = rank(e.blocks[0]), y = rank(e.blocks[1]);
        if (x > y) std::swap(x, y);
        // Lexicographic index of the pair (x, y), x < y, among b blocks.
        const int idx = x * (2 * b - x - 1) / 2 + (y - x - 1);
        ++r.pair_counts[static_cast<std::size_t>(n - b)][static_cast<std::size_t>(idx)];
      }
      for (std::size_t j = 1; j < e.blocks.size(); ++j)
        live.erase(std::lower_bound(live.begin(), live.end(), e.blocks[j]));
    }
  }
  r.multiple_fraction = r.merges ? static_cast<double>(r.multiple_merges) / static_cast<double>(r.merges) : 0.0;
  for (int b = n; b >= 2; --b) {
    const auto& w = waits[static_cast<std::size_t>(b)];
    const double rate = r.kappa * 0.5 * b * (b - 1.0);
    if (w.empty()) {
      r.inter_coalescence_ks.push_back(1.0);
      r.inter_coalescence_ks_p.push_back(0.0);
    } else {
      const double d = ks_statistic(w, [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); });
      r.inter_coalescence_ks.push_back(d);
      r.inter_coalescence_ks_p.push_back(ks_pvalue(d, static_cast<long>(w.size())));
    }
    const auto& counts = r.pair_counts[static_cast<std::size_t>(n - b)];
    if (counts.size() < 2) {
      r.pair_chi_square_p.push_back(1.0);
      continue;
    }
    std::vector<double> obs(counts.begin(), counts.end());
    double total = 0.0;
    for (double o : obs) total += o;
    if (total == 0.0) {
      r.pair_chi_square_p.push_back(1.0);
      continue;
    }
    const std::vector<double> uniform(obs.size(), 1.0 / static_cast<double>(obs.size()));
    r.pair_chi_square_p.push_back(chi_square_test(obs, uniform).p_value);
  }
  return r;
}

// ---- class coupling ----

namespace {

class DominationObserver : public CoupledObserver {
 public:
  void on_state(double, const Simulator& driver, const std::vector<LabeledPartition>&,
                const std::vector<int>& counts) override {
    ++checks;
    if (driver.alive_blocks() > counts.front()) ++violations;
    if (driver.alive_blocks() != counts.front()) equal = false;
  }
  bool wants_partitions() const override { return false; }

  long checks = 0;
  long violations = 0;
  bool equal = true;
};

}  // namespace

ClassCouplingReport class_coupling_check(const GeoPtr& geography, const KernelPtr& kernel,
                                         const LabeledPartition& initial, const std::vector<int>& block_class,
                                         double t, const RunOptions& run) {
  check_replicas(run);
  if (block_class.size() != initial.size())
    throw Error(ErrorCode::ValidationError, "class split must assign every initial block");
  ClassCouplingReport r;
  r.replicas = run.replicas;
  SimulationConfig cfg = base_config(kernel, geography, run);
  cfg.horizon = t;
  DominationObserver obs;
  std::vector<double> full, split;
  for (long i = 0; i < run.replicas; ++i) {
    cfg.seed = derive_seed(run.seed, static_cast<std::uint64_t>(i));
    const auto recs = coupled_simulate(initial, {CoupledVariant{initial, block_class}}, cfg, &obs);
    full.push_back(recs[0].alive_blocks);
    split.push_back(recs[1].alive_blocks);
  }
  r.checks = obs.checks;
  r.violations = obs.violations;
  r.equality_everywhere = obs.equal;
  r.full_at_t = make_estimate(std::move(full));
  r.full_at_t.per_replica.clear();
  r.classes_at_t = make_estimate(std::move(split));
  r.classes_at_t.per_replica.clear();
  return r;
}

DecayFitReport block_decay_fit(const std::vector<int>& Ns, const WalkSpec& walk, const KernelPtr& kernel,
                               const std::vector<double>& times, const RunOptions& run) {
  check_replicas(run);
  if (times.empty() || !std::is_sorted(times.begin(), times.end()) || !(times.front() > 0.0))
    throw Error(ErrorCode::ValidationError, "decay fit needs positive sorted times");
  DecayFitReport r;
  r.Ns = Ns;
  r.times = times;
  for (int N : Ns) {
    auto geo = std::make_shared<const GeographySpec>(build_torus(N, walk));
    SimulationConfig cfg = base_config(kernel, geo, run);
    cfg.probe_times = times;
    cfg.horizon = times.back();
    const LabeledPartition init = LabeledPartition::per_site(1, geo->sites());
    std::vector<double> sums(times.size(), 0.0);
    for (long i = 0; i < run.replicas; ++i) {
      cfg.seed = derive_seed(run.seed, static_cast<std::uint64_t>(i));
      const TrajectoryRecord rec = simulate(init, cfg);
      for (std::size_t j = 0; j < times.size(); ++j) sums[j] += rec.probe_counts[j];
    }
    std::vector<double> row;
    double sup = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
      const double mean = sums[j] / static_cast<double>(run.replicas);
      const double ratio = mean / std::max(1.0, static_cast<double>(geo->sites()) / times[j]);
      row.push_back(ratio);
      sup = std::max(sup, ratio);
    }
    r.ratio.push_back(std::move(row));
    r.sup_ratio.push_back(sup);
  }
  const auto [lo, hi] = std::minmax_element(r.sup_ratio.begin(), r.sup_ratio.end());
  r.stable = !r.sup_ratio.empty() && *hi <= 2.0 * *lo;
  return r;
}

// ---- JSON ----

json to_json(const EstimateReport& r, bool with_samples) {
  json j{{"estimate", r.estimate}, {"standard_error", r.standard_error}, {"replicas", r.replicas},
         {"confidence", r.confidence}, {"lower", r.lower}, {"upper", r.upper}, {"warnings", r.warnings}};
  if (with_samples) j["per_replica"] = r.per_replica;
  return j;
}

json to_json(const DistributionComparison& r) {
  json j{{"ks", r.ks}, {"tv", r.tv}, {"chi_square", r.chi_square}, {"chi_square_p", r.chi_square_p},
         {"dof", r.dof}, {"sample_size", r.sample_size}};
  if (!r.empirical.empty()) j["empirical"] = r.empirical;
  if (!r.reference.empty()) j["reference"] = r.reference;
  return j;
}

namespace {
json green_json(const GreenEstimate& g) {
  return {{"method", to_string(g.method)}, {"estimate", g.estimate}, {"error", g.error}, {"head", g.head},
          {"tail", g.tail}, {"standard_error", g.standard_error}, {"budget", g.budget}};
}
}  // namespace

json to_json(const KappaInfo& r) {
  json j{{"lattice", green_json(r.lattice)}, {"kappa", r.kappa}, {"lambda22", r.lambda22},
         {"methods_agree", r.methods_agree}};
  if (r.monte_carlo.budget > 0) j["monte_carlo"] = green_json(r.monte_carlo);
  return j;
}

json to_json(const TnkReport& r) {
  return {{"n", r.n}, {"k", r.k}, {"sites", r.sites}, {"time", to_json(r.time)},
          {"theorem_bound", r.theorem_bound}, {"lemma_bound", r.lemma_bound}, {"rho", r.rho},
          {"verdict", to_string(r.verdict)}, {"upper_ci_below_bound", r.upper_ci_below_bound}};
}

json to_json(const TrendReport& r) {
  json pts = json::array();
  for (const auto& p : r.points) {
    json j{{"n", p.n}, {"blocks", to_json(p.blocks)}};
    if (p.killed_variant.replicas > 0) j["killed_variant"] = to_json(p.killed_variant);
    pts.push_back(j);
  }
  return {{"t_probe", r.t_probe}, {"points", pts}, {"growth_exponent", r.growth_exponent},
          {"increasing", r.increasing}, {"saturated", r.saturated},
          {"killed_growth_exponent", r.killed_growth_exponent}, {"verdict", to_string(r.verdict)}};
}

json to_json(const PairwiseReport& r) {
  return {{"N", r.N}, {"volume", r.volume}, {"kappa", r.kappa}, {"mean", to_json(r.mean)}, {"ks", r.ks},
          {"ks_p_value", r.ks_p_value}, {"fitted_rate", r.fitted_rate}};
}

json to_json(const BlockCountReport& r) {
  json direct = json::array(), two = json::array();
  for (const auto& c : r.direct) direct.push_back(to_json(c));
  for (const auto& c : r.two_stage) two.push_back(to_json(c));
  return {{"N", r.N}, {"volume", r.volume}, {"kappa", r.kappa}, {"times", r.times}, {"direct", direct},
          {"two_stage", two}, {"two_time", to_json(r.two_time)}, {"collapse_time", r.collapse_time},
          {"collapse_tail", r.collapse_tail}, {"collapse_blocks", to_json(r.collapse_blocks)},
          {"pilot_events", r.pilot_events}, {"projected_events", r.projected_events}};
}

json to_json(const PartitionStructureReport& r) {
  return {{"N", r.N}, {"n", r.n}, {"kappa", r.kappa}, {"inter_coalescence_ks", r.inter_coalescence_ks},
          {"inter_coalescence_ks_p", r.inter_coalescence_ks_p}, {"pair_counts", r.pair_counts},
          {"pair_chi_square_p", r.pair_chi_square_p}, {"merges", r.merges},
          {"multiple_merges", r.multiple_merges}, {"multiple_fraction", r.multiple_fraction}};
}

json to_json(const ClassCouplingReport& r) {
  return {{"replicas", r.replicas}, {"checks", r.checks}, {"violations", r.violations},
          {"equality_everywhere", r.equality_everywhere}, {"full_at_t", to_json(r.full_at_t)},
          {"classes_at_t", to_json(r.classes_at_t)}};
}

json to_json(const DecayFitReport& r) {
  return {{"Ns", r.Ns}, {"times", r.times}, {"ratio", r.ratio}, {"sup_ratio", r.sup_ratio}, {"stable", r.stable}};
}

}  // namespace lcoal
