#include "lcoal/engine.hpp"

#include <algorithm>
#include <cmath>

namespace lcoal {

std::string to_string(StopRule r) {
  switch (r) {
    case StopRule::Horizon: return "HORIZON";
    case StopRule::BlocksAtMost: return "BLOCKS_AT_MOST";
    case StopRule::Absorbed: return "ABSORBED";
  }
  return "?";
}

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::Merge: return "MERGE";
    case EventKind::Migrate: return "MIGRATE";
    case EventKind::Kill: return "KILL";
  }
  return "?";
}

void SimulationConfig::validate() const {
  if (!geography) throw Error(ErrorCode::InvalidArgument, "simulation needs a geography");
  if (!(horizon > 0.0)) throw Error(ErrorCode::ValidationError, "horizon must be > 0");
  if (stop == StopRule::BlocksAtMost && stop_blocks < 1)
    throw Error(ErrorCode::ValidationError, "BLOCKS_AT_MOST needs m >= 1");
  if (event_budget < 0) throw Error(ErrorCode::ValidationError, "event budget must be >= 0");
  if (!std::is_sorted(probe_times.begin(), probe_times.end()))
    throw Error(ErrorCode::ValidationError, "probe times must be sorted");
}

namespace {

// Prefix sums over nonnegative doubles. Rebuilt periodically so rounding
// from incremental updates does not accumulate.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : val_(n, 0.0), tree_(n + 1, 0.0) {
    top_ = 1;
    while (top_ * 2 <= n) top_ *= 2;
  }

  void set(std::size_t i, double v) {
    const double d = v - val_[i];
    if (d == 0.0) return;
    val_[i] = v;
    if (++updates_ >= kRebuildEvery) {
      rebuild();
      return;
    }
    for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) tree_[j] += d;
    total_ += d;
  }

  double value(std::size_t i) const { return val_[i]; }
  double total() const { return total_ > 0.0 ? total_ : 0.0; }

  // Index whose cumulative range contains u in [0, total).
  std::size_t find(double u) const {
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step >>= 1) {
      const std::size_t nxt = pos + step;
      if (nxt < tree_.size() && tree_[nxt] <= u) {
        pos = nxt;
        u -= tree_[nxt];
      }
    }
    std::size_t i = std::min(pos, val_.size() - 1);
    if (val_[i] > 0.0) return i;
    // Rounding landed on an empty slot; take the nearest nonempty one.
    for (std::size_t r = 1; r < val_.size(); ++r) {
      if (i >= r && val_[i - r] > 0.0) return i - r;
      if (i + r < val_.size() && val_[i + r] > 0.0) return i + r;
    }
    return i;
  }

  void rebuild() {
    updates_ = 0;
    std::fill(tree_.begin(), tree_.end(), 0.0);
    total_ = 0.0;
    for (std::size_t i = 0; i < val_.size(); ++i) {
      total_ += val_[i];
      for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) tree_[j] += val_[i];
    }
  }

 private:
  static constexpr long kRebuildEvery = 1 << 15;
  std::vector<double> val_;
  std::vector<double> tree_;
  std::size_t top_;
  double total_ = 0.0;
  long updates_ = 0;
};

}  // namespace

struct Simulator::Impl {
  SimulationConfig cfg;
  const GeographySpec* geo = nullptr;
  LabeledPartition initial;
  Rng rng;
  double t = 0.0;

  std::vector<BlockSummary> blocks;
  std::vector<std::vector<int>> elems;  // only with element tracking
  std::vector<char> alive;
  std::vector<std::vector<int>> roster;
  std::vector<int> pos_in_site;
  std::vector<int> live;
  std::vector<int> pos_in_live;

  Fenwick coal;
  Fenwick mig;
  bool uniform_escape = true;
  double escape_rate = 0.0;
  std::vector<double> escape;
  std::vector<AliasTable> dest;
  std::vector<std::vector<int>> dest_site;

  std::vector<double> lam;
  std::shared_ptr<MergeLaw> law;
  std::shared_ptr<const MergeLawTable> table;

  std::vector<EventListener*> listeners;
  TrajectoryRecord rec;
  std::size_t next_probe = 0;
  std::vector<int> scratch;

  Impl(const LabeledPartition& init, SimulationConfig c)
      : cfg(std::move(c)), initial(init), rng(cfg.seed),
        coal(static_cast<std::size_t>(std::max(cfg.geography ? cfg.geography->sites() : 1, 1))),
        mig(static_cast<std::size_t>(std::max(cfg.geography ? cfg.geography->sites() : 1, 1))) {
    cfg.validate();
    geo = cfg.geography.get();
    const int sites = geo->sites();
    initial.validate_labels(sites, cfg.killing);

    blocks.reserve(initial.size());
    for (const auto& b : initial.blocks())
      blocks.push_back({b.elements.front(), static_cast<int>(b.elements.size()), b.site});
    if (cfg.track_elements)
      for (const auto& b : initial.blocks()) elems.push_back(b.elements);
    alive.assign(blocks.size(), 0);
    roster.assign(static_cast<std::size_t>(sites), {});
    pos_in_site.assign(blocks.size(), -1);
    pos_in_live.assign(blocks.size(), -1);
    for (std::size_t id = 0; id < blocks.size(); ++id) {
      if (blocks[id].site == kCemetery) continue;
      alive[id] = 1;
      auto& r = roster[static_cast<std::size_t>(blocks[id].site)];
      pos_in_site[id] = static_cast<int>(r.size());
      r.push_back(static_cast<int>(id));
      pos_in_live[id] = static_cast<int>(live.size());
      live.push_back(static_cast<int>(id));
    }

    if (cfg.kernel) {
      if (cfg.kernel->measure().is_zero()) cfg.kernel.reset();
    }
    if (cfg.kernel) {
      law = cfg.merge_law ? cfg.merge_law : std::make_shared<MergeLaw>(cfg.kernel);
      std::size_t most = 2;
      for (const auto& r : roster) most = std::max(most, r.size());
      lam = cfg.kernel->lambda_table(static_cast<int>(most));
    }

    if (cfg.migration && sites > 1) {
      escape.assign(static_cast<std::size_t>(sites), 0.0);
      dest.resize(static_cast<std::size_t>(sites));
      dest_site.resize(static_cast<std::size_t>(sites));
      for (int s = 0; s < sites; ++s) {
        std::vector<double> w;
        for (const auto& e : geo->row(s)) {
          if (e.to == s || e.p <= 0.0) continue;
          w.push_back(e.p);
          dest_site[static_cast<std::size_t>(s)].push_back(e.to);
        }
        double esc = 0.0;
        for (double x : w) esc += x;
        escape[static_cast<std::size_t>(s)] = esc;
        if (!w.empty()) dest[static_cast<std::size_t>(s)] = AliasTable(w);
      }
      escape_rate = escape[0];
      for (double e : escape)
        if (std::fabs(e - escape_rate) > 1e-15) uniform_escape = false;
    }
    for (int s = 0; s < sites; ++s) refresh_site(s);

    rec.initial = initial;
    rec.seed = cfg.seed;
    rec.probe_counts.assign(cfg.probe_times.size(), -1);
    if (cfg.record_site_series)
      for (int s = 0; s < sites; ++s)
        rec.site_series.push_back({0.0, s, static_cast<int>(roster[static_cast<std::size_t>(s)].size())});
  }

  double lambda_of(std::size_t b) {
    if (!cfg.kernel || b < 2) return 0.0;
    if (b >= lam.size()) lam = cfg.kernel->lambda_table(static_cast<int>(std::max(b, 2 * lam.size())));
    return lam[b];
  }

  void refresh_site(int s) {
    const std::size_t c = roster[static_cast<std::size_t>(s)].size();
    coal.set(static_cast<std::size_t>(s), lambda_of(c));
    if (!uniform_escape) mig.set(static_cast<std::size_t>(s), static_cast<double>(c) * escape[static_cast<std::size_t>(s)]);
    if (cfg.record_site_series && t > 0.0) rec.site_series.push_back({t, s, static_cast<int>(c)});
  }

  void roster_remove(int id) {
    auto& r = roster[static_cast<std::size_t>(blocks[static_cast<std::size_t>(id)].site)];
    const int p = pos_in_site[static_cast<std::size_t>(id)];
    const int last = r.back();
    r[static_cast<std::size_t>(p)] = last;
    pos_in_site[static_cast<std::size_t>(last)] = p;
    r.pop_back();
    pos_in_site[static_cast<std::size_t>(id)] = -1;
  }

  void roster_add(int id, int s) {
    auto& r = roster[static_cast<std::size_t>(s)];
    pos_in_site[static_cast<std::size_t>(id)] = static_cast<int>(r.size());
    r.push_back(id);
    blocks[static_cast<std::size_t>(id)].site = s;
  }

  void live_remove(int id) {
    const int p = pos_in_live[static_cast<std::size_t>(id)];
    const int last = live.back();
    live[static_cast<std::size_t>(p)] = last;
    pos_in_live[static_cast<std::size_t>(last)] = p;
    live.pop_back();
    pos_in_live[static_cast<std::size_t>(id)] = -1;
    alive[static_cast<std::size_t>(id)] = 0;
  }

  int sample_merge_size(int b) {
    if (b == 2 || law->binary_only()) return 2;
    if (!table || table->capacity() < b) table = law->table_for(b);
    return table->sample(b, rng.uniform());
  }

  void do_merge(int s) {
    auto& r = roster[static_cast<std::size_t>(s)];
    const int b = static_cast<int>(r.size());
    const int k = sample_merge_size(b);
    // Partial Fisher-Yates: the first k roster slots become a uniform k-subset.
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(b - i)));
      std::swap(r[static_cast<std::size_t>(i)], r[static_cast<std::size_t>(j)]);
      pos_in_site[static_cast<std::size_t>(r[static_cast<std::size_t>(i)])] = i;
      pos_in_site[static_cast<std::size_t>(r[static_cast<std::size_t>(j)])] = j;
    }
    scratch.assign(r.begin(), r.begin() + k);
    std::sort(scratch.begin(), scratch.end(), [this](int x, int y) {
      return blocks[static_cast<std::size_t>(x)].min < blocks[static_cast<std::size_t>(y)].min;
    });
    const int survivor = scratch.front();
    auto& sb = blocks[static_cast<std::size_t>(survivor)];
    for (std::size_t i = 1; i < scratch.size(); ++i) {
      const int id = scratch[i];
      sb.size += blocks[static_cast<std::size_t>(id)].size;
      if (cfg.track_elements) {
        auto& dst = elems[static_cast<std::size_t>(survivor)];
        auto& src = elems[static_cast<std::size_t>(id)];
        dst.insert(dst.end(), src.begin(), src.end());
        src.clear();
        src.shrink_to_fit();
      }
      roster_remove(id);
      live_remove(id);
    }
    refresh_site(s);
    if (cfg.record_events) {
      Event e{t, EventKind::Merge, s, s, {}, k, static_cast<int>(live.size())};
      for (int id : scratch) e.blocks.push_back(blocks[static_cast<std::size_t>(id)].min);
      rec.events.push_back(std::move(e));
    }
    for (auto* l : listeners) l->on_merge(t, s, scratch, survivor);
  }

  void do_migrate(int id) {
    const int from = blocks[static_cast<std::size_t>(id)].site;
    const auto fs = static_cast<std::size_t>(from);
    const int to = dest_site[fs][dest[fs].sample(rng)];
    roster_remove(id);
    roster_add(id, to);
    refresh_site(from);
    refresh_site(to);
    if (cfg.record_events)
      rec.events.push_back({t, EventKind::Migrate, from, to, {blocks[static_cast<std::size_t>(id)].min}, 0,
                            static_cast<int>(live.size())});
    for (auto* l : listeners) l->on_migrate(t, id, from, to);
  }

  void do_kill(int id) {
    const int from = blocks[static_cast<std::size_t>(id)].site;
    roster_remove(id);
    live_remove(id);
    blocks[static_cast<std::size_t>(id)].site = kCemetery;
    refresh_site(from);
    if (cfg.record_events)
      rec.events.push_back({t, EventKind::Kill, from, kCemetery, {blocks[static_cast<std::size_t>(id)].min}, 0,
                            static_cast<int>(live.size())});
    for (auto* l : listeners) l->on_kill(t, id);
  }

  bool predicate_holds() const {
    return cfg.stop == StopRule::BlocksAtMost && static_cast<int>(live.size()) <= cfg.stop_blocks;
  }

  void probes_before(double until, bool inclusive) {
    while (next_probe < cfg.probe_times.size() &&
           (cfg.probe_times[next_probe] < until || (inclusive && cfg.probe_times[next_probe] <= until)))
      rec.probe_counts[next_probe++] = static_cast<int>(live.size());
  }

  void finalize() {
    rec.end_time = t;
    rec.alive_blocks = static_cast<int>(live.size());
    rec.final_blocks.clear();
    for (std::size_t id = 0; id < blocks.size(); ++id)
      if (alive[id] || blocks[id].site == kCemetery) rec.final_blocks.push_back(blocks[id]);
    std::sort(rec.final_blocks.begin(), rec.final_blocks.end(),
              [](const BlockSummary& a, const BlockSummary& b) { return a.min < b.min; });
    if (cfg.track_elements) rec.final_partition = current_partition();
  }

  LabeledPartition current_partition() const {
    if (!cfg.track_elements) throw Error(ErrorCode::InvalidArgument, "partition requires element tracking");
    std::vector<LabeledBlock> out;
    for (std::size_t id = 0; id < blocks.size(); ++id)
      if (!elems[id].empty()) out.push_back({elems[id], blocks[id].site});
    return LabeledPartition(initial.n(), std::move(out));
  }

  TrajectoryRecord run() {
    for (;;) {
      if (predicate_holds()) {
        rec.predicate_hit = true;
        probes_before(t, true);
        break;
      }
      const double rc = coal.total();
      double rm = 0.0;
      if (!escape.empty()) rm = uniform_escape ? escape_rate * static_cast<double>(live.size()) : mig.total();
      const double rk = cfg.killing ? static_cast<double>(live.size()) : 0.0;
      const double total = rc + rm + rk;
      if (!(total > 0.0)) {
        rec.absorbed = true;
        if (cfg.stop != StopRule::Absorbed && !std::isfinite(cfg.horizon))
          throw Error(ErrorCode::ZeroRateDeadlock, "all rates vanished before the stop predicate held");
        probes_before(std::numeric_limits<double>::infinity(), true);
        break;
      }
      const double dt = rng.exponential(total);
      if (t + dt > cfg.horizon) {
        probes_before(cfg.horizon, true);
        t = cfg.horizon;
        break;
      }
      if (cfg.event_budget > 0 && rec.event_count >= cfg.event_budget) {
        finalize();
        auto partial = std::make_shared<TrajectoryRecord>(std::move(rec));
        throw BudgetExceededError("event budget of " + std::to_string(cfg.event_budget) + " exhausted at t=" +
                                      std::to_string(t),
                                  std::move(partial));
      }
      probes_before(t + dt, false);
      t += dt;
      const double u = rng.uniform() * total;
      if (u < rc) {
        do_merge(static_cast<int>(coal.find(u)));
      } else if (u < rc + rm) {
        int id;
        if (uniform_escape) {
          id = live[rng.below(live.size())];
        } else {
          const auto& r = roster[mig.find(u - rc)];
          id = r[rng.below(r.size())];
        }
        do_migrate(id);
      } else {
        do_kill(live[rng.below(live.size())]);
      }
      ++rec.event_count;
      for (auto* l : listeners) l->after_event(t);
    }
    finalize();
    return std::move(rec);
  }
};

Simulator::Simulator(const LabeledPartition& initial, SimulationConfig config)
    : impl_(std::make_unique<Impl>(initial, std::move(config))) {}
Simulator::~Simulator() = default;

void Simulator::add_listener(EventListener* l) { impl_->listeners.push_back(l); }
TrajectoryRecord Simulator::run() { return impl_->run(); }
double Simulator::time() const { return impl_->t; }
int Simulator::alive_blocks() const { return static_cast<int>(impl_->live.size()); }
int Simulator::site_count(int site) const {
  return static_cast<int>(impl_->roster.at(static_cast<std::size_t>(site)).size());
}
const BlockSummary& Simulator::block(int id) const { return impl_->blocks.at(static_cast<std::size_t>(id)); }
bool Simulator::block_alive(int id) const { return impl_->alive.at(static_cast<std::size_t>(id)) != 0; }
LabeledPartition Simulator::partition() const { return impl_->current_partition(); }

TrajectoryRecord simulate(const LabeledPartition& initial, const SimulationConfig& config) {
  Simulator sim(initial, config);
  return sim.run();
}

}  // namespace lcoal
