#include <algorithm>
#include <limits>

#include "lcoal/engine.hpp"

namespace lcoal {

namespace {

struct VariantBlock {
  std::vector<int> elements;
  int site = 0;
  bool alive = true;
};

// Follows one variant through the driver's event stream. Variant blocks of one
// class sharing a driver parent merge exactly when their parents merge, which
// makes each class the restriction of the driver to its elements.
class VariantTracker : public EventListener {
 public:
  VariantTracker(const LabeledPartition& driver, const CoupledVariant& v, std::size_t driver_blocks,
                 const SimulationConfig& cfg)
      : initial_(v.initial), probes_(cfg.probe_times), record_events_(cfg.record_events) {
    std::vector<int> parent_of_element(static_cast<std::size_t>(driver.n()) + 1, -1);
    for (std::size_t j = 0; j < driver.blocks().size(); ++j)
      for (int e : driver.blocks()[j].elements) parent_of_element[static_cast<std::size_t>(e)] = static_cast<int>(j);

    if (v.initial.n() > driver.n())
      throw Error(ErrorCode::IncompatibleVariants, "variant ground set exceeds the driver's");
    const auto& vb = v.initial.blocks();
    if (!v.block_class.empty() && v.block_class.size() != vb.size())
      throw Error(ErrorCode::IncompatibleVariants, "class vector must give one class per variant block");
    int classes = 1;
    for (int c : v.block_class) {
      if (c < 0) throw Error(ErrorCode::IncompatibleVariants, "class ids must be >= 0");
      classes = std::max(classes, c + 1);
    }
    owner_.assign(static_cast<std::size_t>(classes), std::vector<int>(driver_blocks, -1));
    for (std::size_t i = 0; i < vb.size(); ++i) {
      const int parent = parent_of_element[static_cast<std::size_t>(vb[i].elements.front())];
      for (int e : vb[i].elements)
        if (parent_of_element[static_cast<std::size_t>(e)] != parent)
          throw Error(ErrorCode::IncompatibleVariants, "variant block straddles driver blocks");
      if (driver.blocks()[static_cast<std::size_t>(parent)].site != vb[i].site)
        throw Error(ErrorCode::IncompatibleVariants, "variant block label differs from its driver block");
      const int c = v.block_class.empty() ? 0 : v.block_class[i];
      auto& slot = owner_[static_cast<std::size_t>(c)][static_cast<std::size_t>(parent)];
      if (slot != -1) throw Error(ErrorCode::IncompatibleVariants, "two blocks of one class share a driver block");
      slot = static_cast<int>(i);
      blocks_.push_back({vb[i].elements, vb[i].site, vb[i].site != kCemetery});
      if (blocks_.back().alive) ++alive_;
    }
    rec_.initial = v.initial;
    rec_.seed = cfg.seed;
    rec_.probe_counts.assign(probes_.size(), -1);
  }

  void on_merge(double t, int site, const std::vector<int>& ids, int survivor) override {
    advance(t);
    for (std::size_t c = 0; c < owner_.size(); ++c) {
      auto& own = owner_[c];
      std::vector<int> mine;
      for (int id : ids) {
        const int v = own[static_cast<std::size_t>(id)];
        if (v != -1) mine.push_back(v);
        own[static_cast<std::size_t>(id)] = -1;
      }
      if (mine.empty()) continue;
      std::sort(mine.begin(), mine.end(), [this](int a, int b) {
        return blocks_[static_cast<std::size_t>(a)].elements.front() < blocks_[static_cast<std::size_t>(b)].elements.front();
      });
      const int keep = mine.front();
      own[static_cast<std::size_t>(survivor)] = keep;
      if (mine.size() < 2) continue;
      std::vector<int> mins;
      for (int v : mine) mins.push_back(blocks_[static_cast<std::size_t>(v)].elements.front());
      auto& dst = blocks_[static_cast<std::size_t>(keep)].elements;
      for (std::size_t i = 1; i < mine.size(); ++i) {
        auto& src = blocks_[static_cast<std::size_t>(mine[i])];
        dst.insert(dst.end(), src.elements.begin(), src.elements.end());
        src.elements.clear();
        src.alive = false;
      }
      std::sort(dst.begin(), dst.end());
      alive_ -= static_cast<int>(mine.size()) - 1;
      if (record_events_) {
        rec_.events.push_back({t, EventKind::Merge, site, site, std::move(mins), static_cast<int>(mine.size()), alive_});
      }
      ++rec_.event_count;
    }
  }

  void on_migrate(double t, int id, int from, int to) override {
    advance(t);
    for (auto& own : owner_) {
      const int v = own[static_cast<std::size_t>(id)];
      if (v == -1) continue;
      blocks_[static_cast<std::size_t>(v)].site = to;
      if (record_events_)
        rec_.events.push_back({t, EventKind::Migrate, from, to, {blocks_[static_cast<std::size_t>(v)].elements.front()}, 0, alive_});
      ++rec_.event_count;
    }
  }

  void on_kill(double t, int id) override {
    advance(t);
    for (auto& own : owner_) {
      const int v = own[static_cast<std::size_t>(id)];
      if (v == -1) continue;
      auto& b = blocks_[static_cast<std::size_t>(v)];
      if (record_events_)
        rec_.events.push_back({t, EventKind::Kill, b.site, kCemetery, {b.elements.front()}, 0, alive_ - 1});
      b.site = kCemetery;
      b.alive = false;
      --alive_;
      ++rec_.event_count;
      own[static_cast<std::size_t>(id)] = -1;
    }
  }

  int alive() const { return alive_; }

  LabeledPartition partition() const {
    std::vector<LabeledBlock> out;
    for (const auto& b : blocks_)
      if (!b.elements.empty()) out.push_back({b.elements, b.site});
    return LabeledPartition(initial_.n(), std::move(out));
  }

  TrajectoryRecord finish(const TrajectoryRecord& driver) {
    for (std::size_t i = next_probe_; i < probes_.size(); ++i)
      if (driver.probe_counts[i] != -1) rec_.probe_counts[i] = alive_;
    rec_.end_time = driver.end_time;
    rec_.absorbed = driver.absorbed;
    rec_.predicate_hit = driver.predicate_hit;
    rec_.alive_blocks = alive_;
    rec_.final_partition = partition();
    for (const auto& b : rec_.final_partition.blocks())
      rec_.final_blocks.push_back({b.elements.front(), static_cast<int>(b.elements.size()), b.site});
    return std::move(rec_);
  }

 private:
  void advance(double t) {
    while (next_probe_ < probes_.size() && probes_[next_probe_] < t) rec_.probe_counts[next_probe_++] = alive_;
  }

  LabeledPartition initial_;
  std::vector<double> probes_;
  bool record_events_;
  std::vector<std::vector<int>> owner_;  // class -> driver block -> variant block
  std::vector<VariantBlock> blocks_;
  int alive_ = 0;
  std::size_t next_probe_ = 0;
  TrajectoryRecord rec_;
};

class StateForwarder : public EventListener {
 public:
  StateForwarder(const Simulator& sim, std::vector<std::unique_ptr<VariantTracker>>& vars, CoupledObserver* obs)
      : sim_(sim), vars_(vars), obs_(obs) {}

  void after_event(double t) override { emit(t); }

  void emit(double t) {
    std::vector<LabeledPartition> parts;
    std::vector<int> counts;
    for (const auto& v : vars_) {
      counts.push_back(v->alive());
      if (obs_->wants_partitions()) parts.push_back(v->partition());
    }
    obs_->on_state(t, sim_, parts, counts);
  }

 private:
  const Simulator& sim_;
  std::vector<std::unique_ptr<VariantTracker>>& vars_;
  CoupledObserver* obs_;
};

}  // namespace

std::vector<TrajectoryRecord> coupled_simulate(const LabeledPartition& driver, const std::vector<CoupledVariant>& variants,
                                               const SimulationConfig& config, CoupledObserver* observer) {
  Simulator sim(driver, config);
  std::vector<std::unique_ptr<VariantTracker>> trackers;
  for (const auto& v : variants) {
    trackers.push_back(std::make_unique<VariantTracker>(driver, v, driver.size(), config));
    sim.add_listener(trackers.back().get());
  }
  std::unique_ptr<StateForwarder> fwd;
  if (observer) {
    fwd = std::make_unique<StateForwarder>(sim, trackers, observer);
    sim.add_listener(fwd.get());
    fwd->emit(0.0);
  }
  std::vector<TrajectoryRecord> out;
  out.push_back(sim.run());
  for (auto& t : trackers) out.push_back(t->finish(out.front()));
  return out;
}

}  // namespace lcoal
