#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "lcoal/error.hpp"
#include "lcoal/geometry.hpp"
#include "lcoal/merge_table.hpp"
#include "lcoal/partition.hpp"
#include "lcoal/rates.hpp"
#include "lcoal/rng.hpp"

namespace lcoal {

enum class StopRule { Horizon, BlocksAtMost, Absorbed };
std::string to_string(StopRule r);

struct SimulationConfig {
  KernelPtr kernel;  // null means no coalescence (zero measure)
  std::shared_ptr<MergeLaw> merge_law;  // optional, shared across replicas of one kernel
  std::shared_ptr<const GeographySpec> geography;
  bool killing = false;
  bool migration = true;
  double horizon = std::numeric_limits<double>::infinity();
  StopRule stop = StopRule::Horizon;
  int stop_blocks = 1;  // m of BLOCKS_AT_MOST(m)
  std::uint64_t seed = 0;
  long event_budget = 0;  // 0 = unlimited
  bool track_elements = true;
  bool record_events = true;
  bool record_site_series = false;
  std::vector<double> probe_times;  // sorted; total block count is sampled at each

  void validate() const;
};

enum class EventKind { Merge, Migrate, Kill };
std::string to_string(EventKind k);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::Merge;
  int site = 0;                   // merge site, or source of a migration
  int to = 0;                     // migration target
  std::vector<int> blocks;        // participant ids (least elements) before the event
  int k = 0;                      // merge size
  int blocks_after = 0;           // alive blocks after the event
};

struct BlockSummary {
  int min = 0;
  int size = 0;
  int site = 0;
};

struct SiteCountChange {
  double time = 0.0;
  int site = 0;
  int count = 0;
};

struct TrajectoryRecord {
  LabeledPartition initial;
  std::uint64_t seed = 0;
  std::vector<Event> events;
  std::vector<SiteCountChange> site_series;  // count of each site after every change
  std::vector<int> probe_counts;             // -1 where the run stopped before the probe
  double end_time = 0.0;
  long event_count = 0;
  bool absorbed = false;
  bool predicate_hit = false;
  int alive_blocks = 0;
  std::vector<BlockSummary> final_blocks;  // ordered by least element, killed ones included
  LabeledPartition final_partition;        // only when elements are tracked
};

class BudgetExceededError : public Error {
 public:
  BudgetExceededError(std::string what, std::shared_ptr<TrajectoryRecord> partial)
      : Error(ErrorCode::BudgetExceeded, std::move(what)), partial_(std::move(partial)) {}
  const TrajectoryRecord& partial() const { return *partial_; }

 private:
  std::shared_ptr<TrajectoryRecord> partial_;
};

// Hooks called after each event is applied. Ids index the initial block list.
class EventListener {
 public:
  virtual ~EventListener() = default;
  virtual void on_merge(double t, int site, const std::vector<int>& ids, int survivor) {
    (void)t, (void)site, (void)ids, (void)survivor;
  }
  virtual void on_migrate(double t, int id, int from, int to) { (void)t, (void)id, (void)from, (void)to; }
  virtual void on_kill(double t, int id) { (void)t, (void)id; }
  virtual void after_event(double t) { (void)t; }
};

class Simulator {
 public:
  Simulator(const LabeledPartition& initial, SimulationConfig config);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  void add_listener(EventListener* l);
  // Runs to the stop rule or horizon. BUDGET_EXCEEDED / ZERO_RATE_DEADLOCK on failure.
  TrajectoryRecord run();

  double time() const;
  int alive_blocks() const;
  int site_count(int site) const;
  const BlockSummary& block(int id) const;
  bool block_alive(int id) const;
  // Current partition; requires element tracking.
  LabeledPartition partition() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

TrajectoryRecord simulate(const LabeledPartition& initial, const SimulationConfig& config);

// Coupled runs of restricted or class-split variants of the finest start.
// Variant i is either a restriction of initials[0] to its ground set, or
// (when classes[i] is given) the union of class restrictions of initials[0],
// with classes[i][j] the class of block j of initials[0].
struct CoupledVariant {
  LabeledPartition initial;
  std::vector<int> block_class;  // empty: a single class
};

class CoupledObserver {
 public:
  virtual ~CoupledObserver() = default;
  // Called at time 0 and after every driver event.
  virtual void on_state(double t, const Simulator& driver, const std::vector<LabeledPartition>& variants,
                        const std::vector<int>& variant_counts) = 0;
  // Whether on_state needs the variant partitions (otherwise they are empty).
  virtual bool wants_partitions() const { return true; }
};

std::vector<TrajectoryRecord> coupled_simulate(const LabeledPartition& driver, const std::vector<CoupledVariant>& variants,
                                               const SimulationConfig& config, CoupledObserver* observer = nullptr);

// Serialization.
std::string trajectory_jsonl(const TrajectoryRecord& rec, const std::string& config_hash);
std::string trajectory_csv(const TrajectoryRecord& rec);

}  // namespace lcoal
