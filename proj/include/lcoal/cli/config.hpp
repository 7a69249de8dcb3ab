#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcoal/engine.hpp"
#include "lcoal/experiments.hpp"
#include "lcoal/geometry.hpp"
#include "lcoal/kingman.hpp"
#include "lcoal/measure.hpp"

namespace lcoal::cli {

inline constexpr int kConfigVersion = 1;

enum class Command { Rates, Classify, Green, Simulate, Experiment };
std::string to_string(Command c);
Command parse_command(const std::string& name);

enum class OutputFormat { Json, Csv, Jsonl };
std::string to_string(OutputFormat f);

struct InitialSpec {
  int per_site = 0;                // n singletons per site when > 0
  std::vector<LabeledBlock> blocks;
  int n = 0;

  LabeledPartition build(int sites) const;
};

struct SimulateSection {
  InitialSpec initial;
  double horizon = 0.0;  // 0: none
  StopRule stop = StopRule::Horizon;
  int stop_blocks = 1;
  bool killing = false;
  bool migration = true;
  bool track_elements = true;
  std::vector<double> probe_times;
};

struct ExperimentSection {
  std::string name;
  // Union of parameters; each experiment reads its own.
  std::vector<int> n;
  int k = 2;
  std::vector<int> N;
  std::vector<int> n_grid;
  double t_probe = 0.5;
  bool killing = false;
  std::vector<double> times;
  double t = 1.0;
  EntranceMethod method = EntranceMethod::Series;
  int n0 = 0;
  double kappa = 0.0;
  bool same_site = false;
  int separation = 0;
  int n_per_site = 10;
  ProbeMode mode = ProbeMode::Direct;
  bool two_time = true;
  int collapse_k = 5;
  long total_event_budget = 0;
  int blocks = 3;
  InitialSpec initial;
  std::vector<int> classes;
  int classifier_b_max = 2000;
};

struct RunConfig {
  int version = kConfigVersion;
  Command command = Command::Rates;
  std::uint64_t seed = 0;
  long replicas = 100;
  std::string output_dir = "out";
  long event_budget = 0;
  OutputFormat format = OutputFormat::Json;

  std::optional<LambdaMeasure> measure;
  int b_max = 200;
  double rel_tol = 1e-13;
  std::vector<int> merge_law_b;

  std::shared_ptr<const GeographySpec> geography;
  WalkSpec walk = WalkSpec::simple(3);
  GreenOptions green;
  bool green_both = true;

  SimulateSection simulate;
  ExperimentSection experiment;

  // Canonical JSON of the effective configuration (command included).
  nlohmann::json canonical;
};

// CLI overrides applied before validation.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> replicas;
  std::optional<std::string> output_dir;
  std::optional<long> budget;
  std::optional<std::string> format;
};

// Parses JSON text (PARSE_ERROR with line and column) and validates it
// (VALIDATION_ERROR listing every problem). A manifest is accepted in place
// of a config; its embedded config is used.
RunConfig parse_config_text(const std::string& text, Command command, const Overrides& overrides = {});
RunConfig parse_config(const std::string& path, std::optional<Command> command, const Overrides& overrides = {});

// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);
std::string config_hash(const nlohmann::json& canonical);

}  // namespace lcoal::cli
