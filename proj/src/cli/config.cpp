#include "lcoal/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "lcoal/error.hpp"

namespace lcoal::cli {

using nlohmann::json;

std::string to_string(Command c) {
  switch (c) {
    case Command::Rates: return "rates";
    case Command::Classify: return "classify";
    case Command::Green: return "green";
    case Command::Simulate: return "simulate";
    case Command::Experiment: return "experiment";
  }
  return "?";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::Rates, Command::Classify, Command::Green, Command::Simulate, Command::Experiment})
    if (to_string(c) == name) return c;
  throw Error(ErrorCode::ValidationError, "unknown command '" + name + "'");
}

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Jsonl: return "jsonl";
  }
  return "?";
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

std::string config_hash(const json& canonical) { return fnv1a_hex(canonical.dump()); }

LabeledPartition InitialSpec::build(int sites) const {
  if (per_site > 0) return LabeledPartition::per_site(per_site, sites);
  return LabeledPartition(n, blocks);
}

namespace {

// Strict reader over one JSON object: type errors and unknown keys are
// collected rather than thrown so that every problem is reported at once.
class Reader {
 public:
  Reader(const json* j, std::string path, std::vector<std::string>& errs) : j_(j), path_(std::move(path)), errs_(errs) {
    if (j_ && !j_->is_object()) {
      fail("", "expected an object");
      j_ = nullptr;
    }
  }

  bool present() const { return j_ != nullptr; }
  bool has(const std::string& key) const { return j_ && j_->contains(key); }

  template <class T>
  T get(const std::string& key, T fallback) {
    seen_.push_back(key);
    if (!has(key)) return fallback;
    try {
      return j_->at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, std::string("expected ") + type_name<T>());
      return fallback;
    }
  }

  template <class T>
  T require(const std::string& key) {
    if (!has(key)) {
      seen_.push_back(key);
      fail(key, "is required");
      return T{};
    }
    return get<T>(key, T{});
  }

  Reader child(const std::string& key) {
    seen_.push_back(key);
    return Reader(has(key) ? &j_->at(key) : nullptr, join(key), errs_);
  }

  const json* raw(const std::string& key) {
    seen_.push_back(key);
    return has(key) ? &j_->at(key) : nullptr;
  }

  void fail(const std::string& key, const std::string& msg) { errs_.push_back(join(key) + ": " + msg); }
  void check(bool ok, const std::string& key, const std::string& msg) {
    if (!ok) fail(key, msg);
  }

  void finish() {
    if (!j_) return;
    for (const auto& [k, v] : j_->items())
      if (std::find(seen_.begin(), seen_.end(), k) == seen_.end()) fail(k, "unknown field");
  }

  std::string join(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "$" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }
  std::vector<std::string>& errors() { return errs_; }

 private:
  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    else if constexpr (std::is_same_v<T, std::string>) return "a string";
    else if constexpr (std::is_integral_v<T>) return "an integer";
    else if constexpr (std::is_floating_point_v<T>) return "a number";
    else return "an array of the right element type";
  }

  const json* j_;
  std::string path_;
  std::vector<std::string>& errs_;
  std::vector<std::string> seen_;
};

// Runs a builder that may throw module errors, recording them as messages.
template <class F>
void guarded(std::vector<std::string>& errs, const std::string& where, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    errs.push_back(where + ": " + e.what());
  }
}

std::optional<LambdaMeasure> read_measure(Reader r) {
  if (!r.present()) return std::nullopt;
  auto& errs = r.errors();
  const std::string preset = r.get<std::string>("preset", "");
  std::optional<LambdaMeasure> m;
  if (!preset.empty()) {
    if (preset == "kingman") {
      const double mass = r.get<double>("mass", 1.0);
      guarded(errs, r.join(""), [&] { m = LambdaMeasure::kingman(mass); });
    } else if (preset == "atom") {
      const double loc = r.require<double>("location");
      const double mass = r.get<double>("mass", 1.0);
      guarded(errs, r.join(""), [&] { m = LambdaMeasure::atom(loc, mass); });
    } else if (preset == "lebesgue") {
      const double v = r.get<double>("value", 1.0);
      guarded(errs, r.join(""), [&] { m = LambdaMeasure::lebesgue(v); });
    } else if (preset == "beta") {
      const double a = r.require<double>("a"), b = r.require<double>("b"), w = r.get<double>("weight", 1.0);
      guarded(errs, r.join(""), [&] { m = LambdaMeasure::beta(a, b, w); });
    } else if (preset == "beta_alpha") {
      const double alpha = r.require<double>("alpha"), w = r.get<double>("weight", 1.0);
      guarded(errs, r.join(""), [&] { m = LambdaMeasure::beta_alpha(alpha, w); });
    } else {
      r.fail("preset", "unknown preset '" + preset + "'");
    }
  } else {
    std::vector<Atom> atoms;
    std::vector<DensityPiece> pieces;
    if (const json* a = r.raw("atoms")) {
      if (!a->is_array()) r.fail("atoms", "expected an array");
      else
        for (std::size_t i = 0; i < a->size(); ++i) {
          Reader ar(&(*a)[i], r.join("atoms") + "[" + std::to_string(i) + "]", errs);
          atoms.push_back({ar.require<double>("location"), ar.require<double>("mass")});
          ar.finish();
        }
    }
    if (const json* d = r.raw("densities")) {
      if (!d->is_array()) r.fail("densities", "expected an array");
      else
        for (std::size_t i = 0; i < d->size(); ++i) {
          Reader dr(&(*d)[i], r.join("densities") + "[" + std::to_string(i) + "]", errs);
          DensityPiece p;
          const std::string kind = dr.require<std::string>("kind");
          p.lo = dr.get<double>("lo", 0.0);
          p.hi = dr.get<double>("hi", 1.0);
          if (kind == "constant") {
            p.kind = DensityKind::Constant;
            p.value = dr.require<double>("value");
          } else if (kind == "beta") {
            p.kind = DensityKind::Beta;
            p.a = dr.require<double>("a");
            p.b = dr.require<double>("b");
            p.weight = dr.get<double>("weight", 1.0);
          } else if (kind == "power") {
            p.kind = DensityKind::Power;
            p.p = dr.get<double>("p", 0.0);
            p.q = dr.get<double>("q", 0.0);
            p.scale = dr.get<double>("scale", 1.0);
          } else if (kind == "polynomial") {
            p.kind = DensityKind::Polynomial;
            p.coeffs = dr.require<std::vector<double>>("coeffs");
          } else if (!kind.empty()) {
            dr.fail("kind", "unknown density kind '" + kind + "'");
          }
          dr.finish();
          pieces.push_back(std::move(p));
        }
    }
    guarded(errs, r.join(""), [&] { m = LambdaMeasure(std::move(atoms), std::move(pieces)); });
  }
  r.finish();
  if (m && m->is_zero()) {
    r.fail("", "total mass must be positive (Lambda([0,1]) > 0 violated)");
    return std::nullopt;
  }
  return m;
}

WalkSpec read_walk(Reader r) {
  WalkSpec w = WalkSpec::simple(3);
  if (!r.present()) return w;
  const std::string type = r.get<std::string>("type", "simple");
  const int dim = r.get<int>("dim", 3);
  if (type == "simple") {
    if (dim < 1) r.fail("dim", "must be >= 1");
    else w = WalkSpec::simple(dim);
  } else if (type == "custom") {
    w.dim = dim;
    w.steps = r.require<std::vector<std::vector<int>>>("steps");
    w.probs = r.require<std::vector<double>>("probs");
    guarded(r.errors(), r.join(""), [&] { w.validate(); });
  } else {
    r.fail("type", "unknown walk type '" + type + "'");
  }
  r.finish();
  return w;
}

std::shared_ptr<const GeographySpec> read_geography(Reader r, const WalkSpec& walk) {
  auto single = std::make_shared<const GeographySpec>(GeographySpec::single_site());
  if (!r.present()) return single;
  const std::string type = r.require<std::string>("type");
  std::shared_ptr<const GeographySpec> g;
  auto& errs = r.errors();
  if (type == "single_site") {
    g = single;
  } else if (type == "complete_graph") {
    const int sites = r.require<int>("sites");
    guarded(errs, r.join(""), [&] { g = std::make_shared<const GeographySpec>(GeographySpec::complete_graph(sites)); });
  } else if (type == "torus") {
    const int N = r.require<int>("N");
    const long budget = r.get<long>("site_budget", kDefaultSiteBudget);
    guarded(errs, r.join(""), [&] { g = std::make_shared<const GeographySpec>(build_torus(N, walk, budget)); });
  } else if (type == "matrix") {
    const auto m = r.require<std::vector<std::vector<double>>>("matrix");
    guarded(errs, r.join(""), [&] { g = std::make_shared<const GeographySpec>(GeographySpec::from_dense(m)); });
  } else if (type == "rows") {
    std::vector<std::vector<KernelEntry>> rows;
    if (const json* rs = r.raw("rows"); rs && rs->is_array()) {
      for (std::size_t i = 0; i < rs->size(); ++i) {
        rows.emplace_back();
        if (!(*rs)[i].is_array()) {
          r.fail("rows", "row " + std::to_string(i) + " must be an array");
          continue;
        }
        for (std::size_t j = 0; j < (*rs)[i].size(); ++j) {
          Reader er(&(*rs)[i][j], r.join("rows") + "[" + std::to_string(i) + "][" + std::to_string(j) + "]", errs);
          rows.back().push_back({er.require<int>("to"), er.require<double>("p")});
          er.finish();
        }
      }
    } else {
      r.fail("rows", "expected an array of rows");
    }
    guarded(errs, r.join(""), [&] { g = std::make_shared<const GeographySpec>(GeographySpec::from_rows(rows)); });
  } else if (!type.empty()) {
    r.fail("type", "unknown geography type '" + type + "'");
  }
  r.finish();
  return g ? g : single;
}

InitialSpec read_initial(Reader r) {
  InitialSpec s;
  if (!r.present()) {
    s.per_site = 1;
    return s;
  }
  s.per_site = r.get<int>("per_site", 0);
  if (const json* b = r.raw("blocks")) {
    if (!b->is_array()) r.fail("blocks", "expected an array");
    else
      for (std::size_t i = 0; i < b->size(); ++i) {
        Reader br(&(*b)[i], r.join("blocks") + "[" + std::to_string(i) + "]", r.errors());
        s.blocks.push_back({br.require<std::vector<int>>("elements"), br.get<int>("site", 0)});
        br.finish();
      }
  }
  for (const auto& b : s.blocks)
    for (int e : b.elements) s.n = std::max(s.n, e);
  if (s.per_site <= 0 && s.blocks.empty()) r.fail("", "needs per_site > 0 or explicit blocks");
  if (s.per_site > 0 && !s.blocks.empty()) r.fail("", "per_site and blocks are exclusive");
  if (s.per_site <= 0) guarded(r.errors(), r.join("blocks"), [&] { LabeledPartition(s.n, s.blocks); });
  r.finish();
  return s;
}

StopRule parse_stop(const std::string& s, Reader& r) {
  if (s == "horizon") return StopRule::Horizon;
  if (s == "blocks_at_most") return StopRule::BlocksAtMost;
  if (s == "absorbed") return StopRule::Absorbed;
  r.fail("rule", "unknown stop rule '" + s + "'");
  return StopRule::Horizon;
}

template <class T>
std::vector<T> scalar_or_list(Reader& r, const std::string& key, std::vector<T> fallback) {
  const json* v = r.raw(key);
  if (!v) return fallback;
  try {
    if (v->is_array()) return v->get<std::vector<T>>();
    return {v->get<T>()};
  } catch (const json::exception&) {
    r.fail(key, "expected a number or an array of numbers");
    return fallback;
  }
}

ExperimentSection read_experiment(Reader r) {
  ExperimentSection e;
  if (!r.present()) {
    r.fail("", "experiment section is required");
    return e;
  }
  e.name = r.require<std::string>("name");
  Reader p = r.child("params");
  const auto& n = e.name;
  if (n == "tnk") {
    e.n = scalar_or_list<int>(p, "n", {10});
    e.k = p.get<int>("k", 2);
    e.classifier_b_max = p.get<int>("classifier_b_max", 2000);
    for (int x : e.n) p.check(x >= 2, "n", "values must be >= 2");
    p.check(e.k >= 2, "k", "must be >= 2");
  } else if (n == "stay_infinite") {
    e.n_grid = p.require<std::vector<int>>("n_grid");
    e.t_probe = p.get<double>("t_probe", 0.5);
    e.killing = p.get<bool>("killing", false);
    p.check(e.n_grid.size() >= 2, "n_grid", "needs at least two values");
    p.check(e.t_probe > 0.0, "t_probe", "must be > 0");
  } else if (n == "kingman_entrance") {
    e.t = p.require<double>("t");
    const std::string m = p.get<std::string>("method", "series");
    if (m == "series") e.method = EntranceMethod::Series;
    else if (m == "simulate_from") e.method = EntranceMethod::SimulateFrom;
    else if (m == "death_chain") e.method = EntranceMethod::DeathChain;
    else p.fail("method", "unknown method '" + m + "'");
    e.n0 = p.get<int>("n0", 0);
    p.check(e.t > 0.0, "t", "must be > 0");
  } else if (n == "pairwise") {
    e.N = scalar_or_list<int>(p, "N", {8});
    e.kappa = p.get<double>("kappa", 0.0);
    e.same_site = p.get<bool>("same_site", false);
    e.separation = p.get<int>("separation", 0);
  } else if (n == "block_count") {
    e.N = scalar_or_list<int>(p, "N", {4});
    e.n_per_site = p.get<int>("n_per_site", 10);
    e.times = p.get<std::vector<double>>("times", {0.5, 1.0});
    e.kappa = p.get<double>("kappa", 0.0);
    const std::string mode = p.get<std::string>("mode", "direct");
    if (mode == "direct") e.mode = ProbeMode::Direct;
    else if (mode == "two_stage") e.mode = ProbeMode::TwoStage;
    else p.fail("mode", "unknown probe mode '" + mode + "'");
    e.two_time = p.get<bool>("two_time", true);
    e.collapse_k = p.get<int>("collapse_k", 5);
    e.total_event_budget = p.get<long>("total_event_budget", 0);
    p.check(e.n_per_site >= 1, "n_per_site", "must be >= 1");
  } else if (n == "partition_structure") {
    e.N = scalar_or_list<int>(p, "N", {8});
    e.blocks = p.get<int>("blocks", 3);
    e.kappa = p.get<double>("kappa", 0.0);
    p.check(e.blocks >= 2 && e.blocks <= 4, "blocks", "separated placements exist for 2, 3 or 4 blocks");
  } else if (n == "class_coupling") {
    e.initial = read_initial(p.child("initial"));
    e.classes = p.require<std::vector<int>>("classes");
    e.t = p.get<double>("t", 1.0);
    p.check(e.t > 0.0, "t", "must be > 0");
  } else if (n == "decay_fit") {
    e.N = scalar_or_list<int>(p, "N", {2, 3});
    e.times = p.require<std::vector<double>>("times");
  } else if (!n.empty()) {
    r.fail("name", "unknown experiment '" + n + "'");
  }
  for (int x : e.N) p.check(x >= 1, "N", "values must be >= 1");
  p.finish();
  r.finish();
  return e;
}

RunConfig build(const json& root, Command command) {
  std::vector<std::string> errs;
  RunConfig c;
  c.command = command;
  Reader r(&root, "", errs);
  if (!r.present()) throw Error(ErrorCode::ValidationError, "config must be a JSON object");

  c.version = r.require<int>("version");
  if (r.has("version") && c.version != kConfigVersion)
    r.fail("version", "unsupported version " + std::to_string(c.version) + " (expected " +
                          std::to_string(kConfigVersion) + ")");
  if (r.has("command")) {
    const std::string cmd = r.get<std::string>("command", "");
    if (cmd != to_string(command)) r.fail("command", "config is for '" + cmd + "', not '" + to_string(command) + "'");
  } else {
    r.raw("command");
  }
  c.seed = r.require<std::uint64_t>("seed");
  c.replicas = r.get<long>("replicas", 100);
  r.check(c.replicas >= 2, "replicas", "must be >= 2");
  c.output_dir = r.get<std::string>("output_dir", "out");
  c.event_budget = r.get<long>("event_budget", 0);
  r.check(c.event_budget >= 0, "event_budget", "must be >= 0");
  const std::string fmt = r.get<std::string>("format", "json");
  if (fmt == "json") c.format = OutputFormat::Json;
  else if (fmt == "csv") c.format = OutputFormat::Csv;
  else if (fmt == "jsonl") c.format = OutputFormat::Jsonl;
  else r.fail("format", "must be json, csv or jsonl");

  c.measure = read_measure(r.child("measure"));
  {
    Reader k = r.child("kernel");
    c.b_max = k.get<int>("b_max", 200);
    c.rel_tol = k.get<double>("rel_tol", 1e-13);
    c.merge_law_b = k.get<std::vector<int>>("merge_law_b", {});
    k.check(c.b_max >= 2, "b_max", "must be >= 2");
    k.check(c.rel_tol > 0.0 && c.rel_tol < 1.0, "rel_tol", "must be in (0, 1)");
    for (int b : c.merge_law_b) k.check(b >= 2, "merge_law_b", "entries must be >= 2");
    k.finish();
  }
  c.walk = read_walk(r.child("walk"));
  c.geography = read_geography(r.child("geography"), c.walk);
  {
    Reader g = r.child("green");
    const std::string m = g.get<std::string>("method", "both");
    c.green_both = m == "both";
    if (m == "lattice_sum" || m == "both") c.green.method = GreenMethod::LatticeSum;
    else if (m == "monte_carlo") c.green.method = GreenMethod::MonteCarlo;
    else g.fail("method", "must be lattice_sum, monte_carlo or both");
    c.green.k_max = g.get<int>("k_max", 0);
    c.green.replicas = g.get<long>("replicas", c.green.replicas);
    c.green.horizon = g.get<long>("horizon", c.green.horizon);
    g.check(c.green.replicas >= 2, "replicas", "must be >= 2");
    g.check(c.green.horizon >= 1, "horizon", "must be >= 1");
    g.finish();
  }
  if (command == Command::Simulate) {
    Reader s = r.child("simulate");
    c.simulate.initial = read_initial(s.child("initial"));
    c.simulate.horizon = s.get<double>("horizon", 0.0);
    {
      Reader st = s.child("stop");
      c.simulate.stop = parse_stop(st.get<std::string>("rule", "horizon"), st);
      c.simulate.stop_blocks = st.get<int>("m", 1);
      st.check(c.simulate.stop_blocks >= 1, "m", "must be >= 1");
      st.finish();
    }
    c.simulate.killing = s.get<bool>("killing", false);
    c.simulate.migration = s.get<bool>("migration", true);
    c.simulate.track_elements = s.get<bool>("track_elements", true);
    c.simulate.probe_times = s.get<std::vector<double>>("probe_times", {});
    s.check(c.simulate.horizon >= 0.0, "horizon", "must be > 0 when given");
    if (c.simulate.stop == StopRule::Horizon) s.check(c.simulate.horizon > 0.0, "horizon", "required for the horizon rule");
    s.finish();
    if (c.simulate.initial.per_site <= 0 && c.geography)
      guarded(errs, "simulate.initial", [&] {
        c.simulate.initial.build(c.geography->sites()).validate_labels(c.geography->sites(), c.simulate.killing);
      });
  } else {
    r.raw("simulate");
  }
  if (command == Command::Experiment) c.experiment = read_experiment(r.child("experiment"));
  else r.raw("experiment");

  // Green function runs use the measure only for kappa.
  if (command != Command::Green && !r.has("measure")) r.fail("measure", "is required");
  r.finish();

  if (!errs.empty()) {
    std::string msg = std::to_string(errs.size()) + " validation error(s):";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw Error(ErrorCode::ValidationError, msg);
  }
  // Where results land does not change them, so the directory stays out of the hash.
  c.canonical = root;
  c.canonical.erase("output_dir");
  c.canonical["command"] = to_string(command);
  return c;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset to line and column.
    const std::size_t pos = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                                           e.what());
  }
}

void apply_overrides(json& j, const Overrides& o) {
  if (!j.is_object()) return;
  if (o.seed) j["seed"] = *o.seed;
  if (o.replicas) j["replicas"] = *o.replicas;
  if (o.output_dir) j["output_dir"] = *o.output_dir;
  if (o.budget) j["event_budget"] = *o.budget;
  if (o.format) j["format"] = *o.format;
}

RunConfig from_json(json j, std::optional<Command> command, const Overrides& overrides) {
  if (j.is_object() && j.value("type", "") == "manifest") {
    if (!j.contains("config") || !j["config"].is_object())
      throw Error(ErrorCode::ValidationError, "manifest has no embedded config");
    j = j["config"];
  }
  if (!command) {
    if (!j.is_object() || !j.contains("command") || !j["command"].is_string())
      throw Error(ErrorCode::ValidationError, "no command given and none recorded in the config");
    command = parse_command(j["command"].get<std::string>());
  }
  apply_overrides(j, overrides);
  return build(j, *command);
}

}  // namespace

RunConfig parse_config_text(const std::string& text, Command command, const Overrides& overrides) {
  return from_json(parse_json(text), command, overrides);
}

RunConfig parse_config(const std::string& path, std::optional<Command> command, const Overrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(parse_json(ss.str()), command, overrides);
}

}  // namespace lcoal::cli
