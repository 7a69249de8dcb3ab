#include "lcoal/cli/dispatch.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <boost/version.hpp>

#include "lcoal/experiments.hpp"
#include "lcoal/simd/kernels.hpp"

namespace lcoal::cli {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::GroundSetMismatch:
    case ErrorCode::IncompatibleVariants:
    case ErrorCode::DimensionTooLow:
    case ErrorCode::SizeOverflow:
      return kExitValidation;
    case ErrorCode::BudgetExceeded:
      return kExitBudget;
    default:
      return kExitInternal;
  }
}

json error_json(ErrorCode code, const std::string& message) {
  return {{"status", "error"}, {"error", {{"code", to_string(code)}, {"message", message}}},
          {"exit_code", exit_code_for(code)}};
}

namespace {

// JSON has no infinity; non-finite values are written as strings.
json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

KernelPtr kernel_of(const RunConfig& c) {
  if (!c.measure) throw Error(ErrorCode::ValidationError, "this command needs a measure");
  QuadratureConfig q = rate_quadrature();
  q.rel_tol = c.rel_tol;
  return make_kernel(*c.measure, q);
}

RunOptions run_options(const RunConfig& c) { return {c.replicas, c.seed, c.event_budget}; }

json measure_json(const LambdaMeasure& m) {
  json atoms = json::array();
  for (const auto& a : m.atoms()) atoms.push_back({{"location", a.location}, {"mass", a.mass}});
  return {{"total_mass", m.total_mass()}, {"atoms", atoms}, {"density_pieces", m.pieces().size()},
          {"pairwise_only", m.pairwise_only()}};
}

json verdict_json(const CdiVerdict& v) {
  return {{"verdict", to_string(v.verdict)}, {"b_max", v.b_max}, {"partial_sum", num(v.partial_sum)},
          {"tail_estimate", num(v.tail_estimate)}, {"tail_ratio", num(v.tail_ratio)},
          {"segment_tails", v.segment_tails}, {"c1", v.c1}, {"c2", v.c2},
          {"fit_max_rel_residual", v.fit_max_rel_residual}, {"gamma_over_b", v.gamma_over_b},
          {"complete_collapse", v.complete_collapse}, {"rationale", v.rationale}};
}

json rates_report(const RunConfig& c, Artifacts& raw) {
  const KernelPtr k = kernel_of(c);
  json rows = json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "b,lambda,lambda_error,gamma,gamma_error,eta\n";
  for (int b = 2; b <= c.b_max; ++b) {
    const RateValue l = k->lambda_total(b), g = k->gamma_total(b);
    rows.push_back({{"b", b}, {"lambda", l.value}, {"lambda_error", l.error}, {"gamma", g.value},
                    {"gamma_error", g.error}, {"eta", l.value + g.value}});
    csv << b << ',' << l.value << ',' << l.error << ',' << g.value << ',' << g.error << ',' << l.value + g.value << '\n';
  }
  raw["rates.csv"] = csv.str();
  json laws = json::object();
  for (int b : c.merge_law_b) laws[std::to_string(b)] = k->merge_size_distribution(b);
  return {{"measure", measure_json(k->measure())}, {"lambda22", k->lambda22()}, {"rates", rows},
          {"merge_size_laws", laws}};
}

json classify_report(const RunConfig& c) {
  const KernelPtr k = kernel_of(c);
  const CdiVerdict v = cdi_classify(*k, c.b_max);
  json out{{"measure", measure_json(k->measure())}, {"classification", verdict_json(v)}};
  if (v.verdict != CdiTag::StaysInfinite) {
    const BoundEstimate bound = tn_uniform_bound(*k, 2, c.b_max);
    out["tn_bound_k2"] = num(bound.value);
  }
  return out;
}

json green_report(const RunConfig& c) {
  json out;
  GreenOptions o = c.green;
  o.seed = c.seed;
  if (c.green_both) {
    const double l22 = c.measure ? c.measure->total_mass() : 1.0;
    const KappaInfo info = kappa_from_green(c.walk, l22, true, o);
    out = to_json(info);
  } else {
    const GreenEstimate g = green_function(c.walk, o);
    out = {{"estimate", g.estimate}, {"error", g.error}, {"method", to_string(g.method)}, {"head", g.head},
           {"tail", g.tail}, {"standard_error", g.standard_error}, {"budget", g.budget}};
    if (c.measure) out["kappa"] = kappa(g.estimate, c.measure->total_mass());
  }
  out["dim"] = c.walk.dim;
  return out;
}

SimulationConfig simulation_config(const RunConfig& c) {
  SimulationConfig s;
  s.kernel = kernel_of(c);
  s.geography = c.geography;
  s.killing = c.simulate.killing;
  s.migration = c.simulate.migration;
  if (c.simulate.horizon > 0.0) s.horizon = c.simulate.horizon;
  s.stop = c.simulate.stop;
  s.stop_blocks = c.simulate.stop_blocks;
  s.seed = c.seed;
  s.event_budget = c.event_budget;
  s.track_elements = c.simulate.track_elements;
  s.probe_times = c.simulate.probe_times;
  return s;
}

std::string trajectory_file(const RunConfig& c) {
  return c.format == OutputFormat::Csv ? "trajectory.csv" : "trajectory.jsonl";
}

void write_trajectory(const RunConfig& c, const TrajectoryRecord& rec, Artifacts& raw) {
  raw[trajectory_file(c)] =
      c.format == OutputFormat::Csv ? trajectory_csv(rec) : trajectory_jsonl(rec, config_hash(c.canonical));
}

json simulate_report(const RunConfig& c, Artifacts& raw) {
  const LabeledPartition init = c.simulate.initial.build(c.geography->sites());
  const TrajectoryRecord rec = simulate(init, simulation_config(c));
  write_trajectory(c, rec, raw);
  json blocks = json::array();
  for (const auto& b : rec.final_blocks) blocks.push_back({{"min", b.min}, {"size", b.size}, {"site", b.site}});
  return {{"seed", rec.seed}, {"initial_blocks", init.size()}, {"end_time", rec.end_time},
          {"events", rec.event_count}, {"alive_blocks", rec.alive_blocks}, {"absorbed", rec.absorbed},
          {"predicate_hit", rec.predicate_hit}, {"probe_counts", rec.probe_counts}, {"final_blocks", blocks}};
}

json experiment_report(const RunConfig& c, Artifacts& raw) {
  const ExperimentSection& e = c.experiment;
  const RunOptions run = run_options(c);
  json out{{"name", e.name}};
  std::ostringstream csv;
  csv.precision(17);

  if (e.name == "kingman_entrance") {
    EntranceOptions o;
    o.method = e.method;
    o.n0 = e.n0;
    o.replicas = c.replicas;
    o.seed = c.seed;
    const BlockCountLaw law = kingman_entrance_reference(e.t, o);
    double mean = 0.0;
    for (std::size_t k = 0; k < law.probs.size(); ++k) mean += static_cast<double>(k) * law.probs[k];
    out["t"] = e.t;
    out["method"] = law.method;
    out["n0"] = law.n0;
    out["probs"] = law.probs;
    out["mean"] = mean;
    out["error"] = law.error;
    out["cross_check_tv"] = law.cross_check_tv;
    return out;
  }

  const KernelPtr k = kernel_of(c);
  if (e.name == "tnk") {
    json runs = json::array();
    csv << "n,replica,time\n";
    for (int n : e.n) {
      const TnkReport r = estimate_Tnk(n, e.k, c.geography, k, run, e.classifier_b_max);
      runs.push_back(to_json(r));
      for (std::size_t i = 0; i < r.time.per_replica.size(); ++i)
        csv << n << ',' << i << ',' << r.time.per_replica[i] << '\n';
    }
    out["runs"] = runs;
    raw["tnk.csv"] = csv.str();
  } else if (e.name == "stay_infinite") {
    const TrendReport r = stay_infinite_trend(k, c.geography, e.n_grid, e.t_probe, run, e.killing);
    out["trend"] = to_json(r);
    csv << "n,replica,blocks\n";
    for (const auto& p : r.points)
      for (std::size_t i = 0; i < p.blocks.per_replica.size(); ++i)
        csv << p.n << ',' << i << ',' << p.blocks.per_replica[i] << '\n';
    raw["stay_infinite.csv"] = csv.str();
  } else if (e.name == "pairwise") {
    json runs = json::array();
    std::vector<double> ks;
    csv << "N,replica,rescaled_time\n";
    for (int N : e.N) {
      const PairwiseReport r = pairwise_torus_experiment(N, c.walk, k, run, {e.kappa, e.same_site, e.separation});
      runs.push_back(to_json(r));
      ks.push_back(r.ks);
      for (std::size_t i = 0; i < r.rescaled_times.size(); ++i) csv << N << ',' << i << ',' << r.rescaled_times[i] << '\n';
    }
    out["runs"] = runs;
    out["ks_decreasing"] = std::is_sorted(ks.rbegin(), ks.rend()) && std::adjacent_find(ks.begin(), ks.end()) == ks.end();
    raw["pairwise.csv"] = csv.str();
  } else if (e.name == "block_count") {
    json runs = json::array();
    csv << "N,time,mode,tv,ks,chi_square_p\n";
    for (int N : e.N) {
      BlockCountOptions o;
      o.kappa = e.kappa;
      o.mode = e.mode;
      o.two_time_test = e.two_time;
      o.collapse_k = e.collapse_k;
      o.total_event_budget = e.total_event_budget;
      const BlockCountReport r = block_count_limit_experiment(N, c.walk, k, e.n_per_site, e.times, run, o);
      runs.push_back(to_json(r));
      for (std::size_t i = 0; i < r.times.size(); ++i) {
        csv << N << ',' << r.times[i] << ",direct," << r.direct[i].tv << ',' << r.direct[i].ks << ','
            << r.direct[i].chi_square_p << '\n';
        csv << N << ',' << r.times[i] << ",two_stage," << r.two_stage[i].tv << ',' << r.two_stage[i].ks << ','
            << r.two_stage[i].chi_square_p << '\n';
      }
    }
    out["runs"] = runs;
    raw["block_count.csv"] = csv.str();
  } else if (e.name == "partition_structure") {
    json runs = json::array();
    csv << "N,merges,multiple_merges,multiple_fraction\n";
    for (int N : e.N) {
      const GeographySpec torus = build_torus(N, c.walk);
      const LabeledPartition init = LabeledPartition::singletons(separated_sites(torus, e.blocks));
      const PartitionStructureReport r = partition_structure_experiment(N, c.walk, k, init, run, e.kappa);
      runs.push_back(to_json(r));
      csv << N << ',' << r.merges << ',' << r.multiple_merges << ',' << r.multiple_fraction << '\n';
    }
    out["runs"] = runs;
    raw["partition_structure.csv"] = csv.str();
  } else if (e.name == "class_coupling") {
    const LabeledPartition init = e.initial.build(c.geography->sites());
    const ClassCouplingReport r = class_coupling_check(c.geography, k, init, e.classes, e.t, run);
    out["coupling"] = to_json(r);
  } else if (e.name == "decay_fit") {
    const DecayFitReport r = block_decay_fit(e.N, c.walk, k, e.times, run);
    out["fit"] = to_json(r);
  } else {
    throw Error(ErrorCode::ValidationError, "unknown experiment '" + e.name + "'");
  }
  return out;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + p.string() + "'");
  out << content;
}

json versions() {
  return {{"lcoal", kVersion},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"boost", BOOST_LIB_VERSION},
          {"compiler", __VERSION__},
          {"isa", std::string(simd::isa_name(simd::active_isa()))}};
}

}  // namespace

json run_report(const RunConfig& c, Artifacts& raw) {
  json body;
  switch (c.command) {
    case Command::Rates: body = rates_report(c, raw); break;
    case Command::Classify: body = classify_report(c); break;
    case Command::Green: body = green_report(c); break;
    case Command::Simulate: body = simulate_report(c, raw); break;
    case Command::Experiment: body = experiment_report(c, raw); break;
  }
  return {{"command", to_string(c.command)}, {"config_hash", config_hash(c.canonical)}, {"seed", c.seed},
          {"status", "ok"}, {"result", body}};
}

int dispatch(const RunConfig& c, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    err << error_json(ErrorCode::InvalidArgument, "cannot create output directory: " + ec.message()).dump() << '\n';
    return kExitValidation;
  }

  Artifacts files;
  int code = kExitOk;
  try {
    const json report = run_report(c, files);
    files["report.json"] = report.dump(2) + "\n";
  } catch (const BudgetExceededError& e) {
    // Flush what was simulated before the budget ran out.
    if (c.command == Command::Simulate) write_trajectory(c, e.partial(), files);
    files["error.json"] = error_json(e.code(), e.what()).dump(2) + "\n";
    code = kExitBudget;
  } catch (const Error& e) {
    files["error.json"] = error_json(e.code(), e.what()).dump(2) + "\n";
    code = exit_code_for(e.code());
  } catch (const std::exception& e) {
    files["error.json"] = json{{"status", "error"},
                               {"error", {{"code", "INTERNAL"}, {"message", e.what()}}},
                               {"exit_code", kExitInternal}}
                              .dump(2) +
                          "\n";
    code = kExitInternal;
  }

  json listing = json::array();
  for (const auto& [name, content] : files) {
    write_file(dir / name, content);
    listing.push_back({{"name", name}, {"bytes", content.size()}, {"fnv1a", fnv1a_hex(content)}});
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const json manifest{{"type", "manifest"},     {"manifest_version", 1},
                      {"command", to_string(c.command)}, {"config", c.canonical},
                      {"config_hash", config_hash(c.canonical)}, {"seed", c.seed},
                      {"versions", versions()}, {"wall_time_seconds", wall},
                      {"files", listing},       {"status", code == kExitOk ? "ok" : "error"},
                      {"exit_code", code}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  if (code != kExitOk) err << files["error.json"];
  return code;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Spatial Lambda-coalescent toolkit: rates, classification, Green functions, simulation, experiments"};
  app.require_subcommand(1);
  std::string config_path;
  Overrides o;
  std::uint64_t seed = 0;
  long replicas = 0, budget = 0;
  std::string out, format;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config, or a manifest to rerun")->required();
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--replicas", replicas, "replica count (overrides the config)");
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--budget", budget, "event budget per trajectory (overrides the config)");
    sub->add_option("--format", format, "raw output format")->check(CLI::IsMember({"json", "csv", "jsonl"}));
  };
  std::vector<std::pair<CLI::App*, std::optional<Command>>> subs;
  for (Command cmd : {Command::Rates, Command::Classify, Command::Green, Command::Simulate, Command::Experiment})
    subs.push_back({app.add_subcommand(to_string(cmd), "run " + to_string(cmd)), cmd});
  subs.push_back({app.add_subcommand("rerun", "rerun the config embedded in a manifest"), std::nullopt});
  for (auto& [sub, cmd] : subs) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  std::optional<Command> command;
  for (auto& [sub, cmd] : subs)
    if (sub->parsed()) command = cmd;
  const auto* active = app.get_subcommands().front();
  if (active->count("--seed")) o.seed = seed;
  if (active->count("--replicas")) o.replicas = replicas;
  if (active->count("--out")) o.output_dir = out;
  if (active->count("--budget")) o.budget = budget;
  if (active->count("--format")) o.format = format;

  RunConfig cfg;
  try {
    cfg = parse_config(config_path, command, o);
  } catch (const Error& e) {
    std::cerr << error_json(e.code(), e.what()).dump(2) << '\n';
    return exit_code_for(e.code());
  }
  return dispatch(cfg, std::cerr);
}

}  // namespace lcoal::cli
