#include <sstream>

#include <json.hpp>

#include "lcoal/engine.hpp"

namespace lcoal {

std::string trajectory_jsonl(const TrajectoryRecord& rec, const std::string& config_hash) {
  using nlohmann::json;
  std::ostringstream out;
  json initial = json::array();
  for (const auto& b : rec.initial.blocks()) initial.push_back({{"elements", b.elements}, {"site", b.site}});
  out << json{{"type", "header"}, {"config_hash", config_hash}, {"seed", rec.seed}, {"n", rec.initial.n()},
              {"initial", initial}}
             .dump()
      << '\n';
  for (const auto& e : rec.events) {
    json j{{"t", e.time}, {"event", to_string(e.kind)}, {"blocks", e.blocks}, {"blocks_after", e.blocks_after}};
    switch (e.kind) {
      case EventKind::Merge:
        j["site"] = e.site;
        j["k"] = e.k;
        break;
      case EventKind::Migrate:
        j["from"] = e.site;
        j["to"] = e.to;
        break;
      case EventKind::Kill:
        j["from"] = e.site;
        break;
    }
    out << j.dump() << '\n';
  }
  json fin = json::array();
  for (const auto& b : rec.final_blocks) fin.push_back({{"min", b.min}, {"size", b.size}, {"site", b.site}});
  out << json{{"type", "final"}, {"t", rec.end_time}, {"events", rec.event_count}, {"alive", rec.alive_blocks},
              {"blocks", fin}}
             .dump()
      << '\n';
  return out.str();
}

std::string trajectory_csv(const TrajectoryRecord& rec) {
  std::ostringstream out;
  out.precision(17);
  out << "time,blocks\n";
  out << 0.0 << ',' << rec.initial.alive_count() << '\n';
  for (const auto& e : rec.events) out << e.time << ',' << e.blocks_after << '\n';
  return out.str();
}

}  // namespace lcoal
