// SPDX-License-Identifier: Apache-2.0

#include "mpst/json_io.hpp"

#include "mpst/print.hpp"

namespace mpst {

using nlohmann::json;

json json_of(const ActionLabel& l) {
  return json{{"kind", l.kind == ActionLabel::Kind::Send ? "send" : "receive"},
              {"subject", l.subject.name},
              {"peer", l.peer.name},
              {"label", l.label.name},
              {"sort", sort_name(l.sort)}};
}

json json_of(const QueueType& h) {
  json out = json::array();
  for (const auto& m : h)
    out.push_back(json{{"dest", m.dest.name},
                       {"label", m.label.name},
                       {"sort", sort_name(m.sort)}});
  return out;
}

json json_of(const TypingContext& ctx) {
  json out = json::object();
  for (const auto& [role, entry] : ctx.entries)
    out[role.name] = json{{"queue", json_of(entry.queue)},
                          {"type", print_local(entry.type)}};
  return out;
}

json json_of(const BalanceReport& r) {
  json failures = json::array();
  for (const auto& f : r.failures) {
    json path = json::array();
    for (const auto& l : f.path) path.push_back(l.name);
    failures.push_back(json{{"subject", f.subject},
                            {"reason", f.reason},
                            {"path", path}});
  }
  return json{{"balanced", r.balanced},
              {"balanced_plus", r.balanced_plus},
              {"failures", failures}};
}

json json_of(const PropertyVerdict& v) {
  json out;
  if (v.holds.has_value())
    out["holds"] = *v.holds;
  else
    out["holds"] = "unknown";
  out["bound_hit"] = v.bound_hit;
  if (!v.reason.empty()) out["reason"] = v.reason;
  json trace = json::array();
  for (const auto& l : v.trace) trace.push_back(json_of(l));
  out["trace"] = trace;
  if (v.cycle_start != static_cast<size_t>(-1)) out["cycle_start"] = v.cycle_start;
  return out;
}

json json_of(const ProbeReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations)
    violations.push_back(json{{"state", v.state}, {"step", v.step}, {"reason", v.reason}});
  const char* verdict = r.verdict == ProbeReport::Verdict::Pass ? "pass"
                        : r.verdict == ProbeReport::Verdict::Fail ? "fail"
                                                                  : "inconclusive";
  return json{{"steps_checked", r.steps_checked},
              {"violations", violations},
              {"verdict", verdict}};
}

json json_of(Verdict3 v) { return json(verdict_name(v)); }

json json_of(const SessionStep& s) {
  json out{{"rule", s.rule}, {"subject", s.subject.name}};
  if (s.peer) out["peer"] = s.peer->name;
  if (s.label) out["label"] = s.label->name;
  out["error"] = s.is_error;
  return out;
}

}  // namespace mpst
