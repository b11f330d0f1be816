// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end for the session-type toolchain: parsing, well-
// formedness, projection, subtyping, transition systems, association probes,
// context model checking, and the process-calculus type checker/simulator.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "mpst/association.hpp"
#include "mpst/json_io.hpp"
#include "mpst/parse.hpp"
#include "mpst/print.hpp"
#include "mpst/projection.hpp"
#include "mpst/properties.hpp"
#include "mpst/wellformed.hpp"

using namespace mpst;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNo = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int default_bound() {
  if (const char* env = std::getenv("SESSIONFORGE_BOUND")) {
    try {
      return std::max(0, std::stoi(env));
    } catch (...) {
    }
  }
  return 2;
}

int default_depth() {
  if (const char* env = std::getenv("SESSIONFORGE_BOUND")) {
    try {
      return std::max(1, 4 * std::stoi(env));
    } catch (...) {
    }
  }
  return 8;
}

int verdict_exit(Verdict3 v) {
  switch (v) {
    case Verdict3::Yes: return kExitOk;
    case Verdict3::No: return kExitNo;
    case Verdict3::Unknown: return kExitUnknown;
  }
  return kExitUnknown;
}

void emit(const json& j, bool as_json, const std::string& text) {
  if (as_json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text << "\n";
}

std::string describe(const PropertyVerdict& v, const std::string& name) {
  std::ostringstream out;
  out << name << ": ";
  if (!v.holds.has_value())
    out << "unknown (exploration bound hit)";
  else if (*v.holds)
    out << "holds";
  else {
    out << "violated: " << v.reason;
    if (!v.trace.empty()) {
      out << "\n  trace:";
      for (size_t i = 0; i < v.trace.size(); ++i) {
        if (i == v.cycle_start) out << " [cycle:";
        out << " " << show(v.trace[i]);
      }
      if (v.cycle_start != static_cast<size_t>(-1)) out << "]";
    }
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sessionforge: asynchronous multiparty session type toolchain"};
  app.require_subcommand(1);
  app.fallthrough();  // --json may follow the subcommand
  bool as_json = false;
  app.add_flag("--json", as_json, "emit JSON on stdout");

  // parse
  auto* cmd_parse = app.add_subcommand("parse", "parse a file and pretty-print it");
  std::string parse_file, parse_kind = "global";
  cmd_parse->add_option("file", parse_file)->required();
  cmd_parse->add_option("--kind", parse_kind, "global|local|queue|context|process|manifest")
      ->check(CLI::IsMember({"global", "local", "queue", "context", "process", "manifest"}));

  // check-wf
  auto* cmd_wf = app.add_subcommand("check-wf", "balancedness of a global type");
  std::string wf_file;
  cmd_wf->add_option("file", wf_file)->required();

  // project
  auto* cmd_project = app.add_subcommand("project", "project a global type onto a role");
  std::string project_file, project_role;
  cmd_project->add_option("file", project_file)->required();
  cmd_project->add_option("--role", project_role)->required();

  // subtype
  auto* cmd_subtype = app.add_subcommand("subtype", "decide local-type subtyping");
  std::string sub_t1, sub_t2, sub_mode = "async";
  int sub_bound = default_bound();
  cmd_subtype->add_option("subtype_file", sub_t1)->required();
  cmd_subtype->add_option("supertype_file", sub_t2)->required();
  cmd_subtype->add_option("--mode", sub_mode)->check(CLI::IsMember({"sync", "async"}));
  cmd_subtype->add_option("--bound", sub_bound, "anticipation bound");

  // step
  auto* cmd_step = app.add_subcommand("step", "enumerate one-step transitions");
  std::string step_file, step_kind = "global";
  int step_bound = default_depth();
  bool all_subsets = false;
  cmd_step->add_option("file", step_file)->required();
  cmd_step->add_option("--kind", step_kind)->check(CLI::IsMember({"global", "context", "local"}));
  cmd_step->add_option("--bound", step_bound, "recursion unfoldings per derivation");
  cmd_step->add_flag("--all-subsets", all_subsets,
                     "enumerate every branch subset of send anticipation");

  // assoc
  auto* cmd_assoc = app.add_subcommand("assoc", "association of a context with a global type");
  std::string assoc_ctx, assoc_global;
  int assoc_bound = default_bound();
  cmd_assoc->add_option("context_file", assoc_ctx)->required();
  cmd_assoc->add_option("global_file", assoc_global)->required();
  cmd_assoc->add_option("--bound", assoc_bound);

  // probe
  auto* cmd_probe = app.add_subcommand("probe", "operational-correspondence probes");
  std::string probe_ctx, probe_global, probe_dir = "completeness";
  ProbeOptions probe_opts;
  probe_opts.k = default_bound();
  cmd_probe->add_option("context_file", probe_ctx)->required();
  cmd_probe->add_option("global_file", probe_global)->required();
  cmd_probe->add_option("--direction", probe_dir)
      ->check(CLI::IsMember({"completeness", "soundness"}));
  cmd_probe->add_option("--steps", probe_opts.steps);
  cmd_probe->add_option("--seed", probe_opts.seed);
  cmd_probe->add_option("--bound", probe_opts.k);

  // properties
  auto* cmd_props = app.add_subcommand("properties", "safety, deadlock-freedom, liveness");
  std::string props_file;
  int queue_bound = 4;
  cmd_props->add_option("context_file", props_file)->required();
  cmd_props->add_option("--queue-bound", queue_bound);

  // typecheck
  auto* cmd_typecheck = app.add_subcommand("typecheck", "type a session manifest");
  std::string tc_file;
  int tc_bound = default_bound();
  cmd_typecheck->add_option("manifest", tc_file)->required();
  cmd_typecheck->add_option("--bound", tc_bound);

  // run
  auto* cmd_run = app.add_subcommand("run", "simulate a session manifest");
  std::string run_file;
  size_t run_steps = 600;
  uint64_t run_seed = 1;
  cmd_run->add_option("manifest", run_file)->required();
  cmd_run->add_option("--steps", run_steps);
  cmd_run->add_option("--seed", run_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*cmd_parse) {
      std::string src = slurp(parse_file);
      std::string text;
      if (parse_kind == "global") text = print_global(parse_global(src, parse_file));
      else if (parse_kind == "local") text = print_local(parse_local(src, parse_file));
      else if (parse_kind == "queue") text = print_queue(parse_queue(src, parse_file));
      else if (parse_kind == "context") text = print_context(parse_context(src, parse_file));
      else if (parse_kind == "process") text = print_process(parse_process(src, parse_file));
      else {
        Manifest m = parse_manifest(src, parse_file);
        text = "global { " + print_global(m.global) + " }\n" + print_session(m.session);
      }
      emit(json{{"kind", parse_kind}, {"text", text}}, as_json, text);
      return kExitOk;
    }

    if (*cmd_wf) {
      auto report = check_balanced_plus(parse_global(slurp(wf_file), wf_file));
      std::ostringstream text;
      text << "balanced: " << (report.balanced ? "yes" : "no")
           << "\nbalanced+: " << (report.balanced_plus ? "yes" : "no");
      for (const auto& f : report.failures) {
        text << "\n  " << f.subject << ": " << f.reason;
        if (!f.path.empty()) {
          text << " (via";
          for (const auto& l : f.path) text << " " << l.name;
          text << ")";
        }
      }
      emit(json_of(report), as_json, text.str());
      return report.balanced_plus ? kExitOk : kExitNo;
    }

    if (*cmd_project) {
      GlobalPtr g = parse_global(slurp(project_file), project_file);
      ProjectionFailure why;
      auto proj = project(g, Role{project_role}, &why);
      if (!proj) {
        emit(json{{"projectable", false}, {"reason", why.reason}}, as_json,
             "not projectable: " + why.reason);
        return kExitNo;
      }
      std::string text = "queue: " + print_queue(proj->queue) +
                         "\ntype:  " + print_local(proj->local);
      emit(json{{"projectable", true},
                {"queue", json_of(proj->queue)},
                {"type", print_local(proj->local)}},
           as_json, text);
      return kExitOk;
    }

    if (*cmd_subtype) {
      LocalPtr t1 = parse_local(slurp(sub_t1), sub_t1);
      LocalPtr t2 = parse_local(slurp(sub_t2), sub_t2);
      if (sub_mode == "sync") {
        bool ok = sync_subtype(t1, t2);
        emit(json{{"mode", "sync"}, {"verdict", ok ? "yes" : "no"}}, as_json,
             ok ? "yes" : "no");
        return ok ? kExitOk : kExitNo;
      }
      AsyncWitness witness;
      LocalGraph g1 = graph_of(t1), g2 = graph_of(t2);
      Verdict3 v = async_subtype_bounded(g1, g2, sub_bound, &witness);
      std::ostringstream text;
      text << verdict_name(v);
      json jw = json::array();
      for (const auto& s : witness.steps) {
        text << "\n  " << s;
        jw.push_back(s);
      }
      emit(json{{"mode", "async"},
                {"bound", sub_bound},
                {"verdict", verdict_name(v)},
                {"witness", jw}},
           as_json, text.str());
      return verdict_exit(v);
    }

    if (*cmd_step) {
      std::string src = slurp(step_file);
      json out = json::array();
      std::ostringstream text;
      if (step_kind == "global") {
        GlobalStepOptions opts{step_bound, all_subsets};
        for (const auto& s : global_transitions(parse_global(src, step_file), opts)) {
          out.push_back(json{{"label", json_of(s.label)}, {"next", print_global(s.next)}});
          text << show(s.label) << "  =>  " << print_global(s.next) << "\n";
        }
      } else if (step_kind == "context") {
        for (const auto& s : context_transitions(parse_context(src, step_file))) {
          out.push_back(json{{"label", json_of(s.label)}, {"next", print_context(s.next)}});
          text << show(s.label) << "  =>  " << print_context(s.next) << "\n";
        }
      } else {
        for (const auto& s : local_transitions(parse_local(src, step_file))) {
          ActionLabel l{s.action.send ? ActionLabel::Kind::Send : ActionLabel::Kind::Receive,
                        Role{"self"}, s.action.peer, s.action.label, s.action.sort};
          out.push_back(json{{"label", json_of(l)}, {"next", print_local(s.next)}});
          text << (s.action.send ? "!" : "?") << s.action.peer.name << ":"
               << s.action.label.name << "  =>  " << print_local(s.next) << "\n";
        }
      }
      emit(json{{"kind", step_kind}, {"steps", out}}, as_json, text.str());
      return kExitOk;
    }

    if (*cmd_assoc) {
      TypingContext ctx = parse_context(slurp(assoc_ctx), assoc_ctx);
      GlobalPtr g = parse_global(slurp(assoc_global), assoc_global);
      Verdict3 v = associated(ctx, g, assoc_bound);
      emit(json{{"verdict", verdict_name(v)}, {"bound", assoc_bound}}, as_json,
           verdict_name(v));
      return verdict_exit(v);
    }

    if (*cmd_probe) {
      TypingContext ctx = parse_context(slurp(probe_ctx), probe_ctx);
      GlobalPtr g = parse_global(slurp(probe_global), probe_global);
      ProbeReport report = probe_dir == "completeness"
                               ? completeness_probe(ctx, g, probe_opts)
                               : soundness_probe(ctx, g, probe_opts);
      std::ostringstream text;
      text << probe_dir << ": "
           << (report.verdict == ProbeReport::Verdict::Pass          ? "pass"
               : report.verdict == ProbeReport::Verdict::Fail        ? "fail"
                                                                     : "inconclusive")
           << " (" << report.steps_checked << " steps)";
      for (const auto& v : report.violations)
        text << "\n  at " << v.state << " on " << v.step << ": " << v.reason;
      emit(json_of(report), as_json, text.str());
      switch (report.verdict) {
        case ProbeReport::Verdict::Pass: return kExitOk;
        case ProbeReport::Verdict::Fail: return kExitNo;
        case ProbeReport::Verdict::Inconclusive: return kExitUnknown;
      }
    }

    if (*cmd_props) {
      TypingContext ctx = parse_context(slurp(props_file), props_file);
      auto safety = check_safety(ctx, queue_bound);
      auto df = check_deadlock_freedom(ctx, queue_bound);
      auto live = check_liveness(ctx, queue_bound);
      std::string text = describe(safety, "safety") + "\n" +
                         describe(df, "deadlock-freedom") + "\n" +
                         describe(live, "liveness");
      emit(json{{"safety", json_of(safety)},
                {"deadlock_freedom", json_of(df)},
                {"liveness", json_of(live)}},
           as_json, text);
      bool any_violation = (safety.holds && !*safety.holds) || (df.holds && !*df.holds) ||
                           (live.holds && !*live.holds);
      bool any_unknown = !safety.holds || !df.holds || !live.holds;
      return any_violation ? kExitNo : any_unknown ? kExitUnknown : kExitOk;
    }

    if (*cmd_typecheck) {
      Manifest m = parse_manifest(slurp(tc_file), tc_file);
      Verdict3 v = type_session(m.session, m.global, tc_bound);
      emit(json{{"verdict", verdict_name(v)}, {"bound", tc_bound}}, as_json,
           verdict_name(v));
      return verdict_exit(v);
    }

    if (*cmd_run) {
      Manifest m = parse_manifest(slurp(run_file), run_file);
      RunResult result = run_fair(m.session, run_steps, run_seed);
      const char* outcome = result.outcome == RunResult::Outcome::Ok ? "ok"
                            : result.outcome == RunResult::Outcome::Err ? "err"
                                                                        : "terminated";
      if (as_json) {
        // One reduction per line, then a summary line.
        for (const auto& step : result.trace) std::cout << json_of(step).dump() << "\n";
        std::cout << json{{"outcome", outcome}, {"steps", result.steps_taken}}.dump()
                  << "\n";
      } else {
        for (const auto& step : result.trace) {
          std::cout << step.rule << " " << step.subject.name;
          if (step.peer) std::cout << (step.rule == "R-Rcv" ? " <- " : " -> ") << step.peer->name;
          if (step.label) std::cout << " " << step.label->name;
          std::cout << "\n";
        }
        std::cout << outcome << " after " << result.steps_taken << " steps\n";
      }
      return result.outcome == RunResult::Outcome::Err ? kExitNo : kExitOk;
    }
  } catch (const ParseError& e) {
    std::cerr << e.span.file << ":" << e.span.line << ":" << e.span.col
              << ": parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const WellformednessError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
