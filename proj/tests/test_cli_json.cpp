// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "testutil.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(SESSIONFORGE_TOOL_PATH) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  int status = pclose(pipe);
  return CliResult{WEXITSTATUS(status), out};
}

fs::path write_temp(const std::string& name, const std::string& body) {
  fs::path dir = fs::temp_directory_path() / "sessionforge_cli_test";
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream(p) << body;
  return p;
}

json load_schema(const std::string& name) {
  std::ifstream in(std::string(SESSIONFORGE_SCHEMA_DIR) + "/" + name);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

// Validates the subset of JSON Schema the shipped files use: type, required,
// properties, items, enum.
bool validates(const json& value, const json& schema, std::string* why) {
  if (schema.contains("enum")) {
    for (const auto& option : schema["enum"])
      if (value == option) return true;
    *why = "value not in enum: " + value.dump();
    return false;
  }
  if (schema.contains("type")) {
    const std::string type = schema["type"];
    bool ok = (type == "object" && value.is_object()) ||
              (type == "array" && value.is_array()) ||
              (type == "string" && value.is_string()) ||
              (type == "integer" && value.is_number_integer()) ||
              (type == "number" && value.is_number()) ||
              (type == "boolean" && value.is_boolean());
    if (!ok) {
      *why = "expected " + type + ", got " + value.dump();
      return false;
    }
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!value.contains(key.get<std::string>())) {
          *why = "missing required key " + key.get<std::string>();
          return false;
        }
      }
    }
    if (schema.contains("properties")) {
      for (const auto& [key, sub] : schema["properties"].items()) {
        if (!value.contains(key)) continue;
        if (!validates(value[key], sub, why)) {
          *why = key + ": " + *why;
          return false;
        }
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    for (const auto& item : value)
      if (!validates(item, schema["items"], why)) return false;
  }
  return true;
}

void check_schema(const json& value, const std::string& schema_name) {
  std::string why;
  bool ok = validates(value, load_schema(schema_name), &why);
  CHECK_MESSAGE(ok, schema_name << ": " << why << "\n" << value.dump(2));
}

const char* kRingCtx =
    "p : (<>, rec t . q (+) { add(int) . r & { add(int) . t, sub(int) . t } }),\n"
    "q : (<>, rec t . r (+) { add(int) . p & { add(int) . t }, sub(int) . p & { add(int) . t } }),\n"
    "r : (<>, rec t . q & { add(int) . p (+) { add(int) . t }, sub(int) . p (+) { sub(int) . t } })";

const char* kLivelockCtx =
    "p : (<>, rec t . q (+) { l . t }), q : (<>, rec t . p & { l . t }), r : (<p, l2>, end)";

const char* kRingManifest = R"(
global { rec t . p -> q { add(int) . q -> r { add(int) . r -> p { add(int) . t }, sub(int) . r -> p { sub(int) . t } } } }
role p = rec X . q!add<7> . sum { r?add(x: int).X, r?sub(x: int).X }
role q = rec X . if nondet then r!add<3> . p?add(y: int).X else r!sub<3> . p?add(y: int).X
role r = rec X . sum { q?add(z: int) . p!add<z + 1> . X, q?sub(z: int) . p!sub<z - 1> . X }
)";

}  // namespace

TEST_CASE("cli: parse and project") {
  auto ring = write_temp("ring.gt", mpst::testutil::kRingSrc);
  auto r = run_cli("--json parse " + ring.string());
  CHECK(r.exit_code == 0);
  check_schema(json::parse(r.out), "parse.json");

  auto proj = run_cli("--json project " + ring.string() + " --role q");
  CHECK(proj.exit_code == 0);
  json pj = json::parse(proj.out);
  check_schema(pj, "project.json");
  CHECK(pj["type"].get<std::string>().find("p &") != std::string::npos);

  auto plain = run_cli("project " + ring.string() + " --role q");
  CHECK(plain.exit_code == 0);
  CHECK(plain.out.find("type:") != std::string::npos);
}

TEST_CASE("cli: parse handles every input kind") {
  auto lt = write_temp("kind.lt", mpst::testutil::kTQ);
  CHECK(run_cli("parse " + lt.string() + " --kind local").exit_code == 0);
  auto qu = write_temp("kind.qt", "<q, l(int)> . <r, m>");
  CHECK(run_cli("parse " + qu.string() + " --kind queue").exit_code == 0);
  auto cx = write_temp("kind.ctx", "p : (<>, end)");
  CHECK(run_cli("parse " + cx.string() + " --kind context").exit_code == 0);
  auto pr = write_temp("kind.proc", "q!l<1> . 0");
  CHECK(run_cli("parse " + pr.string() + " --kind process").exit_code == 0);
  auto mf = write_temp("kind.session", kRingManifest);
  auto res = run_cli("--json parse " + mf.string() + " --kind manifest");
  CHECK(res.exit_code == 0);
  check_schema(json::parse(res.out), "parse.json");
}

TEST_CASE("cli: parse errors exit with the usage code") {
  auto bad = write_temp("bad.gt", "p -> p { l . end }");
  CHECK(run_cli("parse " + bad.string()).exit_code == 3);
  CHECK(run_cli("definitely-not-a-command").exit_code == 3);
}

TEST_CASE("cli: check-wf") {
  auto good = write_temp("ring2.gt", mpst::testutil::kRingSrc);
  auto r = run_cli("--json check-wf " + good.string());
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  check_schema(j, "check-wf.json");
  CHECK(j["balanced_plus"] == true);

  auto bad = write_temp("unbalanced.gt",
                        "rec t . p -> q { l0 . t, l1 . p -> r { l . end } }");
  auto rb = run_cli("--json check-wf " + bad.string());
  CHECK(rb.exit_code == 1);
  json jb = json::parse(rb.out);
  check_schema(jb, "check-wf.json");
  CHECK(jb["balanced_plus"] == false);
}

TEST_CASE("cli: subtype verdicts and exit codes") {
  auto topt = write_temp("topt_q.lt", mpst::testutil::kToptQ);
  auto tq = write_temp("t_q.lt", mpst::testutil::kTQ);

  auto yes = run_cli("--json subtype " + topt.string() + " " + tq.string() +
                     " --mode async --bound 2");
  CHECK(yes.exit_code == 0);
  json jy = json::parse(yes.out);
  check_schema(jy, "subtype.json");
  CHECK(jy["verdict"] == "yes");

  auto no = run_cli("--json subtype " + tq.string() + " " + topt.string() +
                    " --mode async --bound 2");
  CHECK(no.exit_code == 1);
  check_schema(json::parse(no.out), "subtype.json");

  auto sync_no = run_cli("--json subtype " + topt.string() + " " + tq.string() +
                         " --mode sync");
  CHECK(sync_no.exit_code == 1);
  check_schema(json::parse(sync_no.out), "subtype.json");
}

TEST_CASE("cli: step enumerations") {
  auto ring = write_temp("ring3.gt", mpst::testutil::kRingSrc);
  auto r = run_cli("--json step " + ring.string() + " --kind global --bound 4");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  check_schema(j, "step.json");
  CHECK(j["steps"].size() >= 1);

  auto ctx = write_temp("ring.ctx", kRingCtx);
  auto rc = run_cli("--json step " + ctx.string() + " --kind context");
  CHECK(rc.exit_code == 0);
  json jc = json::parse(rc.out);
  check_schema(jc, "step.json");
  CHECK(jc["steps"].size() == 3);

  auto tq = write_temp("t_q2.lt", mpst::testutil::kTQ);
  auto rl = run_cli("--json step " + tq.string() + " --kind local");
  CHECK(rl.exit_code == 0);
  check_schema(json::parse(rl.out), "step.json");
}

TEST_CASE("cli: assoc and probe") {
  auto ring = write_temp("ring4.gt", mpst::testutil::kRingSrc);
  auto ctx = write_temp("ring2.ctx", kRingCtx);

  auto a = run_cli("--json assoc " + ctx.string() + " " + ring.string() + " --bound 2");
  CHECK(a.exit_code == 0);
  json ja = json::parse(a.out);
  check_schema(ja, "assoc.json");
  CHECK(ja["verdict"] == "yes");

  auto pc = run_cli("--json probe " + ctx.string() + " " + ring.string() +
                    " --direction completeness --steps 30 --seed 5");
  CHECK(pc.exit_code == 0);
  json jp = json::parse(pc.out);
  check_schema(jp, "probe.json");
  CHECK(jp["verdict"] == "pass");

  auto ps = run_cli("--json probe " + ctx.string() + " " + ring.string() +
                    " --direction soundness --steps 20 --seed 5");
  CHECK(ps.exit_code == 0);
  check_schema(json::parse(ps.out), "probe.json");
}

TEST_CASE("cli: properties classifies the livelock example") {
  auto ctx = write_temp("livelock.ctx", kLivelockCtx);
  auto r = run_cli("--json properties " + ctx.string() + " --queue-bound 4");
  CHECK(r.exit_code == 1);
  json j = json::parse(r.out);
  check_schema(j, "properties.json");
  CHECK(j["safety"]["holds"] == true);
  CHECK(j["deadlock_freedom"]["holds"] == true);
  CHECK(j["liveness"]["holds"] == false);
  CHECK(j["liveness"]["trace"].size() >= 1);
}

TEST_CASE("cli: typecheck and run") {
  auto manifest = write_temp("ring.session", kRingManifest);
  auto tc = run_cli("--json typecheck " + manifest.string() + " --bound 2");
  CHECK(tc.exit_code == 0);
  json jt = json::parse(tc.out);
  check_schema(jt, "typecheck.json");
  CHECK(jt["verdict"] == "yes");

  auto run = run_cli("--json run " + manifest.string() + " --steps 24 --seed 3");
  CHECK(run.exit_code == 0);
  std::istringstream lines(run.out);
  std::string line;
  std::vector<json> rows;
  while (std::getline(lines, line))
    if (!line.empty()) rows.push_back(json::parse(line));
  REQUIRE(rows.size() >= 2);
  for (size_t i = 0; i + 1 < rows.size(); ++i) check_schema(rows[i], "run-step.json");
  check_schema(rows.back(), "run-summary.json");
  CHECK(rows.back()["outcome"] == "ok");
}

TEST_CASE("cli: the bound environment variable sets defaults") {
  auto topt = write_temp("topt_q2.lt", mpst::testutil::kToptQ);
  auto tq = write_temp("t_q3.lt", mpst::testutil::kTQ);
  auto r = run_cli("--json subtype " + topt.string() + " " + tq.string() +
                   " --mode async");
  json j = json::parse(r.out);
  CHECK(j["bound"] == 2);  // default without the variable

  std::string cmd = "SESSIONFORGE_BOUND=3 " + std::string(SESSIONFORGE_TOOL_PATH) +
                    " --json subtype " + topt.string() + " " + tq.string() +
                    " --mode async 2>/dev/null";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  pclose(pipe);
  CHECK(json::parse(out)["bound"] == 3);
}
