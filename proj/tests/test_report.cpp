#include <unistd.h>

#include <algorithm>
#include <filesystem>

#include "afp/report.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace afp;
using afp::testing::slurp;
using afp::testing::spec_path;
using nlohmann::json;

namespace {

RunReport run(Command c, const char* name, RunFlags flags = {}) { return execute(c, spec_path(name), flags); }

std::filesystem::path temp_file(const std::string& leaf) {
  return std::filesystem::temp_directory_path() / ("afp_test_" + std::to_string(::getpid()) + "_" + leaf);
}

const json* find_class(const json& classes, const char* name) {
  for (const auto& c : classes) {
    if (c["class"] == name) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("fnv1a reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("command names round-trip") {
  for (Command c : {Command::Check, Command::Classify, Command::Solve, Command::Fset, Command::Verify, Command::Report}) {
    CHECK(command_from_name(command_name(c)) == c);
  }
  CHECK_FALSE(command_from_name("frobnicate"));
}

TEST_CASE("verify example_3_8") {
  const RunReport r = run(Command::Verify, "example_3_8");
  CHECK(r.exit_code == kExitOk);
  CHECK(r.failures.empty());
  const json& v = r.results["verify"];
  const json* mohseni = find_class(v["classes"], "GMohseni");
  REQUIRE(mohseni);
  CHECK((*mohseni)["constant"].get<double>() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK((*mohseni)["exhaustive"] == true);
  CHECK(v["declared"]["holds"] == true);
  CHECK(v["declared"]["rate"].get<double>() == doctest::Approx(0.5).epsilon(1e-14));
  for (const auto& env : v["solves"]["envelopes"]) CHECK(env["pass"] == true);
  for (const auto& d : v["diameters"]) CHECK(d["pass"] == true);

  const json j = r.to_json();
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["command"] == "verify");
  CHECK(j["spec_digest"] == fnv1a_hex(serialize_spec(load_spec(spec_path("example_3_8")))));
}

TEST_CASE("check example_4_12 warns about cyclicity with the 0.3 -> 0 witness") {
  const RunReport r = run(Command::Check, "example_4_12");
  CHECK(r.exit_code == kExitOk);
  bool found = false;
  for (const Warning& w : r.warnings) {
    if (w.code != "cyclicity") continue;
    for (const auto& wit : w.witnesses) {
      // 0.3 lies in both subsets; the X1 -> X2 reading is the one that leaves [0.1, 1].
      if (wit["x"].get<double>() == 0.3 && wit["to"] == "X2") {
        found = true;
        CHECK(wit["image"].get<double>() == 0.0);
        CHECK(wit["from"] == "X1");
        CHECK(w.message.find("X2 = [0.1, 1]") != std::string::npos);
      }
    }
  }
  CHECK(found);

  RunFlags strict;
  strict.strict = true;
  const RunReport s = run(Command::Check, "example_4_12", strict);
  CHECK(s.exit_code == kExitFailed);
  CHECK_FALSE(s.failures.empty());
}

TEST_CASE("solve example_3_8") {
  RunFlags f;
  f.epsilon = 0.01;
  f.x0 = 0.8;
  const RunReport r = run(Command::Solve, "example_3_8", f);
  CHECK(r.exit_code == kExitOk);
  const json& s = r.results["solve"];
  CHECK(s["hit_index"] == 3);
  CHECK(s["outcome"] == "hit");
  CHECK(s["bound"]["n_star"] == 6);
  CHECK(s["bound"]["respected"] == true);

  f.k = 2;
  f.epsilon = 0.1;
  CHECK(run(Command::Solve, "example_3_8", f).results["solve"]["hit_index"] == 2);
}

TEST_CASE("faults map to exit codes") {
  RunFlags off;
  off.x0 = 5;
  const RunReport d = run(Command::Solve, "example_3_8", off);
  CHECK(d.exit_code == kExitFault);
  REQUIRE(d.error);
  CHECK((*d.error)["kind"] == "domain");

  const RunReport o = run(Command::Solve, "example_4_12");
  CHECK(o.exit_code == kExitFault);
  REQUIRE(o.error);
  CHECK((*o.error)["kind"] == "orbit");
  CHECK((*o.error)["iterate"] == 2);

  const RunReport p = execute_text(Command::Check, "[space]\nm = 1\nX1 = [0, 1]\n[map]\nmap = x//4\n[run]\nepsilon = 0.1\n", {});
  CHECK(p.exit_code == kExitParse);
  REQUIRE(p.error);
  CHECK((*p.error)["kind"] == "parse");
  CHECK((*p.error)["line"] == 5);
  CHECK((*p.error)["column"] == 9);

  const RunReport missing = execute(Command::Check, spec_path("no_such_spec"), {});
  CHECK(missing.exit_code == kExitParse);
}

TEST_CASE("a custom metric that breaks the axioms blocks the other commands") {
  const std::string text =
      "[space]\nm = 1\nX1 = [0, 1]\nmetric = custom(abs(x - y))\n[map]\nmap = x / 2\n[run]\nepsilon = 0.1\n";
  const RunReport c = execute_text(Command::Classify, text, {});
  CHECK(c.exit_code == kExitFailed);
  CHECK_FALSE(c.results.contains("classify"));
  const RunReport chk = execute_text(Command::Check, text, {});
  CHECK(chk.exit_code == kExitFailed);
  CHECK(chk.results["check"]["axioms"]["pass"] == false);
}

TEST_CASE("json output is deterministic and written atomically") {
  const auto a = temp_file("a.json"), b = temp_file("b.json");
  RunFlags f;
  f.json_path = a;
  run(Command::Report, "example_3_8", f);
  f.json_path = b;
  run(Command::Report, "example_3_8", f);
  const std::string ja = slurp(a.string()), jb = slurp(b.string());
  CHECK_FALSE(ja.empty());
  CHECK(ja == jb);
  CHECK(json::parse(ja)["schema_version"] == 1);
  CHECK_FALSE(std::filesystem::exists(a.string() + ".tmp"));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST_CASE("unwritable output is a fault") {
  RunFlags f;
  f.json_path = "/nonexistent-dir/out.json";
  CHECK(run(Command::Check, "example_3_8", f).exit_code == kExitFault);
}

TEST_CASE("csv output") {
  const auto path = temp_file("trace.csv");
  RunFlags f;
  f.epsilon = 0.01;
  f.x0 = 0.8;
  f.csv_path = path;
  CHECK(run(Command::Solve, "example_3_8", f).exit_code == kExitOk);
  const std::string csv = slurp(path.string());
  CHECK(csv.rfind("n,x_n,delta_n,ratio_n\n0,0.8,", 0) == 0);

  f = {};
  f.epsilon = 0.05;
  f.csv_path = path;
  CHECK(run(Command::Fset, "example_3_8", f).exit_code == kExitOk);
  const std::string fs = slurp(path.string());
  CHECK(fs.rfind("epsilon,x\n0.05,0.01\n", 0) == 0);
  // (0, 4 * 0.05 / 3) holds 0.01 .. 0.06
  CHECK(std::count(fs.begin(), fs.end(), '\n') == 7);
  std::filesystem::remove(path);
}

TEST_CASE("verify fails when the declared constant does not hold") {
  const RunReport r = run(Command::Verify, "example_cyclic_seq");
  CHECK(r.exit_code == kExitFailed);
  CHECK(r.results["verify"]["declared"]["holds"] == false);
}

TEST_CASE("report runs every section") {
  const RunReport r = run(Command::Report, "example_4_12");
  for (const char* s : {"check", "solve", "fset", "verify"}) CHECK(r.results.contains(s));
  // The default solve from x0 = 1 at epsilon 0.05 leaves the domain.
  CHECK(r.results["solve"].contains("error"));
  CHECK(r.exit_code == kExitFailed);
  CHECK_FALSE(render_text(r).empty());
}
