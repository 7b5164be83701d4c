// SPDX-License-Identifier: Apache-2.0
//
// Runs the legq binary and checks its documented examples and exit codes.

#include "doctest.h"
#include "oracles.hpp"
#include "rule_checks.hpp"

#include "legq/io.hpp"

#include "json.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace legq;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(LEGQ_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, got);
  int st = pclose(f);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

// The ball printed after "<key>: " in text output.
Ball text_field(const std::string& out, const std::string& key) {
  std::istringstream is(out);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind(key + ": ", 0) == 0) return parse_decimal_ball(line.substr(key.size() + 2));
  }
  FAIL("missing field " << key << " in\n" << out);
  return Ball();
}

Ball json_ball(const nlohmann::json& j) {
  return Ball(parse_hex_exact(j["mid"].get<std::string>()), Mag::upper(parse_hex_exact(j["rad"].get<std::string>())));
}

bool overlap(const Ball& a, const Ball& b) { return !(a.upper() < b.lower() || b.upper() < a.lower()); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("eval examples") {
  Run r = run("eval --n 4 --x 0 --prec 64");
  CHECK(r.status == 0);
  Ball v = text_field(r.out, "value");
  CHECK(oracle::contains(v, mpq_class(3, 8)));
  CHECK(v.rad() <= Mag::pow2(-60));

  r = run("eval --n 100 --x 1 --prec 64 --deriv");
  CHECK(r.status == 0);
  CHECK(oracle::contains(text_field(r.out, "value"), mpq_class(1)));
  CHECK(oracle::contains(text_field(r.out, "deriv"), mpq_class(5050)));

  Run z = run("eval --n 10 --x 0.3 --prec 64 --method zero --format json");
  Run a = run("eval --n 10 --x 0.3 --prec 64 --method asym --format json");
  REQUIRE(z.status == 0);
  REQUIRE(a.status == 0);
  auto jz = nlohmann::json::parse(z.out), ja = nlohmann::json::parse(a.out);
  CHECK(jz["method"] == "zero");
  CHECK(ja["method"] == "asym");
  Ball bz = json_ball(jz["value"]), ba = json_ball(ja["value"]);
  CHECK(overlap(bz, ba));
  // Decimal x is read as a ball around 3/10, so both contain the exact value.
  mpq_class exact = oracle::legendre_exact(10, mpq_class(3, 10));
  CHECK(oracle::contains(bz, exact));
  CHECK(oracle::contains(ba, exact));

  // Hex input and json agree with text.
  Run h = run("eval --n 7 --x 0x3p-3 --prec 0x80 --format json");
  REQUIRE(h.status == 0);
  auto jh = nlohmann::json::parse(h.out);
  CHECK(oracle::contains(json_ball(jh["value"]), oracle::legendre_exact(7, mpq_class(3, 8))));
}

TEST_CASE("exit codes") {
  CHECK(run("eval --n 3 --x 2").status == 3);
  CHECK(run("eval --n 3 --x -1.5").status == 3);
  CHECK(run("eval --n x --x 0").status == 2);
  CHECK(run("eval --n 3 --x 0.5z").status == 2);
  CHECK(run("eval --n 3 --x 0.5 --prec 4").status == 2);
  CHECK(run("eval --n 2000 --x 0.999999999 --method asym").status == 3);
  CHECK(run("rule --n 0").status == 3);
  CHECK(run("rule --n 3 --out /nonexistent-dir/rule.txt").status == 4);
  CHECK(run("nosuchcommand").status == 2);
}

TEST_CASE("rule examples") {
  Run r = run("rule --n 1 --prec 64");
  CHECK(r.status == 0);
  std::istringstream is(r.out);
  std::string line;
  std::vector<std::string> data;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '#') data.push_back(line);
  }
  REQUIRE(data.size() == 1);
  std::string rec = data[0];
  size_t a = rec.find("  "), b = rec.find("  ", a + 2);
  CHECK(rec.substr(0, a) == "0");
  Ball node = parse_decimal_ball(rec.substr(a + 2, b - a - 2));
  Ball weight = parse_decimal_ball(rec.substr(b + 2));
  CHECK(oracle::contains(node, mpq_class(0)));
  CHECK(oracle::contains(weight, mpq_class(2)));

  r = run("rule --n 5 --prec 256 --format json");
  REQUIRE(r.status == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["nodes"].size() == 5);
  auto ref = oracle::closed_form_rule(5, 320);
  for (size_t k = 0; k < ref.size(); ++k) {
    Ball x = json_ball(j["nodes"][4 - k]), w = json_ball(j["weights"][4 - k]);
    CHECK(oracle::log2_distance_bound(x, ref[k].first) <= -250);
    CHECK(oracle::log2_distance_bound(w, ref[k].second) <= -250);
  }
}

TEST_CASE("thread count does not change the bytes") {
  for (const char* fmt : {"text", "json", "rulefile"}) {
    Run one = run(std::string("rule --n 20 --prec 64 --threads 1 --format ") + fmt);
    Run four = run(std::string("rule --n 20 --prec 64 --threads 4 --format ") + fmt);
    CHECK(one.status == 0);
    CHECK(one.out == four.out);
  }
  Run env = run("rule --n 20 --prec 64 --format rulefile");
  Run env4 = Run();
  {
    std::string cmd = std::string("LEGQ_THREADS=4 ") + LEGQ_CLI_PATH + " rule --n 20 --prec 64 --format rulefile";
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f != nullptr);
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, f)) > 0) env4.out.append(buf, got);
    pclose(f);
  }
  CHECK(env.out == env4.out);
}

TEST_CASE("rule file written by the CLI round-trips") {
  std::string path = "cli_rule_37.txt";
  Run r = run("rule --n 37 --prec 160 --format rulefile --out " + path);
  REQUIRE(r.status == 0);
  std::string bytes = slurp(path);
  std::istringstream in(bytes);
  QuadratureRule rule = read_rulefile(in);
  CHECK(rule.n == 37);
  CHECK(oracle::rule_structure_problem(rule) == "");
  std::ostringstream again;
  write_rulefile(again, rule);
  CHECK(again.str() == bytes);
  std::remove(path.c_str());
}

TEST_CASE("selftest and bench run") {
  Run s = run("selftest");
  CHECK(s.status == 0);
  CHECK(s.out.find("selftest: ok") != std::string::npos);

  Run t = run("bench --suite table3 --max-n 24 --prec 256");
  CHECK(t.status == 0);
  CHECK(t.out.rfind("n,p,error,log10_error,seconds", 0) == 0);
  Run w = run("bench --suite sweep --n 1000 --prec 128 --points 8");
  CHECK(w.status == 0);
  CHECK(w.out.find("# asym share:") != std::string::npos);
}
