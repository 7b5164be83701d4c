// SPDX-License-Identifier: Apache-2.0
//
// legq: evaluate Legendre polynomials and generate Gauss-Legendre rules.
//
// Exit codes: 0 ok, 1 internal failure, 2 bad arguments, 3 domain error
// (including a forced method that does not apply), 4 I/O failure.

#include "legq/evaluator.hpp"
#include "legq/expansions.hpp"
#include "legq/io.hpp"
#include "legq/quadrature.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace legq;

namespace {

enum Exit { kOk = 0, kInternal = 1, kParse = 2, kDomain = 3, kIo = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-negative integer given in decimal or as a hex literal (0x10, 0x1p4).
unsigned long parse_count(const std::string& s, const char* what) {
  BigFloat v;
  try {
    v = BigFloat::parse(s, 128, Round::Nearest);
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string("cannot parse ") + what + ": " + s);
  }
  if (!v.is_integer() || v.sign() < 0 || v > BigFloat(1e15)) {
    throw UsageError(std::string(what) + " must be a non-negative integer: " + s);
  }
  return v.to_mpz(Round::Zero).get_ui();
}

unsigned default_threads() {
  const char* env = std::getenv("LEGQ_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  return static_cast<unsigned>(std::max(1UL, parse_count(env, "LEGQ_THREADS")));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- eval ----------------------------------------------------------------------

struct EvalArgs {
  std::string n = "", x = "", prec = "64", method = "auto", format = "text";
  bool deriv = false;
};

int run_eval(const EvalArgs& a) {
  unsigned long n = parse_count(a.n, "--n");
  prec_t p = static_cast<prec_t>(parse_count(a.prec, "--prec"));
  if (p < 8) throw UsageError("--prec must be at least 8");
  Ball x;
  try {
    x = Ball::parse(a.x, p + 64);
  } catch (const std::invalid_argument&) {
    throw UsageError("cannot parse --x: " + a.x);
  }
  EvalRequest req;
  req.n = n;
  req.x = x;
  req.p = p;
  req.want = a.deriv ? Want::ValueAndDeriv : Want::Value;
  if (a.method != "auto") {
    try {
      req.method = parse_method(a.method);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  EvalResult r = legendre_eval(req);
  std::string used = r.method ? method_name(*r.method) : "closed-form";

  if (a.format == "json") {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["x"] = a.x;
    j["prec"] = p;
    j["method"] = used;
    auto put = [&](const char* key, const Ball& b) {
      nlohmann::ordered_json o = nlohmann::ordered_json::parse(ball_json(b));
      o["decimal"] = format_decimal(b, p);
      j[key] = o;
    };
    put("value", *r.value);
    if (r.deriv) put("deriv", *r.deriv);
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "value: " << format_decimal(*r.value, p) << "\n";
    if (r.deriv) std::cout << "deriv: " << format_decimal(*r.deriv, p) << "\n";
    std::cout << "method: " << used << "\n";
  }
  return kOk;
}

// --- rule ----------------------------------------------------------------------

struct RuleArgs {
  std::string n = "", prec = "64", out = "", format = "text", threads = "";
};

int run_rule(const RuleArgs& a) {
  unsigned long n = parse_count(a.n, "--n");
  prec_t p = static_cast<prec_t>(parse_count(a.prec, "--prec"));
  if (n < 1) throw DomainError("a rule needs at least one node");
  if (p < 8) throw UsageError("--prec must be at least 8");
  unsigned threads = a.threads.empty() ? default_threads() : static_cast<unsigned>(parse_count(a.threads, "--threads"));
  QuadratureRule rule = build_rule(n, p, std::max(1u, threads));

  std::ostringstream os;
  if (a.format == "json") {
    os << rule_to_json(rule);
  } else if (a.format == "rulefile") {
    write_rulefile(os, rule);
  } else {
    os << rule_to_text(rule);
  }
  if (a.out.empty()) {
    std::cout << os.str();
    std::cout.flush();
    if (!std::cout) throw IoError("cannot write to standard output");
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw IoError("cannot open " + a.out);
    f << os.str();
    f.close();
    if (!f) throw IoError("cannot write " + a.out);
  }
  return kOk;
}

// --- bench ---------------------------------------------------------------------

struct BenchArgs {
  std::string suite = "timings", max_n = "", max_prec = "", n = "", prec = "", points = "32", threads = "";
};

void bench_timings(unsigned long max_n, prec_t max_prec, unsigned threads) {
  std::cout << "n,p,seconds\n";
  for (unsigned long n : {10UL, 100UL, 1000UL, 10000UL, 100000UL}) {
    if (n > max_n) break;
    for (prec_t p : {64L, 256L, 1024L, 3322L, 10000L}) {
      if (p > max_prec) break;
      auto t0 = std::chrono::steady_clock::now();
      build_rule(n, p, threads);
      std::cout << n << "," << p << "," << seconds_since(t0) << "\n" << std::flush;
    }
  }
}

void bench_table3(unsigned long max_n, prec_t p, unsigned threads) {
  // Integral of log(2 + x) over [-1, 1] is 3 log 3 - 2.
  prec_t w = p + 64;
  Ball exact = sub(mul_si(log(Ball(3), w), 3, w), Ball(2), w);
  std::cout << "n,p,error,log10_error,seconds\n";
  for (unsigned long n : {12UL, 24UL, 48UL, 96UL, 192UL, 384UL}) {
    if (n > max_n) break;
    auto t0 = std::chrono::steady_clock::now();
    QuadratureRule rule = build_rule(n, p, threads);
    Ball q = apply_rule(rule, [](const Ball& x, prec_t prec) { return log(add_si(x, 2, prec), prec); });
    double secs = seconds_since(t0);
    Ball err = abs(sub(q, exact, w));
    BigFloat e = err.mid();
    BigFloat l = BigFloat::with_prec(53);
    mpfr_log10(l.raw(), e.raw(), MPFR_RNDN);
    std::cout << n << "," << p << "," << e.to_decimal(3) << "," << l.to_double() << "," << secs << "\n" << std::flush;
  }
}

void bench_sweep(unsigned long n, prec_t p, unsigned long points) {
  std::cout << "theta,x,method,K,seconds\n";
  unsigned long asym = 0;
  for (unsigned long j = 0; j < points; ++j) {
    double theta = (static_cast<double>(j) + 0.5) / static_cast<double>(points) * M_PI / 2;
    BigFloat x(std::cos(theta));
    MethodChoice c = select_method(n, x.to_double(), p);
    double best = INFINITY;
    for (int rep = 0; rep < 3; ++rep) {
      auto t0 = std::chrono::steady_clock::now();
      legendre_p(n, Ball(x), p);
      best = std::min(best, seconds_since(t0));
    }
    if (c.method == Method::Asym) ++asym;
    std::cout << theta << "," << x.to_decimal(17) << "," << method_name(c.method) << "," << (c.K ? *c.K : 0) << ","
              << best << "\n";
  }
  std::cout << "# asym share: " << asym << "/" << points << "\n";
}

int run_bench(const BenchArgs& a) {
  unsigned threads = a.threads.empty() ? default_threads() : static_cast<unsigned>(parse_count(a.threads, "--threads"));
  threads = std::max(1u, threads);
  if (a.suite == "timings") {
    unsigned long max_n = a.max_n.empty() ? 1000 : parse_count(a.max_n, "--max-n");
    prec_t max_p = a.max_prec.empty() ? 1024 : static_cast<prec_t>(parse_count(a.max_prec, "--max-prec"));
    bench_timings(max_n, max_p, threads);
  } else if (a.suite == "table3") {
    unsigned long max_n = a.max_n.empty() ? 384 : parse_count(a.max_n, "--max-n");
    prec_t p = a.prec.empty() ? 3322 : static_cast<prec_t>(parse_count(a.prec, "--prec"));
    bench_table3(max_n, p, threads);
  } else if (a.suite == "sweep") {
    unsigned long n = a.n.empty() ? 10000 : parse_count(a.n, "--n");
    prec_t p = a.prec.empty() ? 256 : static_cast<prec_t>(parse_count(a.prec, "--prec"));
    bench_sweep(n, p, parse_count(a.points, "--points"));
  } else {
    throw UsageError("unknown suite: " + a.suite);
  }
  return kOk;
}

// --- selftest ------------------------------------------------------------------

int run_selftest() {
  int failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "ok    " : "FAIL  ") << what << "\n";
    if (!ok) ++failures;
  };
  {
    EvalRequest req;
    req.n = 100;
    req.x = Ball(1);
    req.want = Want::ValueAndDeriv;
    auto r = legendre_eval(req);
    check(r.value->mid() == 1 && r.deriv->mid() == 5050, "P_100(1) = 1, P'_100(1) = 5050");
  }
  {
    Ball v = legendre_p(4, Ball(0), 64);
    check(v.contains(BigFloat(0.375)) && v.rad() <= Mag::pow2(-60), "P_4(0) = 3/8");
  }
  {
    Ball x(BigFloat(0.3));
    Ball a = legendre_p(10, x, 128), b = legendre_p(10, x, 256);
    bool agree = a.overlaps(b);
    for (const char* m : {"rec", "zero", "one", "asym"}) {
      EvalRequest req;
      req.n = 10;
      req.x = x;
      req.p = 128;
      req.method = parse_method(m);
      try {
        agree = agree && legendre_eval(req).value->overlaps(b);
      } catch (const Inapplicable&) {
      }
    }
    check(agree, "methods agree at n = 10, x = 0.3");
  }
  {
    auto r = build_rule(5, 128);
    Ball s(0);
    for (const auto& w : r.weights) s = add(s, w, 160);
    check(s.contains(BigFloat(2)) && r.nodes[2].mid().is_zero(), "5-point rule: weight sum 2, middle node 0");
    Ball c = apply_rule(r, [](const Ball& x, prec_t prec) { return pow_ui(x, 8, prec); });
    Ball exact = div(Ball(2), Ball(9), 160);
    check(c.overlaps(exact), "5-point rule integrates x^8");
  }
  std::cout << (failures == 0 ? "selftest: ok" : "selftest: FAILED") << "\n";
  return failures == 0 ? kOk : kInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified Legendre polynomials and Gauss-Legendre rules"};
  app.require_subcommand(1);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate P_n(x) (and P'_n(x)) as a ball");
  eval->add_option("--n", ea.n, "Degree")->required();
  eval->add_option("--x", ea.x, "Point in [-1, 1], decimal or hex float")->required();
  eval->add_option("--prec", ea.prec, "Precision in bits");
  eval->add_flag("--deriv", ea.deriv, "Also evaluate the derivative");
  eval->add_option("--method", ea.method, "auto|rec|asym|zero|one")
      ->check(CLI::IsMember({"auto", "rec", "asym", "zero", "one"}));
  eval->add_option("--format", ea.format, "text|json")->check(CLI::IsMember({"text", "json"}));

  RuleArgs ra;
  auto* rule = app.add_subcommand("rule", "Generate an n-point Gauss-Legendre rule");
  rule->add_option("--n", ra.n, "Number of nodes")->required();
  rule->add_option("--prec", ra.prec, "Precision in bits");
  rule->add_option("--out", ra.out, "Output file (default: standard output)");
  rule->add_option("--format", ra.format, "text|json|rulefile")->check(CLI::IsMember({"text", "json", "rulefile"}));
  rule->add_option("--threads", ra.threads, "Worker threads (default: LEGQ_THREADS or 1)");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Benchmarks: timings, table3, sweep");
  bench->add_option("--suite", ba.suite, "timings|table3|sweep")->check(CLI::IsMember({"timings", "table3", "sweep"}));
  bench->add_option("--max-n", ba.max_n, "Largest degree");
  bench->add_option("--max-prec", ba.max_prec, "Largest precision (timings)");
  bench->add_option("--n", ba.n, "Degree (sweep)");
  bench->add_option("--prec", ba.prec, "Precision (table3, sweep)");
  bench->add_option("--points", ba.points, "Sample count (sweep)");
  bench->add_option("--threads", ba.threads, "Worker threads");

  auto* selftest = app.add_subcommand("selftest", "Quick internal consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }

  try {
    if (eval->parsed()) return run_eval(ea);
    if (rule->parsed()) return run_rule(ra);
    if (bench->parsed()) return run_bench(ba);
    if (selftest->parsed()) return run_selftest();
  } catch (const UsageError& e) {
    std::cerr << "legq: " << e.what() << "\n";
    return kParse;
  } catch (const DomainError& e) {
    std::cerr << "legq: domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const Inapplicable& e) {
    std::cerr << "legq: method not applicable: " << e.what() << "\n";
    return kDomain;
  } catch (const IoError& e) {
    std::cerr << "legq: I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "legq: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
