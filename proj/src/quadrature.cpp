// SPDX-License-Identifier: Apache-2.0

#include "legq/quadrature.hpp"

#include "legq/evaluator.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace legq {

namespace {

constexpr int kBisectionBudget = 40;
constexpr int kStepBudget = 200;

long ceil_log2(unsigned long v) {
  long r = 0;
  while ((1UL << r) < v && r < 63) ++r;
  return r;
}

Ball eval_abs(unsigned long n, const Ball& x, prec_t p, Want want) {
  EvalRequest req;
  req.n = n;
  req.x = x;
  req.p = p;
  req.want = want;
  req.relative = false;
  auto r = legendre_eval(req);
  return want == Want::Deriv ? *r.deriv : *r.value;
}

BigFloat midpoint(const BigFloat& a, const BigFloat& b) { return mul_2exp(add_exact(a, b), -1); }

// Plain Newton iteration from the classical estimate, kept inside [lo, hi].
// Purely heuristic: it only picks a good starting interval.
BigFloat approximate_root(unsigned long n, unsigned long k, const BigFloat& lo, const BigFloat& hi) {
  double nn = static_cast<double>(n), kk = static_cast<double>(k);
  BigFloat m(std::cos((kk + 0.75) * M_PI / (nn + 0.5)));
  if (!(m > lo && m < hi)) m = midpoint(lo, hi);
  const prec_t w = 64;
  for (int it = 0; it < 8; ++it) {
    EvalRequest req;
    req.n = n;
    req.x = Ball(m);
    req.p = w;
    req.want = Want::ValueAndDeriv;
    req.relative = false;
    auto r = legendre_eval(req);
    if (r.deriv->contains_zero()) break;
    BigFloat step = div(r.value->mid(), r.deriv->mid(), w, Round::Nearest);
    BigFloat next = sub(m, step, w, Round::Nearest);
    if (!(next > lo && next < hi)) break;
    m = next;
    if (step.is_zero() || step.exponent() < m.exponent() - 58) break;
  }
  return m;
}

}  // namespace

prec_t rule_guard_bits(unsigned long n) { return 2 * ceil_log2(n + 1) + 8; }

NodeEnclosure initial_enclosure(unsigned long n, unsigned long k) {
  if (n == 0 || k >= (n + 1) / 2) throw std::invalid_argument("initial_enclosure: need 0 <= k < ceil(n/2)");
  const prec_t w = 64;
  BigFloat t = BigFloat::with_prec(w), c = BigFloat::with_prec(w);
  NodeEnclosure e{n, k, BigFloat::with_prec(w), BigFloat::with_prec(w), false};
  // theta_hi = (2k + 2) pi / (2n + 1) rounded up, so cos(theta_hi) rounded down
  // is a lower bound for the root.
  mpfr_const_pi(t.raw(), MPFR_RNDU);
  mpfr_mul_ui(t.raw(), t.raw(), 2 * k + 2, MPFR_RNDU);
  mpfr_div_ui(t.raw(), t.raw(), 2 * n + 1, MPFR_RNDU);
  mpfr_cos(e.lo.raw(), t.raw(), MPFR_RNDD);
  mpfr_const_pi(c.raw(), MPFR_RNDD);
  mpfr_mul_ui(c.raw(), c.raw(), 2 * k + 1, MPFR_RNDD);
  mpfr_div_ui(c.raw(), c.raw(), 2 * n + 1, MPFR_RNDD);
  mpfr_cos(e.hi.raw(), c.raw(), MPFR_RNDU);
  return e;
}

Ball newton_step(unsigned long n, const BigFloat& lo, const BigFloat& hi, prec_t prec) {
  Ball X = Ball::hull(lo, hi, prec + 32);
  BigFloat m = round(X.mid(), prec, Round::Nearest);
  Ball pm = eval_abs(n, Ball(m), prec, Want::Value);
  Ball dp = eval_abs(n, X, prec, Want::Deriv);
  prec_t w = prec + 16;
  return sub(Ball(m), div(pm, dp, w), w);
}

Ball refine_node(const NodeEnclosure& enc, prec_t p) {
  const unsigned long n = enc.n;
  if (n % 2 == 1 && enc.k == (n - 1) / 2) return Ball(0);
  const prec_t final_prec = p + rule_guard_bits(n);

  // Bracket with a sign change: P_n has sign (-1)^k just above root k.
  BigFloat a = enc.lo, b = enc.hi;
  const int sign_hi = enc.k % 2 == 0 ? 1 : -1;

  BigFloat lo, hi;
  bool certified = enc.certified;
  if (certified) {
    lo = a;
    hi = b;
  } else {
    BigFloat m = approximate_root(n, enc.k, a, b);
    BigFloat delta = BigFloat::from_mpz_2exp(mpz_class(1), std::min(m.exponent(), 0L) - 50);
    lo = std::max(sub_exact(m, delta), a);
    hi = std::min(add_exact(m, delta), b);
  }

  prec_t w = 64;
  int bisections = 0;
  for (int step = 0; step < kStepBudget; ++step) {
    Ball N = newton_step(n, lo, hi, w);
    if (N.is_finite() && N.strictly_inside(lo, hi)) {
      certified = true;
      lo = N.lower();
      hi = N.upper();
    } else if (certified) {
      // Every root in X also lies in N(X).
      if (N.is_finite()) {
        lo = std::max(lo, N.lower());
        hi = std::min(hi, N.upper());
      }
    } else {
      // Shrink the sign-change bracket and start over from it.
      if (++bisections > kBisectionBudget) break;
      BigFloat c = midpoint(a, b);
      Ball pc = eval_abs(n, Ball(c), w, Want::Value);
      if (pc.contains_zero()) {
        w *= 2;
        if (w > 8 * final_prec) break;
        continue;
      }
      int sc = pc.is_positive() ? 1 : -1;
      if (sc == sign_hi) {
        b = c;
      } else {
        a = c;
      }
      lo = a;
      hi = b;
      continue;
    }

    Ball X = Ball::hull(lo, hi, final_prec + 32);
    Mag goal = Mag::upper(std::max(abs(X.mid()), BigFloat::from_mpz_2exp(mpz_class(1), -static_cast<long>(p))))
                   .mul_2exp(-static_cast<long>(p) - 5);
    if (w >= final_prec && X.rad() <= goal) return round(X, final_prec);
    // Past the last rung, keep adding bits until the radius target is met.
    w = w < final_prec ? std::min<prec_t>(2 * w, final_prec) : std::min<prec_t>(w + w / 2, 4 * final_prec);
  }
  throw UncertifiedRoot("uncertified root: n=" + std::to_string(n) + " k=" + std::to_string(enc.k));
}

Ball node_weight(unsigned long n, const Ball& node, prec_t p) {
  prec_t w = p + rule_guard_bits(n);
  for (int attempt = 0; attempt < 6; ++attempt, w *= 2) {
    Ball d = eval_abs(n, node, w, Want::Deriv);
    if (d.contains_zero()) continue;
    Ball one_minus = sub(Ball(1), node, w), one_plus = add(Ball(1), node, w);
    Ball den = mul(mul(one_minus, one_plus, w), sqr(d, w), w);
    return div(Ball(2), den, w);
  }
  throw UncertifiedRoot("node_weight: derivative not bounded away from zero");
}

QuadratureRule build_rule(unsigned long n, prec_t p, unsigned threads) {
  if (n < 1) throw std::invalid_argument("build_rule: n must be at least 1");
  if (p < 8) throw std::invalid_argument("build_rule: precision must be at least 8");
  const unsigned long half = (n + 1) / 2;
  QuadratureRule rule{n, p, std::vector<Ball>(n), std::vector<Ball>(n)};
  const prec_t out_prec = p + rule_guard_bits(n);

  std::atomic<unsigned long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      unsigned long k = next.fetch_add(1);
      if (k >= half) return;
      try {
        Ball x = refine_node(initial_enclosure(n, k), p);
        Ball wt = round(node_weight(n, x, p), out_prec);
        // Root k is the (n-1-k)-th in ascending order; mirror the rest.
        rule.nodes[n - 1 - k] = x;
        rule.weights[n - 1 - k] = wt;
        if (k != n - 1 - k) {
          rule.nodes[k] = -x;
          rule.weights[k] = wt;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = half;
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(half)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rule;
}

Ball apply_rule(const QuadratureRule& rule, const Integrand& f) {
  prec_t w = rule.p + rule_guard_bits(rule.n) + 16;
  Ball s(0);
  for (size_t i = 0; i < rule.nodes.size(); ++i) s = add(s, mul(rule.weights[i], f(rule.nodes[i], w), w), w);
  return s;
}

}  // namespace legq
