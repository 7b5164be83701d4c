// SPDX-License-Identifier: Apache-2.0

#include "legq/evaluator.hpp"

#include "legq/expansions.hpp"
#include "legq/fxp_recurrence.hpp"
#include "legq/scalars.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace legq {

const char* method_name(Method m) {
  switch (m) {
    case Method::Rec: return "rec";
    case Method::Asym: return "asym";
    case Method::Zero: return "zero";
    case Method::One: return "one";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  if (s == "rec") return Method::Rec;
  if (s == "asym") return Method::Asym;
  if (s == "zero") return Method::Zero;
  if (s == "one") return Method::One;
  throw std::invalid_argument("unknown method: " + std::string(s));
}

const char* deriv_strategy_name(DerivStrategy s) {
  switch (s) {
    case DerivStrategy::PairMixed: return "pair_mixed";
    case DerivStrategy::DirectOne: return "direct_one";
    case DerivStrategy::None: return "none";
  }
  return "?";
}

namespace {

long ceil_log2(unsigned long v) {
  long r = 0;
  while ((1UL << r) < v && r < 63) ++r;
  return r;
}

// Measured crossovers against the best series; pairs favour the recurrence
// since it yields P_{n-1} for free.
bool in_basecase_box(unsigned long n, double x, prec_t p, Want want) {
  if (!(x > 0.01 && x < 0.99)) return false;
  if (want == Want::Value) return p <= 256 ? n <= 1000 : (p <= 1024 && n <= 800);
  return p <= 1024 ? n <= 1500 : (p <= 2048 && n <= 800);
}

DerivStrategy choose_deriv_strategy(double x, prec_t p, Want want) {
  if (want == Want::Value) return DerivStrategy::None;
  // 1 - x < 2^(-p/8)
  if (1 - x < std::exp2(-static_cast<double>(p) / 8)) return DerivStrategy::DirectOne;
  return DerivStrategy::PairMixed;
}

int preference(Method m) {
  switch (m) {
    case Method::Zero: return 0;
    case Method::One: return 1;
    case Method::Asym: return 2;
    case Method::Rec: return 3;
  }
  return 4;
}

MethodChoice estimate(Method m, unsigned long n, double x, prec_t p, prec_t target) {
  MethodChoice c;
  c.method = m;
  double pp = static_cast<double>(p);
  switch (m) {
    case Method::Rec:
      c.K = n;
      c.cost = static_cast<double>(n) * pp;
      break;
    case Method::Asym:
      c.K = asym_terms_estimate(n, x, target);
      if (c.K) c.cost = 2 * static_cast<double>(*c.K) * pp;
      break;
    case Method::Zero:
      c.p_A = cancellation_bits(SeriesKind::Zero, n, x);
      c.K = zero_terms_estimate(n, x, target, false);
      if (c.K) c.cost = static_cast<double>(*c.K) * (pp + static_cast<double>(c.p_A));
      break;
    case Method::One:
      c.p_A = cancellation_bits(SeriesKind::One, n, x);
      c.K = one_terms_estimate(n, x, target, false);
      if (c.K) c.cost = static_cast<double>(*c.K) * (pp + static_cast<double>(c.p_A));
      break;
  }
  if (!c.K) c.cost = std::numeric_limits<double>::infinity();
  return c;
}

// --- point evaluation ----------------------------------------------------------

// With `best_effort`, a divergent asymptotic series is cut at its smallest
// term instead of being rejected.
unsigned long series_terms(Method m, unsigned long n, const BigFloat& x, prec_t target, bool deriv,
                           bool best_effort = false) {
  double xd = x.to_double();
  std::optional<unsigned long> K;
  switch (m) {
    case Method::Asym:
      K = asym_terms_estimate(n, xd, target);
      if (!K && best_effort) K = asym_best_terms(n, xd);
      break;
    case Method::Zero: K = zero_terms_estimate(n, xd, target, deriv); break;
    case Method::One: K = one_terms_estimate(n, xd, target, deriv); break;
    case Method::Rec: K = n; break;
  }
  if (!K) throw Inapplicable(std::string(method_name(m)) + ": no truncation order reaches the target");
  return *K;
}

Ball value_at(Method m, unsigned long n, const BigFloat& x, prec_t target, bool best_effort) {
  switch (m) {
    case Method::Rec: return legendre_pair_rec_ball(x, n, target).second;
    case Method::Asym:
      return eval_asymptotic(n, x, target, series_terms(m, n, x, target, false, best_effort), false, !best_effort)
          .first;
    case Method::Zero: return eval_zero_series(n, x, target, series_terms(m, n, x, target, false), false);
    case Method::One: return eval_one_series(n, x, target, series_terms(m, n, x, target, false), false);
  }
  throw std::logic_error("value_at");
}

// (P_{n-1}(x), P_n(x)) for n >= 2.
std::pair<Ball, Ball> pair_at(Method m, unsigned long n, const BigFloat& x, prec_t target, bool best_effort) {
  switch (m) {
    case Method::Rec: return legendre_pair_rec_ball(x, n, target);
    case Method::Asym: {
      unsigned long K = std::max(series_terms(m, n, x, target, false, best_effort),
                                 series_terms(m, n - 1, x, target, false, best_effort));
      auto [pn, prev] = eval_asymptotic(n, x, target, K, true, !best_effort);
      return {*prev, pn};
    }
    default: return {value_at(m, n - 1, x, target, best_effort), value_at(m, n, x, target, best_effort)};
  }
}

struct PointValues {
  std::optional<Ball> value;
  std::optional<Ball> deriv;
};

PointValues eval_point(unsigned long n, const BigFloat& x, prec_t target, Want want, Method m, DerivStrategy ds,
                       bool best_effort) {
  PointValues out;
  bool need_value = want != Want::Deriv;
  bool need_deriv = want != Want::Value;
  if (need_deriv && ds == DerivStrategy::DirectOne) {
    out.deriv = eval_one_series(n, x, target, series_terms(Method::One, n, x, target, true), true);
  } else if (need_deriv) {
    // P'_n = n (P_{n-1} - x P_n) / ((1 - x)(1 + x)) loses about
    // |log2(1 - x^2)| + log2 n bits.
    BigFloat one_minus = sub_exact(BigFloat(1), x);
    BigFloat one_plus = add_exact(BigFloat(1), x);
    long extra = std::max(0L, 1 - one_minus.exponent()) + ceil_log2(n) + 2;
    prec_t t2 = target + extra;
    prec_t w = t2 + 10;
    auto [pm1, pn] = pair_at(m, n, x, t2, best_effort);
    Ball num = mul_si(sub(pm1, mul(Ball(x), pn, w), w), static_cast<long>(n), w);
    Ball den = mul(Ball(one_minus), Ball(one_plus), w);
    out.deriv = div(num, den, w);
    if (need_value) out.value = pn;
    return out;
  }
  if (need_value) out.value = value_at(m, n, x, target, best_effort);
  return out;
}

// Closed forms at x = 0 and x = 1.
PointValues eval_special(unsigned long n, const BigFloat& x, prec_t target) {
  PointValues out;
  if (x == 1) {
    out.value = Ball(1);
    out.deriv = Ball::from_mpz(mpz_class(n) * (n + 1) / 2);
    return out;
  }
  unsigned long d = n / 2;
  prec_t cp = target + 16;
  Ball c = central_binomial_scaled(d, cp);
  if (d % 2 == 1) c = -c;
  if (n % 2 == 0) {
    out.value = c;
    out.deriv = Ball(0);
  } else {
    out.value = Ball(0);
    out.deriv = mul_si(c, static_cast<long>(2 * d + 1), cp);
  }
  return out;
}

// Extra target bits needed for a relative radius of about 2^-p, or 0.
long relative_deficit(const Ball& b, prec_t p) {
  if (b.rad().is_zero() || b.contains_zero()) return 0;
  double rel = b.rad().log2_upper() - static_cast<double>(b.mid().exponent() - 1);
  double deficit = rel + static_cast<double>(p) - 2;
  return deficit > 0 ? static_cast<long>(std::ceil(deficit)) + 4 : 0;
}

bool straddles(const std::optional<Ball>& b) { return b && !b->rad().is_zero() && b->contains_zero(); }

}  // namespace

prec_t eval_target_bits(unsigned long n, prec_t p) {
  return p + static_cast<prec_t>(std::ceil(std::log2(static_cast<double>(n) + 1) / 2)) + 4;
}

std::vector<MethodChoice> rank_methods(unsigned long n, double x, prec_t p, Want want) {
  prec_t target = eval_target_bits(n, p);
  DerivStrategy ds = choose_deriv_strategy(x, p, want);
  std::vector<MethodChoice> out;
  for (Method m : {Method::Zero, Method::One, Method::Asym}) {
    MethodChoice c = estimate(m, n, x, p, target);
    if (m == Method::Asym && want != Want::Value && ds == DerivStrategy::PairMixed && n < 2) continue;
    if (c.K) out.push_back(c);
  }
  std::stable_sort(out.begin(), out.end(), [](const MethodChoice& a, const MethodChoice& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return preference(a.method) < preference(b.method);
  });
  MethodChoice rec = estimate(Method::Rec, n, x, p, target);
  if (in_basecase_box(n, x, p, want)) {
    out.insert(out.begin(), rec);
  } else {
    out.push_back(rec);
  }
  for (auto& c : out) c.deriv_strategy = ds;
  return out;
}

MethodChoice select_method(unsigned long n, double x, prec_t p, Want want) {
  if (!(x >= 0 && x <= 1)) throw DomainError("select_method: x must lie in [0, 1]");
  return rank_methods(n, x, p, want).front();
}

std::pair<BigFloat, BigFloat> deriv_envelope_bounds(unsigned long n, const BigFloat& lo, const BigFloat& hi) {
  if (lo > hi || lo < -1 || hi > 1) throw DomainError("deriv_envelope_bounds: hull must lie in [-1, 1]");
  if (n == 0) return {BigFloat(0), BigFloat(0)};
  const prec_t w = 64;
  mpz_class nz(n);
  BigFloat b1 = BigFloat::from_mpz(nz * (n + 1) / 2);
  BigFloat b2 = BigFloat::from_mpz((nz - 1) * nz * (nz + 1) * (nz + 2) / 8);

  BigFloat a = std::max(abs(lo), abs(hi));
  if (a >= 1) return {b1, b2};
  BigFloat s = mul(sub(BigFloat(1), a, w, Round::Down), add(BigFloat(1), a, w, Round::Down), w, Round::Down);
  if (s.sign() <= 0) return {b1, b2};

  BigFloat pi_lo = BigFloat::with_prec(w), t = BigFloat::with_prec(w), u = BigFloat::with_prec(w);
  mpfr_const_pi(pi_lo.raw(), MPFR_RNDD);
  BigFloat sqrt_pi = sqrt(pi_lo, w, Round::Down);
  BigFloat s4 = sqrt(sqrt(s, w, Round::Down), w, Round::Down);  // s^(1/4)

  // 2^(3/2) sqrt(n) / (sqrt(pi) s^(3/4))
  mpfr_set_ui(t.raw(), n, MPFR_RNDU);
  mpfr_mul_ui(t.raw(), t.raw(), 8, MPFR_RNDU);
  mpfr_sqrt(t.raw(), t.raw(), MPFR_RNDU);
  mpfr_pow_ui(u.raw(), s4.raw(), 3, MPFR_RNDD);
  mpfr_mul(u.raw(), u.raw(), sqrt_pi.raw(), MPFR_RNDD);
  mpfr_div(t.raw(), t.raw(), u.raw(), MPFR_RNDU);
  if (t < b1) b1 = t;

  // 2^(5/2) n^(3/2) / (sqrt(pi) s^(5/4))
  BigFloat t2 = BigFloat::with_prec(w);
  mpfr_set_ui(t2.raw(), n, MPFR_RNDU);
  mpfr_pow_ui(t2.raw(), t2.raw(), 3, MPFR_RNDU);
  mpfr_mul_ui(t2.raw(), t2.raw(), 32, MPFR_RNDU);
  mpfr_sqrt(t2.raw(), t2.raw(), MPFR_RNDU);
  mpfr_mul(u.raw(), s.raw(), s4.raw(), MPFR_RNDD);
  mpfr_mul(u.raw(), u.raw(), sqrt_pi.raw(), MPFR_RNDD);
  mpfr_div(t2.raw(), t2.raw(), u.raw(), MPFR_RNDU);
  if (t2 < b2) b2 = t2;
  return {b1, b2};
}

EvalResult legendre_eval(const EvalRequest& req) {
  const unsigned long n = req.n;
  const prec_t p = req.p;
  if (p < 2) throw std::invalid_argument("legendre_eval: precision must be at least 2");
  if (!req.x.is_finite() || req.x.lower() < -1 || req.x.upper() > 1) {
    throw DomainError("legendre_eval: x must lie in [-1, 1]");
  }
  bool need_value = req.want != Want::Deriv;
  bool need_deriv = req.want != Want::Value;

  EvalResult res;
  if (n <= 1) {
    if (need_value) res.value = n == 0 ? Ball(1) : req.x;
    if (need_deriv) res.deriv = Ball(n == 0 ? 0 : 1);
    return res;
  }

  bool negate = req.x.mid().sign() < 0;
  const BigFloat m = negate ? neg(req.x.mid()) : req.x.mid();
  const Mag r = req.x.rad();
  const double md = m.to_double();
  const prec_t target = eval_target_bits(n, p);

  PointValues pv;
  prec_t used = target;
  if (m == 1 || m.is_zero()) {
    pv = eval_special(n, m, target);
  } else {
    const bool forced = req.method.has_value();
    std::vector<MethodChoice> plan;
    DerivStrategy ds = req.deriv_strategy.value_or(choose_deriv_strategy(md, p, req.want));
    if (req.method) {
      MethodChoice forced;
      forced.method = *req.method;
      plan.push_back(forced);
    } else {
      plan = rank_methods(n, md, p, req.want);
    }
    for (size_t i = 0; i < plan.size(); ++i) {
      Method meth = plan[i].method;
      try {
        pv = eval_point(n, m, target, req.want, meth, ds, forced);
        if (req.relative && r.is_zero()) {
          long extra = 0;
          if (pv.value) extra = std::max(extra, relative_deficit(*pv.value, p));
          if (pv.deriv) extra = std::max(extra, relative_deficit(*pv.deriv, p));
          if (straddles(pv.value) || straddles(pv.deriv)) extra = std::max<long>(extra, p);
          if (extra > 0) {
            used = target + extra;
            pv = eval_point(n, m, used, req.want, meth, ds, forced);
          }
        }
        res.method = meth;
        res.deriv_strategy = need_deriv ? ds : DerivStrategy::None;
        break;
      } catch (const Inapplicable&) {
        if (req.method || i + 1 == plan.size()) throw;
      }
    }
  }

  // Series can carry thousands of guard bits in the midpoint; drop them.
  if (pv.value) pv.value = round(*pv.value, used + 8);
  if (pv.deriv) pv.deriv = round(*pv.deriv, used + 8);

  if (!r.is_zero()) {
    BigFloat lo = std::max(req.x.lower(), BigFloat(-1));
    BigFloat hi = std::min(req.x.upper(), BigFloat(1));
    auto [b1, b2] = deriv_envelope_bounds(n, lo, hi);
    if (pv.value) pv.value->add_error(r * Mag::upper(b1));
    if (pv.deriv) pv.deriv->add_error(r * Mag::upper(b2));
  }
  if (negate) {
    // P_n(-x) = (-1)^n P_n(x), P'_n(-x) = (-1)^(n+1) P'_n(x)
    if (n % 2 == 1 && pv.value) pv.value = -*pv.value;
    if (n % 2 == 0 && pv.deriv) pv.deriv = -*pv.deriv;
  }
  if (need_value) res.value = std::move(pv.value);
  if (need_deriv) res.deriv = std::move(pv.deriv);
  return res;
}

Ball legendre_p(unsigned long n, const Ball& x, prec_t p) {
  EvalRequest req;
  req.n = n;
  req.x = x;
  req.p = p;
  return *legendre_eval(req).value;
}

Ball legendre_dp(unsigned long n, const Ball& x, prec_t p) {
  EvalRequest req;
  req.n = n;
  req.x = x;
  req.p = p;
  req.want = Want::Deriv;
  return *legendre_eval(req).deriv;
}

}  // namespace legq
