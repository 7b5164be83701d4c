// SPDX-License-Identifier: Apache-2.0

#include "legq/expansions.hpp"

#include "legq/rectsplit.hpp"
#include "legq/scalars.hpp"

#include <cmath>

namespace legq {

namespace {

constexpr prec_t kLow = 64;

mpz_class binom(unsigned long n, unsigned long k) {
  mpz_class r;
  if (k <= n) mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

// Upper bound for a^e with a >= 0.
Mag mag_pow(const Mag& a, unsigned long e) {
  if (e == 0) return Mag::from_ui(1);
  if (a.is_zero()) return Mag();
  BigFloat r = BigFloat::with_prec(kLow);
  mpfr_pow_ui(r.raw(), a.raw(), e, MPFR_RNDU);
  return Mag::upper(r);
}

// Geometric factor 1 / (1 - alpha); +inf if alpha >= 1.
Mag geometric_factor(const Mag& alpha) {
  Mag one_minus = sub_lower(Mag::from_ui(1), alpha);
  if (one_minus.is_zero()) return Mag::inf();
  return div_upper(Mag::from_ui(1), one_minus);
}

// Coefficients of the expansion at zero. With d = floor(n/2):
//   value: A(k),  k = 0..d
//   derivative, n even: B(j) = (j+1) A(j+1),  j = 0..d-1
//   derivative, n odd:  D(k) = (2k+1) A(k),   k = 0..d
mpq_class zero_coef(unsigned long n, unsigned long k, bool deriv) {
  unsigned long d = n / 2;
  bool even = n % 2 == 0;
  auto A = [&](unsigned long j) -> mpq_class {
    if (j > d) return 0;
    if (even) return mpq_class(binom(n, d - j) * binom(n + 2 * j, n), binom(2 * d, d));
    return mpq_class(binom(n, d - j) * binom(n + 2 * j + 1, n), (d + 1) * binom(2 * d + 2, d + 1));
  };
  mpq_class r;
  if (!deriv) {
    r = A(k);
  } else if (even) {
    r = (k + 1) * A(k + 1);
  } else {
    r = (2 * k + 1) * A(k);
  }
  r.canonicalize();
  return r;
}

// coef(k) / coef(k-1) for k >= 1, as an exact rational (may be <= 0 past the end).
mpq_class zero_ratio(unsigned long n, unsigned long k, bool deriv) {
  long d = static_cast<long>(n / 2), kk = static_cast<long>(k);
  long sigma = n % 2 == 0 ? -1 : 1;
  mpz_class num, den;
  if (!deriv) {
    num = mpz_class(d - kk + 1) * (2 * d + 2 * kk + sigma);
    den = mpz_class(kk) * (2 * kk + sigma);
  } else if (sigma < 0) {
    num = mpz_class(d - kk) * (2 * d + 2 * kk + 1);
    den = mpz_class(kk) * (2 * kk + 1);
  } else {
    num = mpz_class(d - kk + 1) * (2 * d + 2 * kk + 1);
    den = mpz_class(kk) * (2 * kk - 1);
  }
  mpq_class r(num, den);
  r.canonicalize();
  return r;
}

TermRatio zero_term_ratio(unsigned long n, bool deriv) {
  long d = static_cast<long>(n / 2);
  long sigma = n % 2 == 0 ? -1 : 1;
  if (!deriv) return {{{(d + 1) * (2 * d + sigma), 2 - sigma, -2}}, {{0, sigma, 2}}};
  if (sigma < 0) return {{{d * (2 * d + 1), -1, -2}}, {{0, 1, 2}}};
  return {{{(d + 1) * (2 * d + 1), 1, -2}}, {{0, -1, 2}}};
}

void check_unit_interval(const BigFloat& x) {
  if (!x.is_finite() || x < 0 || x > 1) throw DomainError("series: x must lie in [0, 1]");
}

// Precision for cached prefactor constants, rounded up so nearby working
// precisions share cache entries.
prec_t constant_prec(prec_t w) { return (w + 63) / 64 * 64; }

double log2_factorial(double k) { return std::lgamma(k + 1) / std::log(2.0); }

unsigned long grow(unsigned long K) {
  auto g = static_cast<unsigned long>(std::ceil(1.1 * static_cast<double>(K)));
  return g > K ? g : K + 1;
}

// Scans |t_k| = |t_{k-1}| r(k) arg and returns the first K >= 1 whose
// bound |t_K| / (1 - alpha(K)) is below 2^-goal. The running term is kept as
// a double times 2^e so the loop needs no logarithms.
template <class Ratio, class Alpha>
std::optional<unsigned long> scan_terms(double log2_t0, double log2_arg, Ratio ratio, Alpha alpha_of,
                                        unsigned long full, double goal, double log2_scale) {
  const double arg = std::exp2(log2_arg);
  double base = -goal - log2_scale;  // want t / (1 - a) <= 2^base
  double lt0 = std::floor(log2_t0);
  double t = std::exp2(log2_t0 - lt0);
  double e = lt0;
  double limit = std::exp2(base - e);
  for (unsigned long k = 1; k < full; ++k) {
    double r = ratio(k);
    if (r <= 0) return full;
    t *= r * arg;
    if (!(t > 0x1p-500 && t < 0x1p500)) {
      int ex;
      t = std::frexp(t, &ex);
      e += ex;
      limit = std::exp2(base - e);
    }
    double a = alpha_of(k);
    if (a < 0.999 && t <= limit * (1 - a)) return k;
  }
  return full;
}

}  // namespace

long cancellation_bits(SeriesKind kind, unsigned long n, double x) {
  double nn = static_cast<double>(n);
  if (kind == SeriesKind::Zero) {
    double ax = std::abs(x);
    return static_cast<long>(std::ceil(nn * std::log2(ax + std::sqrt(1 + ax * ax))));
  }
  double u = (x - 1) / 2;
  return static_cast<long>(std::ceil(2 * nn * std::sqrt(std::max(0.0, -u)) / std::log(2.0)));
}

prec_t series_working_prec(prec_t target, long cancel_bits, unsigned long n) {
  long lg = static_cast<long>(std::ceil(std::log2(static_cast<double>(n) + 1)));
  return target + cancel_bits + 10 + lg;
}

// --- truncation bounds -------------------------------------------------------

Mag asym_tail_bound(unsigned long n, unsigned long K, const BigFloat& y_lower) {
  if (y_lower.sign() <= 0 || n == 0 || K == 0) return Mag::inf();
  auto f = [] { return BigFloat::with_prec(kLow); };
  BigFloat pi_lo = f(), t = f(), num = f(), den = f();
  mpfr_const_pi(pi_lo.raw(), MPFR_RNDD);
  // 2 sqrt(2 / (pi y)) K!
  mpfr_mul(t.raw(), pi_lo.raw(), y_lower.raw(), MPFR_RNDD);
  mpfr_ui_div(t.raw(), 2, t.raw(), MPFR_RNDU);
  mpfr_sqrt(t.raw(), t.raw(), MPFR_RNDU);
  mpfr_fac_ui(num.raw(), K, MPFR_RNDU);
  mpfr_mul(num.raw(), num.raw(), t.raw(), MPFR_RNDU);
  mpfr_mul_2ui(num.raw(), num.raw(), 1, MPFR_RNDU);
  // pi sqrt(n) (2 n y)^K
  mpfr_set_ui(t.raw(), n, MPFR_RNDD);
  mpfr_mul_2ui(t.raw(), t.raw(), 1, MPFR_RNDD);
  mpfr_mul(t.raw(), t.raw(), y_lower.raw(), MPFR_RNDD);
  mpfr_pow_ui(den.raw(), t.raw(), K, MPFR_RNDD);
  mpfr_sqrt_ui(t.raw(), n, MPFR_RNDD);
  mpfr_mul(den.raw(), den.raw(), t.raw(), MPFR_RNDD);
  mpfr_mul(den.raw(), den.raw(), pi_lo.raw(), MPFR_RNDD);
  mpfr_div(num.raw(), num.raw(), den.raw(), MPFR_RNDU);
  return Mag::upper(num);
}

unsigned long zero_full_terms(unsigned long n, bool deriv) {
  unsigned long d = n / 2;
  return (deriv && n % 2 == 0) ? d : d + 1;
}

unsigned long one_full_terms(unsigned long n, bool deriv) { return deriv ? n : n + 1; }

Mag zero_tail_bound(unsigned long n, unsigned long K, const BigFloat& x, bool deriv) {
  unsigned long full = zero_full_terms(n, deriv);
  if (K >= full) return Mag();
  if (K == 0) return Mag::upper(zero_coef(n, 0, deriv)) + zero_tail_bound(n, 1, x, deriv);
  Mag x2 = Mag::upper(x) * Mag::upper(x);
  Mag alpha = x2 * Mag::upper(zero_ratio(n, K, deriv));
  Mag g = geometric_factor(alpha);
  if (g.is_inf()) return g;
  return Mag::upper(zero_coef(n, K, deriv)) * mag_pow(x2, K) * g;
}

Mag one_tail_bound(unsigned long n, unsigned long K, const BigFloat& u, bool deriv) {
  unsigned long full = one_full_terms(n, deriv);
  if (K >= full) return Mag();
  if (K == 0) {
    Mag c0 = deriv ? Mag::from_ui(n * (n + 1) / 2) : Mag::from_ui(1);
    return c0 + one_tail_bound(n, 1, u, deriv);
  }
  Mag au = Mag::upper(u);
  mpq_class r(mpz_class(n - K) * (n + K + 1), mpz_class(K + 1) * (K + 1));
  r.canonicalize();
  Mag g = geometric_factor(au * Mag::upper(r));
  if (g.is_inf()) return g;
  Mag coef = deriv ? Mag::upper(mpz_class(n * binom(n, K + 1) * binom(n + K + 1, K + 1)))
                   : Mag::upper(mpz_class(binom(n, K) * binom(n + K, K)));
  return coef * mag_pow(au, K) * g;
}

// --- estimates -------------------------------------------------------------------

std::optional<unsigned long> asym_terms_estimate(unsigned long n, double x, prec_t target) {
  double y = std::sqrt((1 - x) * (1 + x));
  if (!(y > 0) || n == 0) return std::nullopt;
  double nn = static_cast<double>(n);
  double lconst = std::log2(2 * std::sqrt(2 / (M_PI * y)) / (M_PI * std::sqrt(nn)));
  double l2ny = std::log2(2 * nn * y);
  double goal = static_cast<double>(target) + 3;
  auto lt = [&](unsigned long K) {
    return log2_factorial(static_cast<double>(K)) - static_cast<double>(K) * l2ny + lconst;
  };
  // The bound decreases in K up to K = 2ny, where it is smallest.
  auto kmax = static_cast<unsigned long>(std::floor(2 * nn * y));
  if (kmax < 1 || lt(kmax) > -goal) return std::nullopt;
  unsigned long lo = 1, hi = kmax;
  while (lo < hi) {
    unsigned long mid = lo + (hi - lo) / 2;
    if (lt(mid) <= -goal) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

std::optional<unsigned long> zero_terms_estimate(unsigned long n, double x, prec_t target, bool deriv) {
  unsigned long full = zero_full_terms(n, deriv);
  if (x == 0) return std::min<unsigned long>(1, full);
  double d = static_cast<double>(n / 2);
  bool even = n % 2 == 0;
  double x2 = x * x;
  // |prefactor| ~ 1/sqrt(pi d) (even) or 2 sqrt((d+1)/pi) x (odd).
  double lpref = even ? -0.5 * std::log2(M_PI * std::max(d, 1.0)) : std::log2(2 * std::sqrt((d + 1) / M_PI) * x);
  if (deriv && even) lpref += std::log2(2 * x);
  double lt0 = 0;
  if (deriv && even) lt0 = std::log2(d * (2 * d + 1));
  auto ratio = [&](unsigned long k) {
    double kk = static_cast<double>(k);
    if (!deriv) {
      double s = even ? -1 : 1;
      return (d - kk + 1) * (2 * d + 2 * kk + s) / (kk * (2 * kk + s));
    }
    if (even) return (d - kk) * (2 * d + 2 * kk + 1) / (kk * (2 * kk + 1));
    return (d - kk + 1) * (2 * d + 2 * kk + 1) / (kk * (2 * kk - 1));
  };
  auto alpha = [&](unsigned long k) { return x2 * ratio(k); };
  return scan_terms(lt0, std::log2(x2), ratio, alpha, full, static_cast<double>(target) + 3, lpref);
}

std::optional<unsigned long> one_terms_estimate(unsigned long n, double x, prec_t target, bool deriv) {
  unsigned long full = one_full_terms(n, deriv);
  double au = std::abs((x - 1) / 2);
  if (au == 0) return std::min<unsigned long>(1, full);
  double nn = static_cast<double>(n);
  auto value_ratio = [&](unsigned long k) {
    double kk = static_cast<double>(k);
    return (nn - kk + 1) * (nn + kk) / (kk * kk);
  };
  auto alpha = [&](unsigned long k) {
    double kk = static_cast<double>(k);
    return au * (nn - kk) * (nn + kk + 1) / ((kk + 1) * (kk + 1));
  };
  double goal = static_cast<double>(target) + 3;
  if (!deriv) return scan_terms(0.0, std::log2(au), value_ratio, alpha, full, goal, 0.0);
  // Derivative tail at K: n c_{K+1} |u|^K / (1 - alpha), i.e. the value
  // term at K+1 scaled by n / |u|.
  auto shifted = [&](unsigned long k) { return value_ratio(k + 1); };
  double lt0 = std::log2(value_ratio(1) * au);
  return scan_terms(lt0, std::log2(au), shifted, alpha, full, goal, std::log2(nn / au));
}

// --- evaluation ----------------------------------------------------------------

std::optional<unsigned long> asym_best_terms(unsigned long n, double x) {
  double y = std::sqrt((1 - x) * (1 + x));
  auto k = static_cast<unsigned long>(std::floor(2 * static_cast<double>(n) * y));
  if (!(y > 0) || k < 1) return std::nullopt;
  return k;
}

std::pair<Ball, std::optional<Ball>> eval_asymptotic(unsigned long n, const BigFloat& x, prec_t target,
                                                     unsigned long K, bool want_prev, bool strict) {
  check_unit_interval(x);
  if (x == 1) throw Inapplicable("asymptotic series: x = 1");
  if (n == 0 || (want_prev && n < 2)) throw Inapplicable("asymptotic series: degree too small");
  prec_t w = series_working_prec(target, 0, n);

  Ball xb(x);
  Ball y = sqrt(mul(sub(Ball(1), xb, w), add(Ball(1), xb, w), w), w);
  BigFloat y_lo = y.lower();
  if (y_lo.sign() <= 0) throw Inapplicable("asymptotic series: sin(theta) not bounded away from 0");

  const Mag goal = Mag::pow2(-static_cast<long>(target) - 2);
  K = std::max<unsigned long>(K, 1);
  Mag tail_n, tail_p;
  for (int attempt = 0;; ++attempt) {
    tail_n = asym_tail_bound(n, K, y_lo);
    tail_p = want_prev ? asym_tail_bound(n - 1, K, y_lo) : Mag();
    if (tail_n <= goal && tail_p <= goal) break;
    if (!strict && tail_n.is_finite() && tail_p.is_finite()) break;
    if (attempt == 3) throw Inapplicable("asymptotic series: truncation bound not met");
    K = grow(K);
  }

  ComplexBall z(xb, y);
  ComplexBall omega(Ball(1), -div(xb, y, w));
  auto table = powers_table(omega, default_split(static_cast<long>(K), want_prev), w);

  prec_t cp = constant_prec(w);
  Ball scaled = central_binomial_scaled(n, cp);
  Ball sqrt_pi = sqrt(const_pi(cp), cp);
  Ball inv_sqrt_pi_y = div(Ball(1), sqrt(mul(const_pi(cp), y, w), w), w);

  auto series = [&](unsigned long m, const Ball& c0) {
    long mm = static_cast<long>(m);
    TermRatio r{{{1, -4, 4}}, {{0, 8 * mm + 4, 8}}};
    ComplexBall s = hyper_sum(omega, r, static_cast<long>(K), 1, &table, w);
    s.re = add_si(s.re, 1, w);
    return mul(s, c0, w);
  };
  auto real_part = [&](const ComplexBall& zpow, const ComplexBall& s, const Mag& tail) {
    ComplexBall v = mul(zpow, s, w);
    // Re[(1 - i)(a + b i)] = a + b
    Ball r = mul(add(v.re, v.im, w), inv_sqrt_pi_y, w);
    r.add_error(tail);
    return r;
  };

  ComplexBall zh = pow_half_odd(z, 2 * n + 1, w);
  // C_{n,0} = 2 / (sqrt(pi) (2n+1) scaled(n))
  Ball c0 = div(Ball(2), mul(mul_si(sqrt_pi, static_cast<long>(2 * n + 1), w), scaled, w), w);
  Ball pn = real_part(zh, series(n, c0), tail_n);

  std::optional<Ball> prev;
  if (want_prev) {
    // C_{n-1,0} = 1 / (sqrt(pi) n scaled(n)), and z^(n-1/2) = z^(n+1/2) conj(z).
    Ball c0p = div(Ball(1), mul(mul_si(sqrt_pi, static_cast<long>(n), w), scaled, w), w);
    prev = real_part(mul(zh, conj(z), w), series(n - 1, c0p), tail_p);
  }
  return {pn, prev};
}

Ball eval_zero_series(unsigned long n, const BigFloat& x, prec_t target, unsigned long K, bool deriv) {
  check_unit_interval(x);
  unsigned long d = n / 2;
  bool even = n % 2 == 0;
  if (deriv && n == 0) return Ball();
  long pa = cancellation_bits(SeriesKind::Zero, n, x.to_double(Round::Up));
  prec_t w = series_working_prec(target, pa, n);
  prec_t cp = constant_prec(w);

  // Prefactor without the x factors.
  Ball pref = even ? central_binomial_scaled(d, cp) : mul_si(central_binomial_scaled(d + 1, cp), 2 * static_cast<long>(d + 1), cp);
  if (d % 2 == 1) pref = -pref;
  Ball xb(x);
  Ball outer = pref;
  if (!deriv && !even) outer = mul(pref, xb, w);
  if (deriv && even) outer = mul(pref, mul_si(xb, -2, w), w);

  unsigned long full = zero_full_terms(n, deriv);
  const Mag goal = Mag::pow2(-static_cast<long>(target) - 2);
  K = std::clamp<unsigned long>(K, 1, full);
  Mag tail;
  for (int attempt = 0;; ++attempt) {
    tail = zero_tail_bound(n, K, x, deriv);
    if (tail.is_finite() && tail * outer.mag_upper() <= goal) break;
    if (attempt == 3) throw Inapplicable("zero series: truncation bound not met");
    K = std::min(grow(K), full);
  }

  BigFloat x2 = mul(x, x, 2 * x.prec() + 2, Round::Nearest);  // exact
  Ball arg(neg(x2));
  Ball s = hyper_sum(arg, zero_term_ratio(n, deriv), static_cast<long>(K), 1,
                     static_cast<const PowersTable<Ball>*>(nullptr), w);
  s = add_si(s, 1, w);
  if (deriv && even) s = mul_z(s, mpz_class(d) * (2 * d + 1), w);
  s.add_error(tail);
  return mul(outer, s, w);
}

Ball eval_one_series(unsigned long n, const BigFloat& x, prec_t target, unsigned long K, bool deriv) {
  check_unit_interval(x);
  if (deriv && n == 0) return Ball();
  BigFloat u = mul_2exp(sub_exact(x, BigFloat(1)), -1);
  long pa = cancellation_bits(SeriesKind::One, n, x.to_double(Round::Down));
  prec_t w = series_working_prec(target, pa, n);

  unsigned long full = one_full_terms(n, deriv);
  const Mag goal = Mag::pow2(-static_cast<long>(target) - 2);
  K = std::clamp<unsigned long>(K, 1, full);
  Mag tail;
  for (int attempt = 0;; ++attempt) {
    tail = one_tail_bound(n, K, u, deriv);
    if (tail <= goal) break;
    if (attempt == 3) throw Inapplicable("one series: truncation bound not met");
    K = std::min(grow(K), full);
  }

  long nn = static_cast<long>(n);
  TermRatio r = deriv ? TermRatio{{{nn * (nn + 1), -1, -1}}, {{0, 1, 1}}} : TermRatio{{{nn * (nn + 1), 1, -1}}, {{0, 0, 1}}};
  Ball s = hyper_sum(Ball(u), r, static_cast<long>(K), 1, static_cast<const PowersTable<Ball>*>(nullptr), w);
  s = add_si(s, 1, w);
  if (deriv) s = mul_z(s, mpz_class(n) * (n + 1) / 2, w);
  s.add_error(tail);
  return s;
}

}  // namespace legq
