// SPDX-License-Identifier: Apache-2.0
//
// Reference computations used by the tests. None of these call into the
// library's evaluation code; they rely on exact rationals, exact integers,
// or plain MPFR at a much higher precision.

#pragma once

#include "legq/ball.hpp"

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

inline mpq_class to_mpq(const legq::BigFloat& x) {
  auto [m, e] = x.to_mpz_2exp();
  mpq_class q(m);
  if (e >= 0) {
    mpz_mul_2exp(q.get_num_mpz_t(), q.get_num_mpz_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpz_mul_2exp(q.get_den_mpz_t(), q.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  }
  q.canonicalize();
  return q;
}

inline mpq_class to_mpq(const legq::Mag& r) { return to_mpq(r.to_bigfloat()); }

/// Exact test |q - mid| <= rad.
inline bool contains(const legq::Ball& b, const mpq_class& q) {
  if (!b.rad().is_finite()) return true;
  mpq_class d = q - to_mpq(b.mid());
  return abs(d) <= to_mpq(b.rad());
}

/// P_0..P_n at rational x by the three-term recurrence in exact arithmetic.
inline std::vector<mpq_class> legendre_exact_all(unsigned n, const mpq_class& x) {
  std::vector<mpq_class> out(n + 1);
  out[0] = 1;
  if (n >= 1) out[1] = x;
  for (unsigned k = 1; k < n; ++k) {
    out[k + 1] = ((2 * k + 1) * x * out[k] - k * out[k - 1]) / (k + 1);
  }
  return out;
}

inline mpq_class legendre_exact(unsigned n, const mpq_class& x) { return legendre_exact_all(n, x)[n]; }

inline mpq_class legendre_deriv_exact(unsigned n, const mpq_class& x) {
  if (n == 0) return 0;
  // P'_n = sum over k = n-1, n-3, ... of (2k+1) P_k.
  auto all = legendre_exact_all(n, x);
  mpq_class s = 0;
  for (int k = static_cast<int>(n) - 1; k >= 0; k -= 2) s += (2 * k + 1) * all[k];
  return s;
}

/// Monomial coefficients of P_n (index = power), from the recurrence on
/// polynomials with exact rationals.
inline std::vector<mpq_class> legendre_coeffs(unsigned n) {
  std::vector<mpq_class> a{1}, b{0, 1};
  if (n == 0) return a;
  for (unsigned k = 1; k < n; ++k) {
    std::vector<mpq_class> c(k + 2);
    for (size_t i = 0; i < b.size(); ++i) c[i + 1] += mpq_class(2 * k + 1, k + 1) * b[i];
    for (size_t i = 0; i < a.size(); ++i) c[i] -= mpq_class(k, k + 1) * a[i];
    a = std::move(b);
    b = std::move(c);
  }
  return b;
}

inline std::vector<mpq_class> poly_derivative(const std::vector<mpq_class>& p) {
  std::vector<mpq_class> d(p.size() > 1 ? p.size() - 1 : 1);
  for (size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<unsigned long>(i);
  return d;
}

/// Coefficients of q(u) = p(1 + 2u).
inline std::vector<mpq_class> poly_shift_to_one(const std::vector<mpq_class>& p) {
  std::vector<mpq_class> out(p.size());
  // Horner on polynomials: out = out * (1 + 2u) + p[i]
  for (size_t i = p.size(); i-- > 0;) {
    std::vector<mpq_class> next(p.size());
    for (size_t j = 0; j < out.size(); ++j) {
      if (out[j] == 0) continue;
      next[j] += out[j];
      if (j + 1 < next.size()) next[j + 1] += 2 * out[j];
    }
    next[0] += p[i];
    out = std::move(next);
  }
  return out;
}

inline mpq_class poly_eval(const std::vector<mpq_class>& p, const mpq_class& x) {
  mpq_class s = 0;
  for (size_t i = p.size(); i-- > 0;) s = s * x + p[i];
  return s;
}

/// Integer sequence R_k with P_k(a / 2^t) = R_k / (2^(t k) k!).
inline mpz_class legendre_scaled_integer(unsigned n, const mpz_class& a, unsigned t) {
  mpz_class two2t = mpz_class(1) << (2 * t);
  mpz_class r0 = 1, r1 = a;
  if (n == 0) return r0;
  for (unsigned k = 1; k < n; ++k) {
    mpz_class r2 = (2 * k + 1) * a * r1 - mpz_class(k) * k * two2t * r0;
    r0 = r1;
    r1 = r2;
  }
  return r1;
}

/// Owning mpfr_t wrapper for plain high-precision references.
class Real {
 public:
  explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real& operator=(const Real& o) {
    if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    return *this;
  }
  ~Real() { mpfr_clear(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

/// P_n(x) and P'_n(x) by Bonnet's recurrence in plain MPFR at `prec` bits.
/// The absolute error is below (n+1)(n+2) 2^-prec for |x| <= 1.
inline std::pair<Real, Real> legendre_mpfr(unsigned n, mpfr_srcptr x, mpfr_prec_t prec) {
  Real p0(prec), p1(prec), t(prec), u(prec);
  mpfr_set_ui(p0.get(), 1, MPFR_RNDN);
  mpfr_set(p1.get(), x, MPFR_RNDN);
  if (n == 0) {
    Real d(prec);
    return {p0, d};
  }
  for (unsigned k = 1; k < n; ++k) {
    mpfr_mul(t.get(), x, p1.get(), MPFR_RNDN);
    mpfr_mul_ui(t.get(), t.get(), 2 * k + 1, MPFR_RNDN);
    mpfr_mul_ui(u.get(), p0.get(), k, MPFR_RNDN);
    mpfr_sub(t.get(), t.get(), u.get(), MPFR_RNDN);
    mpfr_div_ui(t.get(), t.get(), k + 1, MPFR_RNDN);
    mpfr_swap(p0.get(), p1.get());
    mpfr_swap(p1.get(), t.get());
  }
  // P'_n = n (x P_n - P_{n-1}) / (x^2 - 1) away from +-1, and n(n+1)/2 at 1.
  Real d(prec);
  if (mpfr_cmpabs_ui(x, 1) == 0) {
    mpfr_set_ui(d.get(), static_cast<unsigned long>(n) * (n + 1) / 2, MPFR_RNDN);
    if (mpfr_sgn(x) < 0 && n % 2 == 0) mpfr_neg(d.get(), d.get(), MPFR_RNDN);
  } else {
    mpfr_mul(t.get(), x, p1.get(), MPFR_RNDN);
    mpfr_sub(t.get(), t.get(), p0.get(), MPFR_RNDN);
    mpfr_mul_ui(t.get(), t.get(), n, MPFR_RNDN);
    mpfr_sqr(u.get(), x, MPFR_RNDN);
    mpfr_sub_ui(u.get(), u.get(), 1, MPFR_RNDN);
    mpfr_div(d.get(), t.get(), u.get(), MPFR_RNDN);
  }
  return {p1, d};
}

/// Ball around the plain-MPFR value at 2p+64 bits with a radius that covers
/// the reference's own rounding error.
inline legq::Ball legendre_reference_ball(unsigned n, const legq::BigFloat& x, mpfr_prec_t p) {
  mpfr_prec_t w = 2 * p + 64;
  auto [v, d] = legendre_mpfr(n, x.raw(), w);
  legq::BigFloat mid = legq::BigFloat::with_prec(w);
  mpfr_set(mid.raw(), v.get(), MPFR_RNDN);
  legq::Mag rad = legq::Mag::from_ui(static_cast<unsigned long>(n + 1) * (n + 2)).mul_2exp(-w + 2);
  return legq::Ball(mid, rad);
}

/// Ball for P'_n(x) from the plain-MPFR recurrence. Near +-1 the quotient
/// loses up to |log2(1 - x^2)| bits, which the working precision absorbs.
inline legq::Ball legendre_deriv_reference_ball(unsigned n, const legq::BigFloat& x, mpfr_prec_t p) {
  long lost = 0;
  if (mpfr_cmpabs_ui(x.raw(), 1) < 0) {
    Real s(x.prec() * 2 + 8);
    mpfr_sqr(s.get(), x.raw(), MPFR_RNDN);
    mpfr_ui_sub(s.get(), 1, s.get(), MPFR_RNDN);  // exact
    lost = 1 - mpfr_get_exp(s.get());
  }
  mpfr_prec_t w = 2 * p + 64 + lost;
  auto [v, d] = legendre_mpfr(n, x.raw(), w);
  legq::BigFloat mid = legq::BigFloat::with_prec(w);
  mpfr_set(mid.raw(), d.get(), MPFR_RNDN);
  // |x P_n - P_{n-1}| is off by at most 3 (n+1)(n+2) 2^-w before the
  // division by 1 - x^2 >= 2^-lost and the multiplication by n.
  legq::Mag rad = legq::Mag::from_ui(static_cast<unsigned long>(n + 1) * (n + 2) * (n + 1)).mul_2exp(-w + 4 + lost);
  return legq::Ball(mid, rad);
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240601);
  return gen;
}

/// Uniform random dyadic in [lo, hi] with `bits` fractional bits.
inline legq::BigFloat random_dyadic(double lo, double hi, unsigned bits) {
  std::uniform_real_distribution<double> dist(lo, hi);
  double v = dist(rng());
  mpz_class m(std::ldexp(v, static_cast<int>(std::min(bits, 52u))));
  legq::BigFloat r = legq::BigFloat::from_mpz_2exp(m, -static_cast<long>(std::min(bits, 52u)));
  if (bits > 52) {
    mpz_class extra;
    std::uniform_int_distribution<unsigned long> ud;
    extra = ud(rng()) >> 12;  // 52 extra random bits
    legq::BigFloat tail = legq::BigFloat::from_mpz_2exp(extra, -static_cast<long>(52 + 52));
    // Move toward zero so the value stays inside [lo, hi] when that interval contains 0.
    r = v < 0 ? legq::add_exact(r, tail) : legq::sub_exact(r, tail);
  }
  return r;
}

}  // namespace oracle
