// SPDX-License-Identifier: Apache-2.0

#include "legq/bigfloat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace legq {

mpfr_rnd_t to_mpfr(Round r) {
  switch (r) {
    case Round::Down: return MPFR_RNDD;
    case Round::Up: return MPFR_RNDU;
    case Round::Zero: return MPFR_RNDZ;
    case Round::Nearest: break;
  }
  return MPFR_RNDN;
}

namespace {

prec_t clamp_prec(prec_t p) { return std::clamp<prec_t>(p, MPFR_PREC_MIN, MPFR_PREC_MAX); }

// Lowest set bit position of a finite nonzero value.
long low_bit(mpfr_srcptr x) { return static_cast<long>(mpfr_get_exp(x)) - static_cast<long>(mpfr_min_prec(x)); }

}  // namespace

BigFloat::BigFloat() {
  mpfr_init2(v_, 2);
  mpfr_set_zero(v_, 1);
}

BigFloat::BigFloat(long v) {
  mpfr_init2(v_, 64);
  mpfr_set_si(v_, v, MPFR_RNDN);
}

BigFloat::BigFloat(double v) {
  if (std::isnan(v)) throw std::invalid_argument("BigFloat: NaN");
  if (std::isinf(v) && v < 0) throw std::invalid_argument("BigFloat: -inf");
  mpfr_init2(v_, 53);
  mpfr_set_d(v_, v, MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(v_, other.prec());
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  // Steal the limbs and leave `other` as a valid 2-bit zero.
  v_[0] = other.v_[0];
  mpfr_init2(other.v_, 2);
  mpfr_set_zero(other.v_, 1);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    if (prec() != other.prec()) mpfr_set_prec(v_, other.prec());
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  if (this != &other) mpfr_swap(v_, other.v_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

BigFloat BigFloat::with_prec(prec_t prec) {
  BigFloat r;
  mpfr_set_prec(r.v_, clamp_prec(prec));
  mpfr_set_zero(r.v_, 1);
  return r;
}

BigFloat BigFloat::from_mpz(const mpz_class& v) {
  auto r = with_prec(std::max<prec_t>(2, static_cast<prec_t>(mpz_sizeinbase(v.get_mpz_t(), 2))));
  mpfr_set_z(r.v_, v.get_mpz_t(), MPFR_RNDN);
  return r;
}

BigFloat BigFloat::from_mpz_2exp(const mpz_class& mantissa, long exp2) {
  auto r = with_prec(std::max<prec_t>(2, static_cast<prec_t>(mpz_sizeinbase(mantissa.get_mpz_t(), 2))));
  mpfr_set_z_2exp(r.v_, mantissa.get_mpz_t(), exp2, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::from_mpq(const mpq_class& q, prec_t prec, Round rnd) {
  auto r = with_prec(prec);
  mpfr_set_q(r.v_, q.get_mpq_t(), to_mpfr(rnd));
  return r;
}

BigFloat BigFloat::infinity() {
  BigFloat r;
  mpfr_set_inf(r.v_, 1);
  return r;
}

BigFloat BigFloat::parse(std::string_view text, prec_t prec, Round rnd) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty number");
  auto r = with_prec(prec);
  char* end = nullptr;
  mpfr_strtofr(r.v_, s.c_str(), &end, 0, to_mpfr(rnd));
  if (end != s.c_str() + s.size() || mpfr_nan_p(r.v_))
    throw std::invalid_argument("malformed number: " + s);
  return r;
}

long BigFloat::bits() const {
  if (!is_finite() || is_zero()) return 0;
  return static_cast<long>(mpfr_min_prec(v_));
}

double BigFloat::to_double(Round rnd) const { return mpfr_get_d(v_, to_mpfr(rnd)); }

std::pair<mpz_class, long> BigFloat::to_mpz_2exp() const {
  if (!is_finite()) throw std::domain_error("to_mpz_2exp: non-finite value");
  mpz_class m;
  if (is_zero()) return {m, 0};
  long e = static_cast<long>(mpfr_get_z_2exp(m.get_mpz_t(), v_));
  auto s = mpz_scan1(m.get_mpz_t(), 0);
  mpz_tdiv_q_2exp(m.get_mpz_t(), m.get_mpz_t(), s);
  return {m, e + static_cast<long>(s)};
}

mpz_class BigFloat::to_mpz(Round rnd) const {
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), v_, to_mpfr(rnd));
  return z;
}

std::string BigFloat::to_hex() const {
  if (is_inf()) return "inf";
  if (is_zero()) return "0";
  auto [m, e] = to_mpz_2exp();
  std::string out = sgn(m) < 0 ? "-0x" : "0x";
  mpz_class a = ::abs(m);
  // Odd mantissa, so equal values print identically at any precision.
  mp_bitcnt_t tz = mpz_scan1(a.get_mpz_t(), 0);
  a >>= tz;
  e += static_cast<long>(tz);
  out += a.get_str(16);
  out += "p";
  out += std::to_string(e);
  return out;
}

std::string BigFloat::to_decimal(int digits) const {
  if (is_inf()) return "inf";
  if (is_zero()) return "0";
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", std::max(1, digits - 1), v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b) {
  int c = mpfr_cmp(a.v_, b.v_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

std::partial_ordering operator<=>(const BigFloat& a, long b) {
  int c = mpfr_cmp_si(a.raw(), b);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

BigFloat add(const BigFloat& a, const BigFloat& b, prec_t prec, Round rnd) {
  auto r = BigFloat::with_prec(prec);
  mpfr_add(r.raw(), a.raw(), b.raw(), to_mpfr(rnd));
  return r;
}

BigFloat sub(const BigFloat& a, const BigFloat& b, prec_t prec, Round rnd) {
  auto r = BigFloat::with_prec(prec);
  mpfr_sub(r.raw(), a.raw(), b.raw(), to_mpfr(rnd));
  return r;
}

BigFloat mul(const BigFloat& a, const BigFloat& b, prec_t prec, Round rnd) {
  auto r = BigFloat::with_prec(prec);
  mpfr_mul(r.raw(), a.raw(), b.raw(), to_mpfr(rnd));
  return r;
}

BigFloat div(const BigFloat& a, const BigFloat& b, prec_t prec, Round rnd) {
  if (b.is_zero()) throw DomainError("BigFloat division by zero");
  auto r = BigFloat::with_prec(prec);
  mpfr_div(r.raw(), a.raw(), b.raw(), to_mpfr(rnd));
  return r;
}

BigFloat sqrt(const BigFloat& a, prec_t prec, Round rnd) {
  if (a.sign() < 0) throw DomainError("BigFloat sqrt of negative number");
  auto r = BigFloat::with_prec(prec);
  mpfr_sqrt(r.raw(), a.raw(), to_mpfr(rnd));
  return r;
}

BigFloat round(const BigFloat& a, prec_t prec, Round rnd) {
  auto r = BigFloat::with_prec(prec);
  mpfr_set(r.raw(), a.raw(), to_mpfr(rnd));
  return r;
}

BigFloat neg(const BigFloat& a) {
  auto r = BigFloat::with_prec(a.prec());
  mpfr_neg(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

BigFloat abs(const BigFloat& a) {
  auto r = BigFloat::with_prec(a.prec());
  mpfr_abs(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

BigFloat mul_2exp(const BigFloat& a, long e) {
  auto r = BigFloat::with_prec(a.prec());
  mpfr_mul_2si(r.raw(), a.raw(), e, MPFR_RNDN);
  return r;
}

namespace {

prec_t exact_sum_prec(const BigFloat& a, const BigFloat& b) {
  long hi = std::max(a.exponent(), b.exponent()) + 1;
  long lo = std::min(low_bit(a.raw()), low_bit(b.raw()));
  return clamp_prec(hi - lo + 1);
}

}  // namespace

BigFloat add_exact(const BigFloat& a, const BigFloat& b) {
  if (!a.is_finite() || !b.is_finite()) return add(a, b, 2, Round::Nearest);
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return add(a, b, exact_sum_prec(a, b), Round::Nearest);
}

BigFloat sub_exact(const BigFloat& a, const BigFloat& b) {
  if (!a.is_finite() || !b.is_finite()) return sub(a, b, 2, Round::Nearest);
  if (a.is_zero()) return neg(b);
  if (b.is_zero()) return a;
  return sub(a, b, exact_sum_prec(a, b), Round::Nearest);
}

// --- Mag -------------------------------------------------------------------

Mag::Mag() : limb_(0) {
  mpfr_custom_init(&limb_, kPrec);
  mpfr_custom_init_set(v_, MPFR_ZERO_KIND, 0, kPrec, &limb_);
}

Mag::Mag(const Mag& other) : limb_(other.limb_) {
  v_[0] = other.v_[0];
  rebind();
}

Mag& Mag::operator=(const Mag& other) {
  limb_ = other.limb_;
  v_[0] = other.v_[0];
  rebind();
  return *this;
}

void Mag::rebind() { mpfr_custom_move(v_, &limb_); }

Mag Mag::inf() {
  Mag r;
  mpfr_set_inf(r.v_, 1);
  return r;
}

Mag Mag::pow2(long e) {
  Mag r;
  mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDU);
  return r;
}

Mag Mag::from_ui(unsigned long v) {
  Mag r;
  mpfr_set_ui(r.v_, v, MPFR_RNDU);
  return r;
}

Mag Mag::upper(const BigFloat& x) {
  Mag r;
  mpfr_abs(r.v_, x.raw(), MPFR_RNDU);
  return r;
}

Mag Mag::upper(double x) {
  Mag r;
  mpfr_set_d(r.v_, std::fabs(x), MPFR_RNDU);
  return r;
}

Mag Mag::upper(const mpz_class& x) {
  Mag r;
  mpfr_set_z(r.v_, x.get_mpz_t(), MPFR_RNDA);
  mpfr_abs(r.v_, r.v_, MPFR_RNDU);
  return r;
}

Mag Mag::upper(const mpq_class& x) {
  Mag r;
  mpfr_set_q(r.v_, x.get_mpq_t(), MPFR_RNDA);
  mpfr_abs(r.v_, r.v_, MPFR_RNDU);
  return r;
}

Mag Mag::lower(const BigFloat& x) {
  Mag r;
  mpfr_abs(r.v_, x.raw(), MPFR_RNDD);
  return r;
}

Mag Mag::lower(const mpz_class& x) {
  Mag r;
  mpfr_set_z(r.v_, x.get_mpz_t(), MPFR_RNDZ);
  mpfr_abs(r.v_, r.v_, MPFR_RNDD);
  return r;
}

double Mag::log2_upper() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  if (is_inf()) return std::numeric_limits<double>::infinity();
  long e = 0;
  double d = mpfr_get_d_2exp(&e, v_, MPFR_RNDU);
  return std::log2(d) + static_cast<double>(e) + 1e-12;
}

double Mag::to_double() const { return mpfr_get_d(v_, MPFR_RNDU); }

BigFloat Mag::to_bigfloat() const {
  auto r = BigFloat::with_prec(kPrec);
  mpfr_set(r.raw(), v_, MPFR_RNDN);
  return r;
}

Mag operator+(const Mag& a, const Mag& b) {
  Mag r;
  mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDU);
  return r;
}

Mag operator*(const Mag& a, const Mag& b) {
  Mag r;
  if (a.is_zero() || b.is_zero()) return r;
  mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDU);
  return r;
}

Mag Mag::mul_2exp(long e) const {
  Mag r;
  mpfr_mul_2si(r.v_, v_, e, MPFR_RNDU);
  return r;
}

Mag Mag::mul_ui(unsigned long c) const {
  Mag r;
  if (c == 0 || is_zero()) return r;
  mpfr_mul_ui(r.v_, v_, c, MPFR_RNDU);
  return r;
}

std::partial_ordering operator<=>(const Mag& a, const Mag& b) {
  int c = mpfr_cmp(a.v_, b.v_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

Mag div_upper(const Mag& num, const Mag& den) {
  if (num.is_zero() || den.is_inf()) return Mag();
  if (den.is_zero() || num.is_inf()) return Mag::inf();
  Mag r;
  mpfr_div(r.v_, num.v_, den.v_, MPFR_RNDU);
  return r;
}

Mag div_lower(const Mag& num, const Mag& den) {
  if (num.is_zero() || den.is_inf()) return Mag();
  if (den.is_zero() || num.is_inf()) return Mag::inf();
  Mag r;
  mpfr_div(r.v_, num.v_, den.v_, MPFR_RNDD);
  return r;
}

Mag mul_lower(const Mag& a, const Mag& b) {
  Mag r;
  if (a.is_zero() || b.is_zero()) return r;
  mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDD);
  return r;
}

Mag add_lower(const Mag& a, const Mag& b) {
  Mag r;
  mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDD);
  return r;
}

Mag sub_lower(const Mag& a, const Mag& b) {
  Mag r;
  if (a <= b) return r;
  mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDD);
  return r;
}

Mag sqrt_upper(const Mag& a) {
  Mag r;
  mpfr_sqrt(r.v_, a.v_, MPFR_RNDU);
  return r;
}

Mag sqrt_lower(const Mag& a) {
  Mag r;
  mpfr_sqrt(r.v_, a.v_, MPFR_RNDD);
  return r;
}

}  // namespace legq
