// SPDX-License-Identifier: Apache-2.0
//
// Hypergeometric sums  sum_{k=Omega}^{K-1} x^k prod_{j=Omega}^{k} p(j)/q(j)
// by rectangular splitting, over Ball or ComplexBall.

#pragma once

#include "legq/ball.hpp"

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace legq {

/// Integer polynomial of degree <= 2 in k.
struct Poly2 {
  std::array<long, 3> c{0, 0, 0};

  long operator()(long k) const {
    long k2, t1, t2, s;
    if (__builtin_mul_overflow(k, k, &k2) || __builtin_mul_overflow(c[1], k, &t1) ||
        __builtin_mul_overflow(c[2], k2, &t2) || __builtin_add_overflow(c[0], t1, &s) ||
        __builtin_add_overflow(s, t2, &s)) {
      throw std::overflow_error("term ratio coefficient exceeds 64 bits");
    }
    return s;
  }
};

struct TermRatio {
  Poly2 p;
  Poly2 q;
};

template <class T>
struct PowersTable {
  T base;
  std::vector<T> powers;  // base^0 .. base^m

  long m() const { return static_cast<long>(powers.size()) - 1; }
};

template <class T>
PowersTable<T> powers_table(const T& x, long m, prec_t prec) {
  if (m < 1) throw std::invalid_argument("powers_table: m must be at least 1");
  PowersTable<T> t{x, {}};
  t.powers.reserve(static_cast<size_t>(m) + 1);
  t.powers.emplace_back(1);
  t.powers.push_back(x);
  for (long i = 2; i <= m; ++i) {
    if (i % 2 == 0) {
      t.powers.push_back(sqr(t.powers[static_cast<size_t>(i / 2)], prec));
    } else {
      t.powers.push_back(mul(t.powers[static_cast<size_t>(i - 1)], x, prec));
    }
  }
  return t;
}

/// Default splitting parameter: floor(sqrt(K)), or floor(sqrt(2K)) when two
/// series share one table.
inline long default_split(long K, bool shared) {
  long m = static_cast<long>(std::sqrt(static_cast<double>(shared ? 2 * K : K)));
  return m < 1 ? 1 : m;
}

/// Rectangular-splitting sum. If `table` is null, one is built with the
/// default m. Throws std::invalid_argument if q vanishes on [Omega, K-1].
template <class T>
T hyper_sum(const T& x, const TermRatio& ratio, long K, int omega, const PowersTable<T>* table, prec_t prec,
            long unroll = 4) {
  if (omega != 0 && omega != 1) throw std::invalid_argument("hyper_sum: offset must be 0 or 1");
  if (unroll < 1) throw std::invalid_argument("hyper_sum: unroll must be at least 1");
  for (long j = omega; j < K; ++j) {
    if (ratio.q(j) == 0) throw std::invalid_argument("hyper_sum: q vanishes inside the summation range");
    // Terms from the first zero of p onward vanish.
    if (ratio.p(j) == 0) {
      K = j;
      break;
    }
  }
  if (K <= omega) return T(0);

  std::optional<PowersTable<T>> own;
  if (table == nullptr) {
    own = powers_table(x, default_split(K, false), prec);
    table = &*own;
  }
  const long m = table->m();
  const auto& pw = table->powers;

  T s(0);
  long k = K - 1;
  mpz_class c;
  while (k >= omega) {
    long u = std::min(unroll, k + 1 - omega);
    long a = k - u + 1, b = k;
    c = 1;
    for (long j = a; j <= b; ++j) c *= ratio.p(j);
    while (k >= a) {
      long r = k % m;
      if (k == b) {
        s = mul_z(add(s, pw[static_cast<size_t>(r)], prec), c, prec);
      } else {
        s = add(s, mul_z(pw[static_cast<size_t>(r)], c, prec), prec);
      }
      if (r == 0 && k != 0) s = mul(s, pw[static_cast<size_t>(m)], prec);
      mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), mpz_class(ratio.p(k)).get_mpz_t());
      c *= ratio.q(k);
      --k;
    }
    s = div_z(s, c, prec);
  }
  return s;
}

}  // namespace legq
