// SPDX-License-Identifier: Apache-2.0
//
// Three-term recurrence for P_{n-1}, P_n in integer fixed-point arithmetic.

#pragma once

#include "legq/ball.hpp"

#include <gmpxx.h>

#include <utility>

namespace legq {

/// Given x = xhat 2^-t with |x| <= 1 and n >= 1, returns integers (p, q)
/// with |p - 2^t P_{n-1}(x)| and |q - 2^t P_n(x)| at most
/// 0.75 (n+1)(n+2) + 1. All divisions truncate toward zero.
std::pair<mpz_class, mpz_class> legendre_pair_fixed(const mpz_class& xhat, unsigned long t, unsigned long n);

/// Error constant of legendre_pair_fixed, in units of 2^-t.
double fixed_error_units(unsigned long n);

/// Balls for (P_{n-1}(x), P_n(x)) at a point x in [-1, 1], with radius
/// at most about 2^-(p+1).
std::pair<Ball, Ball> legendre_pair_rec_ball(const BigFloat& x, unsigned long n, prec_t p);

}  // namespace legq
