// SPDX-License-Identifier: Apache-2.0
//
// Central binomial coefficients as balls and cheap binomial magnitude bounds.

#pragma once

#include "legq/ball.hpp"

#include <gmpxx.h>

namespace legq {

/// Degree at and above which C(2n, n) is obtained from the Stirling series
/// rather than computed exactly.
unsigned long central_binomial_cutoff(prec_t prec);

/// Ball containing C(2n, n). Cached per (n, prec).
Ball central_binomial_ball(unsigned long n, prec_t prec);

/// Ball containing C(2n, n) / 4^n (a number in (0, 1]). Cached per (n, prec).
Ball central_binomial_scaled(unsigned long n, prec_t prec);

/// ln C(2n, n) - 2n ln 2 by the Stirling series with a rigorous remainder.
/// Exposed for testing; valid for every n >= 1.
Ball log_central_binomial_scaled_stirling(unsigned long n, prec_t prec);

/// Upper bound on log2 C(n, k) from the binary entropy function, using a
/// 257-point table. Throws DomainError unless 0 <= k <= n.
double binom_log2_upper(double n, double k);

/// Upper bound for C(n, k) as a Mag, from the exact integer.
Mag binom_upper(unsigned long n, unsigned long k);

/// Bernoulli number B_k as an exact rational (cached).
const mpq_class& bernoulli(unsigned long k);

}  // namespace legq
