// SPDX-License-Identifier: Apache-2.0
//
// Series representations of P_n and P'_n with rigorous truncation bounds:
// the asymptotic expansion in complex form, the expansion at zero in powers
// of -x^2, and the expansion at one in powers of u = (x - 1) / 2.

#pragma once

#include "legq/ball.hpp"

#include <optional>
#include <stdexcept>
#include <utility>

namespace legq {

/// The requested method cannot reach the target at the given truncation
/// order. The evaluator reacts by trying another method.
class Inapplicable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SeriesKind { Zero, One };

/// Heuristic cancellation estimate in bits for the alternating series.
long cancellation_bits(SeriesKind kind, unsigned long n, double x);

/// Working precision used by the series for a target of `target` bits.
prec_t series_working_prec(prec_t target, long cancel_bits, unsigned long n);

// --- truncation bounds -------------------------------------------------------

/// Upper bound for |xi_{n,K}| given a lower bound for y = sin(theta);
/// +inf if y_lower <= 0.
Mag asym_tail_bound(unsigned long n, unsigned long K, const BigFloat& y_lower);

/// Bound for |sum_{k>=K} A(k) (-x^2)^k| (or the differentiated series when
/// `deriv`), prefactor excluded. +inf when the geometric comparison fails.
Mag zero_tail_bound(unsigned long n, unsigned long K, const BigFloat& x, bool deriv);

/// Bound for |sum_{k>=K} c_{n,k} u^k| (or c'_{n,k} when `deriv`). +inf when
/// the geometric comparison fails.
Mag one_tail_bound(unsigned long n, unsigned long K, const BigFloat& u, bool deriv);

/// Number of terms that makes the whole series exact.
unsigned long zero_full_terms(unsigned long n, bool deriv);
unsigned long one_full_terms(unsigned long n, bool deriv);

// --- truncation order estimates (machine precision) --------------------------

/// Smallest K with the asymptotic tail below 2^-target, or nullopt.
std::optional<unsigned long> asym_terms_estimate(unsigned long n, double x, prec_t target);
std::optional<unsigned long> zero_terms_estimate(unsigned long n, double x, prec_t target, bool deriv);
std::optional<unsigned long> one_terms_estimate(unsigned long n, double x, prec_t target, bool deriv);

// --- evaluation ----------------------------------------------------------------
//
// Each evaluator takes a point 0 <= x <= 1, a target `target` (the absolute
// truncation error is kept below 2^-(target+2)), and an initial truncation
// order K. K is raised by 10% at most three times if the rigorous bound is
// not met; after that Inapplicable is thrown.

/// P_n(x) and, if `want_prev`, P_{n-1}(x), by the asymptotic expansion.
/// Requires x < 1 and n >= 1 (n >= 2 when want_prev). With `strict` unset,
/// a finite truncation bound above the goal is accepted as is and the ball
/// is simply wider.
std::pair<Ball, std::optional<Ball>> eval_asymptotic(unsigned long n, const BigFloat& x, prec_t target,
                                                     unsigned long K, bool want_prev, bool strict = true);

/// Truncation order minimizing the asymptotic bound, about 2 n sin(theta);
/// nullopt if below 1.
std::optional<unsigned long> asym_best_terms(unsigned long n, double x);

/// P_n(x) or P'_n(x) by the expansion at zero.
Ball eval_zero_series(unsigned long n, const BigFloat& x, prec_t target, unsigned long K, bool deriv);

/// P_n(x) or P'_n(x) by the expansion at one.
Ball eval_one_series(unsigned long n, const BigFloat& x, prec_t target, unsigned long K, bool deriv);

}  // namespace legq
