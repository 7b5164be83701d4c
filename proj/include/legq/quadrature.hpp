// SPDX-License-Identifier: Apache-2.0
//
// Gauss-Legendre rules with certified nodes and weights. Every node ball is
// the image of an interval Newton step that mapped an interval strictly into
// itself, so it contains exactly one root of P_n.

#pragma once

#include "legq/ball.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace legq {

/// Raised when a root cannot be certified within the bisection budget. It
/// should never happen for valid inputs.
class UncertifiedRoot : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Interval [lo, hi] around root k of P_n (k = 0 is the root nearest 1).
struct NodeEnclosure {
  unsigned long n = 0;
  unsigned long k = 0;
  BigFloat lo;
  BigFloat hi;
  bool certified = false;
};

/// Bracket from the Bruns inequality
///   (k + 1/2) pi / (n + 1/2) < theta_k < (k + 1) pi / (n + 1/2),
/// with outward rounding. It holds exactly one root. Requires k < ceil(n/2).
NodeEnclosure initial_enclosure(unsigned long n, unsigned long k);

/// One interval Newton step N(X) = m - P_n(m) / P'_n(X) at precision `prec`,
/// with m the midpoint of X.
Ball newton_step(unsigned long n, const BigFloat& lo, const BigFloat& hi, prec_t prec);

/// Certified ball for the root in `enc` with radius at most
/// 2^(-p-4) max(|x|, 2^-p). Throws UncertifiedRoot on failure.
Ball refine_node(const NodeEnclosure& enc, prec_t p);

/// 2 / ((1 - x)(1 + x) P'_n(x)^2) over the node ball.
Ball node_weight(unsigned long n, const Ball& node, prec_t p);

struct QuadratureRule {
  unsigned long n = 0;
  prec_t p = 0;
  std::vector<Ball> nodes;    // ascending
  std::vector<Ball> weights;
};

/// Full rule from ceil(n/2) independent root computations spread over
/// `threads` workers. The result does not depend on `threads`.
QuadratureRule build_rule(unsigned long n, prec_t p, unsigned threads = 1);

using Integrand = std::function<Ball(const Ball& x, prec_t prec)>;

/// Ball for sum_i w_i f(x_i) (the discrete sum, not the integral).
Ball apply_rule(const QuadratureRule& rule, const Integrand& f);

/// Extra working bits used for nodes and weights of degree n.
prec_t rule_guard_bits(unsigned long n);

}  // namespace legq
