#pragma once

#include <vector>

#include "tracegym/densities.hpp"
#include "tracegym/report.hpp"
#include "tracegym/spectral.hpp"

namespace tracegym {

/// Tr exp(H1 + H2) <= Tr(exp(H1) *_N exp(H2)) for Hermitian H1, H2.
InequalityReport check_gt_two(const DenseTensor& h1, const DenseTensor& h2);

/// T(r) = Tr (A1^{r/2} *_N A2^r *_N A1^{r/2})^{q/r} for PSD A1, A2 and q > 0.
/// Asserts T(r) <= T(1) for r in (0,1] and T(1) <= T(r) for r >= 1; lhs is
/// always the asserted smaller side.
InequalityReport check_alt_two(const DenseTensor& a1, const DenseTensor& a2,
                               double r, double q);

/// log|| |A_1^theta *...* A_n^theta|^{1/theta} ||_p <=
///   int rho_theta(s) log|| A_1^{1+is} *...* A_n^{1+is} ||_p ds
/// for PSD A_k, theta in (0,1], p > 0. Factors within 1e-12 lambda_max of
/// singular are floored by eps_pd = 1e-12 lambda_max on both sides (recorded
/// in the digest). quad.theta must equal theta.
InequalityReport check_alt_multi(const std::vector<DenseTensor>& as, double theta,
                                 double p, const QuadratureScheme& quad);

/// log||exp(sum_k H_k)||_p <= int rho_0(s) log|| prod_k exp((1+is)H_k) ||_p ds
/// for Hermitian H_k. quad.theta must be 0.
InequalityReport check_gt_multi(const std::vector<DenseTensor>& hs, double p,
                                const QuadratureScheme& quad);

/// General (non-Hermitian) factors: lhs keeps exp(sum_k A_k), the right-hand
/// product uses the Hermitian parts Re(A_k) = (A_k + A_k^H)/2. quad.theta
/// must be 0.
InequalityReport check_gt_general(const std::vector<DenseTensor>& as, double p,
                                  const QuadratureScheme& quad);

/// Exponent placed on the A_2 factor of the log-trace chain: `display` keeps
/// the plain q/2, `proof` rotates it by (1 +- is) like the outer factors.
/// The digest records the other variant's margin as margin_alt.
enum class LogTraceVariant { display, proof };

/// (1/q) int rho_0(s) Tr[A_1 log G(s)] ds <=
///   sum_k Tr[A_1 log A_k],
///   G(s) = W(s) *_N A_1^q *_N W(s)^H,
///   W(s) = A_n^{q(1+is)/2} *...* A_3^{q(1+is)/2} *_N A_2^{e2(s)}
/// for positive definite A_k and q > 0. quad.theta must be 0.
InequalityReport check_log_trace_multi(const std::vector<DenseTensor>& as, double q,
                                       const QuadratureScheme& quad,
                                       LogTraceVariant variant = LogTraceVariant::display);

/// D(A||B) = Tr A log A - Tr A log B for PSD A with Tr A = 1 and PD B
/// (0 log 0 = 0 on A's kernel).
double relative_entropy(const DenseTensor& a, const DenseTensor& b);

/// Gaps of the variational characterization of D(A||B) at a trial X > 0:
///   g1 = D(A||B) - (Tr A log X - log Tr exp(log B + log X))
///   g2 = log Tr(B *_N X) - log Tr exp(log B + log X)
///   g3 = g1 + g2.
/// All three are nonnegative; g1 vanishes at X = entropy_maximizer(A, B).
struct VariationalGaps {
    double g1 = 0;
    double g2 = 0;
    double g3 = 0;
};

VariationalGaps variational_gap(const DenseTensor& a, const DenseTensor& b,
                                const DenseTensor& x);

/// X* = exp(log A - log B), the maximizer of the variational lower bound.
DenseTensor entropy_maximizer(const DenseTensor& a, const DenseTensor& b);

/// || (e^{L1/n} *_N e^{L2/n})^n - e^{L1+L2} ||_inf together with the a priori
/// bound 2 exp(2||L1||_inf + 2||L2||_inf) / n, for each requested n.
struct LieErrorRow {
    std::int64_t n = 0;
    double error = 0;
    double bound = 0;
};

std::vector<LieErrorRow> lie_product_error(const DenseTensor& l1, const DenseTensor& l2,
                                           const std::vector<std::int64_t>& ns);

/// exp of a general square tensor (scaling-and-squaring on the
/// matricization). Hermitian inputs should prefer tensor_exp.
DenseTensor tensor_exp_general(const DenseTensor& a);

} // namespace tracegym
