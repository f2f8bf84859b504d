#pragma once

#include <functional>
#include <vector>

#include "tracegym/errors.hpp"

namespace tracegym {

/// Interpolation density rho_theta(s) = sin(pi theta) / (2 theta (cosh(pi s) +
/// cos(pi theta))) for theta in (0,1), with the limits
/// rho_0(s) = (pi/2)(cosh(pi s)+1)^{-1} and rho_1 = delta(s). theta = 1
/// returns the pointwise limit (0 away from s = 0); quadrature against rho_1
/// goes through the Dirac scheme, not this function.
double rho_theta_density(double theta, double s);

/// Fejer kernel mu_Delta(s) = (Delta/2pi) (sin(Delta s/2) / (Delta s/2))^2.
double mu_delta_density(double delta, double s);

/// Fourier transform of mu_Delta: the triangle max(0, 1 - |omega|/Delta).
double mu_delta_transform(double delta, double omega);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Deterministic pairwise (tree) summation.
double pairwise_sum(const std::vector<double>& terms);

/// Composite Gauss-Legendre scheme for integrals against rho_theta on
/// [-half_width, half_width]. theta = 1 is an exact point mass at s = 0 with
/// no nodes. weights are the raw quadrature weights; integrate() supplies the
/// density factor.
struct QuadratureScheme {
    double theta = 0;
    double half_width = 0;
    std::vector<double> nodes;   // symmetric about 0, ascending
    std::vector<double> weights; // positive
    double captured_mass = 1;    // sum_i w_i rho_theta(s_i)
    double error_budget = 1e-6;

    bool dirac() const { return nodes.empty(); }

    /// sum_i w_i rho_theta(s_i) f(s_i), pairwise-reduced; f(0) for the Dirac
    /// scheme.
    double integrate(const std::function<double(double)>& f) const;
};

/// Builds the scheme: half-width from the analytic exponential tail bound
/// (tail mass < 0.1 * error_budget), then panel doubling until successive
/// estimates of the captured mass move less than 0.1 * error_budget.
/// ConvergenceError if max_nodes is exceeded first.
QuadratureScheme build_quadrature(double theta, double error_budget = 1e-6,
                                  int max_nodes = 4097);

/// Same panel layout with doubled panel count, for rhs stability probes.
QuadratureScheme refined_quadrature(const QuadratureScheme& base);

} // namespace tracegym
