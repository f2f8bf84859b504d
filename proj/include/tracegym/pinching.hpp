#pragma once

#include "tracegym/densities.hpp"
#include "tracegym/spectral.hpp"

namespace tracegym {

/// Fejer smoothing kernel attached to a spectral gap Delta.
struct PinchingKernel {
    double delta = 0;
    double operator()(double s) const { return mu_delta_density(delta, s); }
    double transform(double omega) const { return mu_delta_transform(delta, omega); }
};

/// Spectral pinching P_H(X) = sum_lambda U_lambda *_N X *_N U_lambda.
DenseTensor pinch(const SpectralDecomposition& dec, const DenseTensor& x);

/// Convenience overload; a single-cluster spectrum pinches to X itself.
DenseTensor pinch(const DenseTensor& h, const DenseTensor& x);

struct PinchIntegralOptions {
    double error_budget = 1e-6;
    std::int64_t max_nodes = 30'000'000;
};

/// Quadrature of the smoothing integral
///   int e^{isH} *_N X *_N e^{-isH} mu_Delta(s) ds,  Delta = spectral gap of H,
/// truncated to |s| <= S with composite Gauss-Legendre panels sized to the
/// spectral diameter, renormalized by the captured kernel mass and Richardson
/// extrapolated in S to cancel the 1/S truncation bias. S starts from the
/// smallest nonzero shifted frequency of the spectrum and doubles until two
/// successive extrapolates agree within the budget. Result is within
/// error_budget * max(1, ||X||_F) of pinch(H, X); ConvergenceError if the
/// node cap is reached first, DegenerateSpectrumError for single-cluster H.
DenseTensor pinch_via_integral(const DenseTensor& h, const DenseTensor& x,
                               const PinchIntegralOptions& opts = {});

} // namespace tracegym
