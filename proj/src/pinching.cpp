#include "tracegym/pinching.hpp"

#include <algorithm>
#include <cmath>

namespace tracegym {

DenseTensor pinch(const SpectralDecomposition& dec, const DenseTensor& x) {
    if (x.shape() != dec.shape)
        throw ShapeError("pinch: X must share the decomposition's shape");
    DenseTensor out = DenseTensor::zero(dec.shape);
    for (const auto& u : dec.projectors)
        out = out + einstein_product(einstein_product(u, x), u);
    return out;
}

DenseTensor pinch(const DenseTensor& h, const DenseTensor& x) {
    const auto dec = eig_hermitian(h);
    if (dec.eigenvalues.size() == 1) return x;
    return pinch(dec, x);
}

namespace {

// Accumulates sum_i w_i mu(s_i) cos(s_i * omega) for every pairwise frequency
// omega = lambda_a - lambda_b, plus the plain kernel mass, over one window.
struct WindowSum {
    Eigen::MatrixXd cos_acc;
    double mass = 0;
};

WindowSum integrate_window(const Eigen::VectorXd& lam, double delta, double panel,
                           double lo, double hi, const std::vector<double>& gx,
                           const std::vector<double>& gw) {
    const Eigen::Index n = lam.size();
    WindowSum acc;
    acc.cos_acc = Eigen::MatrixXd::Zero(n, n);
    const auto n_pan = static_cast<std::int64_t>(std::ceil((hi - lo) / panel));
    for (std::int64_t p = 0; p < n_pan; ++p) {
        const double a = lo + (hi - lo) * static_cast<double>(p) / static_cast<double>(n_pan);
        const double b = lo + (hi - lo) * static_cast<double>(p + 1) / static_cast<double>(n_pan);
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t i = 0; i < gx.size(); ++i) {
            const double s = mid + half * gx[i];
            // s and -s folded together: cos covers both signs
            const double wm = 2.0 * half * gw[i] * mu_delta_density(delta, s);
            acc.mass += wm;
            for (Eigen::Index r = 0; r < n; ++r)
                for (Eigen::Index c = 0; c < r; ++c)
                    acc.cos_acc(r, c) += wm * std::cos(s * (lam[r] - lam[c]));
        }
    }
    for (Eigen::Index r = 0; r < n; ++r) {
        acc.cos_acc(r, r) = acc.mass;
        for (Eigen::Index c = r + 1; c < n; ++c) acc.cos_acc(r, c) = acc.cos_acc(c, r);
    }
    return acc;
}

} // namespace

DenseTensor pinch_via_integral(const DenseTensor& h, const DenseTensor& x,
                               const PinchIntegralOptions& opts) {
    if (h.shape() != x.shape())
        throw ShapeError("pinch_via_integral: H and X must share a square shape");
    const auto dec = eig_hermitian(h);
    if (dec.eigenvalues.size() < 2)
        throw DegenerateSpectrumError("pinch_via_integral: spectrum has a single cluster");
    const double delta = spectral_gap(dec);
    const double diam = dec.eigenvalues.back() - dec.eigenvalues.front();

    const HermitianEigen eig = hermitian_eigensystem(h);
    const Eigen::MatrixXcd xeig = eig.vectors.adjoint() * matricize(x) * eig.vectors;

    // Frequencies present in the integrand are lambda_a - lambda_b shifted by
    // 0, +Delta, -Delta; the smallest nonzero magnitude sets how wide the
    // window must be before the oscillatory tails drop below budget.
    const double freq_floor = 1e-9 * std::max(1.0, frobenius_norm(h));
    double wp_min = std::numeric_limits<double>::infinity();
    for (double a : dec.eigenvalues)
        for (double b : dec.eigenvalues)
            for (double shift : {0.0, delta, -delta}) {
                const double w = std::abs(a - b + shift);
                if (w > freq_floor) wp_min = std::min(wp_min, w);
            }

    const double n2 = static_cast<double>(eig.values.size() * eig.values.size());
    const double budget = opts.error_budget;
    double half_width =
        std::sqrt(6.0 * n2 / (std::numbers::pi * delta * wp_min * 0.25 * budget));
    half_width = std::clamp(half_width, 64.0 / delta, 3e6 / delta);

    constexpr int order = 12;
    std::vector<double> gx, gw;
    gauss_legendre(order, gx, gw);
    const double panel = std::min(0.33, 3.0 / (diam + delta));

    const auto nodes_for = [&](double lo, double hi) {
        return static_cast<std::int64_t>(std::ceil((hi - lo) / panel)) * order;
    };

    std::int64_t nodes_used = nodes_for(0, half_width) + nodes_for(half_width, 2 * half_width);
    if (nodes_used > opts.max_nodes)
        throw ConvergenceError("pinch_via_integral: node cap hit at the initial window; "
                               "spectrum too close to degenerate for this budget");

    WindowSum inner = integrate_window(eig.values, delta, panel, 0, half_width, gx, gw);
    WindowSum outer =
        integrate_window(eig.values, delta, panel, half_width, 2 * half_width, gx, gw);

    const double scale = std::max(1.0, frobenius_norm(x));
    Eigen::MatrixXd extrap;
    bool have_prev = false;
    Eigen::MatrixXd prev;
    while (true) {
        Eigen::MatrixXd whole = inner.cos_acc + outer.cos_acc;
        const double whole_mass = inner.mass + outer.mass;
        extrap = 2.0 * (whole / whole_mass) - inner.cos_acc / inner.mass;
        if (have_prev &&
            ((extrap - prev).cwiseAbs().maxCoeff() * xeig.norm()) <= 0.3 * budget * scale)
            break;
        prev = extrap;
        have_prev = true;

        half_width *= 2;
        const std::int64_t extra = nodes_for(half_width, 2 * half_width);
        if (nodes_used + extra > opts.max_nodes)
            throw ConvergenceError("pinch_via_integral: budget " + std::to_string(budget) +
                                   " unmet within the node cap");
        nodes_used += extra;
        inner.cos_acc = std::move(whole);
        inner.mass = whole_mass;
        outer = integrate_window(eig.values, delta, panel, half_width, 2 * half_width, gx, gw);
    }

    const Eigen::MatrixXcd damped = extrap.cwiseProduct(xeig.real()).cast<cplx>() +
                                    cplx(0, 1) * extrap.cwiseProduct(xeig.imag()).cast<cplx>();
    return dematricize(eig.vectors * damped * eig.vectors.adjoint(), h.shape());
}

} // namespace tracegym
