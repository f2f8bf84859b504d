#include "tracegym/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tracegym {

namespace {
constexpr double pi = std::numbers::pi;
}

double rho_theta_density(double theta, double s) {
    if (theta < 0 || theta > 1)
        throw DomainError("rho_theta_density: theta must lie in [0, 1]");
    if (theta == 0.0) return (pi / 2.0) / (std::cosh(pi * s) + 1.0);
    if (theta == 1.0)
        return s == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return std::sin(pi * theta) / (2.0 * theta * (std::cosh(pi * s) + std::cos(pi * theta)));
}

double mu_delta_density(double delta, double s) {
    if (!(delta > 0)) throw DomainError("mu_delta_density: delta > 0 required");
    const double x = 0.5 * delta * s;
    if (std::abs(x) < 1e-8) {
        // sinc^2 Taylor head, accurate to ~1e-32 here
        const double x2 = x * x;
        return delta / (2.0 * pi) * (1.0 - x2 / 3.0);
    }
    const double sc = std::sin(x) / x;
    return delta / (2.0 * pi) * sc * sc;
}

double mu_delta_transform(double delta, double omega) {
    if (!(delta > 0)) throw DomainError("mu_delta_transform: delta > 0 required");
    return std::max(0.0, 1.0 - std::abs(omega) / delta);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    // Newton iteration from the Chebyshev initial guess on the Legendre roots.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

double pairwise_sum(const std::vector<double>& terms) {
    if (terms.empty()) return 0.0;
    std::vector<double> acc = terms;
    std::size_t n = acc.size();
    while (n > 1) {
        std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) acc[i] = acc[2 * i] + acc[2 * i + 1];
        if (n % 2) {
            acc[half] = acc[n - 1];
            ++half;
        }
        n = half;
    }
    return acc[0];
}

double QuadratureScheme::integrate(const std::function<double(double)>& f) const {
    if (dirac()) return f(0.0);
    std::vector<double> terms(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        terms[i] = weights[i] * rho_theta_density(theta, nodes[i]) * f(nodes[i]);
    return pairwise_sum(terms);
}

namespace {

QuadratureScheme assemble(double theta, double half_width, int panels, int order,
                          double budget) {
    std::vector<double> gx, gw;
    gauss_legendre(order, gx, gw);
    QuadratureScheme q;
    q.theta = theta;
    q.half_width = half_width;
    q.error_budget = budget;
    q.nodes.reserve(static_cast<std::size_t>(panels) * order);
    q.weights.reserve(static_cast<std::size_t>(panels) * order);
    for (int p = 0; p < panels; ++p) {
        const double lo = -half_width + 2.0 * half_width * p / panels;
        const double hi = -half_width + 2.0 * half_width * (p + 1) / panels;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int i = 0; i < order; ++i) {
            q.nodes.push_back(mid + half * gx[i]);
            q.weights.push_back(half * gw[i]);
        }
    }
    std::vector<double> mass_terms(q.nodes.size());
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        mass_terms[i] = q.weights[i] * rho_theta_density(theta, q.nodes[i]);
    q.captured_mass = pairwise_sum(mass_terms);
    return q;
}

} // namespace

QuadratureScheme build_quadrature(double theta, double error_budget, int max_nodes) {
    if (theta < 0 || theta > 1)
        throw DomainError("build_quadrature: theta must lie in [0, 1]");
    if (!(error_budget > 0))
        throw DomainError("build_quadrature: positive error budget required");
    if (theta == 1.0) {
        QuadratureScheme q;
        q.theta = 1.0;
        q.error_budget = error_budget;
        return q;
    }
    // rho_theta(s) <= 2.4 e^{-pi |s|} for |s| >= 1 uniformly in theta, so the
    // two-sided tail is below 1.6 e^{-pi S}; S targets tail < 0.1 * budget.
    const double half_width =
        std::max(2.0, 1.3 * std::log(23.3 / error_budget) / pi);

    constexpr int order = 12;
    int panels = std::max(8, static_cast<int>(std::ceil(2.0 * half_width / 0.33)));
    if (panels * order > max_nodes)
        throw ConvergenceError("build_quadrature: node cap " + std::to_string(max_nodes) +
                               " below the minimum panel layout");
    QuadratureScheme q = assemble(theta, half_width, panels, order, error_budget);
    while (true) {
        if (2 * panels * order > max_nodes)
            throw ConvergenceError("build_quadrature: node cap " + std::to_string(max_nodes) +
                                   " exceeded before mass stabilized");
        QuadratureScheme fine = assemble(theta, half_width, 2 * panels, order, error_budget);
        if (std::abs(fine.captured_mass - q.captured_mass) < 0.1 * error_budget)
            return q;
        panels *= 2;
        q = std::move(fine);
    }
}

QuadratureScheme refined_quadrature(const QuadratureScheme& base) {
    if (base.dirac()) return base;
    constexpr int order = 12;
    const int panels = static_cast<int>(base.nodes.size()) / order;
    return assemble(base.theta, base.half_width, 2 * panels, order, base.error_budget);
}

} // namespace tracegym
