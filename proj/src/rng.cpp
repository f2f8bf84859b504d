#include "tracegym/rng.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace tracegym {

std::uint64_t CounterRng::next_u64() {
    std::uint64_t z = key_ + 0x9e3779b97f4a7c15ULL * ++counter_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double CounterRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0;
    do {
        u1 = uniform();
    } while (u1 <= 0);
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = mag * std::sin(ang);
    have_spare_ = true;
    return mag * std::cos(ang);
}

cplx CounterRng::complex_normal() {
    const double re = normal();
    const double im = normal();
    return cplx(re, im) / std::sqrt(2.0);
}

DenseTensor draw_ginibre(const Shape& shape, CounterRng& rng) {
    DenseTensor t(shape);
    for (std::int64_t i = 0; i < t.size(); ++i) {
        t[i] = rng.complex_normal();
    }
    return t;
}

DenseTensor draw_hermitian(const Shape& shape, CounterRng& rng, double sigma) {
    if (!shape.is_square()) {
        throw ShapeError("draw_hermitian needs a square shape, got " + shape.to_string());
    }
    const DenseTensor g = draw_ginibre(shape, rng);
    return (0.5 * sigma) * (g + conj_transpose(g));
}

DenseTensor draw_positive_definite(const Shape& shape, CounterRng& rng) {
    if (!shape.is_square()) {
        throw ShapeError("draw_positive_definite needs a square shape, got " +
                         shape.to_string());
    }
    const DenseTensor g = draw_ginibre(shape, rng);
    DenseTensor p = einstein_product(conj_transpose(g), g);
    Eigen::MatrixXcd m = matricize(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    const double lam_max = es.eigenvalues().maxCoeff();
    const double eps_pd = 1e-12 * std::max(1.0, lam_max);
    const std::int64_t n = shape.row_size();
    for (std::int64_t i = 0; i < n; ++i) {
        p[i * n + i] += eps_pd;
    }
    return p;
}

DenseTensor draw_unitary(const Shape& shape, CounterRng& rng) {
    if (!shape.is_square()) {
        throw ShapeError("draw_unitary needs a square shape, got " + shape.to_string());
    }
    const DenseTensor g = draw_ginibre(shape, rng);
    Eigen::MatrixXcd m = matricize(g);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const cplx d = r(j, j);
        const double a = std::abs(d);
        q.col(j) *= (a > 0) ? d / a : cplx(1, 0);
    }
    return dematricize(q, shape);
}

std::vector<DenseTensor> draw_commuting_family(const Shape& shape, int n,
                                               CounterRng& rng) {
    const DenseTensor u = draw_unitary(shape, rng);
    const Eigen::MatrixXcd um = matricize(u);
    const std::int64_t dim = shape.row_size();
    std::vector<DenseTensor> family;
    family.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd lam(dim);
        for (std::int64_t i = 0; i < dim; ++i) {
            lam(i) = rng.normal();
        }
        Eigen::MatrixXcd m = um * lam.asDiagonal() * um.adjoint();
        family.push_back(dematricize(m, shape));
    }
    return family;
}

} // namespace tracegym
