#include "tracegym/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace tracegym {

namespace {

double default_cluster_tol(const DenseTensor& h) {
    return 1e-8 * std::max(1.0, frobenius_norm(h));
}

Eigen::MatrixXcd hermitize_or_throw(const DenseTensor& h) {
    if (!h.shape().is_square())
        throw ShapeError("hermitian eigensolve: square tensor required, got " +
                         h.shape().to_string());
    Eigen::MatrixXcd m = matricize(h);
    const double dev = (m - m.adjoint()).norm();
    if (dev > 1e-10 * std::max(1.0, m.norm()))
        throw HermitianityError("tensor deviates from Hermitian by " + std::to_string(dev));
    return 0.5 * (m + m.adjoint().eval());
}

// PSD spectrum with tiny negative roundoff clamped to zero.
HermitianEigen psd_eigensystem(const DenseTensor& a, const char* who) {
    HermitianEigen eig = hermitian_eigensystem(a);
    const double floor = -1e-10 * std::max(1.0, eig.values.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        if (eig.values[i] < floor)
            throw DomainError(std::string(who) + ": tensor is not positive semi-definite " +
                              "(lambda_min = " + std::to_string(eig.values[i]) + ")");
        if (eig.values[i] < 0) eig.values[i] = 0;
    }
    return eig;
}

std::int64_t binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::int64_t r = 1;
    for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

HermitianEigen hermitian_eigensystem(const DenseTensor& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitize_or_throw(h));
    if (solver.info() != Eigen::Success)
        throw NumericalError("hermitian eigensolve failed to converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

SpectralDecomposition eig_hermitian(const DenseTensor& h, double cluster_tol) {
    const HermitianEigen eig = hermitian_eigensystem(h);
    if (cluster_tol < 0) cluster_tol = default_cluster_tol(h);

    SpectralDecomposition dec;
    dec.shape = h.shape();
    dec.cluster_tol = cluster_tol;

    const Eigen::Index n = eig.values.size();
    Eigen::Index lo = 0;
    while (lo < n) {
        Eigen::Index hi = lo + 1;
        while (hi < n && eig.values[hi] - eig.values[hi - 1] <= cluster_tol) ++hi;
        const auto block = eig.vectors.middleCols(lo, hi - lo);
        Eigen::MatrixXcd proj = block * block.adjoint();
        double mean = 0;
        for (Eigen::Index i = lo; i < hi; ++i) mean += eig.values[i];
        dec.eigenvalues.push_back(mean / static_cast<double>(hi - lo));
        dec.projectors.push_back(dematricize(proj, h.shape()));
        lo = hi;
    }
    return dec;
}

DenseTensor apply_spectral_function(const SpectralDecomposition& dec,
                                    const std::function<double(double)>& f) {
    DenseTensor out = DenseTensor::zero(dec.shape);
    for (std::size_t j = 0; j < dec.eigenvalues.size(); ++j) {
        const double fj = f(dec.eigenvalues[j]);
        if (!std::isfinite(fj))
            throw DomainError("apply_spectral_function: f(lambda) not finite at lambda = " +
                              std::to_string(dec.eigenvalues[j]));
        out = out + fj * dec.projectors[j];
    }
    return out;
}

DenseTensor tensor_exp(const DenseTensor& h) {
    const HermitianEigen eig = hermitian_eigensystem(h);
    Eigen::MatrixXcd m = eig.vectors *
                         eig.values.array().exp().matrix().asDiagonal() *
                         eig.vectors.adjoint();
    return dematricize(m, h.shape());
}

DenseTensor tensor_log(const DenseTensor& a) {
    const HermitianEigen eig = psd_eigensystem(a, "tensor_log");
    if (eig.values.minCoeff() <= 0)
        throw DomainError("tensor_log: positive definite tensor required");
    Eigen::MatrixXcd m = eig.vectors *
                         eig.values.array().log().matrix().asDiagonal() *
                         eig.vectors.adjoint();
    return dematricize(m, a.shape());
}

DenseTensor tensor_pow(const DenseTensor& a, double alpha) {
    const HermitianEigen eig = psd_eigensystem(a, "tensor_pow");
    Eigen::VectorXd powered(eig.values.size());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        const double l = eig.values[i];
        if (l == 0.0) {
            if (alpha < 0)
                throw DomainError("tensor_pow: negative power of singular tensor");
            powered[i] = alpha == 0.0 ? 1.0 : 0.0;
        } else {
            powered[i] = std::pow(l, alpha);
        }
    }
    Eigen::MatrixXcd m = eig.vectors * powered.asDiagonal() * eig.vectors.adjoint();
    return dematricize(m, a.shape());
}

DenseTensor complex_power(const DenseTensor& a, cplx z) {
    const HermitianEigen eig = psd_eigensystem(a, "complex_power");
    Eigen::VectorXcd powered(eig.values.size());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        const double l = eig.values[i];
        if (l == 0.0) {
            if (z.real() <= 0)
                throw DomainError("complex_power: Re(z) <= 0 requires strictly positive spectrum");
            powered[i] = 0.0;
        } else {
            // lambda^z = exp(z log lambda), principal branch on lambda > 0
            powered[i] = std::exp(z * std::log(l));
        }
    }
    Eigen::MatrixXcd m = eig.vectors * powered.asDiagonal() * eig.vectors.adjoint();
    return dematricize(m, a.shape());
}

double schatten_norm(const DenseTensor& x, double p) {
    if (!(p > 0))
        throw DomainError("schatten_norm: p must be positive (or schatten_inf)");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(matricize(x));
    const Eigen::VectorXd& sv = svd.singularValues();
    if (std::isinf(p)) return sv.size() ? sv[0] : 0.0;
    double acc = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) acc += std::pow(sv[i], p);
    return std::pow(acc, 1.0 / p);
}

DenseTensor abs_tensor(const DenseTensor& x) {
    const DenseTensor gram = einstein_product(conj_transpose(x), x);
    return tensor_pow(gram, 0.5);
}

bool loewner_geq(const DenseTensor& a, const DenseTensor& b, double tol) {
    const DenseTensor diff = a - b;
    const HermitianEigen eig = hermitian_eigensystem(diff);
    const double slack = tol * (1.0 + frobenius_norm(a) + frobenius_norm(b));
    return eig.values.minCoeff() >= -slack;
}

double spectral_gap(const SpectralDecomposition& dec) {
    if (dec.eigenvalues.size() < 2)
        throw DegenerateSpectrumError("spectral_gap: single distinct eigenvalue");
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < dec.eigenvalues.size(); ++j)
        gap = std::min(gap, dec.eigenvalues[j] - dec.eigenvalues[j - 1]);
    return gap;
}

std::vector<EigcountRow> eigcount_growth(const DenseTensor& a, int m_max) {
    if (m_max < 1) throw DomainError("eigcount_growth: m_max >= 1 required");
    double flat = 1;
    for (int m = 0; m < m_max; ++m) flat *= static_cast<double>(a.rows());
    if (flat > 4096)
        throw ResourceError("eigcount_growth: row_size^m_max exceeds 4096");

    const std::int64_t e =
        static_cast<std::int64_t>(eig_hermitian(a).eigenvalues.size());

    std::vector<EigcountRow> rows;
    DenseTensor power = a;
    for (int m = 1; m <= m_max; ++m) {
        const auto dec = eig_hermitian(power);
        rows.push_back({m, static_cast<std::int64_t>(dec.eigenvalues.size()),
                        binomial(m + e - 1, e - 1)});
        if (m < m_max) power = kronecker_product(power, a);
    }
    return rows;
}

} // namespace tracegym
