#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "tracegym/tensor.hpp"

namespace tracegym {

/// Raw matricized Hermitian eigensystem (ascending eigenvalues, unitary V).
/// Low-level building block; most callers want eig_hermitian's clustered form.
struct HermitianEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
};

/// Eigensolve of a Hermitian square tensor. Tensors within
/// 1e-10 * ||H||_F of Hermitian are symmetrized first; anything farther throws
/// HermitianityError.
HermitianEigen hermitian_eigensystem(const DenseTensor& h);

/// Spectral decomposition H = sum_j lambda_j U_j with distinct clustered
/// eigenvalues (ascending) and orthogonal projector tensors U_j.
struct SpectralDecomposition {
    Shape shape;
    std::vector<double> eigenvalues;
    std::vector<DenseTensor> projectors;
    double cluster_tol = 0;
};

/// Default clustering tolerance 1e-8 * max(1, ||H||_F); pass cluster_tol >= 0
/// to override. Eigenvalues closer than the tolerance merge (single linkage).
SpectralDecomposition eig_hermitian(const DenseTensor& h, double cluster_tol = -1.0);

/// sum_j f(lambda_j) U_j over the clustered spectrum.
DenseTensor apply_spectral_function(const SpectralDecomposition& dec,
                                    const std::function<double(double)>& f);

DenseTensor tensor_exp(const DenseTensor& h);

/// Natural log of a positive definite tensor; DomainError if any eigenvalue
/// fails lambda > 0 (after the PSD clamp).
DenseTensor tensor_log(const DenseTensor& a);

/// Real power of a PSD tensor. Negative alpha requires strictly positive
/// spectrum.
DenseTensor tensor_pow(const DenseTensor& a, double alpha);

/// A^z = sum lambda^z U_lambda for PSD A and complex z. Zero eigenvalues map
/// to zero when Re(z) > 0 and raise DomainError otherwise.
DenseTensor complex_power(const DenseTensor& a, cplx z);

constexpr double schatten_inf = std::numeric_limits<double>::infinity();

/// Schatten p-(quasi)norm via singular values of the matricization; p > 0 or
/// schatten_inf for the spectral norm.
double schatten_norm(const DenseTensor& x, double p);

/// |X| = (X^H *_N X)^{1/2}.
DenseTensor abs_tensor(const DenseTensor& x);

/// Loewner order test A >= B up to tol * (1 + ||A||_F + ||B||_F).
bool loewner_geq(const DenseTensor& a, const DenseTensor& b, double tol = 1e-10);

/// Minimum distance between distinct eigenvalues; DegenerateSpectrumError for
/// single-cluster spectra.
double spectral_gap(const SpectralDecomposition& dec);

struct EigcountRow {
    int m = 0;
    std::int64_t count = 0;  // distinct eigenvalues of A^{(x)m}
    std::int64_t bound = 0;  // C(m + e - 1, e - 1), e = distinct count of A
};

/// Distinct-eigenvalue growth of Kronecker powers A^{(x)m}, m = 1..m_max.
/// ResourceError if row_size^m_max exceeds 4096.
std::vector<EigcountRow> eigcount_growth(const DenseTensor& a, int m_max);

} // namespace tracegym
