#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tracegym/densities.hpp"
#include "tracegym/report.hpp"
#include "tracegym/rng.hpp"
#include "tracegym/tensor.hpp"

namespace tracegym {

enum class ModelKind {
    gaussian_hermitian,
    bounded_spectrum,
    rademacher_dilation,
    finite_mixture,
};

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

/// Distribution over Hermitian tensors of one square shape.
///   gaussian-hermitian   (G + G^H)/2 scaled by sigma, Ginibre G
///   bounded-spectrum     Haar-ish eigenbasis, iid Uniform[lo, hi] eigenvalues
///   rademacher-dilation  +dilation or -dilation with probability 1/2
///   finite-mixture       atom A_j with probability probs[j]
struct RandomTensorModel {
    ModelKind kind = ModelKind::gaussian_hermitian;
    Shape shape;
    double sigma = 1.0;
    double lo = -1.0;
    double hi = 1.0;
    std::vector<DenseTensor> atoms;
    std::vector<double> probs;

    static RandomTensorModel gaussian(Shape shape, double sigma);
    static RandomTensorModel bounded(Shape shape, double lo, double hi);
    static RandomTensorModel rademacher(DenseTensor dilation);
    static RandomTensorModel mixture(std::vector<DenseTensor> atoms,
                                     std::vector<double> probs);

    bool finite_support() const {
        return kind == ModelKind::rademacher_dilation ||
               kind == ModelKind::finite_mixture;
    }
    /// Number of atoms for finite-support kinds, 0 otherwise.
    std::int64_t support_size() const;
};

nlohmann::ordered_json model_to_json(const RandomTensorModel& m);
RandomTensorModel model_from_json(const nlohmann::json& j);

DenseTensor sample_model(const RandomTensorModel& m, CounterRng& rng);

/// First two cumulants Phi1 = E X, Phi2 = E X*X - (E X)*(E X); exact for
/// finite support, Monte Carlo with mc_samples draws otherwise.
struct TensorCumulants {
    DenseTensor phi1;
    DenseTensor phi2;
};

TensorCumulants tensor_cumulants(const RandomTensorModel& m, int mc_samples = 512,
                                 std::uint64_t seed = 1);

/// E e^{zX} factored as e^{log_scale} * value with ||value||_2 <= 1-ish, so
/// Laplace objectives stay in the log domain at large t.
struct ScaledMgf {
    DenseTensor value;
    double log_scale = 0;
};

/// Caches the spectral data of the support (atoms, or mc_samples frozen
/// draws keyed by seed) so repeated z evaluations share one factorization
/// and one sample set.
class MgfOracle {
  public:
    MgfOracle(const RandomTensorModel& m, int mc_samples, std::uint64_t seed);

    ScaledMgf at(cplx z) const;
    bool exact() const { return exact_; }
    const Shape& shape() const { return shape_; }
    double lambda_abs_max() const { return lambda_abs_max_; }

  private:
    Shape shape_;
    bool exact_ = false;
    double lambda_abs_max_ = 0;
    std::vector<double> weights_;
    std::vector<Eigen::VectorXd> lams_;
    std::vector<Eigen::MatrixXcd> vecs_;
};

/// Dimensional constant attached to a tail bound: modewise mode uses
/// prod_k (2 I_k - 1) over the row dims, matricized mode uses 1.
double dim_constant(const Shape& shape, DimConstantMode mode);

struct TailOptions {
    DimConstantMode mode = DimConstantMode::matricized;
    int mc_samples = 512;
    std::uint64_t seed = 1;
    double t_min = 1e-3;
    double t_max = 1e3;
    int grid_per_decade = 25;
};

/// P(lambda_max(X) >= zeta) <= c_dim inf_t e^{-t zeta} Tr E e^{tX}, optimized
/// on a log-t grid refined by golden section. bound is clipped at 1.
TailBoundReport laplace_tail_bound(const RandomTensorModel& model, double zeta,
                                   const TailOptions& opts = {});

/// Master bound for a sum of independent draws X_1 + ... + X_n:
///   P(lambda_max >= zeta) <= c_dim inf_t e^{-t zeta} int rho_0(s)
///     Tr[ E e^{tX_1} * prod_{k=2}^{n-1} E e^{(1+is)tX_k/2} * E e^{tX_n}
///                    * prod_{k=n-1}^{2} E e^{(1-is)tX_k/2} ] ds,
/// with n = 1 dropping the integral down to Tr E e^{tX_1}. The quadrature is
/// renormalized by its captured mass so constant integrands are exact.
/// quad.theta must be 0.
TailBoundReport master_tail_bound(const std::vector<RandomTensorModel>& models,
                                  double zeta, const QuadratureScheme& quad,
                                  const TailOptions& opts = {});

/// Tail of lambda_max(sum of one draw per model) at zeta. Joint supports of
/// at most max_enumeration atoms are enumerated exactly; otherwise n_trials
/// Monte Carlo draws with Clopper-Pearson 99% confidence bounds. Threshold
/// comparisons allow lambda_max >= zeta - 1e-9 max(1, |zeta|). Enumerated
/// tails set estimate = cp_lower = cp_upper.
struct EmpiricalTail {
    double estimate = 0;
    double cp_lower = 0;
    double cp_upper = 1;
    std::int64_t n_trials = 0;
    bool enumerated = false;
};

EmpiricalTail empirical_tail(const std::vector<RandomTensorModel>& models, double zeta,
                             std::int64_t n_trials = 20000, std::uint64_t seed = 1,
                             std::int64_t max_enumeration = 4096);

} // namespace tracegym
