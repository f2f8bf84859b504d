#include "tracegym/inequalities.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "tracegym/errors.hpp"

namespace tracegym {
namespace {

void require_square_family(const std::vector<DenseTensor>& as, const char* who) {
    if (as.empty()) {
        throw ConfigError(std::string(who) + ": at least one factor required");
    }
    const Shape& s0 = as.front().shape();
    if (!s0.is_square()) {
        throw ShapeError(std::string(who) + ": square tensors required, got " +
                         s0.to_string());
    }
    for (const auto& a : as) {
        if (!(a.shape() == s0)) {
            throw ShapeError(std::string(who) + ": factors must share one shape, got " +
                             s0.to_string() + " and " + a.shape().to_string());
        }
    }
}

void require_same_square(const DenseTensor& a, const DenseTensor& b, const char* who) {
    require_square_family({a, b}, who);
}

void require_quad_theta(const QuadratureScheme& quad, double theta, const char* who) {
    if (quad.theta != theta) {
        throw ConfigError(std::string(who) + ": quadrature built for theta = " +
                          std::to_string(quad.theta) + ", check needs theta = " +
                          std::to_string(theta));
    }
}

double schatten_of_matrix(const Eigen::MatrixXcd& m, double p) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (p == schatten_inf) {
        return sv.size() > 0 ? sv(0) : 0.0;
    }
    double acc = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        acc += std::pow(sv(i), p);
    }
    return std::pow(acc, 1.0 / p);
}

/// Eigensystem of a PSD factor with the roundoff clamp of tensor_pow, cached
/// so per-node complex powers reuse one factorization.
struct FactorEig {
    Eigen::VectorXd lam;
    Eigen::MatrixXcd v;
    double lam_max = 0;
};

FactorEig psd_factor(const DenseTensor& a, const char* who) {
    HermitianEigen eig = hermitian_eigensystem(a);
    const double scale = eig.values.size() > 0 ? eig.values.cwiseAbs().maxCoeff() : 0.0;
    const double floor = -1e-10 * std::max(1.0, scale);
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        if (eig.values[i] < floor) {
            throw DomainError(std::string(who) + ": tensor is not positive semi-definite "
                              "(lambda_min = " + std::to_string(eig.values[i]) + ")");
        }
        if (eig.values[i] < 0) eig.values[i] = 0;
    }
    const double lam_max = eig.values.size() > 0 ? eig.values.maxCoeff() : 0.0;
    return {std::move(eig.values), std::move(eig.vectors), lam_max};
}

Eigen::MatrixXcd cpow(const FactorEig& f, cplx z, const char* who) {
    Eigen::VectorXcd d(f.lam.size());
    for (Eigen::Index i = 0; i < f.lam.size(); ++i) {
        const double l = f.lam[i];
        if (l == 0.0) {
            if (z.real() <= 0) {
                throw DomainError(std::string(who) +
                                  ": singular factor admits only Re(z) > 0 powers");
            }
            d[i] = 0.0;
        } else {
            d[i] = std::exp(z * std::log(l));
        }
    }
    return f.v * d.asDiagonal() * f.v.adjoint();
}

DenseTensor tensor_from_factor(const FactorEig& f, const Shape& shape) {
    Eigen::MatrixXcd m = f.v * f.lam.asDiagonal() * f.v.adjoint();
    return dematricize(m, shape);
}

/// Floors near-singular PSD factors by eps_pd = 1e-12 lambda_max so complex
/// powers A^{is} stay defined; returns the indices that were floored.
std::vector<std::int64_t> floor_singular(std::vector<FactorEig>& eigs) {
    std::vector<std::int64_t> floored;
    for (std::size_t k = 0; k < eigs.size(); ++k) {
        FactorEig& f = eigs[k];
        const double lam_min = f.lam.size() > 0 ? f.lam.minCoeff() : 0.0;
        if (lam_min <= 1e-12 * f.lam_max) {
            const double eps_pd = 1e-12 * (f.lam_max > 0 ? f.lam_max : 1.0);
            f.lam.array() += eps_pd;
            f.lam_max += eps_pd;
            floored.push_back(static_cast<std::int64_t>(k));
        }
    }
    return floored;
}

bool nearly_hermitian(const DenseTensor& a) {
    return frobenius_norm(a - conj_transpose(a)) <=
           1e-10 * std::max(1.0, frobenius_norm(a));
}

DenseTensor exp_any(const DenseTensor& a) {
    return nearly_hermitian(a) ? tensor_exp(a) : tensor_exp_general(a);
}

Eigen::MatrixXcd matrix_power(Eigen::MatrixXcd base, std::int64_t e) {
    Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(base.rows(), base.cols());
    while (e > 0) {
        if (e & 1) result = result * base;
        e >>= 1;
        if (e > 0) base = base * base;
    }
    return result;
}

double log_norm_of_product(const std::vector<Eigen::MatrixXcd>& factors, double p) {
    Eigen::MatrixXcd m = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) {
        m = m * factors[k];
    }
    const double value = std::log(schatten_of_matrix(m, p));
    if (!std::isfinite(value)) {
        throw NumericalError("log of a vanishing or non-finite Schatten norm");
    }
    return value;
}

double tr_a_log_a(const FactorEig& f, const char* who) {
    double acc = 0;
    for (Eigen::Index i = 0; i < f.lam.size(); ++i) {
        const double l = f.lam[i];
        if (l > 0) acc += l * std::log(l);
    }
    if (!std::isfinite(acc)) {
        throw NumericalError(std::string(who) + ": Tr A log A is not finite");
    }
    return acc;
}

} // namespace

InequalityReport check_gt_two(const DenseTensor& h1, const DenseTensor& h2) {
    require_same_square(h1, h2, "check_gt_two");
    const double lhs = trace(tensor_exp(h1 + h2)).real();
    const double rhs = trace(einstein_product(tensor_exp(h1), tensor_exp(h2))).real();
    InequalityReport rep = make_report("gt-two", lhs, rhs);
    rep.instance_digest["shape"] = h1.shape().to_string();
    rep.instance_digest["commutator_norm"] =
        frobenius_norm(einstein_product(h1, h2) - einstein_product(h2, h1));
    return rep;
}

InequalityReport check_alt_two(const DenseTensor& a1, const DenseTensor& a2,
                               double r, double q) {
    require_same_square(a1, a2, "check_alt_two");
    if (r <= 0) throw DomainError("check_alt_two: r > 0 required");
    if (q <= 0) throw DomainError("check_alt_two: q > 0 required");

    const auto chain_trace = [&](double rr) {
        const DenseTensor outer = tensor_pow(a1, rr / 2);
        const DenseTensor chain =
            einstein_product(einstein_product(outer, tensor_pow(a2, rr)), outer);
        const double value = trace(tensor_pow(chain, q / rr)).real();
        if (!std::isfinite(value)) {
            throw NumericalError("check_alt_two: trace chain is not finite");
        }
        return value;
    };

    const double t_r = chain_trace(r);
    const double t_1 = chain_trace(1.0);
    const bool forward = r <= 1.0;
    InequalityReport rep =
        make_report("alt-two", forward ? t_r : t_1, forward ? t_1 : t_r);
    rep.q = q;
    rep.instance_digest["shape"] = a1.shape().to_string();
    rep.instance_digest["r"] = r;
    rep.instance_digest["direction"] = forward ? "r<=1" : "r>=1";
    rep.instance_digest["commutator_norm"] =
        frobenius_norm(einstein_product(a1, a2) - einstein_product(a2, a1));
    return rep;
}

InequalityReport check_alt_multi(const std::vector<DenseTensor>& as, double theta,
                                 double p, const QuadratureScheme& quad) {
    require_square_family(as, "check_alt_multi");
    if (theta <= 0 || theta > 1) {
        throw ConfigError("check_alt_multi: theta in (0,1] required");
    }
    if (p <= 0) throw DomainError("check_alt_multi: p > 0 required");
    require_quad_theta(quad, theta, "check_alt_multi");

    std::vector<FactorEig> eigs;
    eigs.reserve(as.size());
    for (const auto& a : as) {
        eigs.push_back(psd_factor(a, "check_alt_multi"));
    }
    const std::vector<std::int64_t> floored = floor_singular(eigs);
    const Shape& shape = as.front().shape();

    DenseTensor chain = tensor_from_factor(eigs.front(), shape);
    chain = tensor_pow(chain, theta);
    for (std::size_t k = 1; k < eigs.size(); ++k) {
        chain = einstein_product(
            chain, tensor_pow(tensor_from_factor(eigs[k], shape), theta));
    }
    const double lhs =
        std::log(schatten_norm(tensor_pow(abs_tensor(chain), 1.0 / theta), p));
    if (!std::isfinite(lhs)) {
        throw NumericalError("check_alt_multi: lhs is not finite");
    }

    const auto integrand = [&](double s) {
        std::vector<Eigen::MatrixXcd> factors;
        factors.reserve(eigs.size());
        for (const auto& f : eigs) {
            factors.push_back(cpow(f, cplx(1.0, s), "check_alt_multi"));
        }
        return log_norm_of_product(factors, p);
    };
    const double rhs = quad.integrate(integrand);

    InequalityReport rep = make_report("alt-multi", lhs, rhs,
                                       quad.dirac() ? 0.0 : quad.error_budget);
    rep.quad = QuadInfo::from(quad);
    rep.theta = theta;
    rep.p = p;
    rep.instance_digest["shape"] = shape.to_string();
    rep.instance_digest["n"] = static_cast<std::int64_t>(as.size());
    rep.instance_digest["floored"] = floored;
    return rep;
}

InequalityReport check_gt_multi(const std::vector<DenseTensor>& hs, double p,
                                const QuadratureScheme& quad) {
    require_square_family(hs, "check_gt_multi");
    if (p <= 0) throw DomainError("check_gt_multi: p > 0 required");
    require_quad_theta(quad, 0.0, "check_gt_multi");

    DenseTensor sum = hs.front();
    for (std::size_t k = 1; k < hs.size(); ++k) {
        sum = sum + hs[k];
    }
    const double lhs = std::log(schatten_norm(tensor_exp(sum), p));
    if (!std::isfinite(lhs)) {
        throw NumericalError("check_gt_multi: lhs is not finite");
    }

    std::vector<HermitianEigen> eigs;
    eigs.reserve(hs.size());
    for (const auto& h : hs) {
        eigs.push_back(hermitian_eigensystem(h));
    }
    const auto integrand = [&](double s) {
        std::vector<Eigen::MatrixXcd> factors;
        factors.reserve(eigs.size());
        for (const auto& e : eigs) {
            Eigen::VectorXcd d(e.values.size());
            for (Eigen::Index i = 0; i < e.values.size(); ++i) {
                d[i] = std::exp(cplx(1.0, s) * e.values[i]);
            }
            factors.push_back(e.vectors * d.asDiagonal() * e.vectors.adjoint());
        }
        return log_norm_of_product(factors, p);
    };
    const double rhs = quad.integrate(integrand);

    InequalityReport rep = make_report("gt-multi", lhs, rhs, quad.error_budget);
    rep.quad = QuadInfo::from(quad);
    rep.p = p;
    rep.instance_digest["shape"] = hs.front().shape().to_string();
    rep.instance_digest["n"] = static_cast<std::int64_t>(hs.size());
    return rep;
}

InequalityReport check_gt_general(const std::vector<DenseTensor>& as, double p,
                                  const QuadratureScheme& quad) {
    require_square_family(as, "check_gt_general");
    if (p <= 0) throw DomainError("check_gt_general: p > 0 required");
    require_quad_theta(quad, 0.0, "check_gt_general");

    DenseTensor sum = as.front();
    double defect = frobenius_norm(as.front() - conj_transpose(as.front()));
    std::vector<DenseTensor> real_parts;
    real_parts.reserve(as.size());
    real_parts.push_back(hermitian_part(as.front()));
    for (std::size_t k = 1; k < as.size(); ++k) {
        sum = sum + as[k];
        defect = std::max(defect, frobenius_norm(as[k] - conj_transpose(as[k])));
        real_parts.push_back(hermitian_part(as[k]));
    }
    const double lhs = std::log(schatten_norm(exp_any(sum), p));
    if (!std::isfinite(lhs)) {
        throw NumericalError("check_gt_general: lhs is not finite");
    }

    InequalityReport rep = check_gt_multi(real_parts, p, quad);
    const double rhs = rep.rhs;
    rep = make_report("gt-general", lhs, rhs, quad.error_budget);
    rep.quad = QuadInfo::from(quad);
    rep.p = p;
    rep.instance_digest["shape"] = as.front().shape().to_string();
    rep.instance_digest["n"] = static_cast<std::int64_t>(as.size());
    rep.instance_digest["hermitian_defect"] = defect;
    return rep;
}

InequalityReport check_log_trace_multi(const std::vector<DenseTensor>& as, double q,
                                       const QuadratureScheme& quad,
                                       LogTraceVariant variant) {
    require_square_family(as, "check_log_trace_multi");
    if (q <= 0) throw DomainError("check_log_trace_multi: q > 0 required");
    require_quad_theta(quad, 0.0, "check_log_trace_multi");
    const double tr_a1 = trace(as.front()).real();
    if (std::abs(tr_a1 - 1.0) > 1e-8) {
        throw DomainError("check_log_trace_multi: Tr A_1 = 1 required, got " +
                          std::to_string(tr_a1));
    }

    std::vector<FactorEig> eigs;
    eigs.reserve(as.size());
    for (const auto& a : as) {
        eigs.push_back(psd_factor(a, "check_log_trace_multi"));
        if (eigs.back().lam.minCoeff() <= 0) {
            throw DomainError("check_log_trace_multi: positive definite factors required");
        }
    }
    const Eigen::MatrixXcd a1m = matricize(as.front());
    const Eigen::Index dim = a1m.rows();

    double log_sum = 0;
    for (const auto& f : eigs) {
        const Eigen::VectorXd log_lam = f.lam.array().log();
        const Eigen::MatrixXcd log_ak = f.v * log_lam.asDiagonal() * f.v.adjoint();
        log_sum += (a1m * log_ak).trace().real();
    }
    if (!std::isfinite(log_sum)) {
        throw NumericalError("check_log_trace_multi: log sum is not finite");
    }

    const auto integrand_for = [&](LogTraceVariant var) {
        return [&, var](double s) {
            Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(dim, dim);
            const cplx outer_z = q * cplx(1.0, s) / 2.0;
            for (std::size_t k = eigs.size(); k-- > 2;) {
                w = w * cpow(eigs[k], outer_z, "check_log_trace_multi");
            }
            if (eigs.size() >= 2) {
                const cplx e2 = var == LogTraceVariant::display
                                    ? cplx(q / 2.0, 0.0)
                                    : q * cplx(1.0, s) / 2.0;
                w = w * cpow(eigs[1], e2, "check_log_trace_multi");
            }
            const Eigen::MatrixXcd b = w * cpow(eigs[0], cplx(q / 2.0, 0.0),
                                                "check_log_trace_multi");
            Eigen::MatrixXcd g = b * b.adjoint();
            g = 0.5 * (g + g.adjoint().eval());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
            if (es.info() != Eigen::Success) {
                throw NumericalError("check_log_trace_multi: eigensolve failed");
            }
            const Eigen::VectorXd& mu = es.eigenvalues();
            if (mu.minCoeff() <= 0) {
                throw NumericalError("check_log_trace_multi: chain lost definiteness");
            }
            const Eigen::MatrixXcd log_g = es.eigenvectors() *
                                           mu.array().log().matrix().asDiagonal() *
                                           es.eigenvectors().adjoint();
            const cplx tr = (a1m * log_g).trace();
            if (std::abs(tr.imag()) > 1e-8 * std::max(1.0, std::abs(tr.real()))) {
                throw NumericalError(
                    "check_log_trace_multi: integrand trace residue beyond tolerance");
            }
            return tr.real() / q;
        };
    };

    const double integral = quad.integrate(integrand_for(variant));
    const double integral_alt = quad.integrate(integrand_for(
        variant == LogTraceVariant::display ? LogTraceVariant::proof
                                            : LogTraceVariant::display));

    InequalityReport rep =
        make_report("log-trace", integral, log_sum, quad.error_budget);
    rep.quad = QuadInfo::from(quad);
    rep.q = q;
    rep.instance_digest["shape"] = as.front().shape().to_string();
    rep.instance_digest["n"] = static_cast<std::int64_t>(as.size());
    rep.instance_digest["variant"] =
        variant == LogTraceVariant::display ? "display" : "proof";
    rep.instance_digest["margin_alt"] = log_sum - integral_alt;
    return rep;
}

double relative_entropy(const DenseTensor& a, const DenseTensor& b) {
    require_same_square(a, b, "relative_entropy");
    const double tr_a = trace(a).real();
    if (std::abs(tr_a - 1.0) > 1e-8) {
        throw DomainError("relative_entropy: Tr A = 1 required, got " +
                          std::to_string(tr_a));
    }
    const FactorEig fa = psd_factor(a, "relative_entropy");
    const double plain = tr_a_log_a(fa, "relative_entropy");
    const double cross = trace(einstein_product(a, tensor_log(b))).real();
    if (!std::isfinite(cross)) {
        throw NumericalError("relative_entropy: Tr A log B is not finite");
    }
    return plain - cross;
}

VariationalGaps variational_gap(const DenseTensor& a, const DenseTensor& b,
                                const DenseTensor& x) {
    require_same_square(a, b, "variational_gap");
    require_same_square(a, x, "variational_gap");
    const double d_ab = relative_entropy(a, b);
    const DenseTensor log_b = tensor_log(b);
    const DenseTensor log_x = tensor_log(x);
    const double t1 = trace(einstein_product(a, log_x)).real();
    const double t2 = std::log(trace(tensor_exp(log_b + log_x)).real());
    const double t3 = std::log(trace(einstein_product(b, x)).real());
    if (!std::isfinite(t1) || !std::isfinite(t2) || !std::isfinite(t3)) {
        throw NumericalError("variational_gap: non-finite variational term");
    }
    return {d_ab - (t1 - t2), t3 - t2, d_ab - (t1 - t3)};
}

DenseTensor entropy_maximizer(const DenseTensor& a, const DenseTensor& b) {
    require_same_square(a, b, "entropy_maximizer");
    return tensor_exp(tensor_log(a) - tensor_log(b));
}

std::vector<LieErrorRow> lie_product_error(const DenseTensor& l1, const DenseTensor& l2,
                                           const std::vector<std::int64_t>& ns) {
    require_same_square(l1, l2, "lie_product_error");
    const Eigen::MatrixXcd target = matricize(exp_any(l1 + l2));
    const double bound_scale =
        2.0 * std::exp(2.0 * schatten_norm(l1, schatten_inf) +
                       2.0 * schatten_norm(l2, schatten_inf));
    std::vector<LieErrorRow> rows;
    rows.reserve(ns.size());
    for (std::int64_t n : ns) {
        if (n < 1) throw DomainError("lie_product_error: n >= 1 required");
        const DenseTensor step =
            einstein_product(exp_any((1.0 / static_cast<double>(n)) * l1),
                             exp_any((1.0 / static_cast<double>(n)) * l2));
        const Eigen::MatrixXcd powered = matrix_power(matricize(step), n);
        const double err = schatten_of_matrix(powered - target, schatten_inf);
        rows.push_back({n, err, bound_scale / static_cast<double>(n)});
    }
    return rows;
}

DenseTensor tensor_exp_general(const DenseTensor& a) {
    if (!a.shape().is_square()) {
        throw ShapeError("tensor_exp_general: square tensor required, got " +
                         a.shape().to_string());
    }
    const Eigen::MatrixXcd m = matricize(a).exp();
    DenseTensor out = dematricize(m, a.shape());
    if (!out.all_finite()) {
        throw NumericalError("tensor_exp_general: exponential overflowed");
    }
    return out;
}

} // namespace tracegym
