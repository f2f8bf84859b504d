#include "tracegym/random_tensors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <boost/math/distributions/beta.hpp>

#include "tracegym/errors.hpp"
#include "tracegym/spectral.hpp"
#include "tracegym/tensor_io.hpp"

namespace tracegym {
namespace {

void require_hermitian_input(const DenseTensor& a, const char* who) {
    if (!a.shape().is_square()) {
        throw ShapeError(std::string(who) + ": square tensor required, got " +
                         a.shape().to_string());
    }
    const double dev = frobenius_norm(a - conj_transpose(a));
    if (dev > 1e-10 * std::max(1.0, frobenius_norm(a))) {
        throw HermitianityError(std::string(who) + ": tensor deviates from Hermitian by " +
                                std::to_string(dev));
    }
}

/// Atoms and probabilities of a finite-support model.
void support_of(const RandomTensorModel& m, std::vector<DenseTensor>& atoms,
                std::vector<double>& probs) {
    if (m.kind == ModelKind::rademacher_dilation) {
        atoms = {m.atoms.front(), -1.0 * m.atoms.front()};
        probs = {0.5, 0.5};
    } else {
        atoms = m.atoms;
        probs = m.probs;
    }
}

double max_eigenvalue(const DenseTensor& a) {
    return hermitian_eigensystem(a).values.maxCoeff();
}

/// Golden-section minimum of f on [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double& arg_min) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 120 && (b - a) > 1e-12 * (1.0 + std::abs(a) + std::abs(b));
         ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if (fc <= fd) {
        arg_min = c;
        return fc;
    }
    arg_min = d;
    return fd;
}

/// inf over t of log_bound(t) on a log-spaced grid refined by golden section.
double optimize_log_t(const std::function<double(double)>& log_bound,
                      const TailOptions& opts, double& t_star) {
    if (!(opts.t_min > 0) || !(opts.t_max > opts.t_min) || opts.grid_per_decade < 1) {
        throw ConfigError("tail bound: need 0 < t_min < t_max and grid_per_decade >= 1");
    }
    const double u_lo = std::log(opts.t_min);
    const double u_hi = std::log(opts.t_max);
    const double decades = (u_hi - u_lo) / std::numbers::ln10;
    const int npts =
        std::max(2, static_cast<int>(std::lround(decades * opts.grid_per_decade)) + 1);

    std::vector<double> us(static_cast<std::size_t>(npts));
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i < npts; ++i) {
        us[static_cast<std::size_t>(i)] =
            u_lo + (u_hi - u_lo) * static_cast<double>(i) / (npts - 1);
        const double v = log_bound(std::exp(us[static_cast<std::size_t>(i)]));
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double bracket_lo = us[static_cast<std::size_t>(std::max(0, best - 1))];
    const double bracket_hi = us[static_cast<std::size_t>(std::min(npts - 1, best + 1))];
    double u_star = us[static_cast<std::size_t>(best)];
    const double refined = golden_min(
        [&](double u) { return log_bound(std::exp(u)); }, bracket_lo, bracket_hi, u_star);
    if (refined < best_val) {
        best_val = refined;
        t_star = std::exp(u_star);
    } else {
        t_star = std::exp(us[static_cast<std::size_t>(best)]);
    }
    return best_val;
}

void fill_bound(TailBoundReport& rep, double log_value, double c_dim) {
    const double log_raw = std::log(c_dim) + log_value;
    rep.c_dim = c_dim;
    rep.bound_raw = log_raw > 700.0 ? std::numeric_limits<double>::infinity()
                                    : std::exp(log_raw);
    rep.bound = std::min(1.0, rep.bound_raw);
}

} // namespace

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::gaussian_hermitian: return "gaussian-hermitian";
        case ModelKind::bounded_spectrum: return "bounded-spectrum";
        case ModelKind::rademacher_dilation: return "rademacher-dilation";
        case ModelKind::finite_mixture: return "finite-mixture";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "gaussian-hermitian") return ModelKind::gaussian_hermitian;
    if (s == "bounded-spectrum") return ModelKind::bounded_spectrum;
    if (s == "rademacher-dilation") return ModelKind::rademacher_dilation;
    if (s == "finite-mixture") return ModelKind::finite_mixture;
    throw ConfigError("unknown model kind '" + s + "'");
}

RandomTensorModel RandomTensorModel::gaussian(Shape shape, double sigma) {
    if (!shape.is_square()) {
        throw ShapeError("gaussian model: square shape required, got " + shape.to_string());
    }
    if (!(sigma > 0)) throw ConfigError("gaussian model: sigma > 0 required");
    RandomTensorModel m;
    m.kind = ModelKind::gaussian_hermitian;
    m.shape = std::move(shape);
    m.sigma = sigma;
    return m;
}

RandomTensorModel RandomTensorModel::bounded(Shape shape, double lo, double hi) {
    if (!shape.is_square()) {
        throw ShapeError("bounded model: square shape required, got " + shape.to_string());
    }
    if (!(lo <= hi)) throw ConfigError("bounded model: lo <= hi required");
    RandomTensorModel m;
    m.kind = ModelKind::bounded_spectrum;
    m.shape = std::move(shape);
    m.lo = lo;
    m.hi = hi;
    return m;
}

RandomTensorModel RandomTensorModel::rademacher(DenseTensor dilation) {
    require_hermitian_input(dilation, "rademacher model");
    RandomTensorModel m;
    m.kind = ModelKind::rademacher_dilation;
    m.shape = dilation.shape();
    m.atoms.push_back(std::move(dilation));
    return m;
}

RandomTensorModel RandomTensorModel::mixture(std::vector<DenseTensor> atoms,
                                             std::vector<double> probs) {
    if (atoms.empty() || atoms.size() != probs.size()) {
        throw ConfigError("mixture model: one probability per atom required");
    }
    double total = 0;
    for (double p : probs) {
        if (p < 0) throw ConfigError("mixture model: probabilities must be nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("mixture model: probabilities must sum to 1, got " +
                          std::to_string(total));
    }
    for (const auto& a : atoms) {
        require_hermitian_input(a, "mixture model");
        if (!(a.shape() == atoms.front().shape())) {
            throw ShapeError("mixture model: atoms must share one shape");
        }
    }
    RandomTensorModel m;
    m.kind = ModelKind::finite_mixture;
    m.shape = atoms.front().shape();
    m.atoms = std::move(atoms);
    m.probs = std::move(probs);
    return m;
}

std::int64_t RandomTensorModel::support_size() const {
    if (kind == ModelKind::rademacher_dilation) return 2;
    if (kind == ModelKind::finite_mixture) {
        return static_cast<std::int64_t>(atoms.size());
    }
    return 0;
}

nlohmann::ordered_json model_to_json(const RandomTensorModel& m) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(m.kind);
    j["shape"] = {{"row_dims", m.shape.row_dims}, {"col_dims", m.shape.col_dims}};
    switch (m.kind) {
        case ModelKind::gaussian_hermitian:
            j["sigma"] = m.sigma;
            break;
        case ModelKind::bounded_spectrum:
            j["lo"] = m.lo;
            j["hi"] = m.hi;
            break;
        case ModelKind::rademacher_dilation:
            j["dilation"] = tensor_to_json(m.atoms.front());
            break;
        case ModelKind::finite_mixture: {
            nlohmann::ordered_json atoms = nlohmann::ordered_json::array();
            for (const auto& a : m.atoms) atoms.push_back(tensor_to_json(a));
            j["atoms"] = std::move(atoms);
            j["probs"] = m.probs;
            break;
        }
    }
    return j;
}

RandomTensorModel model_from_json(const nlohmann::json& j) {
    const ModelKind kind = model_kind_from_string(j.at("kind").get<std::string>());
    const auto parse_shape = [&]() {
        const auto& js = j.at("shape");
        return Shape(js.at("row_dims").get<std::vector<std::int64_t>>(),
                     js.at("col_dims").get<std::vector<std::int64_t>>());
    };
    switch (kind) {
        case ModelKind::gaussian_hermitian:
            return RandomTensorModel::gaussian(parse_shape(), j.at("sigma").get<double>());
        case ModelKind::bounded_spectrum:
            return RandomTensorModel::bounded(parse_shape(), j.at("lo").get<double>(),
                                              j.at("hi").get<double>());
        case ModelKind::rademacher_dilation:
            return RandomTensorModel::rademacher(tensor_from_json(j.at("dilation")));
        case ModelKind::finite_mixture: {
            std::vector<DenseTensor> atoms;
            for (const auto& ja : j.at("atoms")) atoms.push_back(tensor_from_json(ja));
            return RandomTensorModel::mixture(std::move(atoms),
                                              j.at("probs").get<std::vector<double>>());
        }
    }
    throw ConfigError("unknown model kind");
}

DenseTensor sample_model(const RandomTensorModel& m, CounterRng& rng) {
    switch (m.kind) {
        case ModelKind::gaussian_hermitian:
            return draw_hermitian(m.shape, rng, m.sigma);
        case ModelKind::bounded_spectrum: {
            const DenseTensor u = draw_unitary(m.shape, rng);
            const Eigen::MatrixXcd um = matricize(u);
            Eigen::VectorXd lam(m.shape.row_size());
            for (Eigen::Index i = 0; i < lam.size(); ++i) {
                lam(i) = m.lo + (m.hi - m.lo) * rng.uniform();
            }
            return dematricize(um * lam.asDiagonal() * um.adjoint(), m.shape);
        }
        case ModelKind::rademacher_dilation:
            return rng.uniform() < 0.5 ? m.atoms.front() : -1.0 * m.atoms.front();
        case ModelKind::finite_mixture: {
            const double u = rng.uniform();
            double acc = 0;
            for (std::size_t k = 0; k < m.atoms.size(); ++k) {
                acc += m.probs[k];
                if (u < acc) return m.atoms[k];
            }
            return m.atoms.back();
        }
    }
    throw ConfigError("unknown model kind");
}

TensorCumulants tensor_cumulants(const RandomTensorModel& m, int mc_samples,
                                 std::uint64_t seed) {
    std::vector<DenseTensor> atoms;
    std::vector<double> probs;
    if (m.finite_support()) {
        support_of(m, atoms, probs);
    } else {
        if (mc_samples < 1) throw ConfigError("tensor_cumulants: mc_samples >= 1 required");
        CounterRng rng(seed, 0x63756d);
        for (int i = 0; i < mc_samples; ++i) {
            atoms.push_back(sample_model(m, rng));
            probs.push_back(1.0 / mc_samples);
        }
    }
    DenseTensor phi1 = DenseTensor::zero(m.shape);
    DenseTensor second = DenseTensor::zero(m.shape);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        phi1 = phi1 + probs[k] * atoms[k];
        second = second + probs[k] * einstein_product(atoms[k], atoms[k]);
    }
    return {phi1, second - einstein_product(phi1, phi1)};
}

MgfOracle::MgfOracle(const RandomTensorModel& m, int mc_samples, std::uint64_t seed)
    : shape_(m.shape) {
    std::vector<DenseTensor> support;
    if (m.finite_support()) {
        exact_ = true;
        support_of(m, support, weights_);
    } else {
        if (mc_samples < 1) throw ConfigError("MgfOracle: mc_samples >= 1 required");
        CounterRng rng(seed, 0x6d6766);
        for (int i = 0; i < mc_samples; ++i) {
            support.push_back(sample_model(m, rng));
            weights_.push_back(1.0 / mc_samples);
        }
    }
    lams_.reserve(support.size());
    vecs_.reserve(support.size());
    for (const auto& a : support) {
        HermitianEigen eig = hermitian_eigensystem(a);
        lambda_abs_max_ = std::max(lambda_abs_max_, eig.values.cwiseAbs().maxCoeff());
        lams_.push_back(std::move(eig.values));
        vecs_.push_back(std::move(eig.vectors));
    }
}

ScaledMgf MgfOracle::at(cplx z) const {
    double lam_hi = lams_.front().maxCoeff();
    double lam_lo = lams_.front().minCoeff();
    for (const auto& lam : lams_) {
        lam_hi = std::max(lam_hi, lam.maxCoeff());
        lam_lo = std::min(lam_lo, lam.minCoeff());
    }
    const double shift = std::max(z.real() * lam_hi, z.real() * lam_lo);

    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(shape_.row_size(), shape_.col_size());
    for (std::size_t k = 0; k < lams_.size(); ++k) {
        Eigen::VectorXcd d(lams_[k].size());
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            d[i] = std::exp(z * lams_[k][i] - shift);
        }
        acc.noalias() += weights_[k] * (vecs_[k] * d.asDiagonal() * vecs_[k].adjoint());
    }
    return {dematricize(acc, shape_), shift};
}

double dim_constant(const Shape& shape, DimConstantMode mode) {
    if (mode == DimConstantMode::matricized) return 1.0;
    double c = 1.0;
    for (const std::int64_t d : shape.row_dims) {
        c *= static_cast<double>(2 * d - 1);
    }
    return c;
}

TailBoundReport laplace_tail_bound(const RandomTensorModel& model, double zeta,
                                   const TailOptions& opts) {
    const MgfOracle orc(model, opts.mc_samples, opts.seed);
    const auto log_bound = [&](double t) {
        const ScaledMgf m = orc.at(cplx(t, 0.0));
        const double tr = trace(m.value).real();
        if (!(tr > 0) || !std::isfinite(tr)) {
            throw NumericalError("laplace_tail_bound: trace MGF not positive at t = " +
                                 std::to_string(t));
        }
        return -t * zeta + m.log_scale + std::log(tr);
    };
    TailBoundReport rep;
    rep.name = "laplace";
    rep.zeta = zeta;
    rep.mode = opts.mode;
    const double log_value = optimize_log_t(log_bound, opts, rep.t_star);
    fill_bound(rep, log_value, dim_constant(model.shape, opts.mode));
    rep.instance_digest["shape"] = model.shape.to_string();
    rep.instance_digest["model"] = to_string(model.kind);
    rep.instance_digest["mgf"] = orc.exact() ? "exact" : "monte-carlo";
    rep.instance_digest["seed"] = opts.seed;
    return rep;
}

TailBoundReport master_tail_bound(const std::vector<RandomTensorModel>& models,
                                  double zeta, const QuadratureScheme& quad,
                                  const TailOptions& opts) {
    if (models.empty()) {
        throw ConfigError("master_tail_bound: at least one model required");
    }
    for (const auto& m : models) {
        if (!(m.shape == models.front().shape)) {
            throw ShapeError("master_tail_bound: models must share one shape");
        }
    }
    if (quad.theta != 0.0) {
        throw ConfigError("master_tail_bound: quadrature built for theta = " +
                          std::to_string(quad.theta) + ", need theta = 0");
    }
    const std::size_t n = models.size();
    std::vector<MgfOracle> oracles;
    oracles.reserve(n);
    bool all_exact = true;
    for (std::size_t k = 0; k < n; ++k) {
        oracles.emplace_back(models[k], opts.mc_samples, opts.seed + k);
        all_exact = all_exact && oracles.back().exact();
    }

    // Scale shifts of the middle MGFs depend on z only through Re(z) = t/2,
    // so they are constant across quadrature nodes and can be pulled out of
    // the integral once per t.
    const auto log_bound = [&](double t) {
        const ScaledMgf m1 = oracles.front().at(cplx(t, 0.0));
        double log_integral = 0;
        if (n == 1) {
            const double tr = trace(m1.value).real();
            if (!(tr > 0) || !std::isfinite(tr)) {
                throw NumericalError("master_tail_bound: trace MGF not positive");
            }
            log_integral = m1.log_scale + std::log(tr);
        } else {
            const ScaledMgf mn = oracles.back().at(cplx(t, 0.0));
            const Eigen::MatrixXcd head = matricize(m1.value);
            const Eigen::MatrixXcd tail = matricize(mn.value);
            double integral = 0;
            double mid_scale = 0;
            if (n == 2) {
                integral = (head * tail).trace().real();
            } else {
                for (std::size_t k = 1; k + 1 < n; ++k) {
                    mid_scale += 2.0 * oracles[k].at(cplx(t / 2.0, 0.0)).log_scale;
                }
                const auto chain_trace = [&](double s) {
                    std::vector<Eigen::MatrixXcd> mids;
                    mids.reserve(n - 2);
                    for (std::size_t k = 1; k + 1 < n; ++k) {
                        mids.push_back(
                            matricize(oracles[k].at(cplx(1.0, s) * (t / 2.0)).value));
                    }
                    Eigen::MatrixXcd chain = head;
                    for (const auto& m : mids) chain = chain * m;
                    chain = chain * tail;
                    for (std::size_t k = mids.size(); k-- > 0;) {
                        chain = chain * mids[k].adjoint();
                    }
                    const double tr = chain.trace().real();
                    if (!std::isfinite(tr)) {
                        throw NumericalError("master_tail_bound: non-finite chain trace");
                    }
                    return std::max(tr, 0.0);
                };
                integral = quad.integrate(chain_trace) / quad.captured_mass;
            }
            if (!(integral > 0) || !std::isfinite(integral)) {
                throw NumericalError("master_tail_bound: nonpositive chain integral");
            }
            log_integral = m1.log_scale + mn.log_scale + mid_scale + std::log(integral);
        }
        return -t * zeta + log_integral;
    };

    TailBoundReport rep;
    rep.name = "master";
    rep.zeta = zeta;
    rep.mode = opts.mode;
    rep.quad = QuadInfo::from(quad);
    const double log_value = optimize_log_t(log_bound, opts, rep.t_star);
    fill_bound(rep, log_value, dim_constant(models.front().shape, opts.mode));
    rep.instance_digest["shape"] = models.front().shape.to_string();
    rep.instance_digest["n"] = static_cast<std::int64_t>(n);
    nlohmann::ordered_json kinds = nlohmann::ordered_json::array();
    for (const auto& m : models) kinds.push_back(to_string(m.kind));
    rep.instance_digest["models"] = std::move(kinds);
    rep.instance_digest["mgf"] = all_exact ? "exact" : "monte-carlo";
    rep.instance_digest["seed"] = opts.seed;
    return rep;
}

EmpiricalTail empirical_tail(const std::vector<RandomTensorModel>& models, double zeta,
                             std::int64_t n_trials, std::uint64_t seed,
                             std::int64_t max_enumeration) {
    if (models.empty()) {
        throw ConfigError("empirical_tail: at least one model required");
    }
    for (const auto& m : models) {
        if (!(m.shape == models.front().shape)) {
            throw ShapeError("empirical_tail: models must share one shape");
        }
    }
    const double slack = 1e-9 * std::max(1.0, std::abs(zeta));

    bool enumerable = true;
    std::int64_t joint = 1;
    for (const auto& m : models) {
        if (!m.finite_support()) {
            enumerable = false;
            break;
        }
        joint *= m.support_size();
        if (joint > max_enumeration) {
            enumerable = false;
            break;
        }
    }

    if (enumerable) {
        std::vector<std::vector<DenseTensor>> atoms(models.size());
        std::vector<std::vector<double>> probs(models.size());
        std::vector<std::int64_t> radix(models.size());
        for (std::size_t k = 0; k < models.size(); ++k) {
            support_of(models[k], atoms[k], probs[k]);
            radix[k] = static_cast<std::int64_t>(atoms[k].size());
        }
        double tail = 0;
        for (std::int64_t flat = 0; flat < joint; ++flat) {
            const std::vector<std::int64_t> idx = unflatten_index(radix, flat);
            double p = 1;
            DenseTensor sum = atoms[0][static_cast<std::size_t>(idx[0])];
            p *= probs[0][static_cast<std::size_t>(idx[0])];
            for (std::size_t k = 1; k < models.size(); ++k) {
                sum = sum + atoms[k][static_cast<std::size_t>(idx[k])];
                p *= probs[k][static_cast<std::size_t>(idx[k])];
            }
            if (max_eigenvalue(sum) >= zeta - slack) tail += p;
        }
        return {tail, tail, tail, 0, true};
    }

    if (n_trials < 1) throw ConfigError("empirical_tail: n_trials >= 1 required");
    std::int64_t count = 0;
    for (std::int64_t trial = 0; trial < n_trials; ++trial) {
        CounterRng rng(seed, static_cast<std::uint64_t>(trial) + 0x74616931ULL);
        DenseTensor sum = sample_model(models.front(), rng);
        for (std::size_t k = 1; k < models.size(); ++k) {
            sum = sum + sample_model(models[k], rng);
        }
        if (max_eigenvalue(sum) >= zeta - slack) ++count;
    }
    const double estimate =
        static_cast<double>(count) / static_cast<double>(n_trials);
    double upper = 1.0;
    if (count < n_trials) {
        const boost::math::beta_distribution<double> dist(
            static_cast<double>(count) + 1.0, static_cast<double>(n_trials - count));
        upper = boost::math::quantile(dist, 0.99);
    }
    double lower = 0.0;
    if (count > 0) {
        const boost::math::beta_distribution<double> dist(
            static_cast<double>(count), static_cast<double>(n_trials - count) + 1.0);
        lower = boost::math::quantile(dist, 0.01);
    }
    return {estimate, lower, upper, n_trials, false};
}

} // namespace tracegym
