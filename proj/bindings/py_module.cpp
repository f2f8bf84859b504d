#include <algorithm>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "tracegym/densities.hpp"
#include "tracegym/errors.hpp"
#include "tracegym/inequalities.hpp"
#include "tracegym/pinching.hpp"
#include "tracegym/random_tensors.hpp"
#include "tracegym/rng.hpp"
#include "tracegym/spectral.hpp"
#include "tracegym/suite.hpp"
#include "tracegym/tensor.hpp"
#include "tracegym/tensor_io.hpp"

namespace py = pybind11;
using namespace py::literals;

namespace tracegym {
namespace {

using dims_t = std::vector<std::int64_t>;
using carray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

DenseTensor tensor_from_array(const carray& arr, int row_modes) {
    const int nd = static_cast<int>(arr.ndim());
    if (row_modes < 1 || row_modes >= nd) {
        throw ShapeError("from_array: row_modes must satisfy 1 <= row_modes <= ndim - 1, got " +
                         std::to_string(row_modes) + " for ndim " + std::to_string(nd));
    }
    dims_t rows, cols;
    for (int k = 0; k < nd; ++k) {
        (k < row_modes ? rows : cols).push_back(static_cast<std::int64_t>(arr.shape(k)));
    }
    DenseTensor t(Shape(std::move(rows), std::move(cols)));
    std::copy_n(arr.data(), t.data().size(), t.data().begin());
    return t;
}

py::array_t<cplx> tensor_to_array(const DenseTensor& t) {
    std::vector<py::ssize_t> dims;
    for (auto d : t.shape().row_dims) dims.push_back(static_cast<py::ssize_t>(d));
    for (auto d : t.shape().col_dims) dims.push_back(static_cast<py::ssize_t>(d));
    py::array_t<cplx> arr(dims);
    std::copy_n(t.data().begin(), t.data().size(), arr.mutable_data());
    return arr;
}

py::object json_to_py(const nlohmann::ordered_json& j) {
    using value_t = nlohmann::ordered_json::value_t;
    switch (j.type()) {
        case value_t::object: {
            py::dict d;
            for (const auto& item : j.items()) d[py::str(item.key())] = json_to_py(item.value());
            return d;
        }
        case value_t::array: {
            py::list l;
            for (const auto& v : j) l.append(json_to_py(v));
            return l;
        }
        case value_t::string:
            return py::str(j.get<std::string>());
        case value_t::boolean:
            return py::bool_(j.get<bool>());
        case value_t::number_integer:
            return py::int_(j.get<std::int64_t>());
        case value_t::number_unsigned:
            return py::int_(j.get<std::uint64_t>());
        case value_t::number_float:
            return py::float_(j.get<double>());
        default:
            return py::none();
    }
}

nlohmann::json py_to_json(py::handle h) {
    if (h.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
    if (py::isinstance<py::int_>(h)) return h.cast<std::int64_t>();
    if (py::isinstance<py::float_>(h)) return h.cast<double>();
    if (py::isinstance<py::str>(h)) return h.cast<std::string>();
    if (py::isinstance<py::dict>(h)) {
        nlohmann::json j = nlohmann::json::object();
        for (auto item : h.cast<py::dict>()) {
            j[item.first.cast<std::string>()] = py_to_json(item.second);
        }
        return j;
    }
    if (py::isinstance<py::sequence>(h)) {
        nlohmann::json j = nlohmann::json::array();
        for (auto item : h.cast<py::sequence>()) j.push_back(py_to_json(item));
        return j;
    }
    throw ConfigError("cannot convert python object of type " +
                      std::string(py::str(py::type::of(h))) + " to json");
}

RandomTensorModel model_from_py(py::handle h) { return model_from_json(py_to_json(h)); }

std::vector<RandomTensorModel> models_from_py(py::handle seq) {
    std::vector<RandomTensorModel> out;
    for (auto item : seq.cast<py::sequence>()) out.push_back(model_from_py(item));
    return out;
}

py::object report_to_py(const InequalityReport& r) { return json_to_py(to_json(r)); }
py::object tail_to_py(const TailBoundReport& r) { return json_to_py(to_json(r)); }

DimConstantMode mode_from_string(const std::string& s) {
    if (s == "modewise") return DimConstantMode::modewise;
    if (s == "matricized") return DimConstantMode::matricized;
    throw ConfigError("unknown dimensional constant mode '" + s +
                      "' (expected 'modewise' or 'matricized')");
}

LogTraceVariant variant_from_string(const std::string& s) {
    if (s == "display") return LogTraceVariant::display;
    if (s == "proof") return LogTraceVariant::proof;
    throw ConfigError("unknown log-trace variant '" + s + "' (expected 'display' or 'proof')");
}

TailOptions make_tail_options(const std::string& mode, int mc_samples, std::uint64_t seed,
                              double t_min, double t_max, int grid_per_decade) {
    TailOptions opts;
    opts.mode = mode_from_string(mode);
    opts.mc_samples = mc_samples;
    opts.seed = seed;
    opts.t_min = t_min;
    opts.t_max = t_max;
    opts.grid_per_decade = grid_per_decade;
    return opts;
}

template <typename F>
auto without_gil(F&& f) {
    py::gil_scoped_release release;
    return f();
}

} // namespace
} // namespace tracegym

PYBIND11_MODULE(_tracegym, m) {
    using namespace tracegym;

    m.doc() = "Einstein-product tensor algebra, trace inequalities, spectral pinching, "
              "and matrix-concentration style tail bounds.";
    m.attr("__version__") = "0.1.0";
    m.attr("schatten_inf") = schatten_inf;

    auto& base = py::register_exception<Error>(m, "TracegymError");
    py::register_exception<ShapeError>(m, "ShapeError", base);
    py::register_exception<HermitianityError>(m, "HermitianityError", base);
    py::register_exception<DomainError>(m, "DomainError", base);
    py::register_exception<NumericalError>(m, "NumericalError", base);
    py::register_exception<DegenerateSpectrumError>(m, "DegenerateSpectrumError", base);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base);
    py::register_exception<ResourceError>(m, "ResourceError", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);
    py::register_exception<IoError>(m, "IoError", base);

    py::class_<DenseTensor>(m, "Tensor",
                            "Dense even-order tensor stored row-major over "
                            "(row modes..., column modes...), matching numpy's C layout.")
        .def(py::init(&tensor_from_array), "array"_a, "row_modes"_a,
             "Copy a numpy array; the first row_modes axes become row modes.")
        .def_static("from_array", &tensor_from_array, "array"_a, "row_modes"_a)
        .def("array", &tensor_to_array,
             "Copy back to a numpy array of shape (*row_dims, *col_dims).")
        .def_property_readonly(
            "row_dims", [](const DenseTensor& t) { return t.shape().row_dims; })
        .def_property_readonly(
            "col_dims", [](const DenseTensor& t) { return t.shape().col_dims; })
        .def("trace", [](const DenseTensor& t) { return trace(t); })
        .def("conj_transpose", [](const DenseTensor& t) { return conj_transpose(t); })
        .def("frobenius_norm", [](const DenseTensor& t) { return frobenius_norm(t); })
        .def("__add__", [](const DenseTensor& a, const DenseTensor& b) { return a + b; })
        .def("__sub__", [](const DenseTensor& a, const DenseTensor& b) { return a - b; })
        .def("__mul__", [](const DenseTensor& a, cplx s) { return s * a; })
        .def("__rmul__", [](const DenseTensor& a, cplx s) { return s * a; })
        .def("__neg__", [](const DenseTensor& a) { return -1.0 * a; })
        .def("__repr__", [](const DenseTensor& t) { return "Tensor" + t.shape().to_string(); });

    m.def("identity", [](dims_t dims) { return DenseTensor::identity(Shape::square(std::move(dims))); },
          "dims"_a, "Identity tensor on the square shape (dims; dims).");
    m.def("einstein", &einstein_product, "a"_a, "b"_a,
          "Einstein product contracting a's column modes with b's row modes.");
    m.def("kron", &kronecker_product, "a"_a, "b"_a);
    m.def("kron_sum", &kronecker_sum, "a"_a, "b"_a);
    m.def("conj_transpose", &conj_transpose, "a"_a);
    m.def("trace", &trace, "a"_a);
    m.def("frobenius_inner", &frobenius_inner, "a"_a, "b"_a);
    m.def("frobenius_norm", &frobenius_norm, "a"_a);
    m.def("hermitian_part", &hermitian_part, "a"_a);
    m.def("matricize", &matricize, "a"_a,
          "Matricization to a row_size x col_size matrix; an algebra isomorphism.");

    m.def("hermitian_eigensystem", [](const DenseTensor& h) {
        HermitianEigen e = hermitian_eigensystem(h);
        py::dict d;
        d["values"] = Eigen::VectorXd(std::move(e.values));
        d["vectors"] = Eigen::MatrixXcd(std::move(e.vectors));
        return d;
    }, "h"_a, "Ascending eigenvalues and unitary eigenvectors of the matricization.");
    m.def("eig_hermitian", [](const DenseTensor& h, double cluster_tol) {
        SpectralDecomposition dec = eig_hermitian(h, cluster_tol);
        py::dict d;
        d["eigenvalues"] = dec.eigenvalues;
        py::list projs;
        for (auto& p : dec.projectors) projs.append(py::cast(std::move(p)));
        d["projectors"] = projs;
        d["cluster_tol"] = dec.cluster_tol;
        return d;
    }, "h"_a, "cluster_tol"_a = -1.0,
       "Clustered spectral decomposition: distinct eigenvalues with projector tensors.");
    m.def("spectral_function", [](const DenseTensor& h, const std::function<double(double)>& f,
                                  double cluster_tol) {
        return apply_spectral_function(eig_hermitian(h, cluster_tol), f);
    }, "h"_a, "f"_a, "cluster_tol"_a = -1.0, "Applies f eigenvalue-wise to a Hermitian tensor.");
    m.def("spectral_gap", [](const DenseTensor& h, double cluster_tol) {
        return without_gil([&] { return spectral_gap(eig_hermitian(h, cluster_tol)); });
    }, "h"_a, "cluster_tol"_a = -1.0, "Minimum distance between distinct eigenvalues.");
    m.def("tensor_exp", &tensor_exp, "h"_a);
    m.def("tensor_log", &tensor_log, "a"_a);
    m.def("tensor_pow", &tensor_pow, "a"_a, "alpha"_a);
    m.def("complex_power", &complex_power, "a"_a, "z"_a);
    m.def("tensor_exp_general", &tensor_exp_general, "a"_a,
          "exp of a general (not necessarily Hermitian) square tensor.");
    m.def("abs_tensor", &abs_tensor, "x"_a);
    m.def("schatten_norm", &schatten_norm, "x"_a, "p"_a,
          "Schatten p-(quasi)norm; pass float('inf') for the spectral norm.");
    m.def("loewner_geq", &loewner_geq, "a"_a, "b"_a, "tol"_a = 1e-10);
    m.def("eigcount_growth", [](const DenseTensor& a, int m_max) {
        py::list rows;
        for (const auto& row : eigcount_growth(a, m_max)) {
            rows.append(py::dict("m"_a = row.m, "count"_a = row.count, "bound"_a = row.bound));
        }
        return rows;
    }, "a"_a, "m_max"_a, "Distinct-eigenvalue counts of Kronecker powers with the binomial bound.");

    m.def("rho_theta_density", &rho_theta_density, "theta"_a, "s"_a);
    m.def("mu_delta_density", &mu_delta_density, "delta"_a, "s"_a);
    m.def("mu_delta_transform", &mu_delta_transform, "delta"_a, "omega"_a);

    m.def("pinch", [](const DenseTensor& h, const DenseTensor& x) {
        return without_gil([&] { return pinch(h, x); });
    }, "h"_a, "x"_a, "Spectral pinching of x by the eigenspaces of h.");
    m.def("pinch_via_integral", [](const DenseTensor& h, const DenseTensor& x,
                                   double error_budget, std::int64_t max_nodes) {
        return without_gil([&] { return pinch_via_integral(h, x, {error_budget, max_nodes}); });
    }, "h"_a, "x"_a, "error_budget"_a = 1e-6, "max_nodes"_a = std::int64_t{30'000'000},
       "Smoothing-integral quadrature converging to pinch(h, x).");

    m.def("check_gt_two", [](const DenseTensor& h1, const DenseTensor& h2) {
        return report_to_py(without_gil([&] { return check_gt_two(h1, h2); }));
    }, "h1"_a, "h2"_a, "Report for Tr exp(H1 + H2) <= Tr(exp(H1) * exp(H2)).");
    m.def("check_alt_two", [](const DenseTensor& a1, const DenseTensor& a2, double r, double q) {
        return report_to_py(without_gil([&] { return check_alt_two(a1, a2, r, q); }));
    }, "a1"_a, "a2"_a, "r"_a, "q"_a,
       "Report for the monotonicity of T(r) = Tr (A1^{r/2} A2^r A1^{r/2})^{q/r}.");
    m.def("check_alt_multi", [](const std::vector<DenseTensor>& as, double theta, double p,
                                double quad_budget) {
        return report_to_py(without_gil([&] {
            return check_alt_multi(as, theta, p, build_quadrature(theta, quad_budget));
        }));
    }, "tensors"_a, "theta"_a, "p"_a, "quad_budget"_a = 1e-6,
       "Report for the interpolated multivariate product inequality at exponent theta.");
    m.def("check_gt_multi", [](const std::vector<DenseTensor>& hs, double p, double quad_budget) {
        return report_to_py(without_gil([&] {
            return check_gt_multi(hs, p, build_quadrature(0.0, quad_budget));
        }));
    }, "tensors"_a, "p"_a, "quad_budget"_a = 1e-6,
       "Report for log||exp(sum H_k)||_p against its rho_0 integral upper bound.");
    m.def("check_gt_general", [](const std::vector<DenseTensor>& as, double p, double quad_budget) {
        return report_to_py(without_gil([&] {
            return check_gt_general(as, p, build_quadrature(0.0, quad_budget));
        }));
    }, "tensors"_a, "p"_a, "quad_budget"_a = 1e-6,
       "General-factor variant: the right-hand product uses Hermitian parts.");
    m.def("check_log_trace_multi", [](const std::vector<DenseTensor>& as, double q,
                                      double quad_budget, const std::string& variant) {
        const LogTraceVariant v = variant_from_string(variant);
        return report_to_py(without_gil([&] {
            return check_log_trace_multi(as, q, build_quadrature(0.0, quad_budget), v);
        }));
    }, "tensors"_a, "q"_a, "quad_budget"_a = 1e-6, "variant"_a = "display",
       "Report for the log-trace chain bound; may fail honestly for three or more factors.");

    m.def("relative_entropy", [](const DenseTensor& a, const DenseTensor& b) {
        return without_gil([&] { return relative_entropy(a, b); });
    }, "a"_a, "b"_a, "D(A||B) = Tr A log A - Tr A log B for unit-trace PSD A and PD B.");
    m.def("variational_gap", [](const DenseTensor& a, const DenseTensor& b, const DenseTensor& x) {
        const VariationalGaps g = without_gil([&] { return variational_gap(a, b, x); });
        return py::dict("g1"_a = g.g1, "g2"_a = g.g2, "g3"_a = g.g3);
    }, "a"_a, "b"_a, "x"_a, "Nonnegative gaps of the variational form of D(A||B) at trial X.");
    m.def("entropy_maximizer", [](const DenseTensor& a, const DenseTensor& b) {
        return without_gil([&] { return entropy_maximizer(a, b); });
    }, "a"_a, "b"_a, "X* = exp(log A - log B), closing the g1 gap.");
    m.def("lie_product_error", [](const DenseTensor& l1, const DenseTensor& l2,
                                  const std::vector<std::int64_t>& ns) {
        const auto rows = without_gil([&] { return lie_product_error(l1, l2, ns); });
        py::list out;
        for (const auto& row : rows) {
            out.append(py::dict("n"_a = row.n, "error"_a = row.error, "bound"_a = row.bound));
        }
        return out;
    }, "l1"_a, "l2"_a, "ns"_a,
       "Lie product approximation error and a priori O(1/n) bound for each n.");

    py::class_<CounterRng>(m, "CounterRng",
                           "Counter-based deterministic generator; (key, stream) pairs give "
                           "independent, platform-stable streams.")
        .def(py::init<std::uint64_t, std::uint64_t>(), "key"_a, "stream"_a = 0)
        .def("next_u64", &CounterRng::next_u64)
        .def("uniform", &CounterRng::uniform)
        .def("normal", &CounterRng::normal)
        .def("complex_normal", &CounterRng::complex_normal);

    m.def("draw_ginibre", [](CounterRng& rng, dims_t row_dims, std::optional<dims_t> col_dims) {
        return draw_ginibre(Shape(row_dims, col_dims.value_or(row_dims)), rng);
    }, "rng"_a, "row_dims"_a, "col_dims"_a = py::none(),
       "iid standard complex normal entries; col_dims defaults to row_dims.");
    m.def("draw_hermitian", [](CounterRng& rng, dims_t dims, double sigma) {
        return draw_hermitian(Shape::square(std::move(dims)), rng, sigma);
    }, "rng"_a, "dims"_a, "sigma"_a = 1.0);
    m.def("draw_positive_definite", [](CounterRng& rng, dims_t dims) {
        return draw_positive_definite(Shape::square(std::move(dims)), rng);
    }, "rng"_a, "dims"_a);
    m.def("draw_unitary", [](CounterRng& rng, dims_t dims) {
        return draw_unitary(Shape::square(std::move(dims)), rng);
    }, "rng"_a, "dims"_a);
    m.def("draw_commuting_family", [](CounterRng& rng, dims_t dims, int n) {
        return draw_commuting_family(Shape::square(std::move(dims)), n, rng);
    }, "rng"_a, "dims"_a, "n"_a, "Hermitian family sharing one random eigenbasis.");

    m.def("gaussian_model", [](dims_t dims, double sigma) {
        return json_to_py(model_to_json(RandomTensorModel::gaussian(Shape::square(std::move(dims)), sigma)));
    }, "dims"_a, "sigma"_a = 1.0);
    m.def("bounded_model", [](dims_t dims, double lo, double hi) {
        return json_to_py(model_to_json(RandomTensorModel::bounded(Shape::square(std::move(dims)), lo, hi)));
    }, "dims"_a, "lo"_a = -1.0, "hi"_a = 1.0);
    m.def("rademacher_model", [](const DenseTensor& dilation) {
        return json_to_py(model_to_json(RandomTensorModel::rademacher(dilation)));
    }, "dilation"_a);
    m.def("mixture_model", [](std::vector<DenseTensor> atoms, std::vector<double> probs) {
        return json_to_py(model_to_json(RandomTensorModel::mixture(std::move(atoms), std::move(probs))));
    }, "atoms"_a, "probs"_a);

    m.def("sample_model", [](py::handle model, CounterRng& rng) {
        const RandomTensorModel mdl = model_from_py(model);
        return sample_model(mdl, rng);
    }, "model"_a, "rng"_a, "Draws one Hermitian tensor from a model dict.");
    m.def("tensor_cumulants", [](py::handle model, int mc_samples, std::uint64_t seed) {
        const RandomTensorModel mdl = model_from_py(model);
        TensorCumulants c = without_gil([&] { return tensor_cumulants(mdl, mc_samples, seed); });
        return py::dict("phi1"_a = py::cast(std::move(c.phi1)), "phi2"_a = py::cast(std::move(c.phi2)));
    }, "model"_a, "mc_samples"_a = 512, "seed"_a = std::uint64_t{1},
       "First two cumulants; exact on finite support, Monte Carlo otherwise.");
    m.def("dim_constant", [](dims_t dims, const std::string& mode) {
        return dim_constant(Shape::square(std::move(dims)), mode_from_string(mode));
    }, "dims"_a, "mode"_a = "matricized");

    m.def("laplace_tail_bound", [](py::handle model, double zeta, const std::string& mode,
                                   int mc_samples, std::uint64_t seed, double t_min, double t_max,
                                   int grid_per_decade) {
        const RandomTensorModel mdl = model_from_py(model);
        const TailOptions opts =
            make_tail_options(mode, mc_samples, seed, t_min, t_max, grid_per_decade);
        return tail_to_py(without_gil([&] { return laplace_tail_bound(mdl, zeta, opts); }));
    }, "model"_a, "zeta"_a, "mode"_a = "matricized", "mc_samples"_a = 512,
       "seed"_a = std::uint64_t{1}, "t_min"_a = 1e-3, "t_max"_a = 1e3, "grid_per_decade"_a = 25,
       "Laplace transform bound on P(lambda_max(X) >= zeta) for a single draw.");
    m.def("master_tail_bound", [](py::handle models, double zeta, double quad_budget,
                                  const std::string& mode, int mc_samples, std::uint64_t seed,
                                  double t_min, double t_max, int grid_per_decade) {
        const auto mdls = models_from_py(models);
        const TailOptions opts =
            make_tail_options(mode, mc_samples, seed, t_min, t_max, grid_per_decade);
        return tail_to_py(without_gil([&] {
            return master_tail_bound(mdls, zeta, build_quadrature(0.0, quad_budget), opts);
        }));
    }, "models"_a, "zeta"_a, "quad_budget"_a = 1e-6, "mode"_a = "matricized",
       "mc_samples"_a = 512, "seed"_a = std::uint64_t{1}, "t_min"_a = 1e-3, "t_max"_a = 1e3,
       "grid_per_decade"_a = 25,
       "Factorized tail bound for a sum of independent draws; can undershoot the true "
       "tail for three or more summands.");
    m.def("empirical_tail", [](py::handle models, double zeta, std::int64_t n_trials,
                               std::uint64_t seed, std::int64_t max_enumeration) {
        const auto mdls = models_from_py(models);
        const EmpiricalTail t = without_gil([&] {
            return empirical_tail(mdls, zeta, n_trials, seed, max_enumeration);
        });
        return py::dict("estimate"_a = t.estimate, "cp_lower"_a = t.cp_lower,
                        "cp_upper"_a = t.cp_upper, "n_trials"_a = t.n_trials,
                        "enumerated"_a = t.enumerated);
    }, "models"_a, "zeta"_a, "n_trials"_a = std::int64_t{20000}, "seed"_a = std::uint64_t{1},
       "max_enumeration"_a = std::int64_t{4096},
       "Exact enumerated tail for small finite supports, Clopper-Pearson Monte Carlo otherwise.");

    m.def("suite_names", [] { return suite_names(); });
    m.def("run_suite", [](const std::string& suite, std::uint64_t seed, int instances,
                          double quad_budget, int threads, py::object models) {
        SuiteConfig cfg;
        cfg.suite = suite;
        cfg.seed = seed;
        cfg.instances = instances;
        cfg.quad_budget = quad_budget;
        cfg.threads = threads;
        if (!models.is_none()) cfg.models = models_from_py(models);
        const SuiteResult res = without_gil([&] { return run_suite(cfg); });
        nlohmann::ordered_json j = res.to_json();
        j["exit_code"] = res.exit_code();
        return json_to_py(j);
    }, "suite"_a, "seed"_a = std::uint64_t{1}, "instances"_a = 0, "quad_budget"_a = 1e-6,
       "threads"_a = 0, "models"_a = py::none(),
       "Runs one reproducible suite and returns its full result as a dict.");
}
