#include "tracegym/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

#include <unsupported/Eigen/KroneckerProduct>

#include "tracegym/errors.hpp"
#include "tracegym/inequalities.hpp"
#include "tracegym/pinching.hpp"
#include "tracegym/rng.hpp"

namespace tracegym {
namespace {

struct TaskOutput {
    std::vector<InequalityReport> reports;
    std::vector<TailBoundReport> tails;
    std::vector<std::string> errors;
};

using Task = std::function<void(TaskOutput&)>;

double rel_diff(const DenseTensor& got, const DenseTensor& want) {
    return frobenius_norm(got - want) / std::max(1.0, frobenius_norm(want));
}

InequalityReport residual_report(const std::string& name, double residual,
                                 double bound, ordered_json digest) {
    InequalityReport rep = make_report(name, residual, bound);
    rep.instance_digest = std::move(digest);
    return rep;
}

int suite_default_instances(const std::string& suite) {
    if (suite == "algebra") return 200;
    if (suite == "pinching") return 200;
    if (suite == "two-tensor") return 500;
    if (suite == "multivariate") return 312;
    if (suite == "log-trace") return 120;
    return 0;
}

// ---------------------------------------------------------------------------
// algebra: isomorphism and ring identities with independent evaluation paths.
// ---------------------------------------------------------------------------

std::vector<Task> algebra_tasks(const SuiteConfig& cfg, int count) {
    struct Dims {
        std::vector<std::int64_t> i, j, k;
    };
    static const std::vector<Dims> pool = {
        {{2}, {2}, {2}},          {{3}, {2}, {4}},
        {{2, 2}, {2, 2}, {2, 2}}, {{2, 3}, {3, 2}, {2, 2}},
        {{4}, {2, 2}, {3}},       {{2, 2, 2}, {2, 2}, {2}},
    };
    const std::uint64_t seed = cfg.seed;
    std::vector<Task> tasks;
    tasks.reserve(static_cast<std::size_t>(count));
    for (int idx = 0; idx < count; ++idx) {
        tasks.push_back([idx, seed](TaskOutput& out) {
            CounterRng rng(seed, static_cast<std::uint64_t>(idx));
            const Dims& d = pool[static_cast<std::size_t>(idx) % pool.size()];
            const Shape si(d.i, d.j), sj(d.j, d.k), sk(d.k, d.i);
            const DenseTensor a1 = draw_ginibre(si, rng);
            const DenseTensor a2 = draw_ginibre(sj, rng);
            const DenseTensor a3 = draw_ginibre(sk, rng);
            const DenseTensor a1b = draw_ginibre(si, rng);
            ordered_json dig{{"instance", idx},
                             {"shapes", si.to_string() + " " + sj.to_string() + " " +
                                            sk.to_string()}};

            const DenseTensor left = einstein_product(einstein_product(a1, a2), a3);
            const DenseTensor right = einstein_product(a1, einstein_product(a2, a3));
            out.reports.push_back(
                residual_report("algebra-assoc", rel_diff(left, right), 1e-9, dig));

            out.reports.push_back(residual_report(
                "algebra-adjoint",
                rel_diff(conj_transpose(einstein_product(a1, a2)),
                         einstein_product(conj_transpose(a2), conj_transpose(a1))),
                1e-9, dig));

            const Eigen::MatrixXcd mk =
                Eigen::kroneckerProduct(matricize(a1), matricize(a2));
            const double kron_res = (matricize(kronecker_product(a1, a2)) - mk).norm() /
                                    std::max(1.0, mk.norm());
            out.reports.push_back(residual_report("algebra-kron-iso", kron_res, 1e-9, dig));

            out.reports.push_back(residual_report(
                "algebra-mixed-product",
                rel_diff(einstein_product(kronecker_product(a1, a2),
                                          kronecker_product(a2, a3)),
                         kronecker_product(einstein_product(a1, a2),
                                           einstein_product(a2, a3))),
                1e-9, dig));

            const cplx t1 = trace(einstein_product(a1, einstein_product(a2, a3)));
            const cplx t2 = trace(einstein_product(einstein_product(a2, a3), a1));
            out.reports.push_back(residual_report(
                "algebra-trace-cyclic", std::abs(t1 - t2) / std::max(1.0, std::abs(t1)),
                1e-9, dig));

            const DenseTensor ir = DenseTensor::identity(Shape::square(d.j));
            const DenseTensor il = DenseTensor::identity(Shape::square(d.i));
            const double id_res = std::max(rel_diff(einstein_product(a1, ir), a1),
                                           rel_diff(einstein_product(il, a1), a1));
            out.reports.push_back(residual_report("algebra-identity", id_res, 1e-9, dig));

            const cplx inner = frobenius_inner(a1, a1b);
            const cplx via_trace = trace(einstein_product(conj_transpose(a1), a1b));
            out.reports.push_back(residual_report(
                "algebra-inner-trace",
                std::abs(inner - via_trace) / std::max(1.0, std::abs(inner)), 1e-9, dig));
        });
    }
    return tasks;
}

// ---------------------------------------------------------------------------
// pinching: map properties plus the smoothing-integral representation.
// ---------------------------------------------------------------------------

DenseTensor separated_spectrum_like(const DenseTensor& h, CounterRng& rng) {
    const HermitianEigen eig = hermitian_eigensystem(h);
    Eigen::VectorXd lam(eig.values.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        lam(i) = 0.7 * static_cast<double>(i) + 0.5 * rng.uniform();
    }
    return dematricize(
        eig.vectors * lam.asDiagonal().toDenseMatrix().cast<cplx>() * eig.vectors.adjoint(),
        h.shape());
}

std::vector<Task> pinching_tasks(const SuiteConfig& cfg, int count) {
    const std::uint64_t seed = cfg.seed;
    std::vector<Task> tasks;
    tasks.reserve(static_cast<std::size_t>(count));
    for (int idx = 0; idx < count; ++idx) {
        tasks.push_back([idx, seed](TaskOutput& out) {
            CounterRng rng(seed, static_cast<std::uint64_t>(idx));
            const Shape shape =
                (idx % 2) ? Shape::square({2, 2}) : Shape::square({2});
            const DenseTensor h = draw_hermitian(shape, rng);
            const DenseTensor x = draw_hermitian(shape, rng);
            const DenseTensor y = draw_hermitian(shape, rng);
            const DenseTensor xp = draw_positive_definite(shape, rng);
            const SpectralDecomposition dec = eig_hermitian(h);
            const DenseTensor px = pinch(dec, x);
            ordered_json dig{{"instance", idx},
                             {"shape", shape.to_string()},
                             {"clusters",
                              static_cast<std::int64_t>(dec.eigenvalues.size())}};

            out.reports.push_back(residual_report(
                "pinch-commute",
                rel_diff(einstein_product(px, h), einstein_product(h, px)), 1e-9, dig));

            const DenseTensor eh = tensor_exp(h);
            const cplx tp = trace(einstein_product(px, eh));
            const cplx tx = trace(einstein_product(x, eh));
            out.reports.push_back(residual_report(
                "pinch-trace", std::abs(tp - tx) / std::max(1.0, std::abs(tx)), 1e-9,
                dig));

            const cplx s1 = frobenius_inner(pinch(dec, y), x);
            const cplx s2 = frobenius_inner(y, pinch(dec, x));
            out.reports.push_back(residual_report(
                "pinch-selfadjoint", std::abs(s1 - s2) / std::max(1.0, std::abs(s1)),
                1e-9, dig));

            const double e_count = static_cast<double>(dec.eigenvalues.size());
            const DenseTensor gap_tensor = e_count * pinch(dec, xp) - xp;
            const double lam_min = hermitian_eigensystem(gap_tensor).values.minCoeff();
            InequalityReport ineq = make_report("pinch-inequality", 0.0, lam_min);
            ineq.instance_digest = dig;
            out.reports.push_back(std::move(ineq));

            if (idx % 4 == 0) {
                try {
                    const DenseTensor hs = separated_spectrum_like(h, rng);
                    const DenseTensor approx = pinch_via_integral(hs, x);
                    const double res =
                        frobenius_norm(approx - pinch(hs, x)) /
                        std::max(1.0, frobenius_norm(x));
                    out.reports.push_back(
                        residual_report("pinch-integral", res, 1e-6, dig));
                } catch (const Error& e) {
                    out.errors.push_back(std::string("pinch-integral: ") + e.what());
                }
            }
        });
    }
    return tasks;
}

// ---------------------------------------------------------------------------
// two-tensor: Golden-Thompson pairs and the two-factor trace power chain.
// ---------------------------------------------------------------------------

std::vector<Task> two_tensor_tasks(const SuiteConfig& cfg, int count) {
    const std::uint64_t seed = cfg.seed;
    std::vector<Task> tasks;
    tasks.reserve(static_cast<std::size_t>(count));
    for (int idx = 0; idx < count; ++idx) {
        tasks.push_back([idx, seed](TaskOutput& out) {
            CounterRng rng(seed, static_cast<std::uint64_t>(idx));
            static const std::vector<std::vector<std::int64_t>> dims_pool = {
                {2}, {3}, {2, 2}};
            const Shape shape =
                Shape::square(dims_pool[static_cast<std::size_t>(idx) % 3]);
            const bool commuting = idx % 7 == 6;

            DenseTensor h1, h2;
            if (commuting) {
                auto fam = draw_commuting_family(shape, 2, rng);
                h1 = std::move(fam[0]);
                h2 = std::move(fam[1]);
            } else {
                h1 = draw_hermitian(shape, rng);
                h2 = draw_hermitian(shape, rng);
            }

            InequalityReport gt = check_gt_two(h1, h2);
            gt.instance_digest["instance"] = idx;
            gt.instance_digest["commuting"] = commuting;
            out.reports.push_back(std::move(gt));

            static const double r_vals[] = {0.25, 0.5, 1.0, 2.0, 4.0};
            static const double q_vals[] = {0.5, 1.0, 2.0};
            const double r = r_vals[idx % 5];
            const double q = q_vals[(idx / 5) % 3];
            DenseTensor a1, a2;
            if (commuting) {
                a1 = tensor_exp(h1);
                a2 = tensor_exp(h2);
            } else {
                a1 = draw_positive_definite(shape, rng);
                a2 = draw_positive_definite(shape, rng);
            }
            InequalityReport alt = check_alt_two(a1, a2, r, q);
            alt.instance_digest["instance"] = idx;
            alt.instance_digest["commuting"] = commuting;
            out.reports.push_back(std::move(alt));
        });
    }
    return tasks;
}

// ---------------------------------------------------------------------------
// multivariate: n-factor interpolation checks plus Lie product error decay.
// ---------------------------------------------------------------------------

std::vector<Task> multivariate_tasks(const SuiteConfig& cfg, int count) {
    auto quads = std::make_shared<std::map<double, QuadratureScheme>>();
    for (const double theta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        quads->emplace(theta, build_quadrature(theta, cfg.quad_budget));
    }
    const std::uint64_t seed = cfg.seed;
    std::vector<Task> tasks;
    tasks.reserve(static_cast<std::size_t>(count) + 20);
    for (int idx = 0; idx < count; ++idx) {
        tasks.push_back([idx, seed, quads](TaskOutput& out) {
            CounterRng rng(seed, static_cast<std::uint64_t>(idx));
            const int kind = idx % 3;
            const int m = idx / 3;
            const Shape shape =
                (m % 2) ? Shape::square({2, 2}) : Shape::square({2});
            static const double thetas[] = {0.25, 0.5, 0.75, 1.0};
            static const double ps3[] = {1.0, 2.0, 3.0};
            static const double ps2[] = {1.0, 2.0};
            static const int nvals[] = {2, 3, 4};
            const bool commuting = m % 10 == 9;

            if (kind == 0) {
                const double theta = thetas[m % 4];
                const double p = ps3[(m / 4) % 3];
                const int n = nvals[(m / 12) % 3];
                std::vector<DenseTensor> as;
                if (commuting) {
                    for (auto& hh : draw_commuting_family(shape, n, rng)) {
                        as.push_back(tensor_exp(hh));
                    }
                } else {
                    for (int k = 0; k < n; ++k) {
                        as.push_back(draw_positive_definite(shape, rng));
                    }
                }
                InequalityReport rep = check_alt_multi(as, theta, p, quads->at(theta));
                rep.instance_digest["instance"] = idx;
                rep.instance_digest["commuting"] = commuting;
                out.reports.push_back(std::move(rep));
            } else if (kind == 1) {
                const double p = ps2[m % 2];
                const int n = nvals[(m / 2) % 3];
                std::vector<DenseTensor> hs;
                if (commuting) {
                    hs = draw_commuting_family(shape, n, rng);
                } else {
                    for (int k = 0; k < n; ++k) {
                        hs.push_back(draw_hermitian(shape, rng, 0.7));
                    }
                }
                InequalityReport rep = check_gt_multi(hs, p, quads->at(0.0));
                rep.instance_digest["instance"] = idx;
                rep.instance_digest["commuting"] = commuting;
                out.reports.push_back(std::move(rep));
            } else {
                const double p = ps2[m % 2];
                const int n = nvals[(m / 2) % 3];
                std::vector<DenseTensor> as;
                for (int k = 0; k < n; ++k) {
                    as.push_back(0.5 * draw_ginibre(shape, rng));
                }
                InequalityReport rep = check_gt_general(as, p, quads->at(0.0));
                rep.instance_digest["instance"] = idx;
                out.reports.push_back(std::move(rep));
            }
        });
    }
    for (int pair = 0; pair < 20; ++pair) {
        tasks.push_back([pair, seed](TaskOutput& out) {
            CounterRng rng(seed, 20000 + static_cast<std::uint64_t>(pair));
            const Shape shape =
                (pair % 2) ? Shape::square({2, 2}) : Shape::square({2});
            const DenseTensor l1 = draw_hermitian(shape, rng, 0.8);
            const DenseTensor l2 = draw_hermitian(shape, rng, 0.8);
            const std::vector<std::int64_t> ns = {1, 2, 4, 8, 16, 32, 64, 128, 256};
            for (const LieErrorRow& row : lie_product_error(l1, l2, ns)) {
                InequalityReport rep = make_report("lie-error", row.error, row.bound);
                rep.instance_digest["pair"] = pair;
                rep.instance_digest["n"] = row.n;
                rep.instance_digest["shape"] = shape.to_string();
                out.reports.push_back(std::move(rep));
            }
        });
    }
    return tasks;
}

// ---------------------------------------------------------------------------
// log-trace: n = 3 chains plus the variational entropy gaps.
// ---------------------------------------------------------------------------

std::vector<Task> log_trace_tasks(const SuiteConfig& cfg, int count) {
    auto quad0 = std::make_shared<QuadratureScheme>(
        build_quadrature(0.0, cfg.quad_budget));
    const std::uint64_t seed = cfg.seed;
    std::vector<Task> tasks;
    tasks.reserve(static_cast<std::size_t>(count) + 500);
    for (int idx = 0; idx < count; ++idx) {
        tasks.push_back([idx, seed, quad0](TaskOutput& out) {
            CounterRng rng(seed, static_cast<std::uint64_t>(idx));
            static const double q_vals[] = {1.0, 0.5, 0.25, 0.125};
            const double q = q_vals[idx % 4];
            const Shape shape =
                (idx % 2) ? Shape::square({2, 2}) : Shape::square({2});
            const bool commuting = idx % 6 == 5;
            std::vector<DenseTensor> as;
            if (commuting) {
                for (auto& hh : draw_commuting_family(shape, 3, rng)) {
                    as.push_back(tensor_exp(hh));
                }
            } else {
                for (int k = 0; k < 3; ++k) {
                    as.push_back(draw_positive_definite(shape, rng));
                }
            }
            as[0] = (1.0 / trace(as[0]).real()) * as[0];
            InequalityReport rep = check_log_trace_multi(as, q, *quad0);
            rep.instance_digest["instance"] = idx;
            rep.instance_digest["commuting"] = commuting;
            out.reports.push_back(std::move(rep));
        });
    }
    for (int j = 0; j < 500; ++j) {
        tasks.push_back([j, seed](TaskOutput& out) {
            CounterRng rng(seed, 50000 + static_cast<std::uint64_t>(j));
            const Shape shape = (j % 2) ? Shape::square({2, 2}) : Shape::square({2});
            DenseTensor a = draw_positive_definite(shape, rng);
            a = (1.0 / trace(a).real()) * a;
            const DenseTensor b = draw_positive_definite(shape, rng);
            const DenseTensor x = draw_positive_definite(shape, rng);
            const VariationalGaps gaps = variational_gap(a, b, x);
            ordered_json dig{{"instance", j}, {"shape", shape.to_string()}};
            const double gvals[] = {gaps.g1, gaps.g2, gaps.g3};
            const char* names[] = {"entropy-gap-g1", "entropy-gap-g2", "entropy-gap-g3"};
            for (int t = 0; t < 3; ++t) {
                InequalityReport rep = make_report(names[t], 0.0, gvals[t]);
                rep.instance_digest = dig;
                out.reports.push_back(std::move(rep));
            }
            const VariationalGaps at_max = variational_gap(a, b, entropy_maximizer(a, b));
            InequalityReport rep = make_report("entropy-maximizer", at_max.g1, 0.0);
            rep.instance_digest = dig;
            out.reports.push_back(std::move(rep));
        });
    }
    return tasks;
}

// ---------------------------------------------------------------------------
// tails: Laplace and master bounds against enumerated or Monte Carlo tails.
// ---------------------------------------------------------------------------

DenseTensor pauli_z_tensor() {
    DenseTensor t(Shape::square({2}));
    t[0] = 1.0;
    t[3] = -1.0;
    return t;
}

std::vector<RandomTensorModel> default_tail_models() {
    DenseTensor sx(Shape::square({2}));
    sx[1] = 1.0;
    sx[2] = 1.0;
    DenseTensor half(Shape::square({2}));
    half[0] = 0.5;
    half[3] = -0.25;
    return {RandomTensorModel::rademacher(pauli_z_tensor()),
            RandomTensorModel::mixture({sx, pauli_z_tensor(), half}, {0.5, 0.3, 0.2}),
            RandomTensorModel::gaussian(Shape::square({2}), 0.5)};
}

void merge_empirical(TailBoundReport& rep, const EmpiricalTail& emp) {
    rep.empirical = emp.estimate;
    rep.cp_upper = emp.enumerated ? emp.estimate : emp.cp_upper;
    rep.n_trials = emp.n_trials;
    rep.enumerated = emp.enumerated;
}

std::vector<Task> tails_tasks(const SuiteConfig& cfg) {
    auto quad0 = std::make_shared<QuadratureScheme>(
        build_quadrature(0.0, cfg.quad_budget));

    struct Family {
        std::string label;
        bool laplace = false;
        std::vector<RandomTensorModel> models;
    };
    auto families = std::make_shared<std::vector<Family>>();
    if (!cfg.models.empty()) {
        families->push_back({"custom-laplace", true, {cfg.models.front()}});
        families->push_back({"custom-master", false, cfg.models});
    } else {
        const auto defaults = default_tail_models();
        const auto& pauli = defaults[0];
        const auto& mix = defaults[1];
        const auto& gauss = defaults[2];
        families->push_back({"pauli-laplace", true, {pauli}});
        families->push_back({"pauli-master-2", false, {pauli, pauli}});
        families->push_back({"pauli-mix-master-3", false, {pauli, mix, pauli}});
        families->push_back({"gauss-master-2", false, {gauss, gauss}});
    }

    const std::uint64_t seed = cfg.seed;
    std::vector<Task> tasks;
    for (std::size_t f = 0; f < families->size(); ++f) {
        for (int zi = 0; zi <= 10; ++zi) {
            const double zeta = 0.25 * zi;
            tasks.push_back([f, zeta, seed, quad0, families](TaskOutput& out) {
                const Family& fam = (*families)[f];
                TailOptions opts;
                opts.seed = seed;
                const EmpiricalTail emp = empirical_tail(fam.models, zeta, 20000, seed);
                double sound_bound = 0;
                for (const DimConstantMode mode :
                     {DimConstantMode::matricized, DimConstantMode::modewise}) {
                    opts.mode = mode;
                    TailBoundReport rep =
                        fam.laplace
                            ? laplace_tail_bound(fam.models.front(), zeta, opts)
                            : master_tail_bound(fam.models, zeta, *quad0, opts);
                    rep.instance_digest["family"] = fam.label;
                    merge_empirical(rep, emp);
                    if (mode == DimConstantMode::matricized) sound_bound = rep.bound;
                    out.tails.push_back(std::move(rep));
                }
                const double tail_floor = emp.enumerated ? emp.estimate : emp.cp_lower;
                InequalityReport sound = make_report("tail-sound", tail_floor, sound_bound);
                sound.instance_digest["family"] = fam.label;
                sound.instance_digest["zeta"] = zeta;
                sound.instance_digest["enumerated"] = emp.enumerated;
                out.reports.push_back(std::move(sound));
            });
        }
    }
    return tasks;
}

int resolve_threads(int requested) {
    if (requested > 0) return std::min(requested, 256);
    if (const char* env = std::getenv("TRACEGYM_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return std::min(v, 256);
    }
    return 1;
}

} // namespace

SuiteSummary SuiteResult::summary() const {
    SuiteSummary s;
    s.numerical_errors = static_cast<std::int64_t>(errors.size());
    for (const auto& r : reports) {
        switch (r.verdict) {
            case Verdict::pass: ++s.pass; break;
            case Verdict::fail: ++s.fail; break;
            case Verdict::equality: ++s.equality; break;
        }
    }
    return s;
}

int SuiteResult::exit_code() const {
    const SuiteSummary s = summary();
    if (s.fail > 0) return 1;
    if (s.numerical_errors > 0) return 3;
    return 0;
}

ordered_json SuiteResult::to_json() const {
    const SuiteSummary s = summary();
    ordered_json j;
    j["suite"] = suite;
    j["config"] = ordered_json{
        {"seed", seed}, {"instances", instances}, {"quad_budget", quad_budget}};
    j["summary"] = ordered_json{{"reports", static_cast<std::int64_t>(reports.size())},
                                {"pass", s.pass},
                                {"fail", s.fail},
                                {"equality", s.equality},
                                {"numerical_errors", s.numerical_errors}};
    ordered_json reps = ordered_json::array();
    for (const auto& r : reports) reps.push_back(tracegym::to_json(r));
    j["reports"] = std::move(reps);
    ordered_json tails = ordered_json::array();
    for (const auto& t : tail_reports) tails.push_back(tracegym::to_json(t));
    j["tail_reports"] = std::move(tails);
    j["errors"] = errors;
    j["wall_time_ms"] = wall_time_ms;
    return j;
}

std::string SuiteResult::to_csv() const {
    std::string csv = csv_header();
    csv += '\n';
    for (const auto& r : reports) {
        csv += csv_row(r);
        csv += '\n';
    }
    return csv;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "algebra", "pinching", "two-tensor", "multivariate", "log-trace", "tails"};
    return names;
}

SuiteResult run_suite(const SuiteConfig& cfg) {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), cfg.suite) == names.end()) {
        std::string known;
        for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown suite '" + cfg.suite + "' (known: " + known + ")");
    }
    if (cfg.instances < 0) throw ConfigError("instances must be nonnegative");
    if (!(cfg.quad_budget > 0)) throw ConfigError("quad_budget must be positive");

    const auto t0 = std::chrono::steady_clock::now();
    const int count = cfg.instances > 0 ? cfg.instances
                                        : suite_default_instances(cfg.suite);
    std::vector<Task> tasks;
    if (cfg.suite == "algebra") tasks = algebra_tasks(cfg, count);
    else if (cfg.suite == "pinching") tasks = pinching_tasks(cfg, count);
    else if (cfg.suite == "two-tensor") tasks = two_tensor_tasks(cfg, count);
    else if (cfg.suite == "multivariate") tasks = multivariate_tasks(cfg, count);
    else if (cfg.suite == "log-trace") tasks = log_trace_tasks(cfg, count);
    else tasks = tails_tasks(cfg);

    std::vector<TaskOutput> slots(tasks.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            try {
                tasks[i](slots[i]);
            } catch (const Error& e) {
                slots[i].errors.push_back(e.what());
            } catch (const std::exception& e) {
                slots[i].errors.push_back(std::string("unexpected: ") + e.what());
            }
        }
    };
    const int threads = resolve_threads(cfg.threads);
    if (threads <= 1 || tasks.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    SuiteResult result;
    result.suite = cfg.suite;
    result.seed = cfg.seed;
    result.instances = count;
    result.quad_budget = cfg.quad_budget;
    for (auto& slot : slots) {
        for (auto& r : slot.reports) result.reports.push_back(std::move(r));
        for (auto& t : slot.tails) result.tail_reports.push_back(std::move(t));
        for (auto& e : slot.errors) result.errors.push_back(std::move(e));
    }
    result.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return result;
}

void write_suite_outputs(const SuiteResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
    }
    const fs::path base = fs::path(out_dir) / result.suite;
    {
        std::ofstream out(base.string() + ".json");
        if (!out) throw IoError("cannot write '" + base.string() + ".json'");
        out << result.to_json().dump(2) << '\n';
    }
    {
        std::ofstream out(base.string() + ".csv");
        if (!out) throw IoError("cannot write '" + base.string() + ".csv'");
        out << result.to_csv();
    }
}

Shape shape_from_string(const std::string& text) {
    std::string body = text;
    while (!body.empty() && body.front() == ' ') body.erase(0, 1);
    while (!body.empty() && body.back() == ' ') body.pop_back();
    if (!body.empty() && body.front() == '(') body.erase(0, 1);
    if (!body.empty() && body.back() == ')') body.pop_back();
    const auto semi = body.find(';');
    if (semi == std::string::npos) {
        throw ConfigError("shape '" + text + "' needs the form (I,...;J,...)");
    }
    const auto parse_group = [&](const std::string& part) {
        std::vector<std::int64_t> dims;
        std::string token;
        for (const char c : part + ",") {
            if (c == ',') {
                if (token.empty()) {
                    throw ConfigError("shape '" + text + "' has an empty dimension");
                }
                try {
                    dims.push_back(std::stoll(token));
                } catch (const std::exception&) {
                    throw ConfigError("shape '" + text + "': bad dimension '" + token +
                                      "'");
                }
                token.clear();
            } else if (c != ' ') {
                token.push_back(c);
            }
        }
        return dims;
    };
    return Shape(parse_group(body.substr(0, semi)), parse_group(body.substr(semi + 1)));
}

} // namespace tracegym
