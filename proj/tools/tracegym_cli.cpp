#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tracegym/errors.hpp"
#include "tracegym/inequalities.hpp"
#include "tracegym/pinching.hpp"
#include "tracegym/random_tensors.hpp"
#include "tracegym/rng.hpp"
#include "tracegym/suite.hpp"
#include "tracegym/tensor_io.hpp"

namespace {

using namespace tracegym;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void emit(const nlohmann::ordered_json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        save_json_file(out_path, j);
    }
}

std::vector<RandomTensorModel> load_models(const std::string& path) {
    nlohmann::json j = load_json_file(path);
    if (j.is_object() && j.contains("models")) j = j.at("models");
    if (!j.is_array() || j.empty()) {
        throw IoError("models file '" + path + "' needs a nonempty array of model specs");
    }
    std::vector<RandomTensorModel> models;
    for (const auto& jm : j) models.push_back(model_from_json(jm));
    return models;
}

std::vector<DenseTensor> load_tensor_list(const std::string& path) {
    nlohmann::json j = load_json_file(path);
    if (j.is_object() && j.contains("tensors")) j = j.at("tensors");
    if (!j.is_array() || j.empty()) {
        throw IoError("inputs file '" + path + "' needs a nonempty array of tensors");
    }
    std::vector<DenseTensor> tensors;
    for (const auto& jt : j) tensors.push_back(tensor_from_json(jt));
    return tensors;
}

struct SuiteArgs {
    std::string name;
    std::uint64_t seed = 1;
    int instances = 0;
    double quad_budget = 1e-6;
    int threads = 0;
    std::string out_dir;
    std::string models_file;
    bool print_reports = false;
};

int run_suite_cmd(const SuiteArgs& args) {
    SuiteConfig cfg;
    cfg.suite = args.name;
    cfg.seed = args.seed;
    cfg.instances = args.instances;
    cfg.quad_budget = args.quad_budget;
    cfg.threads = args.threads;
    if (!args.models_file.empty()) cfg.models = load_models(args.models_file);

    const SuiteResult result = run_suite(cfg);
    if (!args.out_dir.empty()) write_suite_outputs(result, args.out_dir);
    if (args.print_reports) {
        std::cout << result.to_json().dump(2) << '\n';
    } else {
        const SuiteSummary s = result.summary();
        ordered_json line{{"suite", result.suite},
                          {"reports", static_cast<std::int64_t>(result.reports.size())},
                          {"pass", s.pass},
                          {"fail", s.fail},
                          {"equality", s.equality},
                          {"numerical_errors", s.numerical_errors},
                          {"wall_time_ms", result.wall_time_ms}};
        std::cout << line.dump(2) << '\n';
    }
    return result.exit_code();
}

struct CheckArgs {
    std::string name;
    std::string inputs_file;
    std::string shape = "(2;2)";
    int n = 2;
    std::uint64_t seed = 1;
    double r = 0.5;
    double q = 1.0;
    double theta = 0.5;
    double p = 2.0;
    double quad_budget = 1e-6;
    std::string variant = "display";
    std::string out_path;
};

std::vector<DenseTensor> check_inputs(const CheckArgs& args) {
    if (!args.inputs_file.empty()) return load_tensor_list(args.inputs_file);
    if (args.n < 1) throw ConfigError("check: --n must be at least 1");
    const Shape shape = shape_from_string(args.shape);
    CounterRng rng(args.seed, 0);
    std::vector<DenseTensor> tensors;
    const int count = (args.name == "gt-two" || args.name == "alt-two") ? 2 : args.n;
    for (int k = 0; k < count; ++k) {
        if (args.name == "gt-two" || args.name == "gt-multi") {
            tensors.push_back(draw_hermitian(shape, rng));
        } else if (args.name == "gt-general") {
            tensors.push_back(0.5 * draw_ginibre(shape, rng));
        } else {
            tensors.push_back(draw_positive_definite(shape, rng));
        }
    }
    if (args.name == "log-trace" && !tensors.empty()) {
        tensors[0] = (1.0 / trace(tensors[0]).real()) * tensors[0];
    }
    return tensors;
}

int run_check_cmd(const CheckArgs& args) {
    const std::vector<DenseTensor> inputs = check_inputs(args);
    InequalityReport rep;
    if (args.name == "gt-two") {
        if (inputs.size() != 2) throw ConfigError("gt-two needs exactly 2 tensors");
        rep = check_gt_two(inputs[0], inputs[1]);
    } else if (args.name == "alt-two") {
        if (inputs.size() != 2) throw ConfigError("alt-two needs exactly 2 tensors");
        rep = check_alt_two(inputs[0], inputs[1], args.r, args.q);
    } else if (args.name == "alt-multi") {
        rep = check_alt_multi(inputs, args.theta, args.p,
                              build_quadrature(args.theta, args.quad_budget));
    } else if (args.name == "gt-multi") {
        rep = check_gt_multi(inputs, args.p, build_quadrature(0.0, args.quad_budget));
    } else if (args.name == "gt-general") {
        rep = check_gt_general(inputs, args.p, build_quadrature(0.0, args.quad_budget));
    } else if (args.name == "log-trace") {
        const LogTraceVariant variant = args.variant == "proof"
                                            ? LogTraceVariant::proof
                                            : LogTraceVariant::display;
        rep = check_log_trace_multi(inputs, args.q,
                                    build_quadrature(0.0, args.quad_budget), variant);
    } else {
        throw ConfigError("unknown check '" + args.name + "'");
    }
    emit(to_json(rep), args.out_path);
    return rep.verdict == Verdict::fail ? kExitFail : kExitOk;
}

struct PinchArgs {
    std::string h_file;
    std::string x_file;
    bool integral = false;
    double budget = 1e-6;
    std::string out_path;
};

int run_pinch_cmd(const PinchArgs& args) {
    const DenseTensor h = load_tensor(args.h_file);
    const DenseTensor x = load_tensor(args.x_file);
    DenseTensor result;
    if (args.integral) {
        PinchIntegralOptions opts;
        opts.error_budget = args.budget;
        result = pinch_via_integral(h, x, opts);
    } else {
        result = pinch(h, x);
    }
    emit(tensor_to_json(result), args.out_path);
    return kExitOk;
}

struct TailArgs {
    std::string kind;
    std::string models_file;
    double zeta = 1.0;
    std::string mode = "matricized";
    std::int64_t empirical = 0;
    std::uint64_t seed = 1;
    double quad_budget = 1e-6;
    std::string out_path;
};

int run_tail_cmd(const TailArgs& args) {
    const std::vector<RandomTensorModel> models = load_models(args.models_file);
    TailOptions opts;
    opts.seed = args.seed;
    if (args.mode == "modewise") {
        opts.mode = DimConstantMode::modewise;
    } else if (args.mode == "matricized") {
        opts.mode = DimConstantMode::matricized;
    } else {
        throw ConfigError("tail: --mode must be 'modewise' or 'matricized'");
    }
    TailBoundReport rep;
    if (args.kind == "laplace") {
        rep = laplace_tail_bound(models.front(), args.zeta, opts);
    } else {
        rep = master_tail_bound(models, args.zeta,
                                build_quadrature(0.0, args.quad_budget), opts);
    }
    if (args.empirical > 0) {
        const EmpiricalTail emp =
            empirical_tail(models, args.zeta, args.empirical, args.seed);
        rep.empirical = emp.estimate;
        rep.cp_upper = emp.cp_upper;
        rep.n_trials = emp.n_trials;
        rep.enumerated = emp.enumerated;
    }
    emit(to_json(rep), args.out_path);
    return kExitOk;
}

struct GenArgs {
    std::string shape = "(2;2)";
    std::string kind = "hermitian";
    std::uint64_t seed = 1;
    std::string out_path;
};

int run_gen_cmd(const GenArgs& args) {
    const Shape shape = shape_from_string(args.shape);
    CounterRng rng(args.seed, 0);
    DenseTensor t;
    if (args.kind == "hermitian") t = draw_hermitian(shape, rng);
    else if (args.kind == "pd") t = draw_positive_definite(shape, rng);
    else if (args.kind == "ginibre") t = draw_ginibre(shape, rng);
    else if (args.kind == "unitary") t = draw_unitary(shape, rng);
    else throw ConfigError("gen: --kind must be hermitian, pd, ginibre or unitary");
    emit(tensor_to_json(t), args.out_path);
    return kExitOk;
}

struct EigcountArgs {
    std::string input_file;
    int m_max = 3;
    std::string out_path;
};

int run_eigcount_cmd(const EigcountArgs& args) {
    const DenseTensor a = load_tensor(args.input_file);
    ordered_json rows = ordered_json::array();
    for (const EigcountRow& row : eigcount_growth(a, args.m_max)) {
        rows.push_back(ordered_json{{"m", row.m},
                                    {"count", row.count},
                                    {"bound", row.bound}});
    }
    emit(ordered_json{{"rows", std::move(rows)}}, args.out_path);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"trace inequality workbench for Einstein-product tensors"};
    app.require_subcommand(1);

    SuiteArgs suite_args;
    CLI::App* suite_cmd = app.add_subcommand("suite", "run a named report suite");
    suite_cmd->add_option("name", suite_args.name, "suite name")->required();
    suite_cmd->add_option("--seed", suite_args.seed, "base RNG seed");
    suite_cmd->add_option("--instances", suite_args.instances,
                          "primary instance count (0 = suite default)");
    suite_cmd->add_option("--quad-budget", suite_args.quad_budget,
                          "quadrature error budget");
    suite_cmd->add_option("--threads", suite_args.threads,
                          "worker threads (0 = TRACEGYM_THREADS or 1)");
    suite_cmd->add_option("--out", suite_args.out_dir, "directory for JSON/CSV output");
    suite_cmd->add_option("--models", suite_args.models_file,
                          "model file for the tails suite");
    suite_cmd->add_flag("--print-reports", suite_args.print_reports,
                        "print the full report JSON to stdout");

    CheckArgs check_args;
    CLI::App* check_cmd = app.add_subcommand("check", "check one inequality instance");
    check_cmd->add_option("name", check_args.name,
                          "gt-two|alt-two|alt-multi|gt-multi|gt-general|log-trace")
        ->required();
    check_cmd->add_option("--inputs", check_args.inputs_file,
                          "JSON file with the input tensors");
    check_cmd->add_option("--shape", check_args.shape, "shape for random inputs");
    check_cmd->add_option("--n", check_args.n, "factor count for random inputs");
    check_cmd->add_option("--seed", check_args.seed, "seed for random inputs");
    check_cmd->add_option("--r", check_args.r, "alt-two exponent r");
    check_cmd->add_option("--q", check_args.q, "trace power q");
    check_cmd->add_option("--theta", check_args.theta, "interpolation parameter");
    check_cmd->add_option("--p", check_args.p, "Schatten order p");
    check_cmd->add_option("--quad-budget", check_args.quad_budget,
                          "quadrature error budget");
    check_cmd->add_option("--variant", check_args.variant,
                          "log-trace variant: display|proof");
    check_cmd->add_option("--out", check_args.out_path, "write the report here");

    PinchArgs pinch_args;
    CLI::App* pinch_cmd = app.add_subcommand("pinch", "apply the pinching map");
    pinch_cmd->add_option("--herm", pinch_args.h_file, "Hermitian tensor file")
        ->required();
    pinch_cmd->add_option("--x", pinch_args.x_file, "tensor to pinch")->required();
    pinch_cmd->add_flag("--integral", pinch_args.integral,
                        "use the smoothing-integral representation");
    pinch_cmd->add_option("--budget", pinch_args.budget, "integral error budget");
    pinch_cmd->add_option("--out", pinch_args.out_path, "write the result here");

    TailArgs tail_args;
    CLI::App* tail_cmd = app.add_subcommand("tail", "evaluate a tail bound");
    tail_cmd->add_option("kind", tail_args.kind, "laplace|master")
        ->required()
        ->check(CLI::IsMember({"laplace", "master"}));
    tail_cmd->add_option("--models", tail_args.models_file, "model file")
        ->required();
    tail_cmd->add_option("--zeta", tail_args.zeta, "threshold")->required();
    tail_cmd->add_option("--mode", tail_args.mode, "modewise|matricized");
    tail_cmd->add_option("--empirical", tail_args.empirical,
                         "also estimate the tail with this many trials");
    tail_cmd->add_option("--seed", tail_args.seed, "seed");
    tail_cmd->add_option("--quad-budget", tail_args.quad_budget,
                         "quadrature error budget");
    tail_cmd->add_option("--out", tail_args.out_path, "write the report here");

    GenArgs gen_args;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a random tensor file");
    gen_cmd->add_option("--shape", gen_args.shape, "tensor shape");
    gen_cmd->add_option("--kind", gen_args.kind, "hermitian|pd|ginibre|unitary");
    gen_cmd->add_option("--seed", gen_args.seed, "seed");
    gen_cmd->add_option("--out", gen_args.out_path, "write the tensor here");

    EigcountArgs eig_args;
    CLI::App* eig_cmd =
        app.add_subcommand("eigcount", "distinct-eigenvalue growth of Kronecker powers");
    eig_cmd->add_option("--input", eig_args.input_file, "tensor file")->required();
    eig_cmd->add_option("--m-max", eig_args.m_max, "largest Kronecker power");
    eig_cmd->add_option("--out", eig_args.out_path, "write the table here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (suite_cmd->parsed()) return run_suite_cmd(suite_args);
        if (check_cmd->parsed()) return run_check_cmd(check_args);
        if (pinch_cmd->parsed()) return run_pinch_cmd(pinch_args);
        if (tail_cmd->parsed()) return run_tail_cmd(tail_args);
        if (gen_cmd->parsed()) return run_gen_cmd(gen_args);
        if (eig_cmd->parsed()) return run_eigcount_cmd(eig_args);
        std::cerr << "no subcommand given\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ShapeError& e) {
        std::cerr << "shape error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const HermitianityError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
