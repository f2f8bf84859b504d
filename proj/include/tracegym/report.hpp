#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "tracegym/densities.hpp"

namespace tracegym {

using ordered_json = nlohmann::ordered_json;

enum class Verdict { pass, fail, equality };

std::string to_string(Verdict v);

/// equality when |margin| <= tolerance, else pass/fail by the sign of margin.
/// pass-or-equality holds exactly when margin >= -tolerance.
Verdict judge(double margin, double tolerance);

struct QuadInfo {
    double theta = 0;
    double half_width = 0;
    std::int64_t node_count = 0;
    double captured_mass = 1;
    double error_budget = 0;

    static QuadInfo from(const QuadratureScheme& q) {
        return {q.theta, q.half_width, static_cast<std::int64_t>(q.nodes.size()),
                q.captured_mass, q.error_budget};
    }
};

/// One checked inequality instance. lhs is the side asserted <=, rhs the side
/// asserted >=, margin = rhs - lhs. The digest carries instance parameters
/// (shape, seed, exponents, flooring flags, alternate-variant margins).
struct InequalityReport {
    std::string name;
    double lhs = 0;
    double rhs = 0;
    double margin = 0;
    double tolerance = 0;
    Verdict verdict = Verdict::pass;
    std::optional<QuadInfo> quad;
    std::optional<double> theta, p, q;
    ordered_json instance_digest = ordered_json::object();
};

/// Finalizes margin/tolerance/verdict from lhs, rhs and the quadrature budget
/// (tolerance = 1e-7 * (1 + |lhs| + |rhs|) + quad_budget).
InequalityReport make_report(std::string name, double lhs, double rhs,
                             double quad_budget = 0.0);

ordered_json to_json(const InequalityReport& r);
InequalityReport inequality_report_from_json(const ordered_json& j);

/// CSV header "name,theta,p,q,lhs,rhs,margin,verdict" plus one row per report.
std::string csv_header();
std::string csv_row(const InequalityReport& r);

enum class DimConstantMode { modewise, matricized };

std::string to_string(DimConstantMode m);

/// Tail bound evaluation at one threshold. bound is clipped to 1 for
/// reporting; bound_raw keeps the unclipped infimum. empirical/cp_upper are
/// present when an empirical tail was evaluated alongside.
struct TailBoundReport {
    std::string name;
    double zeta = 0;
    double t_star = 0;
    double bound = 0;
    double bound_raw = 0;
    double c_dim = 1;
    DimConstantMode mode = DimConstantMode::matricized;
    std::optional<QuadInfo> quad;
    std::optional<double> empirical;
    std::optional<double> cp_upper;
    std::int64_t n_trials = 0;
    bool enumerated = false;
    ordered_json instance_digest = ordered_json::object();
};

ordered_json to_json(const TailBoundReport& r);

} // namespace tracegym
