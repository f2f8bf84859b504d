#include "tracegym/report.hpp"

#include <cmath>
#include <sstream>

namespace tracegym {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::equality: return "equality";
    }
    return "?";
}

Verdict judge(double margin, double tolerance) {
    if (std::abs(margin) <= tolerance) return Verdict::equality;
    return margin > 0 ? Verdict::pass : Verdict::fail;
}

InequalityReport make_report(std::string name, double lhs, double rhs,
                             double quad_budget) {
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
        throw NumericalError("report '" + name + "': non-finite side (lhs = " +
                             std::to_string(lhs) + ", rhs = " + std::to_string(rhs) + ")");
    }
    InequalityReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.tolerance = 1e-7 * (1.0 + std::abs(lhs) + std::abs(rhs)) + quad_budget;
    r.verdict = judge(r.margin, r.tolerance);
    return r;
}

namespace {

ordered_json quad_json(const QuadInfo& q) {
    return ordered_json{{"theta", q.theta},
                        {"half_width", q.half_width},
                        {"nodes", q.node_count},
                        {"captured_mass", q.captured_mass},
                        {"error_budget", q.error_budget}};
}

QuadInfo quad_from_json(const ordered_json& j) {
    QuadInfo q;
    q.theta = j.at("theta").get<double>();
    q.half_width = j.at("half_width").get<double>();
    q.node_count = j.at("nodes").get<std::int64_t>();
    q.captured_mass = j.at("captured_mass").get<double>();
    q.error_budget = j.at("error_budget").get<double>();
    return q;
}

std::string format_opt(const std::optional<double>& v) {
    if (!v) return "";
    std::ostringstream os;
    os << *v;
    return os.str();
}

} // namespace

ordered_json to_json(const InequalityReport& r) {
    ordered_json j{{"name", r.name},
                   {"lhs", r.lhs},
                   {"rhs", r.rhs},
                   {"margin", r.margin},
                   {"tolerance", r.tolerance},
                   {"verdict", to_string(r.verdict)}};
    if (r.theta) j["theta"] = *r.theta;
    if (r.p) j["p"] = *r.p;
    if (r.q) j["q"] = *r.q;
    if (r.quad) j["quad"] = quad_json(*r.quad);
    j["instance_digest"] = r.instance_digest;
    return j;
}

InequalityReport inequality_report_from_json(const ordered_json& j) {
    InequalityReport r;
    r.name = j.at("name").get<std::string>();
    r.lhs = j.at("lhs").get<double>();
    r.rhs = j.at("rhs").get<double>();
    r.margin = j.at("margin").get<double>();
    r.tolerance = j.at("tolerance").get<double>();
    const auto v = j.at("verdict").get<std::string>();
    r.verdict = v == "pass" ? Verdict::pass : v == "fail" ? Verdict::fail : Verdict::equality;
    if (j.contains("theta")) r.theta = j["theta"].get<double>();
    if (j.contains("p")) r.p = j["p"].get<double>();
    if (j.contains("q")) r.q = j["q"].get<double>();
    if (j.contains("quad")) r.quad = quad_from_json(j["quad"]);
    if (j.contains("instance_digest")) r.instance_digest = j["instance_digest"];
    return r;
}

std::string csv_header() { return "name,theta,p,q,lhs,rhs,margin,verdict"; }

std::string csv_row(const InequalityReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << r.name << ',' << format_opt(r.theta) << ',' << format_opt(r.p) << ','
       << format_opt(r.q) << ',' << r.lhs << ',' << r.rhs << ',' << r.margin << ','
       << to_string(r.verdict);
    return os.str();
}

std::string to_string(DimConstantMode m) {
    return m == DimConstantMode::modewise ? "modewise" : "matricized";
}

ordered_json to_json(const TailBoundReport& r) {
    ordered_json j{{"name", r.name},
                   {"zeta", r.zeta},
                   {"t_star", r.t_star},
                   {"bound", r.bound},
                   {"bound_raw", r.bound_raw},
                   {"c_dim", r.c_dim},
                   {"c_dim_mode", to_string(r.mode)},
                   {"n_trials", r.n_trials},
                   {"enumerated", r.enumerated}};
    if (r.quad) j["quad"] = quad_json(*r.quad);
    if (r.empirical) j["empirical_tail"] = *r.empirical;
    if (r.cp_upper) j["clopper_pearson_upper"] = *r.cp_upper;
    j["instance_digest"] = r.instance_digest;
    return j;
}

} // namespace tracegym
