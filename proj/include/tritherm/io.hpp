// io.hpp — CSV and JSON emission of sweep results

#pragma once

#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "tritherm/sweep.hpp"

namespace tritherm {

// Full-precision decimal float; divergence sentinels as literal tokens.
inline std::string format_value(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0.0 ? "+inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline nlohmann::json json_value(double x) {
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x > 0.0 ? "+inf" : "-inf";
    return x;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace detail {

// Column layout shared by the CSV and JSON emitters. delta_absolute rescales
// the delta-normalized internal values: energies/temperatures/rates by delta,
// powers by delta^2, conductances by delta; dimensionless columns untouched.
struct Column {
    const char* name;
    std::uint32_t group; // 0 = always emitted
    double (*get)(const SweepRow&, double delta);
};

inline const std::vector<Column>& columns() {
    using output_group::kAmplification;
    using output_group::kCoherence;
    using output_group::kConductances;
    using output_group::kFluxes;
    static const std::vector<Column> cols = {
        {"axis_value", 0, [](const SweepRow& r, double d) { return r.axis_value * d; }},
        {"J_E", kFluxes, [](const SweepRow& r, double d) { return r.flux[kEmitter] * d * d; }},
        {"J_C", kFluxes, [](const SweepRow& r, double d) { return r.flux[kCollector] * d * d; }},
        {"J_B", kFluxes, [](const SweepRow& r, double d) { return r.flux[kBase] * d * d; }},
        {"J_E1", kFluxes, [](const SweepRow& r, double d) { return r.flux_population[kEmitter] * d * d; }},
        {"J_E2", kFluxes, [](const SweepRow& r, double d) { return r.flux_coherence[kEmitter] * d * d; }},
        {"J_C1", kFluxes, [](const SweepRow& r, double d) { return r.flux_population[kCollector] * d * d; }},
        {"J_C2", kFluxes, [](const SweepRow& r, double d) { return r.flux_coherence[kCollector] * d * d; }},
        {"J_B1", kFluxes, [](const SweepRow& r, double d) { return r.flux_population[kBase] * d * d; }},
        {"J_B2", kFluxes, [](const SweepRow& r, double d) { return r.flux_coherence[kBase] * d * d; }},
        {"sigma_E", kConductances, [](const SweepRow& r, double d) { return r.sigma[kEmitter] * d; }},
        {"sigma_C", kConductances, [](const SweepRow& r, double d) { return r.sigma[kCollector] * d; }},
        {"sigma_B", kConductances, [](const SweepRow& r, double d) { return r.sigma[kBase] * d; }},
        {"sigma_E1", kConductances, [](const SweepRow& r, double d) { return r.sigma_population[kEmitter] * d; }},
        {"sigma_E2", kConductances, [](const SweepRow& r, double d) { return r.sigma_coherence[kEmitter] * d; }},
        {"sigma_C1", kConductances, [](const SweepRow& r, double d) { return r.sigma_population[kCollector] * d; }},
        {"sigma_C2", kConductances, [](const SweepRow& r, double d) { return r.sigma_coherence[kCollector] * d; }},
        {"sigma_B1", kConductances, [](const SweepRow& r, double d) { return r.sigma_population[kBase] * d; }},
        {"sigma_B2", kConductances, [](const SweepRow& r, double d) { return r.sigma_coherence[kBase] * d; }},
        {"alpha_E", kAmplification, [](const SweepRow& r, double) { return r.alpha_e; }},
        {"alpha_C", kAmplification, [](const SweepRow& r, double) { return r.alpha_c; }},
        {"re_rho12", kCoherence, [](const SweepRow& r, double) { return r.re_rho12; }},
        {"abs_rho12", kCoherence, [](const SweepRow& r, double) { return r.abs_rho12; }},
        {"solver_residual", 0, [](const SweepRow& r, double) { return r.solver_residual; }},
        {"first_law_residual", 0, [](const SweepRow& r, double) { return r.first_law_residual; }},
        {"sum_rule_residual", 0, [](const SweepRow& r, double) { return r.sum_rule_residual; }},
    };
    return cols;
}

inline bool emitted(const Column& c, std::uint32_t outputs) {
    return c.group == 0 || (c.group & outputs) != 0;
}

} // namespace detail

inline std::string csv_header(const SweepPlan& plan) {
    std::string out;
    for (const auto& c : detail::columns()) {
        if (!detail::emitted(c, plan.outputs)) continue;
        if (!out.empty()) out += ',';
        out += c.name;
    }
    out += ",variant,status";
    return out;
}

inline void emit_csv(const SweepPlan& plan, const std::vector<SweepRow>& rows, std::ostream& os) {
    os << csv_header(plan) << "\n";
    for (const auto& row : rows) {
        bool first = true;
        for (const auto& c : detail::columns()) {
            if (!detail::emitted(c, plan.outputs)) continue;
            if (!first) os << ',';
            first = false;
            os << format_value(c.get(row, plan.delta_absolute));
        }
        os << ',' << to_string(row.variant) << ',' << csv_quote(row.status) << "\n";
    }
}

inline nlohmann::json config_echo(const SweepPlan& plan) {
    nlohmann::json cfg;
    cfg["eps1"] = plan.system.eps1;
    cfg["eps2"] = plan.system.eps2;
    cfg["Gamma_E"] = plan.gamma_e;
    cfg["Gamma_C"] = plan.gamma_c;
    cfg["Gamma_B"] = plan.gamma_b;
    cfg["gamma0"] = plan.gamma0;
    cfg["T_E"] = plan.t_e;
    cfg["T_C"] = plan.t_c;
    if (plan.t_b) cfg["T_B"] = *plan.t_b;
    cfg["axis"] = to_string(plan.axis);
    cfg["grid"] = plan.grid;
    cfg["variant"] = to_string(plan.variant);
    cfg["delta_absolute"] = plan.delta_absolute;
    std::vector<std::string> groups;
    if (plan.outputs & output_group::kFluxes) groups.push_back("fluxes");
    if (plan.outputs & output_group::kConductances) groups.push_back("conductances");
    if (plan.outputs & output_group::kAmplification) groups.push_back("amplification");
    if (plan.outputs & output_group::kCoherence) groups.push_back("coherence");
    cfg["outputs"] = groups;
    return cfg;
}

inline nlohmann::json row_to_json(const SweepPlan& plan, const SweepRow& row) {
    nlohmann::json j;
    for (const auto& c : detail::columns())
        if (detail::emitted(c, plan.outputs)) j[c.name] = json_value(c.get(row, plan.delta_absolute));
    j["variant"] = to_string(row.variant);
    j["status"] = row.status;
    return j;
}

inline void emit_json(const SweepPlan& plan, const std::vector<SweepRow>& rows, std::ostream& os) {
    nlohmann::json doc;
    doc["schema_version"] = "1";
    doc["config"] = config_echo(plan);
    auto arr = nlohmann::json::array();
    for (const auto& row : rows) arr.push_back(row_to_json(plan, row));
    doc["rows"] = arr;
    os << doc.dump(2) << "\n";
}

enum class OutputFormat { Csv, Json };

inline void emit(const SweepPlan& plan, const std::vector<SweepRow>& rows, OutputFormat format, std::ostream& os) {
    if (rows.empty()) throw std::invalid_argument("no rows to emit");
    if (format == OutputFormat::Csv) emit_csv(plan, rows, os);
    else emit_json(plan, rows, os);
    if (!os) throw std::runtime_error("stream write failure");
}

} // namespace tritherm
