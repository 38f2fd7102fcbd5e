// config.hpp — Key-value sweep configuration

#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tritherm/thermo.hpp"

namespace tritherm {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SweepAxis { BaseTemperature, BaseDecoherenceRate, BaseDephasingRate };

inline const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::BaseTemperature: return "T_B";
        case SweepAxis::BaseDecoherenceRate: return "Gamma_B";
        case SweepAxis::BaseDephasingRate: return "gamma0";
    }
    return "?";
}

enum class VariantSelection { Secular, Partial, Both };

inline const char* to_string(VariantSelection v) {
    switch (v) {
        case VariantSelection::Secular: return "secular";
        case VariantSelection::Partial: return "partial";
        case VariantSelection::Both: return "both";
    }
    return "?";
}

namespace output_group {
constexpr std::uint32_t kFluxes = 1u << 0;
constexpr std::uint32_t kConductances = 1u << 1;
constexpr std::uint32_t kAmplification = 1u << 2;
constexpr std::uint32_t kCoherence = 1u << 3;
constexpr std::uint32_t kAll = kFluxes | kConductances | kAmplification | kCoherence;
} // namespace output_group

// A validated sweep: one axis, a strictly increasing positive grid, and the
// fixed system/bath parameters. The axis value overrides the matching fixed
// field point by point. All scalars are in units of delta (delta = 1);
// delta_absolute only rescales emitted columns.
struct SweepPlan {
    SystemSpec system{0.0, 0.0, 1.0};
    double gamma_e{0.0};
    double gamma_c{0.0};
    double gamma_b{0.0};
    double gamma0{0.0};
    double t_e{0.0};
    double t_c{0.0};
    std::optional<double> t_b;
    SweepAxis axis{SweepAxis::BaseTemperature};
    std::vector<double> grid;
    VariantSelection variant{VariantSelection::Partial};
    std::uint32_t outputs{output_group::kAll};
    double delta_absolute{1.0};

    // Bath triple with the axis override applied at one grid value.
    BathTriple baths_at(double axis_value) const {
        double tb = t_b.value_or(axis_value);
        double gb = gamma_b;
        double g0 = gamma0;
        switch (axis) {
            case SweepAxis::BaseTemperature: tb = axis_value; break;
            case SweepAxis::BaseDecoherenceRate: gb = axis_value; break;
            case SweepAxis::BaseDephasingRate: g0 = axis_value; break;
        }
        return BathTriple{BathSpec::thermal(BathRole::Emitter, t_e, gamma_e),
                          BathSpec::thermal(BathRole::Collector, t_c, gamma_c),
                          BathSpec::base(tb, gb, g0)};
    }

    double base_temperature_at(double axis_value) const {
        return axis == SweepAxis::BaseTemperature ? axis_value : t_b.value();
    }

    std::vector<Variant> variants() const {
        switch (variant) {
            case VariantSelection::Secular: return {Variant::Secular};
            case VariantSelection::Partial: return {Variant::PartialSecular};
            case VariantSelection::Both: return {Variant::Secular, Variant::PartialSecular};
        }
        return {};
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline double parse_number(std::string_view value, const std::string& key) {
    const std::string token(trim(value));
    if (token.empty()) throw ConfigError("empty value for key '" + key + "'");
    char* end = nullptr;
    const double x = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || !std::isfinite(x))
        throw ConfigError("value for key '" + key + "' is not a finite number: '" + token + "'");
    return x;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    while (true) {
        const auto pos = s.find(sep);
        out.push_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos) break;
        s.remove_prefix(pos + 1);
    }
    return out;
}

} // namespace detail

// Parse a flat key = value document ('#' starts a comment). Unknown and
// duplicate keys are rejected; error messages name the offending key.
inline SweepPlan parse_config(std::string_view text) {
    static const std::set<std::string> known = {
        "eps1", "eps2", "Gamma_E", "Gamma_C", "Gamma_B", "gamma0", "T_E", "T_C", "T_B",
        "axis", "grid", "grid_min", "grid_max", "grid_points", "grid_scale",
        "variant", "outputs", "delta_absolute"};

    std::map<std::string, std::string> kv;
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        const auto nl = text.find('\n', line_start);
        std::string_view line = text.substr(line_start, nl == std::string_view::npos ? text.size() - line_start
                                                                                     : nl - line_start);
        line_start = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("malformed line (expected key = value): '" + std::string(line) + "'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("missing key before '='");
        if (!known.count(key)) throw ConfigError("unknown key '" + key + "'");
        if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'");
        kv[key] = value;
    }

    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto require_number = [&](const char* key) {
        auto v = take(key);
        if (!v) throw ConfigError(std::string("missing required key '") + key + "'");
        return detail::parse_number(*v, key);
    };
    auto check_positive = [](double x, const char* key) {
        if (!(x > 0.0)) throw ConfigError(std::string("key '") + key + "' must be > 0");
        return x;
    };
    auto check_nonnegative = [](double x, const char* key) {
        if (!(x >= 0.0)) throw ConfigError(std::string("key '") + key + "' must be >= 0");
        return x;
    };

    SweepPlan plan;
    plan.system = SystemSpec{check_positive(require_number("eps1"), "eps1"),
                             check_positive(require_number("eps2"), "eps2"), 1.0};
    plan.gamma_e = check_nonnegative(require_number("Gamma_E"), "Gamma_E");
    plan.gamma_c = check_nonnegative(require_number("Gamma_C"), "Gamma_C");
    plan.gamma_b = check_nonnegative(require_number("Gamma_B"), "Gamma_B");
    plan.gamma0 = check_nonnegative(require_number("gamma0"), "gamma0");
    plan.t_e = check_positive(require_number("T_E"), "T_E");
    plan.t_c = check_positive(require_number("T_C"), "T_C");
    if (plan.system.eps1 * plan.system.eps2 <= 1.0)
        throw ConfigError("keys 'eps1','eps2': eps1*eps2 must exceed 1 (both dressed levels above ground)");

    const auto axis = take("axis");
    if (!axis) throw ConfigError("missing required key 'axis'");
    if (*axis == "T_B") plan.axis = SweepAxis::BaseTemperature;
    else if (*axis == "Gamma_B") plan.axis = SweepAxis::BaseDecoherenceRate;
    else if (*axis == "gamma0") plan.axis = SweepAxis::BaseDephasingRate;
    else throw ConfigError("key 'axis' must be one of T_B, Gamma_B, gamma0 (got '" + *axis + "')");

    if (auto tb = take("T_B")) plan.t_b = check_positive(detail::parse_number(*tb, "T_B"), "T_B");
    if (plan.axis != SweepAxis::BaseTemperature && !plan.t_b)
        throw ConfigError("key 'T_B' is required when axis is not T_B");

    const auto grid = take("grid");
    const auto gmin = take("grid_min");
    const auto gmax = take("grid_max");
    const auto gpts = take("grid_points");
    const auto gscale = take("grid_scale");
    if (grid && (gmin || gmax || gpts))
        throw ConfigError("key 'grid' conflicts with grid_min/grid_max/grid_points");
    if (grid) {
        if (gscale) throw ConfigError("key 'grid_scale' requires grid_min/grid_max/grid_points");
        for (auto item : detail::split(*grid, ','))
            plan.grid.push_back(detail::parse_number(item, "grid"));
    } else if (gmin && gmax && gpts) {
        const double lo = detail::parse_number(*gmin, "grid_min");
        const double hi = detail::parse_number(*gmax, "grid_max");
        const double ptsd = detail::parse_number(*gpts, "grid_points");
        const int pts = static_cast<int>(ptsd);
        if (pts != ptsd || pts < 1) throw ConfigError("key 'grid_points' must be a positive integer");
        if (lo > hi) throw ConfigError("key 'grid_min' must not exceed grid_max");
        if (pts == 1) {
            if (lo != hi) throw ConfigError("key 'grid_points' = 1 requires grid_min == grid_max");
            plan.grid.push_back(lo);
        } else {
            if (lo == hi) throw ConfigError("key 'grid_min' must differ from grid_max when grid_points > 1");
            const bool log_scale = gscale && *gscale == "log";
            if (gscale && *gscale != "log" && *gscale != "linear")
                throw ConfigError("key 'grid_scale' must be linear or log (got '" + *gscale + "')");
            if (log_scale && lo <= 0.0) throw ConfigError("key 'grid_scale' = log requires grid_min > 0");
            for (int i = 0; i < pts; ++i) {
                const double t = static_cast<double>(i) / (pts - 1);
                plan.grid.push_back(log_scale ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
            }
        }
    } else {
        throw ConfigError("missing grid: provide 'grid' or grid_min/grid_max/grid_points");
    }
    if (plan.grid.empty()) throw ConfigError("key 'grid' must contain at least one value");
    for (std::size_t i = 0; i < plan.grid.size(); ++i) {
        if (!(plan.grid[i] > 0.0)) throw ConfigError("key 'grid': all values must be > 0");
        if (i > 0 && !(plan.grid[i] > plan.grid[i - 1]))
            throw ConfigError("key 'grid': values must be strictly increasing");
    }

    if (auto v = take("variant")) {
        if (*v == "secular") plan.variant = VariantSelection::Secular;
        else if (*v == "partial") plan.variant = VariantSelection::Partial;
        else if (*v == "both") plan.variant = VariantSelection::Both;
        else throw ConfigError("key 'variant' must be secular, partial, or both (got '" + *v + "')");
    }

    if (auto v = take("outputs")) {
        plan.outputs = 0;
        for (auto item : detail::split(*v, ',')) {
            if (item == "fluxes") plan.outputs |= output_group::kFluxes;
            else if (item == "conductances") plan.outputs |= output_group::kConductances;
            else if (item == "amplification") plan.outputs |= output_group::kAmplification;
            else if (item == "coherence") plan.outputs |= output_group::kCoherence;
            else throw ConfigError("key 'outputs': unknown group '" + std::string(item) + "'");
        }
        if (plan.outputs == 0) throw ConfigError("key 'outputs' must select at least one group");
    }

    if (auto v = take("delta_absolute"))
        plan.delta_absolute = check_positive(detail::parse_number(*v, "delta_absolute"), "delta_absolute");

    return plan;
}

} // namespace tritherm
