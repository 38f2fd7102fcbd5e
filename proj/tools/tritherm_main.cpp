// tritherm_main.cpp — CLI for steady states, sweeps, divergence search, validation

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "tritherm/io.hpp"

namespace {

using namespace tritherm;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitIo = 3;

struct CommonOptions {
    std::string config_path;
    std::string format = "csv";
    std::string output = "-";
    std::string variant; // empty: use config
    unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_threads) {
    cmd->add_option("--config", opt.config_path, "configuration file")->required();
    cmd->add_option("--format", opt.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output", opt.output, "output path, or - for stdout");
    cmd->add_option("--variant", opt.variant, "generator variant")
        ->check(CLI::IsMember({"secular", "partial", "both"}));
    if (with_threads) cmd->add_option("--threads", opt.threads, "worker threads (0 = hardware)");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw std::ios_base::failure("cannot read config file: " + path);
    return ss.str();
}

class OutputStream {
  public:
    explicit OutputStream(const std::string& path) {
        if (path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::ios_base::failure("cannot open output file: " + path);
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }
    void finish() {
        get().flush();
        if (!get()) throw std::ios_base::failure("write failure on output stream");
    }

  private:
    std::ofstream file_;
};

SweepPlan load_plan(const CommonOptions& opt) {
    SweepPlan plan = parse_config(read_file(opt.config_path));
    if (opt.variant == "secular") plan.variant = VariantSelection::Secular;
    else if (opt.variant == "partial") plan.variant = VariantSelection::Partial;
    else if (opt.variant == "both") plan.variant = VariantSelection::Both;
    return plan;
}

OutputFormat parse_format(const std::string& f) {
    return f == "json" ? OutputFormat::Json : OutputFormat::Csv;
}

double point_base_temperature(const SweepPlan& plan) {
    if (plan.t_b) return *plan.t_b;
    if (plan.axis == SweepAxis::BaseTemperature) return plan.grid.front();
    throw ConfigError("key 'T_B' is required for single-point commands");
}

nlohmann::json matrix_json(const Matrix3c& m) {
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) {
        nlohmann::json re_row = nlohmann::json::array();
        nlohmann::json im_row = nlohmann::json::array();
        for (int j = 0; j < 3; ++j) {
            re_row.push_back(m(i, j).real());
            im_row.push_back(m(i, j).imag());
        }
        re.push_back(re_row);
        im.push_back(im_row);
    }
    return nlohmann::json{{"re", re}, {"im", im}};
}

int run_steady(const CommonOptions& opt) {
    const SweepPlan plan = load_plan(opt);
    const double tb = point_base_temperature(plan);

    SweepPlan point = plan;
    point.axis = SweepAxis::BaseTemperature;
    point.grid = {tb};
    point.t_b = tb;

    OutputStream out(opt.output);
    if (parse_format(opt.format) == OutputFormat::Csv) {
        std::vector<SweepRow> rows;
        for (Variant v : point.variants()) {
            SweepRow row = compute_row(point, tb, v);
            if (!row.ok() && row.status != "first_law_tolerance" && row.status != "sum_rule_tolerance") {
                std::cerr << "solver failed: " << row.status << "\n";
                return kExitSolver;
            }
            rows.push_back(std::move(row));
        }
        emit(point, rows, OutputFormat::Csv, out.get());
        out.finish();
        return kExitOk;
    }

    nlohmann::json doc;
    doc["schema_version"] = "1";
    doc["config"] = config_echo(plan);
    const DressedBasis d = dress(point.system);
    doc["dressed"] = {{"theta", d.theta},
                      {"eps_plus", d.eps_plus},
                      {"eps_minus", d.eps_minus},
                      {"omega", d.omega}};
    auto points = nlohmann::json::array();
    for (Variant v : point.variants()) {
        const BathTriple baths = point.baths_at(tb);
        const Liouvillian l = assemble(point.system, baths, v);
        const SteadySolution sol = steady_state(l);
        const FluxBreakdown trace = flux_trace(l, sol.rho);
        const FluxBreakdown closed = flux_closed(point.system, baths, sol.rho);
        const FluxCrossCheck cc = cross_check_fluxes(point.system, baths, l, sol.rho);
        const TransistorMetrics metrics = conductances(point.system, baths, v, tb);
        const Complex rho12 = local_coherence(sol.rho, l.basis);

        nlohmann::json p;
        p["variant"] = to_string(v);
        p["rho_dressed"] = matrix_json(sol.rho.entries);
        p["rho_local"] = matrix_json(sol.rho.in_basis(StateBasis::Local, l.basis).entries);
        p["fluxes"] = {{"trace", {{"J_E", trace.total[kEmitter]},
                                  {"J_C", trace.total[kCollector]},
                                  {"J_B", trace.total[kBase]}}},
                       {"closed", {{"J_E", closed.total[kEmitter]},
                                   {"J_E1", closed.population[kEmitter]},
                                   {"J_E2", closed.coherence[kEmitter]},
                                   {"J_C", closed.total[kCollector]},
                                   {"J_C1", closed.population[kCollector]},
                                   {"J_C2", closed.coherence[kCollector]},
                                   {"J_B", closed.total[kBase]},
                                   {"J_B1", closed.population[kBase]},
                                   {"J_B2", closed.coherence[kBase]}}}};
        p["conductances"] = {{"sigma_E", metrics.sigma[kEmitter]},
                             {"sigma_C", metrics.sigma[kCollector]},
                             {"sigma_B", metrics.sigma[kBase]},
                             {"sigma_E1", metrics.sigma_population[kEmitter]},
                             {"sigma_E2", metrics.sigma_coherence[kEmitter]},
                             {"sigma_C1", metrics.sigma_population[kCollector]},
                             {"sigma_C2", metrics.sigma_coherence[kCollector]},
                             {"sigma_B1", metrics.sigma_population[kBase]},
                             {"sigma_B2", metrics.sigma_coherence[kBase]},
                             {"ndtr", metrics.ndtr}};
        p["amplification"] = {{"alpha_E", json_value(metrics.alpha_e)},
                              {"alpha_C", json_value(metrics.alpha_c)},
                              {"divergent", metrics.alpha_divergent}};
        p["coherence"] = {{"re", rho12.real()}, {"im", rho12.imag()}, {"abs", std::abs(rho12)}};
        p["residuals"] = {{"solver", sol.residual},
                          {"first_law", trace.first_law_rel()},
                          {"sum_rule", metrics.sum_rule_residual},
                          {"sum_rule_bound", metrics.sum_rule_bound()}};
        p["entropy_production"] = entropy_production(trace, baths);
        p["flux_cross_check"] = {{"rel_dev_E", cc.rel_deviation[kEmitter]},
                                 {"rel_dev_C", cc.rel_deviation[kCollector]},
                                 {"rel_dev_B", cc.rel_deviation[kBase]},
                                 {"base_identity_residual", cc.base_identity_residual},
                                 {"within_tol", cc.within_tol}};
        points.push_back(std::move(p));
    }
    doc["points"] = points;
    out.get() << doc.dump(2) << "\n";
    out.finish();
    return kExitOk;
}

int run_sweep_cmd(const CommonOptions& opt) {
    const SweepPlan plan = load_plan(opt);
    const auto rows = run_sweep(plan, opt.threads);
    OutputStream out(opt.output);
    emit(plan, rows, parse_format(opt.format), out.get());
    out.finish();
    return kExitOk;
}

int run_find_divergence(const CommonOptions& opt) {
    SweepPlan plan = load_plan(opt);
    if (opt.variant.empty()) plan.variant = VariantSelection::Both; // always report both by default
    if (plan.axis == SweepAxis::BaseDephasingRate)
        throw ConfigError("find-divergence supports axis T_B or Gamma_B");
    const SweepVariable var = plan.axis == SweepAxis::BaseTemperature ? SweepVariable::BaseTemperature
                                                                      : SweepVariable::BaseDecoherenceRate;
    const double lo = plan.grid.front();
    const double hi = plan.grid.back();
    if (!(hi > lo)) throw ConfigError("find-divergence needs a bracket: grid with at least two values");

    struct RootResult {
        Variant variant;
        double root;
        double sigma_b;
        std::string status;
    };
    std::vector<RootResult> results;
    const double tb_fixed = plan.axis == SweepAxis::BaseTemperature ? 0.0 : point_base_temperature(plan);
    for (Variant v : plan.variants()) {
        RootResult r{v, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), "ok"};
        const BathTriple baths = plan.baths_at(plan.grid.front());
        try {
            r.root = find_sigma_b_zero(plan.system, baths, v, var, lo, hi);
            const BathTriple at_root = (var == SweepVariable::BaseTemperature)
                                           ? detail::with_base_temperature(baths, r.root)
                                           : detail::with_base_gamma(baths, r.root);
            const double tb = var == SweepVariable::BaseTemperature ? r.root : tb_fixed;
            r.sigma_b = conductances(plan.system, at_root, v, tb).sigma[kBase];
        } catch (const NoSignChangeError&) {
            r.status = "no_sign_change";
        }
        results.push_back(r);
    }

    OutputStream out(opt.output);
    if (parse_format(opt.format) == OutputFormat::Csv) {
        out.get() << "axis,bracket_lo,bracket_hi,variant,root,sigma_B_at_root,status\n";
        for (const auto& r : results)
            out.get() << to_string(plan.axis) << ',' << format_value(lo * plan.delta_absolute) << ','
                      << format_value(hi * plan.delta_absolute) << ',' << to_string(r.variant) << ','
                      << format_value(r.root * plan.delta_absolute) << ','
                      << format_value(r.sigma_b * plan.delta_absolute) << ',' << r.status << "\n";
    } else {
        nlohmann::json doc;
        doc["schema_version"] = "1";
        doc["config"] = config_echo(plan);
        nlohmann::json roots = nlohmann::json::array();
        for (const auto& r : results)
            roots.push_back({{"variant", to_string(r.variant)},
                             {"root", json_value(r.root * plan.delta_absolute)},
                             {"sigma_B_at_root", json_value(r.sigma_b * plan.delta_absolute)},
                             {"status", r.status}});
        doc["divergence"] = {{"axis", to_string(plan.axis)},
                             {"bracket", {lo * plan.delta_absolute, hi * plan.delta_absolute}},
                             {"roots", roots}};
        out.get() << doc.dump(2) << "\n";
    }
    out.finish();
    return kExitOk;
}

int run_validate(const CommonOptions& opt) {
    const SweepPlan plan = load_plan(opt);
    const double tb = point_base_temperature(plan);
    OutputStream out(opt.output);
    std::ostream& os = out.get();
    bool failed = false;
    auto check = [&](bool ok, const std::string& what) {
        os << (ok ? "[ok]   " : "[fail] ") << what << "\n";
        if (!ok) failed = true;
    };
    auto info = [&](const std::string& what) { os << "[info] " << what << "\n"; };

    const DressedBasis d = dress(plan.system);
    {
        std::ostringstream ss;
        ss.precision(12);
        ss << "dressed basis: theta=" << d.theta << " eps_plus=" << d.eps_plus << " eps_minus=" << d.eps_minus
           << " omega=" << d.omega;
        info(ss.str());
    }

    const BathTriple baths = [&] {
        SweepPlan p = plan;
        p.t_b = tb;
        return p.baths_at(plan.axis == SweepAxis::BaseTemperature ? tb : plan.grid.front());
    }();

    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto random_hermitian = [&] {
        Matrix3c m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = Complex(unit(rng), unit(rng));
        return Matrix3c(0.5 * (m + m.adjoint()));
    };

    // detailed balance of the rate function
    {
        double worst = 0.0;
        std::uniform_real_distribution<double> vdist(0.1, 20.0);
        std::uniform_real_distribution<double> tdist(1.0, 500.0);
        for (int k = 0; k < 20; ++k) {
            const double v = vdist(rng);
            const double t = tdist(rng);
            const RateFunction rf(BathSpec::thermal(BathRole::Emitter, t, 1.0));
            worst = std::max(worst, std::abs(rf.at(v) / rf.at(-v) - std::exp(v / t)) / std::exp(v / t));
        }
        check(worst < 1e-12, "detailed balance gamma(v)/gamma(-v) = exp(v/T), worst rel dev " + format_value(worst));
    }

    for (Variant v : plan.variants()) {
        const std::string tag = std::string("[") + to_string(v) + "] ";
        try {
            const Liouvillian l = assemble(plan.system, baths, v);
            Vector9c id_vec = Vector9c::Zero();
            id_vec(0) = id_vec(4) = id_vec(8) = 1.0;
            const double trace_pres = (id_vec.transpose() * l.matrix).cwiseAbs().maxCoeff();
            check(trace_pres < 1e-10, tag + "trace preservation |id^T L| = " + format_value(trace_pres));

            double herm = 0.0;
            for (int k = 0; k < 100; ++k) {
                const Matrix3c rho = random_hermitian();
                const Matrix3c lr = unvec(l.apply(rho));
                herm = std::max(herm, (lr - lr.adjoint()).cwiseAbs().maxCoeff());
            }
            check(herm < 1e-10, tag + "hermiticity preservation on 100 random states, max dev " + format_value(herm));

            const SteadySolution sol = steady_state(l);
            check(sol.residual < 1e-10, tag + "steady residual " + format_value(sol.residual));
            check(sol.min_eigenvalue > -1e-9, tag + "positivity, min eigenvalue " + format_value(sol.min_eigenvalue));

            const FluxBreakdown trace = flux_trace(l, sol.rho);
            check(trace.first_law_rel() <= 1e-10, tag + "first law relative residual " + format_value(trace.first_law_rel()));

            const TransistorMetrics m = conductances(plan.system, baths, v, tb);
            const double bound = m.sum_rule_bound();
            check(m.sum_rule_residual <= bound, tag + "conductance sum rule |sum sigma| = "
                                                    + format_value(m.sum_rule_residual) + " <= " + format_value(bound));
            if (!m.alpha_divergent)
                check(m.alpha_c == -1.0 - m.alpha_e, tag + "amplification identity alpha_E + alpha_C = -1");
            else
                info(tag + "amplification divergent at this point (sigma_B ~ 0)");

            const double sprod = entropy_production(trace, baths);
            const double entropy_floor = v == Variant::Secular ? -1e-10 : -1e-8;
            check(sprod >= entropy_floor, tag + "entropy production " + format_value(sprod));

            const FluxCrossCheck cc = cross_check_fluxes(plan.system, baths, l, sol.rho);
            check(cc.base_identity_residual < 1e-10 * std::max(1.0, std::abs(cc.trace.total[kBase])),
                  tag + "base flux identity residual " + format_value(cc.base_identity_residual));
            std::istringstream rep(cc.report());
            std::string line;
            while (std::getline(rep, line)) info(tag + line);
        } catch (const SolverError& e) {
            check(false, tag + std::string("solver: ") + e.what());
        }
    }
    out.finish();
    return failed ? kExitSolver : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"three-level thermal transistor simulator"};
    app.require_subcommand(1);

    CommonOptions steady_opt, sweep_opt, div_opt, val_opt;
    CLI::App* cmd_steady = app.add_subcommand("steady", "full report at a single operating point");
    add_common(cmd_steady, steady_opt, false);
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "evaluate the configured grid");
    add_common(cmd_sweep, sweep_opt, true);
    CLI::App* cmd_div = app.add_subcommand("find-divergence", "locate the sigma_B zero where amplification diverges");
    add_common(cmd_div, div_opt, false);
    CLI::App* cmd_val = app.add_subcommand("validate", "run the invariant checks on a configuration");
    add_common(cmd_val, val_opt, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (cmd_steady->parsed()) return run_steady(steady_opt);
        if (cmd_sweep->parsed()) return run_sweep_cmd(sweep_opt);
        if (cmd_div->parsed()) return run_find_divergence(div_opt);
        if (cmd_val->parsed()) return run_validate(val_opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const NoSignChangeError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitConfig;
}
