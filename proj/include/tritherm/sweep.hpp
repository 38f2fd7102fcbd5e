// sweep.hpp — Grid evaluation of steady-state transport quantities

#pragma once

#include <atomic>
#include <thread>

#include "tritherm/config.hpp"

namespace tritherm {

// One evaluated grid point. Rows carry their own residuals; a row whose solver
// failed records the error in `status` and NaNs elsewhere, never aborting the
// sweep.
struct SweepRow {
    double axis_value{0.0};
    Variant variant{Variant::PartialSecular};
    std::array<double, 3> flux{{0.0, 0.0, 0.0}};            // trace route
    std::array<double, 3> flux_population{{0.0, 0.0, 0.0}}; // closed-form split
    std::array<double, 3> flux_coherence{{0.0, 0.0, 0.0}};
    std::array<double, 3> sigma{{0.0, 0.0, 0.0}};
    std::array<double, 3> sigma_population{{0.0, 0.0, 0.0}};
    std::array<double, 3> sigma_coherence{{0.0, 0.0, 0.0}};
    double alpha_e{0.0};
    double alpha_c{0.0};
    double re_rho12{0.0};
    double abs_rho12{0.0};
    double solver_residual{0.0};
    double first_law_residual{0.0}; // |sum J| / max |J_i|
    double sum_rule_residual{0.0};  // |sum sigma_i|
    double sum_rule_bound{0.0};     // 10x Richardson error estimate
    std::string status{"ok"};

    bool ok() const { return status == "ok"; }
};

inline SweepRow compute_row(const SweepPlan& plan, double axis_value, Variant variant) {
    SweepRow row;
    row.axis_value = axis_value;
    row.variant = variant;
    try {
        const BathTriple baths = plan.baths_at(axis_value);
        const Liouvillian l = assemble(plan.system, baths, variant);
        const SteadySolution sol = steady_state(l);
        const FluxBreakdown trace = flux_trace(l, sol.rho);
        const FluxBreakdown closed = flux_closed(plan.system, baths, sol.rho);
        const TransistorMetrics metrics =
            conductances(plan.system, baths, variant, plan.base_temperature_at(axis_value));
        const Complex rho12 = local_coherence(sol.rho, l.basis);

        row.flux = trace.total;
        row.flux_population = closed.population;
        row.flux_coherence = closed.coherence;
        row.sigma = metrics.sigma;
        row.sigma_population = metrics.sigma_population;
        row.sigma_coherence = metrics.sigma_coherence;
        row.alpha_e = metrics.alpha_e;
        row.alpha_c = metrics.alpha_c;
        row.re_rho12 = rho12.real();
        row.abs_rho12 = std::abs(rho12);
        row.solver_residual = sol.residual;
        row.first_law_residual = trace.first_law_rel();
        row.sum_rule_residual = metrics.sum_rule_residual;
        row.sum_rule_bound = metrics.sum_rule_bound();

        if (row.first_law_residual > 1e-10)
            row.status = "first_law_tolerance";
        if (row.sum_rule_residual > row.sum_rule_bound)
            row.status = "sum_rule_tolerance";
    } catch (const DegenerateKernelError&) {
        row.status = "degenerate_kernel";
    } catch (const NoConvergenceError&) {
        row.status = "no_convergence";
    } catch (const std::exception&) {
        row.status = "error";
    }
    if (!row.ok() && row.status != "first_law_tolerance" && row.status != "sum_rule_tolerance") {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.flux = row.flux_population = row.flux_coherence = {{nan, nan, nan}};
        row.sigma = row.sigma_population = row.sigma_coherence = {{nan, nan, nan}};
        row.alpha_e = row.alpha_c = row.re_rho12 = row.abs_rho12 = nan;
        row.solver_residual = row.first_law_residual = row.sum_rule_residual = nan;
    }
    return row;
}

// Rows ordered by axis value, secular before partial at the same value when
// both variants run. Grid points are independent; results do not depend on the
// thread count.
inline std::vector<SweepRow> run_sweep(const SweepPlan& plan, unsigned threads = 1) {
    const auto variants = plan.variants();
    struct Task {
        double axis_value;
        Variant variant;
    };
    std::vector<Task> tasks;
    tasks.reserve(plan.grid.size() * variants.size());
    for (double x : plan.grid)
        for (Variant v : variants)
            tasks.push_back({x, v});

    std::vector<SweepRow> rows(tasks.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(tasks.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i)
            rows[i] = compute_row(plan, tasks[i].axis_value, tasks[i].variant);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
            rows[i] = compute_row(plan, tasks[i].axis_value, tasks[i].variant);
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return rows;
}

} // namespace tritherm
