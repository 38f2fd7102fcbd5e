// helpers.hpp — Test-only oracles: RK4 time integration, secular rate
// equations, randomized parameter sets. These stay independent of the solve
// path they are used to check.

#pragma once

#include <random>

#include "tritherm/thermo.hpp"

namespace tritherm::testing {

// Long-time limit of d rho/dt = L rho by adaptive step-doubling RK4 from the
// maximally mixed state. The fixed point of the flow is a fixed point of the
// RK4 map and the stability polynomial damps every other mode, so the
// integration lands on the exact kernel direction; we stop once the time
// derivative is negligible or t_end is reached.
inline Matrix3c rk4_steady(const Liouvillian& l, double t_end = 1e4,
                           const Matrix3c& rho0 = Matrix3c(Matrix3c::Identity() / 3.0)) {
    const Matrix9c& m = l.matrix;
    Vector9c y = vec(rho0);
    auto step = [&](const Vector9c& y0, double h) {
        const Vector9c k1 = m * y0;
        const Vector9c k2 = m * (y0 + 0.5 * h * k1);
        const Vector9c k3 = m * (y0 + 0.5 * h * k2);
        const Vector9c k4 = m * (y0 + h * k3);
        return (y0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).eval();
    };
    const double row_norm = m.cwiseAbs().rowwise().sum().maxCoeff();
    const double h_max = 2.0 / row_norm; // inside the RK4 stability region
    double h = 0.5 / row_norm;
    double t = 0.0;
    while (t < t_end) {
        if ((m * y).cwiseAbs().maxCoeff() < 1e-12) break;
        const double hh = std::min(h, t_end - t);
        const Vector9c one = step(y, hh);
        const Vector9c two = step(step(y, 0.5 * hh), 0.5 * hh);
        const double err = (one - two).cwiseAbs().maxCoeff() / 15.0;
        if (err < 1e-8) {
            y = two;
            t += hh;
            if (err < 1e-10) h = std::min(2.0 * h, h_max);
        } else {
            h *= 0.5;
        }
    }
    Matrix3c rho = unvec(y);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return rho;
}

// Secular steady populations from the 3-state rate equations, solved as a 2x2
// linear system; independent of any superoperator machinery.
struct SecularPopulations {
    double p0, p_plus, p_minus;
};

inline SecularPopulations secular_populations(const SystemSpec& spec, const BathTriple& baths) {
    const DressedBasis d = dress(spec);
    const double c2 = d.cos_theta() * d.cos_theta();
    const double s2 = d.sin_theta() * d.sin_theta();
    const double sin2sq = std::pow(std::sin(2.0 * d.theta), 2);
    const BathSpec& e = find_bath(baths, BathRole::Emitter);
    const BathSpec& c = find_bath(baths, BathRole::Collector);
    const BathSpec& b = find_bath(baths, BathRole::Base);
    const double ne_p = bose_occupation(d.eps_plus, e.temperature);
    const double ne_m = bose_occupation(d.eps_minus, e.temperature);
    const double nc_p = bose_occupation(d.eps_plus, c.temperature);
    const double nc_m = bose_occupation(d.eps_minus, c.temperature);
    const double nb = bose_occupation(d.omega, b.temperature);

    const double in_p = e.gamma_wideband * ne_p * c2 + c.gamma_wideband * nc_p * s2;
    const double out_p = e.gamma_wideband * (1.0 + ne_p) * c2 + c.gamma_wideband * (1.0 + nc_p) * s2;
    const double in_m = e.gamma_wideband * ne_m * s2 + c.gamma_wideband * nc_m * c2;
    const double out_m = e.gamma_wideband * (1.0 + ne_m) * s2 + c.gamma_wideband * (1.0 + nc_m) * c2;
    const double b_dn = b.gamma_wideband * sin2sq * (1.0 + nb);
    const double b_up = b.gamma_wideband * sin2sq * nb;

    // (in_p + out_p + b_dn) p+ + (in_p - b_up) p- = in_p
    // (in_m - b_dn) p+ + (in_m + out_m + b_up) p- = in_m
    const double a11 = in_p + out_p + b_dn, a12 = in_p - b_up;
    const double a21 = in_m - b_dn, a22 = in_m + out_m + b_up;
    const double det = a11 * a22 - a12 * a21;
    const double pp = (in_p * a22 - a12 * in_m) / det;
    const double pm = (a11 * in_m - in_p * a21) / det;
    return {1.0 - pp - pm, pp, pm};
}

struct ParameterSet {
    SystemSpec system;
    BathTriple baths;
};

// Random draws over energies [1,20], temperatures [5,500], rates [0.1,3]
// (delta = 1). min_eps_minus / max_row_norm reject draws whose explicit-RK4
// stability budget would be enormous; they stress the integrator, not the
// solver under test.
inline ParameterSet random_set(std::mt19937& rng, double min_eps_minus = 0.0, double max_row_norm = 0.0) {
    std::uniform_real_distribution<double> energy(1.0, 20.0);
    std::uniform_real_distribution<double> temperature(5.0, 500.0);
    std::uniform_real_distribution<double> rate(0.1, 3.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        ParameterSet set;
        set.system = SystemSpec{energy(rng), energy(rng), 1.0};
        if (set.system.eps1 * set.system.eps2 <= 1.0) continue;
        if (min_eps_minus > 0.0 && dress(set.system).eps_minus < min_eps_minus) continue;
        set.baths = BathTriple{BathSpec::thermal(BathRole::Emitter, temperature(rng), rate(rng)),
                               BathSpec::thermal(BathRole::Collector, temperature(rng), rate(rng)),
                               BathSpec::base(temperature(rng), rate(rng), rate(rng))};
        if (max_row_norm > 0.0) {
            const Liouvillian l = assemble(set.system, set.baths, Variant::PartialSecular);
            if (l.matrix.cwiseAbs().rowwise().sum().maxCoeff() > max_row_norm) continue;
        }
        return set;
    }
    throw std::runtime_error("random_set: rejection sampling failed");
}

inline Matrix3c random_hermitian(std::mt19937& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Matrix3c m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = Complex(unit(rng), unit(rng));
    return 0.5 * (m + m.adjoint());
}

inline Matrix3c random_density(std::mt19937& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Matrix3c m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = Complex(unit(rng), unit(rng));
    Matrix3c rho = m * m.adjoint();
    rho /= rho.trace().real();
    return rho;
}

inline BathTriple reference_baths(double t_b) {
    return BathTriple{BathSpec::thermal(BathRole::Emitter, 1.0 / 0.003, 1.0),
                      BathSpec::thermal(BathRole::Collector, 1.0 / 0.15, 1.0),
                      BathSpec::base(t_b, 1.0, 1.0)};
}

inline SystemSpec reference_system() { return SystemSpec{10.0, 7.0, 1.0}; }

} // namespace tritherm::testing
