// model.hpp — Three-level system, dressed basis, bath parameters, jump channels

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tritherm {

using Complex = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;

// Basis ordering is fixed throughout: local {|0>,|1>,|2>}, dressed {|0>,|+>,|->}.

namespace detail {

inline void require_finite_positive(double x, const char* name) {
    if (!std::isfinite(x) || x <= 0.0)
        throw std::invalid_argument(std::string(name) + " must be finite and > 0");
}

inline void require_finite_nonnegative(double x, const char* name) {
    if (!std::isfinite(x) || x < 0.0)
        throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
}

inline Matrix3c dyad(int i, int j) {
    Matrix3c m = Matrix3c::Zero();
    m(i, j) = Complex(1.0, 0.0);
    return m;
}

} // namespace detail

// Excited-level energies and their coupling. The ground state sits at zero and
// delta doubles as the energy unit (all reference parameter sets use delta = 1).
struct SystemSpec {
    double eps1{0.0};
    double eps2{0.0};
    double delta{1.0};

    void validate() const {
        detail::require_finite_positive(eps1, "eps1");
        detail::require_finite_positive(eps2, "eps2");
        detail::require_finite_positive(delta, "delta");
    }

    // Same physics with delta scaled to 1.
    SystemSpec normalized() const {
        validate();
        return SystemSpec{eps1 / delta, eps2 / delta, 1.0};
    }
};

enum class BathRole { Emitter, Collector, Base };

inline const char* to_string(BathRole r) {
    switch (r) {
        case BathRole::Emitter: return "emitter";
        case BathRole::Collector: return "collector";
        case BathRole::Base: return "base";
    }
    return "?";
}

// Wide-band thermal bath. The pure-dephasing rate gamma0 applies to the base only.
struct BathSpec {
    BathRole role{BathRole::Emitter};
    double temperature{1.0};
    double gamma_wideband{1.0};
    double dephasing_rate{0.0};

    static BathSpec thermal(BathRole role, double temperature, double gamma) {
        BathSpec b{role, temperature, gamma, 0.0};
        b.validate();
        return b;
    }

    static BathSpec base(double temperature, double gamma, double gamma0) {
        BathSpec b{BathRole::Base, temperature, gamma, gamma0};
        b.validate();
        return b;
    }

    void validate() const {
        detail::require_finite_positive(temperature, "temperature");
        detail::require_finite_nonnegative(gamma_wideband, "gamma_wideband");
        detail::require_finite_nonnegative(dephasing_rate, "dephasing_rate");
        if (role != BathRole::Base && dephasing_rate != 0.0)
            throw std::invalid_argument("dephasing_rate is a base-bath parameter");
    }
};

using BathTriple = std::array<BathSpec, 3>;

// Locate a role in an arbitrarily ordered triple; rejects duplicates/missing roles.
inline const BathSpec& find_bath(const BathTriple& baths, BathRole role) {
    const BathSpec* found = nullptr;
    for (const auto& b : baths) {
        if (b.role == role) {
            if (found) throw std::invalid_argument(std::string("duplicate bath role: ") + to_string(role));
            found = &b;
        }
    }
    if (!found) throw std::invalid_argument(std::string("missing bath role: ") + to_string(role));
    return *found;
}

inline void validate_baths(const BathTriple& baths) {
    for (const auto& b : baths) b.validate();
    find_bath(baths, BathRole::Emitter);
    find_bath(baths, BathRole::Collector);
    find_bath(baths, BathRole::Base);
}

// Mixing angle and eigenvalues of the excited-state block. omega is the
// dressed splitting eps_plus - eps_minus, the frequency seen by the base.
struct DressedBasis {
    double theta{0.0};
    double eps_plus{0.0};
    double eps_minus{0.0};
    double omega{0.0};

    double cos_theta() const { return std::cos(theta); }
    double sin_theta() const { return std::sin(theta); }

    // Orthogonal involution U mapping dressed components to local ones:
    // rho_local = U rho_dressed U, with U = U^T = U^{-1}.
    Matrix3c rotation() const {
        const double c = cos_theta();
        const double s = sin_theta();
        Matrix3c u = Matrix3c::Zero();
        u(0, 0) = 1.0;
        u(1, 1) = c;
        u(1, 2) = s;
        u(2, 1) = s;
        u(2, 2) = -c;
        return u;
    }
};

// H_S in the local basis: diag(0, eps1, eps2) plus delta on the (1,2)/(2,1) entries.
inline Matrix3c build_hamiltonian(const SystemSpec& spec) {
    spec.validate();
    Matrix3c h = Matrix3c::Zero();
    h(1, 1) = spec.eps1;
    h(2, 2) = spec.eps2;
    h(1, 2) = spec.delta;
    h(2, 1) = spec.delta;
    return h;
}

// Diagonalize the excited block. The atan2 branch keeps theta in (0, pi/2),
// continuous through eps1 = eps2; a sign flip here would silently negate the
// base coupling sin(2 theta).
inline DressedBasis dress(const SystemSpec& spec) {
    spec.validate();
    const double half_split = 0.5 * (spec.eps1 - spec.eps2);
    const double mean = 0.5 * (spec.eps1 + spec.eps2);
    const double r = std::hypot(half_split, spec.delta);
    DressedBasis d;
    d.theta = 0.5 * std::atan2(2.0 * spec.delta, spec.eps1 - spec.eps2);
    d.eps_plus = mean + r;
    d.eps_minus = mean - r;
    d.omega = d.eps_plus - d.eps_minus;
    if (d.eps_minus <= 0.0)
        throw std::invalid_argument("eps1*eps2 must exceed delta^2 so both dressed levels lie above the ground state");
    return d;
}

// One Lindblad channel: the downward jump operator at frequency >= 0 in the
// dressed basis, with its wide-band prefactor. The matching upward process is
// generated from the adjoint when the dissipator is assembled.
struct JumpChannel {
    BathRole bath{BathRole::Emitter};
    double frequency{0.0};
    Matrix3c op;
    double base_rate{0.0};
};

// Expand the local coupling operators in the dressed basis:
//   |0><1| = cos(th)|0><+| + sin(th)|0><-|
//   |0><2| = sin(th)|0><+| - cos(th)|0><-|
//   |1><1| - |2><2| = cos(2th)(|+><+| - |-><-|) + sin(2th)(|+><-| + |-><+|)
// giving two channels per bath: emitter/collector at eps_plus and eps_minus,
// base relaxation at omega plus pure dephasing at zero frequency.
inline std::vector<JumpChannel> derive_jump_channels(const SystemSpec& spec, const BathTriple& baths) {
    validate_baths(baths);
    const DressedBasis d = dress(spec);
    const double c = d.cos_theta();
    const double s = d.sin_theta();
    const double s2 = std::sin(2.0 * d.theta);
    const double c2 = std::cos(2.0 * d.theta);
    const BathSpec& emitter = find_bath(baths, BathRole::Emitter);
    const BathSpec& collector = find_bath(baths, BathRole::Collector);
    const BathSpec& base = find_bath(baths, BathRole::Base);

    std::vector<JumpChannel> channels;
    channels.reserve(6);
    channels.push_back({BathRole::Emitter, d.eps_plus, c * detail::dyad(0, 1), emitter.gamma_wideband});
    channels.push_back({BathRole::Emitter, d.eps_minus, s * detail::dyad(0, 2), emitter.gamma_wideband});
    channels.push_back({BathRole::Collector, d.eps_plus, s * detail::dyad(0, 1), collector.gamma_wideband});
    channels.push_back({BathRole::Collector, d.eps_minus, -c * detail::dyad(0, 2), collector.gamma_wideband});
    channels.push_back({BathRole::Base, d.omega, s2 * detail::dyad(2, 1), base.gamma_wideband});
    channels.push_back({BathRole::Base, 0.0, c2 * (detail::dyad(1, 1) - detail::dyad(2, 2)), base.dephasing_rate});
    return channels;
}

} // namespace tritherm
