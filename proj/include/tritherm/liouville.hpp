// liouville.hpp — Thermal rates and the 9x9 Liouvillian superoperator

#pragma once

#include <cmath>
#include <stdexcept>

#include "tritherm/model.hpp"

namespace tritherm {

using Matrix9c = Eigen::Matrix<Complex, 9, 9>;
using Vector9c = Eigen::Matrix<Complex, 9, 1>;

// Planck distribution at k_B = 1.
inline double bose_occupation(double v, double temperature) {
    detail::require_finite_positive(v, "frequency");
    detail::require_finite_positive(temperature, "temperature");
    return 1.0 / std::expm1(v / temperature);
}

// Decay rate gamma_i(v) of a wide-band bath at signed transition frequency v:
// emission Gamma*(1+n) for v > 0, absorption Gamma*n(|v|) for v < 0, and the
// bare dephasing rate gamma0 at v = 0 (base only).
struct RateFunction {
    BathSpec bath;

    explicit RateFunction(const BathSpec& b) : bath(b) { bath.validate(); }

    double at(double v) const {
        if (v == 0.0) {
            if (bath.role != BathRole::Base)
                throw std::invalid_argument("zero-frequency rate is defined for the base bath only");
            return bath.dephasing_rate;
        }
        if (v > 0.0)
            return bath.gamma_wideband * (1.0 + bose_occupation(v, bath.temperature));
        return bath.gamma_wideband * bose_occupation(-v, bath.temperature);
    }
};

enum class Variant { Secular, PartialSecular };

inline const char* to_string(Variant v) {
    return v == Variant::Secular ? "secular" : "partial";
}

// Column-stacking vectorization; matches Eigen's column-major storage.
inline Vector9c vec(const Matrix3c& m) {
    return Eigen::Map<const Vector9c>(m.data());
}

inline Matrix3c unvec(const Vector9c& v) {
    return Eigen::Map<const Matrix3c>(v.data());
}

inline Matrix9c kron(const Matrix3c& a, const Matrix3c& b) {
    Matrix9c out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
    return out;
}

// rate * (A rho B^dag - 1/2 {B^dag A, rho}) as a superoperator on vec(rho).
// With column stacking: vec(A rho B^dag) = (conj(B) ⊗ A) vec(rho).
inline Matrix9c lindblad_term(double rate, const Matrix3c& a, const Matrix3c& b) {
    const Matrix3c bda = b.adjoint() * a;
    return rate * (kron(b.conjugate(), a)
                   - 0.5 * (kron(Matrix3c::Identity(), bda) + kron(bda.transpose(), Matrix3c::Identity())));
}

inline Matrix9c lindblad_term(double rate, const Matrix3c& a) {
    return lindblad_term(rate, a, a);
}

// -i[H, .] as a superoperator.
inline Matrix9c commutator_superop(const Matrix3c& h) {
    const Complex mi(0.0, -1.0);
    return mi * (kron(Matrix3c::Identity(), h) - kron(h.transpose(), Matrix3c::Identity()));
}

// Dissipator of a single channel: the downward term at gamma(v) plus the
// matching upward term with the adjoint operator at gamma(-v). A
// zero-frequency (dephasing) channel contributes one Hermitian-operator term.
inline Matrix9c dissipator(const JumpChannel& channel, const RateFunction& rates) {
    if (channel.bath != rates.bath.role)
        throw std::invalid_argument("channel and rate function refer to different baths");
    if (channel.frequency == 0.0)
        return lindblad_term(rates.at(0.0), channel.op);
    return lindblad_term(rates.at(channel.frequency), channel.op)
         + lindblad_term(rates.at(-channel.frequency), channel.op.adjoint());
}

namespace detail {

// Cross terms between two same-bath channels that share the ground state as
// final state. The geometric-mean rate sqrt(gamma(v1) gamma(v2)) keeps the
// channel rate matrix positive semidefinite, so the generator stays CPTP, and
// it reduces to the secular form when v1 = v2. These terms couple the dressed
// populations to the dressed coherence rho_{+-}.
inline Matrix9c cross_terms(const JumpChannel& ch1, const JumpChannel& ch2, const RateFunction& rates) {
    const double down = std::sqrt(rates.at(ch1.frequency) * rates.at(ch2.frequency));
    const double up = std::sqrt(rates.at(-ch1.frequency) * rates.at(-ch2.frequency));
    const Matrix3c a1d = ch1.op.adjoint();
    const Matrix3c a2d = ch2.op.adjoint();
    return lindblad_term(down, ch1.op, ch2.op) + lindblad_term(down, ch2.op, ch1.op)
         + lindblad_term(up, a1d, a2d) + lindblad_term(up, a2d, a1d);
}

} // namespace detail

// Dissipative part contributed by one bath, in the requested variant.
inline Matrix9c bath_dissipator(const SystemSpec& spec, const BathTriple& baths, BathRole role, Variant variant) {
    const auto channels = derive_jump_channels(spec, baths);
    const RateFunction rates(find_bath(baths, role));
    Matrix9c d = Matrix9c::Zero();
    const JumpChannel* first = nullptr;
    const JumpChannel* second = nullptr;
    for (const auto& ch : channels) {
        if (ch.bath != role) continue;
        d += dissipator(ch, rates);
        (first ? second : first) = &ch;
    }
    const bool ground_pair = role == BathRole::Emitter || role == BathRole::Collector;
    if (variant == Variant::PartialSecular && ground_pair && first && second)
        d += detail::cross_terms(*first, *second, rates);
    return d;
}

// Full generator of the master equation, acting on column-vectorized density
// matrices in the dressed basis. Bath parts are kept separately so heat fluxes
// can be traced per bath.
struct Liouvillian {
    Matrix9c matrix;
    Variant variant{Variant::PartialSecular};
    DressedBasis basis;
    Matrix3c hamiltonian; // dressed-basis H, diag(0, eps_plus, eps_minus)
    std::array<Matrix9c, 3> bath_parts; // indexed Emitter, Collector, Base

    const Matrix9c& part(BathRole role) const { return bath_parts[static_cast<int>(role)]; }

    Vector9c apply(const Matrix3c& rho) const { return matrix * vec(rho); }
};

inline Liouvillian assemble(const SystemSpec& spec, const BathTriple& baths, Variant variant) {
    validate_baths(baths);
    Liouvillian l;
    l.variant = variant;
    l.basis = dress(spec);
    l.hamiltonian = Matrix3c::Zero();
    l.hamiltonian(1, 1) = l.basis.eps_plus;
    l.hamiltonian(2, 2) = l.basis.eps_minus;
    l.matrix = commutator_superop(l.hamiltonian);
    for (BathRole role : {BathRole::Emitter, BathRole::Collector, BathRole::Base}) {
        Matrix9c d = bath_dissipator(spec, baths, role, variant);
        l.bath_parts[static_cast<int>(role)] = d;
        l.matrix += d;
    }
    return l;
}

} // namespace tritherm
