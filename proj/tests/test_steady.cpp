#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace tritherm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("common-temperature baths relax to the Gibbs state") {
    const double t = 20.0;
    const SystemSpec spec = testing::reference_system();
    const BathTriple baths{BathSpec::thermal(BathRole::Emitter, t, 1.0),
                           BathSpec::thermal(BathRole::Collector, t, 1.0),
                           BathSpec::base(t, 1.0, 1.0)};
    const Liouvillian l = assemble(spec, baths, Variant::Secular);
    const SteadySolution sol = steady_state(l);

    const DressedBasis d = dress(spec);
    Matrix3c gibbs = Matrix3c::Zero();
    gibbs(0, 0) = 1.0;
    gibbs(1, 1) = std::exp(-d.eps_plus / t);
    gibbs(2, 2) = std::exp(-d.eps_minus / t);
    gibbs /= gibbs.trace().real();
    CHECK((sol.rho.entries - gibbs).cwiseAbs().maxCoeff() < 1e-8);

    // equivalently exp(-H/T)/Z in the local basis
    const Matrix3c local = sol.rho.in_basis(StateBasis::Local, d).entries;
    const Matrix3c h = build_hamiltonian(spec);
    Eigen::SelfAdjointEigenSolver<Matrix3c> es(h);
    Matrix3c gibbs_local = Matrix3c::Zero();
    for (int i = 0; i < 3; ++i)
        gibbs_local += std::exp(-es.eigenvalues()(i) / t)
                       * (es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint());
    gibbs_local /= gibbs_local.trace().real();
    CHECK((local - gibbs_local).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("solver postconditions hold on every solve") {
    std::mt19937 rng(29);
    for (int k = 0; k < 20; ++k) {
        const auto ps = testing::random_set(rng);
        const Variant v = k % 2 == 0 ? Variant::Secular : Variant::PartialSecular;
        const SteadySolution sol = steady_state(assemble(ps.system, ps.baths, v));
        CHECK(sol.residual < 1e-10);
        CHECK(sol.rho.hermiticity_defect() < 1e-10);
        CHECK(sol.rho.trace_defect() < 1e-10);
        CHECK(sol.min_eigenvalue > -1e-9);
    }
}

TEST_CASE("base-only coupling leaves a degenerate steady manifold") {
    const BathTriple baths{BathSpec::thermal(BathRole::Emitter, 1.0 / 0.003, 0.0),
                           BathSpec::thermal(BathRole::Collector, 1.0 / 0.15, 0.0),
                           BathSpec::base(66.0, 1.0, 1.0)};
    const Liouvillian l = assemble(testing::reference_system(), baths, Variant::Secular);
    CHECK_THROWS_AS(steady_state(l), DegenerateKernelError);
}

TEST_CASE("steady state agrees with long-time integration on random sets") {
    std::mt19937 rng(31);
    for (int k = 0; k < 10; ++k) {
        const auto ps = testing::random_set(rng, 0.5, 500.0);
        const Variant v = k % 2 == 0 ? Variant::PartialSecular : Variant::Secular;
        const Liouvillian l = assemble(ps.system, ps.baths, v);
        const SteadySolution sol = steady_state(l);
        const Matrix3c evolved = testing::rk4_steady(l);
        CHECK((sol.rho.entries - evolved).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("secular populations match the rate-equation solution") {
    std::mt19937 rng(37);
    for (int k = 0; k < 10; ++k) {
        const auto ps = testing::random_set(rng);
        const SteadySolution sol = steady_state(assemble(ps.system, ps.baths, Variant::Secular));
        const auto pops = testing::secular_populations(ps.system, ps.baths);
        CHECK_THAT(sol.rho.entries(0, 0).real(), WithinAbs(pops.p0, 1e-12));
        CHECK_THAT(sol.rho.entries(1, 1).real(), WithinAbs(pops.p_plus, 1e-12));
        CHECK_THAT(sol.rho.entries(2, 2).real(), WithinAbs(pops.p_minus, 1e-12));
    }
}

TEST_CASE("basis conversion round-trips exactly") {
    std::mt19937 rng(41);
    const DressedBasis d = dress(testing::reference_system());
    for (int k = 0; k < 20; ++k) {
        const DensityMatrix rho{testing::random_density(rng), StateBasis::Local};
        const DensityMatrix back = rho.in_basis(StateBasis::Dressed, d).in_basis(StateBasis::Local, d);
        CHECK((back.entries - rho.entries).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("local coherence of a dressed-diagonal state") {
    const SystemSpec spec = testing::reference_system();
    const DressedBasis d = dress(spec);
    const double t = 15.0;
    Matrix3c gibbs = Matrix3c::Zero();
    gibbs(0, 0) = 1.0;
    gibbs(1, 1) = std::exp(-d.eps_plus / t);
    gibbs(2, 2) = std::exp(-d.eps_minus / t);
    gibbs /= gibbs.trace().real();
    const DensityMatrix rho{gibbs, StateBasis::Dressed};

    const Complex c12 = local_coherence(rho, d);
    const double expected = d.sin_theta() * d.cos_theta() * (gibbs(1, 1).real() - gibbs(2, 2).real());
    CHECK_THAT(c12.real(), WithinRel(expected, 1e-12));
    CHECK(c12.imag() == 0.0);
    CHECK(c12.real() < 0.0); // lower dressed level more populated

    const DensityMatrix mixed{Matrix3c(Matrix3c::Identity() / 3.0), StateBasis::Dressed};
    CHECK(std::abs(local_coherence(mixed, d)) < 1e-16);
}

TEST_CASE("reference coherence is negative and fades with base temperature") {
    const SystemSpec spec = testing::reference_system();
    double previous = -std::numeric_limits<double>::infinity();
    for (double tb : {20.0, 60.0, 120.0, 240.0}) {
        const Liouvillian l = assemble(spec, testing::reference_baths(tb), Variant::PartialSecular);
        const double re12 = local_coherence(steady_state(l).rho, l.basis).real();
        CHECK(re12 < 0.0);
        CHECK(re12 > previous); // magnitude shrinks
        previous = re12;
    }
}
