#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace tritherm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("build_hamiltonian returns the local-basis matrix") {
    const Matrix3c h = build_hamiltonian(SystemSpec{10.0, 7.0, 1.0});
    CHECK(h(0, 0) == Complex(0.0, 0.0));
    CHECK(h(1, 1) == Complex(10.0, 0.0));
    CHECK(h(2, 2) == Complex(7.0, 0.0));
    CHECK(h(1, 2) == Complex(1.0, 0.0));
    CHECK(h(2, 1) == Complex(1.0, 0.0));
    CHECK(h(0, 1) == Complex(0.0, 0.0));
    CHECK(h(0, 2) == Complex(0.0, 0.0));
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("build_hamiltonian rejects invalid parameters") {
    CHECK_THROWS_AS(build_hamiltonian(SystemSpec{-1.0, 7.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_hamiltonian(SystemSpec{10.0, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_hamiltonian(SystemSpec{10.0, 7.0, -2.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_hamiltonian(SystemSpec{std::nan(""), 7.0, 1.0}), std::invalid_argument);
}

TEST_CASE("weak-coupling limit keeps the excited levels bare") {
    const Matrix3c h = build_hamiltonian(SystemSpec{1.0, 1.0, 1e-12});
    CHECK_THAT(h(1, 1).real(), WithinAbs(1.0, 0.0));
    CHECK(h(1, 2) == Complex(1e-12, 0.0));
}

TEST_CASE("symmetric excited block has eigenvalues mean +- delta") {
    const DressedBasis d = dress(SystemSpec{5.0, 5.0, 2.0});
    CHECK_THAT(d.eps_plus, WithinAbs(7.0, 1e-14));
    CHECK_THAT(d.eps_minus, WithinAbs(3.0, 1e-14));
    CHECK_THAT(d.theta, WithinAbs(std::atan2(1.0, 0.0) / 2.0, 1e-15)); // pi/4
}

TEST_CASE("dress matches the closed form for the reference parameters") {
    const DressedBasis d = dress(SystemSpec{10.0, 7.0, 1.0});
    CHECK_THAT(d.theta, WithinRel(0.2940013017737838, 1e-14));
    CHECK_THAT(d.omega, WithinRel(3.6055512754639893, 1e-14));
    CHECK_THAT(d.eps_plus, WithinRel(10.302775637731995, 1e-14));
    CHECK_THAT(d.eps_minus, WithinRel(6.697224362268005, 1e-14));
    CHECK_THAT(d.cos_theta(), WithinRel(0.9570920264890528, 1e-14));
    CHECK_THAT(d.sin_theta(), WithinRel(0.2897841486884301, 1e-14));
}

TEST_CASE("dress cross-checked against a generic symmetric eigensolver") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> energy(1.5, 20.0);
    std::uniform_real_distribution<double> coupling(0.1, 1.4);
    for (int k = 0; k < 25; ++k) {
        const SystemSpec spec{energy(rng), energy(rng), coupling(rng)};
        if (spec.eps1 * spec.eps2 <= spec.delta * spec.delta) continue;
        const DressedBasis d = dress(spec);
        Eigen::Matrix2d block;
        block << spec.eps1, spec.delta, spec.delta, spec.eps2;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block);
        CHECK_THAT(d.eps_minus, WithinRel(es.eigenvalues()(0), 1e-12));
        CHECK_THAT(d.eps_plus, WithinRel(es.eigenvalues()(1), 1e-12));
    }
}

TEST_CASE("rotation diagonalizes the Hamiltonian and inverts itself") {
    const SystemSpec spec{10.0, 7.0, 1.0};
    const DressedBasis d = dress(spec);
    const Matrix3c u = d.rotation();
    CHECK((u * u - Matrix3c::Identity()).cwiseAbs().maxCoeff() < 1e-15); // involution

    const Matrix3c h_local = build_hamiltonian(spec);
    const Matrix3c h_dressed = u * h_local * u;
    Matrix3c expected = Matrix3c::Zero();
    expected(1, 1) = d.eps_plus;
    expected(2, 2) = d.eps_minus;
    CHECK((h_dressed - expected).cwiseAbs().maxCoeff() < 1e-12);

    // round trip back to the local form
    CHECK((u * h_dressed * u - h_local).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dress rejects a dressed level at or below the ground state") {
    CHECK_THROWS_AS(dress(SystemSpec{1.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(dress(SystemSpec{0.5, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("theta approaches pi/4 from below as the splitting closes") {
    double previous = 0.0;
    for (double split : {1e-1, 1e-3, 1e-6, 1e-9}) {
        const double theta = dress(SystemSpec{5.0 + split, 5.0, 1.0}).theta;
        CHECK(theta < std::atan2(1.0, 0.0) / 2.0);
        CHECK(theta > previous);
        previous = theta;
    }
    CHECK_THAT(previous, WithinAbs(std::atan2(1.0, 0.0) / 2.0, 1e-9));
}

TEST_CASE("dress is covariant under rescaling to units of delta") {
    const SystemSpec spec{12.0, 4.0, 2.5};
    const DressedBasis d = dress(spec);
    const DressedBasis n = dress(spec.normalized());
    CHECK_THAT(d.theta, WithinRel(n.theta, 1e-14));
    CHECK_THAT(d.eps_plus, WithinRel(n.eps_plus * spec.delta, 1e-14));
    CHECK_THAT(d.omega, WithinRel(n.omega * spec.delta, 1e-14));
}

TEST_CASE("six jump channels with the stated amplitudes") {
    const SystemSpec spec{10.0, 7.0, 1.0};
    const auto channels = derive_jump_channels(spec, testing::reference_baths(66.0));
    REQUIRE(channels.size() == 6);
    const DressedBasis d = dress(spec);

    CHECK(channels[0].bath == BathRole::Emitter);
    CHECK_THAT(channels[0].frequency, WithinRel(d.eps_plus, 1e-14));
    CHECK_THAT(channels[0].op(0, 1).real(), WithinRel(0.9570920264890528, 1e-14));
    CHECK(channels[1].bath == BathRole::Emitter);
    CHECK_THAT(channels[1].op(0, 2).real(), WithinRel(0.2897841486884301, 1e-14));

    CHECK(channels[2].bath == BathRole::Collector);
    CHECK_THAT(channels[2].op(0, 1).real(), WithinRel(0.2897841486884301, 1e-14));
    CHECK(channels[3].bath == BathRole::Collector);
    CHECK_THAT(channels[3].op(0, 2).real(), WithinRel(-0.9570920264890528, 1e-14));

    CHECK(channels[4].bath == BathRole::Base);
    CHECK_THAT(channels[4].frequency, WithinRel(d.omega, 1e-14));
    CHECK_THAT(channels[4].op(2, 1).real(), WithinRel(std::sin(2.0 * d.theta), 1e-14));
    CHECK(channels[5].bath == BathRole::Base);
    CHECK(channels[5].frequency == 0.0);
    CHECK_THAT(channels[5].op(1, 1).real(), WithinRel(std::cos(2.0 * d.theta), 1e-14));
    CHECK_THAT(channels[5].op(2, 2).real(), WithinRel(-std::cos(2.0 * d.theta), 1e-14));
    CHECK(channels[5].base_rate == 1.0);

    // single nonzero entry (or the two diagonal dephasing entries) per operator
    for (const auto& ch : channels) {
        int nonzero = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (std::abs(ch.op(i, j)) > 1e-15) ++nonzero;
        CHECK(nonzero <= (ch.frequency == 0.0 ? 2 : 1));
    }
}

TEST_CASE("degenerate levels kill dephasing, keep full relaxation") {
    const auto channels = derive_jump_channels(SystemSpec{5.0, 5.0, 1.0}, testing::reference_baths(66.0));
    CHECK_THAT(channels[4].op(2, 1).real(), WithinAbs(1.0, 1e-14)); // sin 2theta = 1
    CHECK(channels[5].op.cwiseAbs().maxCoeff() < 1e-15);            // cos 2theta = 0
}

TEST_CASE("decoupled limit removes the base channel and the |0><-| emitter leg") {
    const auto channels = derive_jump_channels(SystemSpec{10.0, 7.0, 1e-9}, testing::reference_baths(66.0));
    CHECK(std::abs(channels[4].op(2, 1)) < 1e-8);  // sin 2theta -> 0
    CHECK(std::abs(channels[1].op(0, 2)) < 1e-8);  // emitter couples only |0><+|
    CHECK_THAT(channels[0].op(0, 1).real(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("channel amplitudes reconstruct the rotated local coupling operators") {
    std::mt19937 rng(11);
    for (int k = 0; k < 10; ++k) {
        const auto set = testing::random_set(rng);
        const auto channels = derive_jump_channels(set.system, set.baths);
        const Matrix3c u = dress(set.system).rotation();
        const Matrix3c e01 = u * detail::dyad(0, 1) * u;
        const Matrix3c e02 = u * detail::dyad(0, 2) * u;
        const Matrix3c ezz = u * (detail::dyad(1, 1) - detail::dyad(2, 2)) * u;
        CHECK((channels[0].op + channels[1].op - e01).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((channels[2].op + channels[3].op - e02).cwiseAbs().maxCoeff() < 1e-12);
        const Matrix3c base_sum = channels[5].op + channels[4].op + channels[4].op.adjoint();
        CHECK((base_sum - ezz).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("bath triple validation") {
    BathTriple dup{BathSpec::thermal(BathRole::Emitter, 10.0, 1.0),
                   BathSpec::thermal(BathRole::Emitter, 10.0, 1.0),
                   BathSpec::base(10.0, 1.0, 1.0)};
    CHECK_THROWS_AS(derive_jump_channels(SystemSpec{10.0, 7.0, 1.0}, dup), std::invalid_argument);
    CHECK_THROWS_AS(BathSpec::thermal(BathRole::Emitter, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BathSpec::thermal(BathRole::Emitter, 1.0, -0.5), std::invalid_argument);
    BathSpec leaky{BathRole::Collector, 1.0, 1.0, 0.3};
    CHECK_THROWS_AS(leaky.validate(), std::invalid_argument);
}
