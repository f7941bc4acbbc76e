#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nhdiode/analytic.hpp"
#include "nhdiode/core.hpp"

using namespace nhdiode;
using Catch::Matchers::WithinAbs;

TEST_CASE("dispersion on the cosine band") {
    REQUIRE_THAT(dispersion(Momentum(kPi / 2.0), 1.0), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(dispersion(Momentum(2.0 * kPi / 3.0), 1.0), WithinAbs(1.0, 1e-15));

    SECTION("matches a truncated-lead eigenvalue at k = 0.3") {
        // Diagonalize the free 2000-site open chain (tridiagonal, hopping -J)
        // and compare against the nearest eigenvalue.
        const int n = 2000;
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd sub = Eigen::VectorXd::Constant(n - 1, -1.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
        const double target = dispersion(Momentum(0.3), 1.0);
        double best = 1e9;
        for (int i = 0; i < n; ++i) best = std::min(best, std::abs(es.eigenvalues()(i) - target));
        REQUIRE(best <= 1e-3);
    }
}

TEST_CASE("group velocity is odd and signed") {
    REQUIRE_THAT(group_velocity(Momentum(kPi / 2.0), 1.0), WithinAbs(2.0, 1e-15));
    REQUIRE_THAT(group_velocity(Momentum(-kPi / 2.0), 1.0), WithinAbs(-2.0, 1e-15));

    // at the zero-flux singularity momentum the flow points toward the
    // center from both sides
    const double kc = -1.7794130171040452;
    REQUIRE(group_velocity(Momentum(kc), 1.0) < 0.0);
    REQUIRE(group_velocity(Momentum(-kc), 1.0) > 0.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ks(-kPi, kPi);
    for (int i = 0; i < 200; ++i) {
        const double k = ks(rng);
        REQUIRE_THAT(dispersion(Momentum(k)), WithinAbs(dispersion(Momentum(-k)), 1e-14));
        REQUIRE_THAT(group_velocity(Momentum(k)), WithinAbs(-group_velocity(Momentum(-k)), 1e-14));
        REQUIRE_THAT(std::abs(group_velocity(Momentum(k))), WithinAbs(2.0 * std::abs(std::sin(k)), 1e-14));
    }
}

TEST_CASE("momentum propagating window") {
    REQUIRE(Momentum(0.5).propagating());
    REQUIRE(Momentum(-2.0).propagating());
    REQUIRE_FALSE(Momentum(0.0).propagating());
    REQUIRE_FALSE(Momentum(kPi).propagating());
    REQUIRE_FALSE(Momentum(3.5).propagating());
}

TEST_CASE("triangle parameters") {
    REQUIRE_THROWS_AS(TriangleParams(0.0, 0.1, 0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(TriangleParams(-1.0, 0.1, 0.1), std::invalid_argument);

    const TriangleParams p(1.0, 2.0 * kPi / 3.0, -kPi / 3.0);
    REQUIRE(p.phi >= 0.0);
    REQUIRE(p.phi < kTwoPi);
    REQUIRE_THAT(p.phi, WithinAbs(5.0 * kPi / 3.0, 1e-12));

    // loss side: Im V <= 0 exactly for gamma in [0, pi]
    REQUIRE(TriangleParams(1.0, 0.3, 0.0).onsite_potential().imag() < 0.0);
    REQUIRE(TriangleParams(1.0, kPi - 0.3, 0.0).onsite_potential().imag() < 0.0);
    REQUIRE(TriangleParams(1.0, kPi + 0.3, 0.0).onsite_potential().imag() > 0.0);
}

TEST_CASE("triangle center matrix") {
    SECTION("Fig-2-style parameters") {
        const auto c = build_triangle_center(TriangleParams(1.0, 2.0 * kPi / 3.0, kPi / 3.0));
        REQUIRE_THAT(std::abs(c.hopping(1, 0) - (-std::polar(1.0, kPi / 9.0))), WithinAbs(0.0, 1e-15));
        REQUIRE_THAT(std::abs(c.onsite(1) - (-std::polar(1.0, 2.0 * kPi / 3.0))), WithinAbs(0.0, 1e-15));
        REQUIRE(c.port_left == 0);
        REQUIRE(c.port_right == 2);
        // reverse bonds are complex conjugates
        REQUIRE(c.hopping(0, 1) == std::conj(c.hopping(1, 0)));
        REQUIRE(c.hopping(1, 2) == std::conj(c.hopping(2, 1)));
        REQUIRE(c.hopping(2, 0) == std::conj(c.hopping(0, 2)));
    }
    SECTION("gamma = phi = 0 is Hermitian and real") {
        const auto c = build_triangle_center(TriangleParams(1.0, 0.0, 0.0));
        REQUIRE(c.hermitian());
        REQUIRE_THAT(std::abs(c.hopping(1, 0) - Complex(-1.0, 0.0)), WithinAbs(0.0, 1e-15));
        REQUIRE_THAT(std::abs(c.onsite(1) - Complex(-1.0, 0.0)), WithinAbs(0.0, 1e-15));
    }
}

TEST_CASE("dagger center") {
    const auto c = build_triangle_center(TriangleParams(1.0, 1.1, 0.8));
    const auto d = dagger_center(c);
    REQUIRE_THAT(std::abs(d.onsite(1) - (-std::polar(1.0, -1.1))), WithinAbs(0.0, 1e-15));
    // the ring bonds are Hermitian already, so they survive as a set
    REQUIRE((d.hopping - c.hopping).cwiseAbs().maxCoeff() == 0.0);

    const auto herm = build_triangle_center(TriangleParams(1.0, 0.0, 0.0));
    REQUIRE((dagger_center(herm).matrix() - herm.matrix()).cwiseAbs().maxCoeff() == 0.0);

    const auto dd = dagger_center(dagger_center(c));
    REQUIRE((dd.matrix() - c.matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("finite chain assembly") {
    const TriangleParams fig2(1.0, 2.0 * kPi / 3.0, kPi / 3.0);

    SECTION("zero leads reproduces the center matrix") {
        const auto c = build_triangle_center(fig2);
        const auto chain = build_finite_chain(c, 0, 0);
        REQUIRE(chain.dim() == 3);
        REQUIRE((Matrix(chain.hamiltonian) - c.matrix()).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("Hermitian limit") {
        const auto c = build_triangle_center(TriangleParams(1.0, 0.0, 0.0));
        const auto chain = build_finite_chain(c, 100, 100);
        REQUIRE(chain.dim() == 203);
        const Matrix h(chain.hamiltonian);
        REQUIRE((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("single complex diagonal entry") {
        const auto chain = build_finite_chain(build_triangle_center(fig2), 200, 200);
        const Matrix h(chain.hamiltonian);
        int non_real = 0;
        for (int i = 0; i < h.rows(); ++i)
            if (h(i, i).imag() != 0.0) ++non_real;
        REQUIRE(non_real == 1);
        REQUIRE_THAT(std::abs(h(201, 201) - (-std::polar(1.0, 2.0 * kPi / 3.0))), WithinAbs(0.0, 1e-15));
    }
    SECTION("dimension cap") {
        const auto c = build_triangle_center(fig2);
        REQUIRE_THROWS_AS(build_finite_chain(c, 3000, 3000), std::length_error);
        REQUIRE_NOTHROW(build_finite_chain(c, 3000, 3000, 7000));
    }
    SECTION("coordinate map") {
        const auto chain = build_finite_chain(build_triangle_center(fig2), 5, 4);
        REQUIRE(chain.row_for_coordinate(-2) == 4);   // innermost left lead site
        REQUIRE(chain.row_for_coordinate(-6) == 0);
        REQUIRE(chain.row_for_coordinate(-1) == 5);   // left port
        REQUIRE(chain.row_for_coordinate(0) == 6);
        REQUIRE(chain.row_for_coordinate(1) == 7);    // right port
        REQUIRE(chain.row_for_coordinate(2) == 8);
        REQUIRE(chain.row_for_coordinate(5) == 11);
        REQUIRE_THROWS_AS(chain.row_for_coordinate(-7), std::out_of_range);
        REQUIRE_THROWS_AS(chain.row_for_coordinate(6), std::out_of_range);
    }
}

TEST_CASE("random Hermitian centers build Hermitian chains") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 4);
        CenterGraph c;
        c.hopping = Matrix::Zero(n, n);
        c.onsite = Vector::Zero(n);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                c.hopping(i, j) = Complex(box(rng), box(rng));
                c.hopping(j, i) = std::conj(c.hopping(i, j));
            }
            c.onsite(i) = box(rng);
        }
        c.port_left = 0;
        c.port_right = n - 1;
        const auto chain = build_finite_chain(c, 7, 3);
        const Matrix h(chain.hamiltonian);
        REQUIRE((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("flux enters only modulo 2 pi") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::uniform_real_distribution<double> ks(0.1, kPi - 0.1);
    for (int trial = 0; trial < 50; ++trial) {
        const double gamma = angle(rng) / 2.0;
        const double phi = angle(rng);
        const double k = ks(rng);
        const auto a = closed_form_amplitudes(Momentum(k), TriangleParams(1.0, gamma, phi));
        const auto b = closed_form_amplitudes(Momentum(k), TriangleParams(1.0, gamma, phi + kTwoPi));
        REQUIRE_THAT(std::abs(a.rL - b.rL), WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(std::abs(a.tL - b.tL), WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(std::abs(a.tR - b.tR), WithinAbs(0.0, 1e-12));
    }
}
