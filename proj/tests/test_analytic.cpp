#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nhdiode/analytic.hpp"

using namespace nhdiode;
using Catch::Matchers::WithinAbs;

namespace {
const double kGammaFig2 = 2.0 * kPi / 3.0;
}

TEST_CASE("omega closed form") {
    // Omega(gamma, pi - gamma, gamma) = 2 e^{i gamma} sin^2(gamma)
    const Complex w = omega(Momentum(kGammaFig2), kPi - kGammaFig2, kGammaFig2);
    REQUIRE_THAT(w.real(), WithinAbs(-0.75, 1e-12));
    REQUIRE_THAT(w.imag(), WithinAbs(1.299038105676658, 1e-12));

    // sin(pi) = 0 collapses Omega to cos(phi) - 1
    for (const double phi : {0.2, 1.9, 4.4}) {
        const Complex wp = omega(Momentum(kPi), phi, 0.77);
        REQUIRE_THAT(wp.real(), WithinAbs(std::cos(phi) - 1.0, 1e-12));
        REQUIRE_THAT(wp.imag(), WithinAbs(0.0, 1e-12));
    }

    const Complex wd = omega(Momentum(2.0 * kPi / 3.0), kPi / 3.0, kGammaFig2);
    REQUIRE_THAT(std::abs(wd - 1.5 * std::polar(1.0, 2.0 * kPi / 3.0)), WithinAbs(0.0, 1e-12));
}

TEST_CASE("closed form at the diode point") {
    const TriangleParams p(1.0, kGammaFig2, kPi / 3.0);
    const auto a = closed_form_amplitudes(Momentum(2.0 * kPi / 3.0), p);
    REQUIRE_THAT(std::abs(a.rL), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(std::abs(a.rR), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(std::abs(a.tL), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(std::abs(a.tR - std::polar(1.0, -5.0 * kPi / 9.0)), WithinAbs(0.0, 1e-14));
}

TEST_CASE("reflection vanishes along k = pi - phi") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angles(0.1, kPi - 0.1);
    for (int i = 0; i < 100; ++i) {
        const double phi = angles(rng);
        const double gamma = angles(rng);
        const auto a = closed_form_amplitudes(Momentum(kPi - phi), TriangleParams(1.0, gamma, phi));
        REQUIRE_THAT(std::abs(a.rL), WithinAbs(0.0, 1e-13));
        REQUIRE(a.rL == a.rR);
    }
}

TEST_CASE("singular denominator is reported, not returned") {
    // Omega of H^dagger vanishes at (k, phi) = (gamma, pi - gamma)
    const double gamma = kPi / 6.0;
    REQUIRE_THROWS_AS(conjugate_amplitudes(Momentum(gamma), TriangleParams(1.0, gamma, kPi - gamma)),
                      SingularDenominator);
}

TEST_CASE("conjugate amplitudes") {
    SECTION("gamma = 0 is the Hermitian fixed point") {
        const TriangleParams p(1.0, 0.0, 0.9);
        for (const double k : {0.4, 1.3, 2.8}) {
            const auto a = closed_form_amplitudes(Momentum(k), p);
            const auto b = conjugate_amplitudes(Momentum(k), p);
            REQUIRE_THAT(std::abs(a.tL - b.tL), WithinAbs(0.0, 1e-14));
            REQUIRE_THAT(std::abs(a.tR - b.tR), WithinAbs(0.0, 1e-14));
            REQUIRE_THAT(std::abs(a.rL - b.rL), WithinAbs(0.0, 1e-14));
        }
    }
    SECTION("divergences of the phi sweep at k = gamma = pi/6") {
        // |t| blows up only where cos(phi) = -cos(gamma), i.e. 5pi/6 and 7pi/6
        const double gamma = kPi / 6.0;
        double worst_elsewhere = 0.0;
        for (int i = 0; i < 2000; ++i) {
            const double phi = kTwoPi * (i + 0.5) / 2000;
            const auto a = conjugate_amplitudes(Momentum(gamma), TriangleParams(1.0, gamma, phi));
            const double mags = std::max(std::abs(a.tL), std::abs(a.tR));
            const double dist = std::min(std::abs(phi - 5.0 * kPi / 6.0), std::abs(phi - 7.0 * kPi / 6.0));
            if (dist > 0.2) worst_elsewhere = std::max(worst_elsewhere, mags);
        }
        REQUIRE(worst_elsewhere < 20.0);
        const auto near1 =
            conjugate_amplitudes(Momentum(gamma), TriangleParams(1.0, gamma, 5.0 * kPi / 6.0 - 1e-5));
        const auto near2 =
            conjugate_amplitudes(Momentum(gamma), TriangleParams(1.0, gamma, 7.0 * kPi / 6.0 - 1e-5));
        REQUIRE(std::abs(near1.tL) > 1e4);
        REQUIRE(std::abs(near2.tR) > 1e4);
    }
    SECTION("path-I sample near the singularity") {
        const double gamma = kPi / 6.0;
        const double k = gamma + 1e-6;
        const auto a = conjugate_amplitudes(Momentum(k), TriangleParams(1.0, gamma, kPi - k));
        REQUIRE(std::abs(a.rL) < 1e-4);
        REQUIRE(std::abs(a.tL) > 1e4);
    }
}

TEST_CASE("diode point catalogue") {
    const auto d1 = diode_point(kGammaFig2);
    REQUIRE_THAT(d1.kc.k, WithinAbs(2.0 * kPi / 3.0, 1e-15));
    REQUIRE_THAT(d1.phic, WithinAbs(kPi / 3.0, 1e-15));
    REQUIRE_THAT(std::abs(d1.tR_target - std::polar(1.0, -5.0 * kPi / 9.0)), WithinAbs(0.0, 1e-14));

    const auto d2 = diode_point(kPi / 6.0);
    REQUIRE_THAT(d2.kc.k, WithinAbs(kPi / 6.0, 1e-15));
    REQUIRE_THAT(d2.phic, WithinAbs(5.0 * kPi / 6.0, 1e-15));

    const auto d3 = diode_point(kPi / 2.0);
    REQUIRE_THAT(std::abs(d3.tR_target - std::polar(1.0, -kPi / 3.0)), WithinAbs(0.0, 1e-14));

    // the closed form must realize every catalogued point
    for (const double gamma : {kPi / 6.0, kPi / 3.0, kPi / 2.0, kGammaFig2}) {
        const auto d = diode_point(gamma);
        const auto a = closed_form_amplitudes(d.kc, TriangleParams(1.0, gamma, d.phic));
        REQUIRE_THAT(std::abs(a.rL), WithinAbs(0.0, 1e-13));
        REQUIRE_THAT(std::abs(a.tL), WithinAbs(0.0, 1e-13));
        REQUIRE_THAT(std::abs(a.tR - d.tR_target), WithinAbs(0.0, 1e-13));
    }

    REQUIRE_THROWS_AS(diode_point(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(diode_point(kPi), std::invalid_argument);
}

TEST_CASE("limit path probe") {
    SECTION("k-paths show the one-sided limits") {
        const double gamma = kPi / 6.0;
        const auto above = limit_path_probe(gamma, LimitPath::KAbove);
        const auto below = limit_path_probe(gamma, LimitPath::KBelow);
        REQUIRE(above.tL_divergent);
        REQUIRE(below.tL_divergent);
        REQUIRE(above.rBar_magnitude < 1e-6);
        REQUIRE(below.rBar_magnitude < 1e-6);
        REQUIRE_THAT(std::abs(above.tR_target - std::polar(1.0, kPi / 3.0 - 2.0 * kPi / 9.0)),
                     WithinAbs(0.0, 1e-14));
        REQUIRE(above.tR_deviation < 1e-6);
        REQUIRE(below.tR_deviation < 1e-6);
        // real part sign flips between the two approach sides
        REQUIRE(above.tL_real_sign == -1);
        REQUIRE(above.tL_imag_sign == +1);
        REQUIRE(below.tL_real_sign == +1);
        REQUIRE(below.tL_imag_sign == -1);
        // offsets strictly decrease
        for (size_t i = 1; i < above.samples.size(); ++i)
            REQUIRE(above.samples[i].offset < above.samples[i - 1].offset);
    }
    SECTION("divergence magnitude at the smallest offset") {
        const auto probe = limit_path_probe(kPi / 2.0, LimitPath::KAbove);
        REQUIRE(std::abs(probe.samples.back().tLBar) > 1e6);
        REQUIRE(probe.tR_deviation < 1e-7);
        REQUIRE_THAT(std::abs(probe.tR_target - std::polar(1.0, -kPi / 3.0)), WithinAbs(0.0, 1e-14));
    }
    SECTION("phi-paths diverge in tL and agree in the tR limit") {
        for (const auto path : {LimitPath::PhiAbove, LimitPath::PhiBelow}) {
            const auto probe = limit_path_probe(kPi / 6.0, path);
            REQUIRE(probe.tL_divergent);
            REQUIRE(probe.tR_deviation < 1e-5);
        }
    }
    REQUIRE_THROWS_AS(limit_path_probe(kPi / 6.0, LimitPath::KAbove, 2), std::invalid_argument);
}

TEST_CASE("amplitude identities on the parameter grid") {
    // 30^3 grid over (k, phi, gamma), skipping near-singular denominators
    int tested = 0;
    double worst_flip = 0.0, worst_rt1 = 0.0, worst_rt2 = 0.0;
    for (int ik = 0; ik < 30; ++ik)
        for (int ip = 0; ip < 30; ++ip)
            for (int ig = 0; ig < 30; ++ig) {
                const double k = 0.05 + (kPi - 0.1) * ik / 29.0;
                const double phi = kTwoPi * (ip + 0.5) / 30.0;
                const double gamma = 0.05 + (kPi - 0.1) * ig / 29.0;
                if (std::abs(omega(Momentum(k), phi, gamma)) < 1e-6) continue;
                if (std::abs(omega(Momentum(-k), phi, gamma)) < 1e-6) continue;
                const TriangleParams p(1.0, gamma, phi);
                const TriangleParams pf(1.0, gamma, -phi);
                const auto a = closed_form_amplitudes(Momentum(k), p);
                const auto af = closed_form_amplitudes(Momentum(k), pf);
                const auto am = closed_form_amplitudes(Momentum(-k), p);
                worst_flip = std::max({worst_flip, std::abs(a.tL - af.tR), std::abs(a.rL - af.rR)});
                worst_rt1 = std::max(worst_rt1, std::abs(am.tL * a.tR + am.rL * a.rL - 1.0));
                worst_rt2 = std::max(worst_rt2, std::abs(am.tL * a.rR + am.rL * a.tL));
                ++tested;
            }
    REQUIRE(tested > 25000);
    REQUIRE(worst_flip <= 1e-12);
    REQUIRE(worst_rt1 <= 1e-10);
    REQUIRE(worst_rt2 <= 1e-10);
}

TEST_CASE("Hermitian limit is unitary") {
    for (const double gamma : {0.0, kPi}) {
        for (int ik = 1; ik < 40; ++ik)
            for (int ip = 0; ip < 12; ++ip) {
                const double k = kPi * ik / 40.0;
                const double phi = kTwoPi * ip / 12.0;
                const auto a = closed_form_amplitudes(Momentum(k), TriangleParams(1.0, gamma, phi));
                REQUIRE_THAT(std::norm(a.tL) + std::norm(a.rL), WithinAbs(1.0, 1e-12));
                REQUIRE_THAT(std::abs(a.tL), WithinAbs(std::abs(a.tR), 1e-12));
            }
    }
}
