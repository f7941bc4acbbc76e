#pragma once

#include <cmath>
#include <vector>

#include "nhdiode/core.hpp"
#include "nhdiode/errors.hpp"

namespace nhdiode {

/// Reflection/transmission amplitudes of a two-lead center at momentum k,
/// normalized to unit incident amplitude referenced at site j = 0.
struct ScatteringAmplitudes {
    Momentum k;
    Complex rL, rR, tL, tR;
};

/// |Omega| at or below this marks a spectral singularity: the scattering
/// eigenfunction does not exist there and amplitudes must not be reported.
inline constexpr double kSingularOmegaThreshold = 1e-12;

/// Common denominator of the triangle amplitudes:
/// Omega = e^{ik} [ i sin k (2 cos k - e^{i gamma}) + e^{ik} cos phi + 1 ].
inline Complex omega(Momentum k, double phi, double gamma) {
    const Complex eik = std::polar(1.0, k.k);
    const Complex inner = Complex(0.0, std::sin(k.k)) * (2.0 * std::cos(k.k) - std::polar(1.0, gamma)) +
                          eik * std::cos(phi) + 1.0;
    return eik * inner;
}

/// Closed-form two-lead amplitudes of the triangle ring.
/// Throws SingularDenominator when |Omega| <= kSingularOmegaThreshold.
inline ScatteringAmplitudes closed_form_amplitudes(Momentum k, const TriangleParams& p) {
    const Complex den = omega(k, p.phi, p.gamma);
    if (std::abs(den) <= kSingularOmegaThreshold) throw SingularDenominator(std::abs(den));
    const double sk = std::sin(k.k);
    const double ck = std::cos(k.k);
    const Complex eig = std::polar(1.0, p.gamma);
    ScatteringAmplitudes a;
    a.k = k;
    a.rL = a.rR = -(std::cos(p.phi) + ck) / den;
    a.tL = Complex(0.0, 1.0) * std::polar(1.0, -p.phi / 3.0) * sk *
           (std::polar(1.0, p.phi) + 2.0 * ck - eig) / den;
    a.tR = Complex(0.0, 1.0) * std::polar(1.0, p.phi / 3.0) * sk *
           (std::polar(1.0, -p.phi) + 2.0 * ck - eig) / den;
    return a;
}

/// Amplitudes of the conjugate Hamiltonian H^dagger, i.e. gamma -> -gamma.
/// At (k, phi) = (gamma, pi - gamma) this hits the spectral singularity.
inline ScatteringAmplitudes conjugate_amplitudes(Momentum k, const TriangleParams& p) {
    return closed_form_amplitudes(k, TriangleParams(p.hopping, -p.gamma, p.phi));
}

/// The perfect-diode operating point for a given loss phase.
struct DiodePoint {
    Momentum kc;
    double phic;
    Complex tR_target;
};

/// kc = gamma, phic = pi - gamma, tR = e^{i pi/3} e^{-i 4 gamma / 3}.
inline DiodePoint diode_point(double gamma) {
    if (!(gamma > 0.0 && gamma < kPi))
        throw std::invalid_argument("diode_point: gamma must lie in (0, pi)");
    return {Momentum(gamma), kPi - gamma,
            std::polar(1.0, kPi / 3.0 - 4.0 * gamma / 3.0)};
}

/// Approach paths toward the conjugate-Hamiltonian singularity at
/// (k, phi) = (gamma, pi - gamma).
enum class LimitPath {
    KAbove,    // phi = pi - k, k -> gamma from above
    KBelow,    // phi = pi - k, k -> gamma from below
    PhiAbove,  // k = gamma, phi -> (pi - gamma) from above
    PhiBelow,  // k = gamma, phi -> (pi - gamma) from below
};

struct LimitProbeSample {
    double offset;  // distance of the approach parameter from the endpoint
    Complex rBar, tLBar, tRBar;
};

struct LimitProbeReport {
    LimitPath path;
    double gamma = 0.0;
    std::vector<LimitProbeSample> samples;  // strictly decreasing offsets
    bool tL_divergent = false;
    int tL_real_sign = 0;
    int tL_imag_sign = 0;
    Complex tR_target;  // e^{i pi/3} e^{-i 4 gamma/3}
    double tR_deviation = 0.0;   // |tRBar - target| at the smallest offset
    double rBar_magnitude = 0.0; // |rBar| at the smallest offset
};

/// Evaluate the conjugate amplitudes along a geometric approach sequence
/// (offsets 10^-1 ... 10^-steps). The singular endpoint itself is never hit.
inline LimitProbeReport limit_path_probe(double gamma, LimitPath path, int steps = 8) {
    if (steps < 3) throw std::invalid_argument("limit_path_probe: steps must be >= 3");
    if (!(gamma > 0.0 && gamma < kPi))
        throw std::invalid_argument("limit_path_probe: gamma must lie in (0, pi)");
    const TriangleParams base(1.0, gamma, kPi - gamma);
    constexpr double kDivergenceThreshold = 1e3;

    LimitProbeReport report;
    report.path = path;
    report.gamma = gamma;
    report.tR_target = diode_point(gamma).tR_target;
    for (int s = 1; s <= steps; ++s) {
        const double offset = std::pow(10.0, -s);
        double k = gamma, phi = kPi - gamma;
        switch (path) {
            case LimitPath::KAbove: k = gamma + offset; phi = kPi - k; break;
            case LimitPath::KBelow: k = gamma - offset; phi = kPi - k; break;
            case LimitPath::PhiAbove: phi += offset; break;
            case LimitPath::PhiBelow: phi -= offset; break;
        }
        const auto a = conjugate_amplitudes(Momentum(k), TriangleParams(1.0, gamma, phi));
        report.samples.push_back({offset, a.rL, a.tL, a.tR});
    }
    const auto& last = report.samples.back();
    report.tL_divergent = std::abs(last.tLBar) > kDivergenceThreshold;
    report.tL_real_sign = (last.tLBar.real() > 0.0) - (last.tLBar.real() < 0.0);
    report.tL_imag_sign = (last.tLBar.imag() > 0.0) - (last.tLBar.imag() < 0.0);
    report.tR_deviation = std::abs(last.tRBar - report.tR_target);
    report.rBar_magnitude = std::abs(last.rBar);
    return report;
}

}  // namespace nhdiode
