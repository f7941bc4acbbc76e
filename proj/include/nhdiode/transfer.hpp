#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "nhdiode/analytic.hpp"
#include "nhdiode/core.hpp"
#include "nhdiode/errors.hpp"
#include "nhdiode/solver.hpp"

namespace nhdiode {

/// 2x2 matrix connecting plane-wave coefficients at -infinity to +infinity,
///   (A+, B+)^T = M (A-, B-)^T,
/// built from the Jost solutions. M22 = 1/tR; det M = tL/tR.
struct TransferMatrix {
    Complex m11, m12, m21, m22;
    Momentum k;

    Complex determinant() const { return m11 * m22 - m12 * m21; }
};

/// Throws ZeroTransmission when |tR| <= 1e-14 (the matrix is undefined).
inline TransferMatrix transfer_matrix(const ScatteringAmplitudes& a) {
    if (std::abs(a.tR) <= 1e-14) throw ZeroTransmission();
    TransferMatrix m;
    m.k = a.k;
    m.m11 = (a.tL * a.tR - a.rR * a.rR) / a.tR;
    m.m12 = a.rR / a.tR;
    m.m21 = -a.rR / a.tR;
    m.m22 = 1.0 / a.tR;
    return m;
}

/// |M22| = |1/tR| from the two-lead solve. A value near zero flags a
/// zero-flux singularity candidate; under nonzero flux a singularity can
/// exist with this value staying finite.
inline double m22_criterion(const CenterGraph& center, Momentum k) {
    const auto right = solve_two_lead(center, k, Side::Right);
    return 1.0 / std::abs(*right.tR);
}

struct SingularityHit {
    Momentum k;
    double gamma = 0.0;
    double omega_residual = 0.0;   // |Omega| after refinement
    double sinkc_residual = 0.0;   // |sin k + (cos gamma + 1) / (2 sin gamma)|
};

struct SingularityScan {
    std::vector<SingularityHit> hits;
    double min_abs_omega = std::numeric_limits<double>::infinity();
    double argmin_k = 0.0;
    double argmin_gamma = 0.0;
};

namespace detail {

struct OmegaPoint {
    Complex value, d_k, d_gamma;
};

// Omega and its analytic partials at phi = 0.
inline OmegaPoint omega_zero_flux(double k, double gamma) {
    const Complex eik = phase(k);
    const Complex eig = phase(gamma);
    const double sk = std::sin(k), ck = std::cos(k);
    const Complex inner = Complex(0.0, sk) * (2.0 * ck - eig) + eik + 1.0;
    OmegaPoint p;
    p.value = eik * inner;
    p.d_k = Complex(0.0, 1.0) * p.value +
            eik * (Complex(0.0, ck) * (2.0 * ck - eig) - Complex(0.0, 2.0 * sk) * sk +
                   Complex(0.0, 1.0) * eik);
    p.d_gamma = eik * sk * eig;  // d/dgamma [i sk (-e^{i gamma})] = sk e^{i gamma}
    return p;
}

// Damped Newton on (Re Omega, Im Omega) in the variables (k, gamma).
inline bool refine_zero(double& k, double& gamma, double tol = 1e-12, int max_iter = 60) {
    double fk = std::abs(omega_zero_flux(k, gamma).value);
    for (int it = 0; it < max_iter; ++it) {
        if (fk <= tol) return true;
        const auto p = omega_zero_flux(k, gamma);
        const double a = p.d_k.real(), b = p.d_gamma.real();
        const double c = p.d_k.imag(), d = p.d_gamma.imag();
        const double det = a * d - b * c;
        if (det == 0.0 || !std::isfinite(det)) return false;
        const double dk = (d * p.value.real() - b * p.value.imag()) / det;
        const double dg = (-c * p.value.real() + a * p.value.imag()) / det;
        double damp = 1.0;
        for (int half = 0; half < 12; ++half) {
            const double kn = k - damp * dk, gn = gamma - damp * dg;
            const double fn = std::abs(omega_zero_flux(kn, gn).value);
            if (fn < fk) {
                k = kn;
                gamma = gn;
                fk = fn;
                break;
            }
            damp *= 0.5;
            if (half == 11) return fk <= tol;
        }
    }
    return fk <= tol;
}

}  // namespace detail

/// Locate joint zeros of Re Omega and Im Omega at phi = 0 by grid scan plus
/// damped Newton refinement. Defaults keep clear of the band edges, where
/// Omega vanishes trivially (sin k = 0 at k = -pi for every gamma). A
/// degenerate range pins that variable: hits refined away from the line are
/// rejected, so such scans report the grid minimum of |Omega| instead.
inline SingularityScan scan_zero_flux_singularities(double gamma_lo = 0.02,
                                                    double gamma_hi = kPi - 0.02,
                                                    double k_lo = -kPi + 0.02, double k_hi = -0.02,
                                                    int gamma_steps = 160, int k_steps = 160) {
    if (gamma_lo > gamma_hi || k_lo > k_hi)
        throw std::invalid_argument("scan: empty range");
    const int ng = std::max(1, gamma_steps);
    const int nk = std::max(1, k_steps);
    const double dg = ng > 1 ? (gamma_hi - gamma_lo) / (ng - 1) : 0.0;
    const double dk = nk > 1 ? (k_hi - k_lo) / (nk - 1) : 0.0;

    SingularityScan scan;
    std::vector<double> mag(static_cast<size_t>(ng) * nk);
    for (int ig = 0; ig < ng; ++ig)
        for (int ik = 0; ik < nk; ++ik) {
            const double g = gamma_lo + ig * dg;
            const double k = k_lo + ik * dk;
            const double m = std::abs(detail::omega_zero_flux(k, g).value);
            mag[static_cast<size_t>(ig) * nk + ik] = m;
            if (m < scan.min_abs_omega) {
                scan.min_abs_omega = m;
                scan.argmin_k = k;
                scan.argmin_gamma = g;
            }
        }

    auto at = [&](int ig, int ik) { return mag[static_cast<size_t>(ig) * nk + ik]; };
    const double box_tol = 1e-9;
    for (int ig = 0; ig < ng; ++ig)
        for (int ik = 0; ik < nk; ++ik) {
            const double m = at(ig, ik);
            if (m > 0.5) continue;  // seeds only near candidate zeros
            if (ig > 0 && at(ig - 1, ik) < m) continue;
            if (ig + 1 < ng && at(ig + 1, ik) < m) continue;
            if (ik > 0 && at(ig, ik - 1) < m) continue;
            if (ik + 1 < nk && at(ig, ik + 1) < m) continue;
            double k = k_lo + ik * dk, g = gamma_lo + ig * dg;
            if (!detail::refine_zero(k, g)) continue;
            if (g < gamma_lo - box_tol || g > gamma_hi + box_tol) continue;
            if (k < k_lo - box_tol || k > k_hi + box_tol) continue;
            if (std::abs(std::sin(k)) < 1e-2) continue;  // band-edge artifact
            const bool duplicate =
                std::any_of(scan.hits.begin(), scan.hits.end(), [&](const SingularityHit& h) {
                    return std::abs(h.gamma - g) < 1e-6 && std::abs(h.k.k - k) < 1e-6;
                });
            if (duplicate) continue;
            SingularityHit hit;
            hit.k = Momentum(k);
            hit.gamma = g;
            hit.omega_residual = std::abs(detail::omega_zero_flux(k, g).value);
            hit.sinkc_residual =
                std::abs(std::sin(k) + (std::cos(g) + 1.0) / (2.0 * std::sin(g)));
            scan.hits.push_back(hit);
        }
    std::sort(scan.hits.begin(), scan.hits.end(),
              [](const SingularityHit& a, const SingularityHit& b) { return a.gamma < b.gamma; });
    return scan;
}

/// Checks of the reflectionless-absorption eigenfunction at a zero-flux
/// singularity: the r/t limits, the two-sided incoming plane wave, and the
/// inward group velocities.
struct RaReport {
    double ratio_deviation_left = 0.0;   // |rL/tL - 1| at the smallest offset
    double ratio_deviation_right = 0.0;  // |rR/tR - 1|
    double plane_wave_residual = 0.0;    // defect of the incoming plane-wave state
    double velocity_left = 0.0;          // group velocity of the left branch e^{-i k_c j}
    double velocity_right = 0.0;         // and of the right branch e^{+i k_c j}
    bool inflow_both_sides = false;
};

/// Throws NotSingular when |Omega(kc, 0, gamma_star)| > 1e-6.
inline RaReport ra_eigenfunction_check(double gamma_star, Momentum kc) {
    const double mag = std::abs(omega(kc, 0.0, gamma_star));
    if (mag > 1e-6) throw NotSingular(mag);

    RaReport rep;
    const TriangleParams p(1.0, gamma_star, 0.0);
    for (const double sign : {1.0, -1.0}) {
        const auto a = closed_form_amplitudes(Momentum(kc.k + sign * 1e-6), p);
        rep.ratio_deviation_left = std::max(rep.ratio_deviation_left, std::abs(a.rL / a.tL - 1.0));
        rep.ratio_deviation_right = std::max(rep.ratio_deviation_right, std::abs(a.rR / a.tR - 1.0));
    }

    // state e^{-i k_c j} on the left, e^{+i k_c j} on the right; the site-0
    // amplitude follows from its own equation, the port equations must then
    // close on their own
    const double k = kc.k;
    const double E = -2.0 * std::cos(k);
    const Complex V = -detail::phase(gamma_star);
    const Complex psi_m1 = detail::phase(k);        // e^{-i k (-1)}
    const Complex psi_p1 = detail::phase(k);        // e^{+i k (+1)}
    const Complex psi_0 = (psi_m1 + psi_p1) / (V - E);
    const Complex psi_m2 = detail::phase(2.0 * k);  // e^{-i k (-2)}
    const Complex psi_p2 = detail::phase(2.0 * k);
    const Complex res_left = -psi_m2 - psi_0 - psi_p1 - E * psi_m1;
    const Complex res_right = -psi_p2 - psi_0 - psi_m1 - E * psi_p1;
    rep.plane_wave_residual = std::max(std::abs(res_left), std::abs(res_right));

    rep.velocity_left = group_velocity(Momentum(-k));
    rep.velocity_right = group_velocity(kc);
    rep.inflow_both_sides = rep.velocity_left > 0.0 && rep.velocity_right < 0.0;
    return rep;
}

}  // namespace nhdiode
