#pragma once

#include <optional>
#include <random>
#include <vector>

#include "nhdiode/core.hpp"
#include "nhdiode/errors.hpp"
#include "nhdiode/solver.hpp"

namespace nhdiode {

/// Symmetry flags hold at residual <= 1e-12 (in units of the lead hopping).
inline constexpr double kSymmetryTolerance = 1e-12;

/// Classification of a center under parity P (site mirror exchanging the
/// ports), time reversal T (complex conjugation), PT, and PF (parity
/// combined with flux reversal). P, PT and PF need a mirror permutation;
/// T and Hermiticity do not.
struct SymmetryReport {
    std::vector<int> mirror;  // empty when none could be derived
    double t_residual = 0.0;
    std::optional<double> p_residual, pt_residual, pf_residual;
    double hermiticity_defect = 0.0;
    double tolerance = kSymmetryTolerance;

    bool has_mirror() const { return !mirror.empty(); }
    bool t() const { return t_residual <= tolerance; }
    bool p() const { return p_residual && *p_residual <= tolerance; }
    bool pt() const { return pt_residual && *pt_residual <= tolerance; }
    bool pf() const { return pf_residual && *pf_residual <= tolerance; }
    bool hermitian() const { return hermiticity_defect <= tolerance; }
};

/// Port-exchanging involution for small centers. Guaranteed for n <= 3
/// (for the triangle: ports swap, the middle site stays); larger centers
/// must supply their own permutation.
inline std::vector<int> derive_mirror(const CenterGraph& c) {
    const int n = c.size();
    std::vector<int> m(n);
    for (int i = 0; i < n; ++i) m[i] = i;
    if (c.coincident_ports()) {
        if (n <= 2) return m;  // identity fixes the port
        if (n == 3) {
            // fix the port, swap the remaining two sites
            std::vector<int> rest;
            for (int i = 0; i < n; ++i)
                if (i != c.port_left) rest.push_back(i);
            std::swap(m[rest[0]], m[rest[1]]);
            return m;
        }
    } else {
        std::swap(m[c.port_left], m[c.port_right]);
        if (n <= 3) return m;
    }
    throw NoMirror("no port-exchanging permutation auto-derivable for " + std::to_string(n) +
                   " sites; supply one");
}

inline SymmetryReport classify_symmetries(const CenterGraph& c, const std::vector<int>& mirror) {
    c.validate();
    const int n = c.size();
    if (static_cast<int>(mirror.size()) != n)
        throw std::invalid_argument("classify_symmetries: mirror size mismatch");
    if (mirror[c.port_left] != c.port_right)
        throw std::invalid_argument("classify_symmetries: mirror must exchange the ports");

    const Matrix h = c.matrix();
    const Matrix hf = flux_flip(c).matrix();
    SymmetryReport rep;
    rep.tolerance = kSymmetryTolerance * c.lead_hopping;
    rep.mirror = mirror;
    rep.t_residual = (h.conjugate() - h).cwiseAbs().maxCoeff();
    rep.hermiticity_defect = (h - h.adjoint()).cwiseAbs().maxCoeff();
    double p = 0.0, pt = 0.0, pf = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Complex mirrored = h(mirror[i], mirror[j]);
            p = std::max(p, std::abs(mirrored - h(i, j)));
            pt = std::max(pt, std::abs(std::conj(mirrored) - h(i, j)));
            pf = std::max(pf, std::abs(hf(mirror[i], mirror[j]) - h(i, j)));
        }
    rep.p_residual = p;
    rep.pt_residual = pt;
    rep.pf_residual = pf;
    return rep;
}

/// Auto-derives the mirror; throws NoMirror when that fails (n > 3).
inline SymmetryReport classify_symmetries(const CenterGraph& c) {
    return classify_symmetries(c, derive_mirror(c));
}

// Like classify_symmetries but degrades gracefully when no mirror exists:
// mirror-based residuals stay unset, so those identities read not-applicable.
inline SymmetryReport classify_symmetries_lenient(const CenterGraph& c) {
    try {
        return classify_symmetries(c);
    } catch (const NoMirror&) {
        const Matrix h = c.matrix();
        SymmetryReport rep;
        rep.tolerance = kSymmetryTolerance * c.lead_hopping;
        rep.t_residual = (h.conjugate() - h).cwiseAbs().maxCoeff();
        rep.hermiticity_defect = (h - h.adjoint()).cwiseAbs().maxCoeff();
        return rep;
    }
}

/// Worst residual per amplitude identity over a momentum grid. An unset
/// optional means the identity is not applicable to this center (the
/// required symmetry flag is off). Momenta where the solver reported a
/// singular system are listed in `skipped`.
struct IdentityLedger {
    double rt1 = 0.0;  // t_L^{-k} t_R^k + r_L^{-k} r_L^k = 1 (and L <-> R)
    double rt2 = 0.0;  // t_L^{-k} r_R^k + r_L^{-k} t_L^k = 0 (and L <-> R)
    std::optional<double> crt1, crt2;          // conjugated forms, T-symmetric centers
    std::optional<double> continuity;          // |t|^2 + |r|^2 = 1, Hermitian centers
    std::optional<double> herm_symmetry;       // |tL| = |tR|, Hermitian centers
    std::optional<double> pt_modulus;          // |tL| = |tR|, PT-symmetric centers
    std::optional<double> pf_flip;             // amplitudes vs the flux-flipped center
    std::vector<double> skipped;               // momenta skipped as singular
};

inline IdentityLedger audit_identities(const CenterGraph& c, const std::vector<Momentum>& k_grid,
                                       const SymmetryReport& rep) {
    IdentityLedger led;
    if (rep.t()) led.crt1 = led.crt2 = 0.0;
    if (rep.hermitian()) led.continuity = led.herm_symmetry = 0.0;
    if (rep.pt()) led.pt_modulus = 0.0;
    if (rep.pf()) led.pf_flip = 0.0;
    const CenterGraph flipped = flux_flip(c);

    auto bump = [](std::optional<double>& slot, double v) {
        if (slot) *slot = std::max(*slot, v);
    };
    for (const Momentum km : k_grid) {
        try {
            const auto a = two_lead_amplitudes(c, km);
            const auto am = two_lead_amplitudes(c, Momentum(-km.k));
            led.rt1 = std::max({led.rt1, std::abs(am.tL * a.tR + am.rL * a.rL - 1.0),
                                std::abs(am.tR * a.tL + am.rR * a.rR - 1.0)});
            led.rt2 = std::max({led.rt2, std::abs(am.tL * a.rR + am.rL * a.tL),
                                std::abs(am.tR * a.rL + am.rR * a.tR)});
            bump(led.crt1, std::abs(std::conj(a.tL) * a.tR + std::conj(a.rL) * a.rL - 1.0));
            bump(led.crt2, std::abs(std::conj(a.tL) * a.rR + std::conj(a.rL) * a.tL));
            bump(led.continuity, std::abs(std::norm(a.tL) + std::norm(a.rL) - 1.0));
            bump(led.continuity, std::abs(std::norm(a.tR) + std::norm(a.rR) - 1.0));
            bump(led.herm_symmetry, std::abs(std::abs(a.tL) - std::abs(a.tR)));
            bump(led.pt_modulus, std::abs(std::abs(a.tL) - std::abs(a.tR)));
            if (led.pf_flip) {
                const auto af = two_lead_amplitudes(flipped, km);
                bump(led.pf_flip, std::abs(a.tL - af.tR));
                bump(led.pf_flip, std::abs(a.rL - af.rR));
            }
        } catch (const SingularSystem&) {
            led.skipped.push_back(km.k);
        }
    }
    return led;
}

inline IdentityLedger audit_identities(const CenterGraph& c, const std::vector<Momentum>& k_grid) {
    return audit_identities(c, k_grid, classify_symmetries_lenient(c));
}

/// Signed diode contrast |tR|^2 - |tL|^2 from the two-lead solve;
/// +1 at a perfect right-passing diode point.
inline double asymmetry_metric(const CenterGraph& c, Momentum k) {
    const auto a = two_lead_amplitudes(c, k);
    return std::norm(a.tR) - std::norm(a.tL);
}

/// Dense random non-Hermitian center with entries in the unit box,
/// 2..max_sites sites, ports on the first and last site.
inline CenterGraph random_center(std::mt19937_64& rng, int max_sites = 6) {
    std::uniform_int_distribution<int> size_dist(2, max_sites);
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    const int n = size_dist(rng);
    CenterGraph c;
    c.hopping = Matrix::Zero(n, n);
    c.onsite = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double re = box(rng), im = box(rng);
            if (i != j) c.hopping(i, j) = Complex(re, im);
        }
        c.onsite(i) = Complex(box(rng), box(rng));
    }
    c.port_left = 0;
    c.port_right = n - 1;
    c.lead_hopping = 1.0;
    return c;
}

/// Two-site balanced gain/loss center with real hopping: PT-symmetric,
/// so |tL| = |tR| even though the transmissions differ in phase.
inline CenterGraph build_pt_dimer(double strength = 0.3, double hopping = 1.0) {
    CenterGraph c;
    c.hopping = Matrix::Zero(2, 2);
    c.hopping(0, 1) = c.hopping(1, 0) = -hopping;
    c.onsite = Vector::Zero(2);
    c.onsite(0) = Complex(0.0, strength);
    c.onsite(1) = Complex(0.0, -strength);
    c.port_left = 0;
    c.port_right = 1;
    c.lead_hopping = hopping;
    return c;
}

}  // namespace nhdiode
