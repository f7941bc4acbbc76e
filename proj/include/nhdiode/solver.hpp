#pragma once

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "nhdiode/analytic.hpp"
#include "nhdiode/core.hpp"
#include "nhdiode/errors.hpp"

namespace nhdiode {

enum class Side { Left, Right };
enum class Geometry { TwoLead, SemiInfiniteLeft, SemiInfiniteRight };

/// Condition estimates above this flag the matching system as singular.
inline constexpr double kConditionLimit = 1e12;

struct ScatterConfig {
    CenterGraph center;
    Geometry geometry = Geometry::TwoLead;
    Side incidence = Side::Left;

    void validate() const {
        center.validate();
        if (geometry == Geometry::SemiInfiniteLeft && incidence != Side::Left)
            throw std::invalid_argument("SemiInfiniteLeft requires left incidence");
        if (geometry == Geometry::SemiInfiniteRight && incidence != Side::Right)
            throw std::invalid_argument("SemiInfiniteRight requires right incidence");
    }
};

struct ScatterSolution {
    Geometry geometry = Geometry::TwoLead;
    Side incidence = Side::Left;
    Momentum k;
    std::optional<Complex> rL, rR, tL, tR;
    Vector interior;          // amplitude on every center site
    double residual = 0.0;    // max |(H - E) psi| over matched sites
    double condition = 0.0;   // condition estimate of the matching system

    Complex reflection() const { return incidence == Side::Left ? *rL : *rR; }
    std::optional<Complex> transmission() const { return incidence == Side::Left ? tL : tR; }
};

namespace detail {

inline Complex phase(double x) { return std::polar(1.0, x); }

// Everything is phrased in the incidence frame u = +-j (u = j for left
// incidence, u = -j for right): the incidence port sits at u = -1 (0 when
// ports coincide), its lead at u <= -2, the far port at u = +1. In this
// frame both incidences share one ansatz,
//   near lead: e^{iku} + r e^{-iku},   far lead: t e^{iku},
// and the incident wave has amplitude exactly 1 at u = 0.
struct Frame {
    double k;
    int port_in, port_out;
    bool coincident, two_lead;

    double port_in_coord() const { return coincident ? 0.0 : -1.0; }
    double inner_in() const { return coincident ? -1.0 : -2.0; }   // innermost lead coords
    double inner_out() const { return coincident ? 1.0 : 2.0; }

    Complex incident(double u) const { return phase(k * u); }
    Complex reflected_basis(double u) const { return phase(-k * u); }
    Complex transmitted_basis(double u) const { return phase(k * u); }
};

inline Frame make_frame(const CenterGraph& c, Momentum mom, Geometry geo, Side inc) {
    Frame f;
    f.k = mom.k;
    f.port_in = inc == Side::Left ? c.port_left : c.port_right;
    f.port_out = inc == Side::Left ? c.port_right : c.port_left;
    f.coincident = c.coincident_ports();
    f.two_lead = geo == Geometry::TwoLead;
    return f;
}

inline double evaluate_residual(const CenterGraph& c, Momentum mom, Geometry geo, Side inc,
                                Complex r, std::optional<Complex> t, const Vector& psi_center) {
    const Frame f = make_frame(c, mom, geo, inc);
    const double E = dispersion(mom, c.lead_hopping);
    const double J = c.lead_hopping;
    const Matrix h = c.matrix();
    auto near_value = [&](double j) { return f.incident(j) + r * f.reflected_basis(j); };
    auto far_value = [&](double j) { return *t * f.transmitted_basis(j); };

    double worst = 0.0;
    for (int i = 0; i < c.size(); ++i) {
        Complex lhs = (h.row(i) * psi_center).value() - E * psi_center(i);
        if (i == f.port_in) lhs += -J * near_value(f.inner_in());
        if (f.two_lead && i == f.port_out) lhs += -J * far_value(f.inner_out());
        worst = std::max(worst, std::abs(lhs));
    }
    // two innermost rows of each attached lead; the innermost one couples the
    // ansatz to the solved port amplitude
    const double ji = f.inner_in();
    worst = std::max(worst, std::abs(-J * (near_value(ji - 1.0) + psi_center(f.port_in)) -
                                     E * near_value(ji)));
    worst = std::max(worst, std::abs(-J * (near_value(ji - 2.0) + near_value(ji)) -
                                     E * near_value(ji - 1.0)));
    if (f.two_lead) {
        const double jo = f.inner_out();
        worst = std::max(worst, std::abs(-J * (far_value(jo + 1.0) + psi_center(f.port_out)) -
                                         E * far_value(jo)));
        worst = std::max(worst, std::abs(-J * (far_value(jo + 2.0) + far_value(jo)) -
                                         E * far_value(jo + 1.0)));
    }
    return worst;
}

inline ScatterSolution solve_matching(const CenterGraph& c, Momentum mom, Geometry geo, Side inc) {
    c.validate();
    if (!mom.propagating())
        throw std::invalid_argument("solver: momentum must satisfy 0 < |k| < pi");
    const int n = c.size();
    const Frame f = make_frame(c, mom, geo, inc);
    const double E = dispersion(mom, c.lead_hopping);
    const double J = c.lead_hopping;

    // unknown layout: [r, t?, interior...]; interior excludes sites whose
    // value is fixed by the ansatz (the incidence port always, the far port
    // only in the two-lead distinct-port geometry)
    std::vector<int> interior;
    for (int i = 0; i < n; ++i) {
        if (i == f.port_in) continue;
        if (f.two_lead && !f.coincident && i == f.port_out) continue;
        interior.push_back(i);
    }
    const int t_slot = f.two_lead ? 1 : -1;
    const int n_unknowns = (f.two_lead ? 2 : 1) + static_cast<int>(interior.size());

    // site value = known + coef . unknowns
    Matrix coef = Matrix::Zero(n, n_unknowns);
    Vector known = Vector::Zero(n);
    // lead term entering each port row, split the same way
    Matrix lead_coef = Matrix::Zero(n, n_unknowns);
    Vector lead_known = Vector::Zero(n);

    known(f.port_in) = f.incident(f.port_in_coord());
    coef(f.port_in, 0) = f.reflected_basis(f.port_in_coord());
    lead_known(f.port_in) += -J * f.incident(f.inner_in());
    lead_coef(f.port_in, 0) += -J * f.reflected_basis(f.inner_in());
    if (f.two_lead) {
        if (f.coincident) {
            lead_coef(f.port_in, t_slot) += -J * f.transmitted_basis(f.inner_out());
        } else {
            coef(f.port_out, t_slot) = f.transmitted_basis(1.0);
            lead_coef(f.port_out, t_slot) = -J * f.transmitted_basis(f.inner_out());
        }
    }
    int slot = f.two_lead ? 2 : 1;
    for (int i : interior) coef(i, slot++) = 1.0;

    const bool consistency_row = f.coincident && f.two_lead;  // port value: 1 + r = t
    const int rows = n + (consistency_row ? 1 : 0);
    Matrix A = Matrix::Zero(rows, n_unknowns);
    Vector b = Vector::Zero(rows);
    const Matrix h = c.matrix();
    for (int i = 0; i < n; ++i) {
        A.row(i) = h.row(i) * coef + lead_coef.row(i) - E * coef.row(i);
        b(i) = -(h.row(i) * known).value() - lead_known(i) + E * known(i);
    }
    if (consistency_row) {
        A(n, 0) = 1.0;
        A(n, t_slot) = -1.0;
        b(n) = -1.0;
    }

    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    const double cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (!std::isfinite(cond) || cond > kConditionLimit) throw SingularSystem(cond);
    const Vector x = svd.solve(b);

    ScatterSolution sol;
    sol.geometry = geo;
    sol.incidence = inc;
    sol.k = mom;
    sol.condition = cond;
    sol.interior = known + coef * x;
    const Complex r = x(0);
    std::optional<Complex> t;
    if (f.two_lead) t = x(t_slot);
    if (inc == Side::Left) {
        sol.rL = r;
        sol.tL = t;
    } else {
        sol.rR = r;
        sol.tR = t;
    }
    sol.residual = evaluate_residual(c, mom, geo, inc, r, t, sol.interior);
    return sol;
}

}  // namespace detail

/// Solve the two-lead scattering problem by direct linear solve of the
/// matching equations at E = -2 J cos k. The leads enter exactly through the
/// plane-wave ansatz, so the system has one row per center site. Throws
/// SingularSystem when the system is rank-deficient beyond tolerance, which
/// flags a spectral singularity of this center at this momentum.
inline ScatterSolution solve_two_lead(const CenterGraph& center, Momentum k, Side incidence) {
    return detail::solve_matching(center, k, Geometry::TwoLead, incidence);
}

/// One-lead variant: the cut-side port keeps its intra-center bonds but has
/// no lead term. `side` names the surviving lead, which is also the
/// incidence side.
inline ScatterSolution solve_semi_infinite(const CenterGraph& center, Momentum k, Side side) {
    return detail::solve_matching(
        center, k, side == Side::Left ? Geometry::SemiInfiniteLeft : Geometry::SemiInfiniteRight,
        side);
}

inline ScatterSolution solve_scatter(const ScatterConfig& config, Momentum k) {
    config.validate();
    return detail::solve_matching(config.center, k, config.geometry, config.incidence);
}

/// Both incidences combined into the full amplitude set at one momentum.
inline ScatteringAmplitudes two_lead_amplitudes(const CenterGraph& center, Momentum k) {
    const auto left = solve_two_lead(center, k, Side::Left);
    const auto right = solve_two_lead(center, k, Side::Right);
    return {k, *left.rL, *right.rR, *left.tL, *right.tR};
}

/// Re-evaluate the eigenvalue equation at every center site and the two
/// innermost sites of each attached lead; returns the max absolute defect.
inline double check_residual(const ScatterSolution& sol, const CenterGraph& center, Momentum k) {
    const Complex r = sol.incidence == Side::Left ? *sol.rL : *sol.rR;
    std::optional<Complex> t;
    if (sol.geometry == Geometry::TwoLead)
        t = sol.incidence == Side::Left ? sol.tL : sol.tR;
    return detail::evaluate_residual(center, k, sol.geometry, sol.incidence, r, t, sol.interior);
}

}  // namespace nhdiode
