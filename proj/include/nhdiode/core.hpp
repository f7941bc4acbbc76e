#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "nhdiode/errors.hpp"

namespace nhdiode {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Signed wave number on the cosine band, in radians per site.
struct Momentum {
    double k = 0.0;
    constexpr Momentum(double k = 0.0) : k(k) {}
    /// A plane wave carries current only for 0 < |k| < pi.
    bool propagating() const { return std::abs(k) > 0.0 && std::abs(k) < kPi; }
};

/// E(k) = -2 J cos k. Requires J > 0.
inline double dispersion(Momentum k, double hopping = 1.0) {
    return -2.0 * hopping * std::cos(k.k);
}

/// v(k) = dE/dk = 2 J sin k; the sign carries the propagation direction.
inline double group_velocity(Momentum k, double hopping = 1.0) {
    return 2.0 * hopping * std::sin(k.k);
}

inline double reduce_to_two_pi(double angle) {
    double reduced = std::fmod(angle, kTwoPi);
    if (reduced < 0.0) reduced += kTwoPi;
    if (reduced >= kTwoPi) reduced = 0.0;
    return reduced;
}

/// Parameters of the triangular ring center: hopping J, potential phase
/// gamma (on-site potential V = -J e^{i gamma}) and ring flux phi.
/// The flux is stored reduced to [0, 2pi); the per-bond phase is phi/3.
struct TriangleParams {
    double hopping = 1.0;
    double gamma = 0.0;
    double phi = 0.0;

    TriangleParams(double hopping, double gamma, double phi)
        : hopping(hopping), gamma(gamma), phi(reduce_to_two_pi(phi)) {
        if (!(hopping > 0.0) || !std::isfinite(hopping))
            throw std::invalid_argument("TriangleParams: hopping must be positive and finite");
        if (!std::isfinite(gamma) || !std::isfinite(phi))
            throw std::invalid_argument("TriangleParams: angles must be finite");
    }

    /// V = -J e^{i gamma}; Im V <= 0 (loss) exactly for gamma in [0, pi].
    Complex onsite_potential() const { return -hopping * std::polar(1.0, gamma); }
};

/// A finite scattering center attached to two semi-infinite leads.
/// hopping(i, j) multiplies a_i^dagger a_j and need not be Hermitian;
/// on-site terms live only in `onsite` (the hopping diagonal is zero).
struct CenterGraph {
    Matrix hopping;
    Vector onsite;
    int port_left = 0;
    int port_right = 0;
    double lead_hopping = 1.0;

    int size() const { return static_cast<int>(onsite.size()); }
    bool coincident_ports() const { return port_left == port_right; }

    /// Single-particle matrix H_ij = hopping(i, j) + delta_ij onsite(i).
    Matrix matrix() const {
        Matrix h = hopping;
        h.diagonal() += onsite;
        return h;
    }

    double hermiticity_defect() const {
        Matrix h = matrix();
        return (h - h.adjoint()).cwiseAbs().maxCoeff();
    }
    bool hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }

    void validate() const {
        const int n = size();
        if (n < 1) throw std::invalid_argument("CenterGraph: needs at least one site");
        if (hopping.rows() != n || hopping.cols() != n)
            throw std::invalid_argument("CenterGraph: hopping must be n x n");
        if (hopping.diagonal().cwiseAbs().maxCoeff() != 0.0)
            throw std::invalid_argument("CenterGraph: hopping diagonal must be zero");
        if (port_left < 0 || port_left >= n || port_right < 0 || port_right >= n)
            throw std::invalid_argument("CenterGraph: ports out of range");
        if (!(lead_hopping > 0.0))
            throw std::invalid_argument("CenterGraph: lead hopping must be positive");
    }
};

/// Three sites labelled (-1, 0, 1) map to indices (0, 1, 2). Each directed
/// ring bond -1 -> 0 -> 1 -> -1 carries phase phi/3; site 0 holds V.
inline CenterGraph build_triangle_center(const TriangleParams& p) {
    const Complex bond = -p.hopping * std::polar(1.0, p.phi / 3.0);
    CenterGraph c;
    c.hopping = Matrix::Zero(3, 3);
    c.hopping(1, 0) = c.hopping(2, 1) = c.hopping(0, 2) = bond;
    c.hopping(0, 1) = c.hopping(1, 2) = c.hopping(2, 0) = std::conj(bond);
    c.onsite = Vector::Zero(3);
    c.onsite(1) = p.onsite_potential();
    c.port_left = 0;
    c.port_right = 2;
    c.lead_hopping = p.hopping;
    return c;
}

/// Hermitian conjugate center: hopping -> hopping^dagger, onsite -> conj.
inline CenterGraph dagger_center(const CenterGraph& c) {
    CenterGraph d = c;
    d.hopping = c.hopping.adjoint();
    d.onsite = c.onsite.conjugate();
    return d;
}

/// Flux reversal: every directed bond phase flips, i.e. hopping -> hopping^T.
/// For the triangle this realizes phi -> -phi exactly.
inline CenterGraph flux_flip(const CenterGraph& c) {
    CenterGraph f = c;
    f.hopping = c.hopping.transpose();
    return f;
}

/// Hard-wall truncation of the infinite system: nLeft lead sites, the center
/// block, nRight lead sites. Lead coordinates follow the infinite-chain
/// convention (ports sit at -1/+1, or at 0 when coincident), so tests can
/// address sites by those coordinates.
struct FiniteChain {
    SparseMatrix hamiltonian;
    int n_left = 0;
    int n_right = 0;
    int center_sites = 0;
    int port_left = 0;
    int port_right = 0;

    int dim() const { return n_left + center_sites + n_right; }
    bool coincident_ports() const { return port_left == port_right; }

    int first_center_row() const { return n_left; }
    int first_right_row() const { return n_left + center_sites; }

    /// Coordinate of the innermost left/right lead site (-2/+2, or -1/+1 for
    /// a single-attachment center).
    int inner_left_coordinate() const { return coincident_ports() ? -1 : -2; }
    int inner_right_coordinate() const { return coincident_ports() ? 1 : 2; }

    /// Row index for a lead or port coordinate; interior center sites other
    /// than the ports have no 1-D coordinate.
    int row_for_coordinate(int j) const {
        const int inl = inner_left_coordinate();
        const int inr = inner_right_coordinate();
        if (j <= inl) {
            const int offset = inl - j;  // 0 = innermost
            if (offset >= n_left) throw std::out_of_range("coordinate beyond left wall");
            return n_left - 1 - offset;
        }
        if (j >= inr) {
            const int offset = j - inr;
            if (offset >= n_right) throw std::out_of_range("coordinate beyond right wall");
            return first_right_row() + offset;
        }
        if (j == (coincident_ports() ? 0 : -1)) return n_left + port_left;
        if (!coincident_ports() && j == 1) return n_left + port_right;
        if (j == 0 && center_sites == 3 && port_left == 0 && port_right == 2) return n_left + 1;
        throw std::out_of_range("coordinate " + std::to_string(j) + " has no mapped site");
    }

    /// Coordinate used for envelope evaluation; interior center sites
    /// without a lead coordinate count as 0.
    double envelope_coordinate(int row) const {
        if (row < n_left) return inner_left_coordinate() - (n_left - 1 - row);
        if (row >= first_right_row()) return inner_right_coordinate() + (row - first_right_row());
        const int s = row - n_left;
        if (coincident_ports()) return 0.0;
        if (s == port_left) return -1.0;
        if (s == port_right) return 1.0;
        return 0.0;
    }
};

/// Assemble the truncated Hamiltonian with open walls at both outer ends.
/// Throws std::length_error when the total dimension exceeds `max_dim`,
/// which signals a misconfigured experiment.
inline FiniteChain build_finite_chain(const CenterGraph& center, int n_left, int n_right,
                                      int max_dim = 5000) {
    center.validate();
    if (n_left < 0 || n_right < 0)
        throw std::invalid_argument("build_finite_chain: lead lengths must be non-negative");
    const int n = center.size();
    const int dim = n_left + n + n_right;
    if (dim > max_dim)
        throw std::length_error("build_finite_chain: dimension " + std::to_string(dim) +
                                " exceeds cap " + std::to_string(max_dim));

    FiniteChain chain;
    chain.n_left = n_left;
    chain.n_right = n_right;
    chain.center_sites = n;
    chain.port_left = center.port_left;
    chain.port_right = center.port_right;

    std::vector<Eigen::Triplet<Complex>> entries;
    const Complex lead(-center.lead_hopping, 0.0);
    for (int i = 0; i + 1 < n_left; ++i) {
        entries.emplace_back(i, i + 1, lead);
        entries.emplace_back(i + 1, i, lead);
    }
    const int c0 = n_left;
    for (int i = 0; i < n; ++i) {
        if (center.onsite(i) != 0.0) entries.emplace_back(c0 + i, c0 + i, center.onsite(i));
        for (int j = 0; j < n; ++j)
            if (i != j && center.hopping(i, j) != 0.0)
                entries.emplace_back(c0 + i, c0 + j, center.hopping(i, j));
    }
    const int r0 = c0 + n;
    for (int i = 0; i + 1 < n_right; ++i) {
        entries.emplace_back(r0 + i, r0 + i + 1, lead);
        entries.emplace_back(r0 + i + 1, r0 + i, lead);
    }
    if (n_left > 0) {
        entries.emplace_back(c0 - 1, c0 + center.port_left, lead);
        entries.emplace_back(c0 + center.port_left, c0 - 1, lead);
    }
    if (n_right > 0) {
        entries.emplace_back(r0, c0 + center.port_right, lead);
        entries.emplace_back(c0 + center.port_right, r0, lead);
    }

    chain.hamiltonian.resize(dim, dim);
    chain.hamiltonian.setFromTriplets(entries.begin(), entries.end());
    return chain;
}

}  // namespace nhdiode
