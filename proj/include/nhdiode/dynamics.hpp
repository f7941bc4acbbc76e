#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "nhdiode/analytic.hpp"
#include "nhdiode/core.hpp"
#include "nhdiode/errors.hpp"
#include "nhdiode/solver.hpp"

namespace nhdiode {

/// Gaussian wave packet riding a plane-wave carrier. The envelope is
/// exp(-(j - j0)^2 / (4 sigma^2)), so |psi|^2 has standard deviation sigma
/// in sites and the momentum distribution has width 1/(2 sigma).
struct PacketSpec {
    double center_site = -152.0;  // paper coordinate j0
    double sigma = 15.0;
    double k0 = 2.0 * kPi / 3.0;
    int direction = +1;  // +1 right-moving carrier, -1 left-moving
};

/// Throws PacketTooWide unless the packet keeps 4 sigma of clearance from
/// the chain wall and from the scattering center on its lead.
inline Vector make_packet(const FiniteChain& chain, const PacketSpec& spec) {
    if (!(spec.sigma > 0.0)) throw std::invalid_argument("make_packet: sigma must be positive");
    if (!(spec.k0 > 0.0 && spec.k0 < kPi))
        throw std::invalid_argument("make_packet: k0 must lie in (0, pi)");
    const double margin = 4.0 * spec.sigma;
    const bool on_left = spec.center_site < 0.0;
    const double inner = on_left ? chain.inner_left_coordinate() : chain.inner_right_coordinate();
    const double wall = on_left ? chain.inner_left_coordinate() - (chain.n_left - 1)
                                : chain.inner_right_coordinate() + (chain.n_right - 1);
    const double to_center = std::abs(spec.center_site - inner);
    const double to_wall = std::abs(spec.center_site - wall);
    if (to_center < margin || to_wall < margin)
        throw PacketTooWide("packet at " + std::to_string(spec.center_site) + " with sigma " +
                            std::to_string(spec.sigma) + " violates 4-sigma separation");

    Vector psi(chain.dim());
    for (int row = 0; row < chain.dim(); ++row) {
        const double j = chain.envelope_coordinate(row);
        const double d = j - spec.center_site;
        const double envelope = std::exp(-d * d / (4.0 * spec.sigma * spec.sigma));
        psi(row) = envelope * std::polar(1.0, spec.k0 * spec.direction * j);
    }
    psi.normalize();
    return psi;
}

/// Sampled history of a packet run, with per-region probability accounting.
/// Region rows follow the Hamiltonian partition: incidence-side lead,
/// center block, far lead.
struct PacketTrajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<std::array<double, 3>> region_norms;  // left lead, center, right lead
    std::vector<double> total_norms;

    Side incidence = Side::Left;  // lead holding most of the initial norm
    double reflected = 0.0;       // final norm on the incidence lead
    double transmitted = 0.0;     // final norm on the far lead
    double absorbed = 0.0;        // 1 - final total norm

    double step_halving_error = 0.0;  // full step vs two half steps, first step
    int accepted_steps = 0;
    int rejected_steps = 0;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b (5th order) minus b_hat (4th order)
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

template <typename Rhs>
class AdaptiveStepper {
  public:
    AdaptiveStepper(Rhs rhs, double tol) : rhs_(std::move(rhs)), tol_(tol) {}

    // One accepted step from y at time t; dt_ is adjusted in place and never
    // exceeds dt_max. Returns the step size actually taken.
    double step(Vector& y, double dt_max) {
        using T = Dopri5;
        if (!k1_valid_) {
            k1_ = rhs_(y);
            k1_valid_ = true;
        }
        for (;;) {
            const double dt = std::min(dt_, dt_max);
            const Vector k2 = rhs_(y + dt * (T::a21 * k1_));
            const Vector k3 = rhs_(y + dt * (T::a31 * k1_ + T::a32 * k2));
            const Vector k4 = rhs_(y + dt * (T::a41 * k1_ + T::a42 * k2 + T::a43 * k3));
            const Vector k5 = rhs_(y + dt * (T::a51 * k1_ + T::a52 * k2 + T::a53 * k3 + T::a54 * k4));
            const Vector k6 =
                rhs_(y + dt * (T::a61 * k1_ + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5));
            const Vector y_new =
                y + dt * (T::b1 * k1_ + T::b3 * k3 + T::b4 * k4 + T::b5 * k5 + T::b6 * k6);
            const Vector k7 = rhs_(y_new);  // FSAL
            const double err = dt * (T::e1 * k1_ + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 +
                                     T::e6 * k6 + T::e7 * k7)
                                       .cwiseAbs()
                                       .maxCoeff();
            if (!std::isfinite(err)) {
                dt_ = dt * 0.2;
                ++rejected;
                continue;
            }
            const double scale =
                std::clamp(0.9 * std::pow(tol_ / std::max(err, 1e-300), 0.2), 0.2, 5.0);
            if (err <= tol_) {
                y = y_new;
                k1_ = k7;
                const double taken = dt;
                dt_ = std::min(dt * scale, dt_ceiling_);
                ++accepted;
                return taken;
            }
            dt_ = dt * scale;
            ++rejected;
        }
    }

    void reset_derivative() { k1_valid_ = false; }
    double current_dt() const { return dt_; }
    void set_dt(double dt) { dt_ = dt; }

    int accepted = 0;
    int rejected = 0;

  private:
    Rhs rhs_;
    double tol_;
    double dt_ = 1e-3;
    double dt_ceiling_ = 1.0;
    Vector k1_;
    bool k1_valid_ = false;
};

}  // namespace detail

/// Integrate i dpsi/dt = H psi with adaptive error-controlled stepping
/// (local error per step <= tol in the max norm). The trajectory is sampled
/// at `samples` uniformly spaced instants including t = 0 and t = T. The
/// first accepted step is re-done as two half steps and the difference is
/// recorded in step_halving_error. Throws BoundaryContact when, at any
/// sample, the 10 outermost sites of an attached lead carry norm >= 1e-8.
inline PacketTrajectory evolve(const FiniteChain& chain, const Vector& psi0, double duration,
                               double tol = 1e-9, int samples = 64) {
    if (samples < 50) throw std::invalid_argument("evolve: need at least 50 samples");
    if (!(duration > 0.0)) throw std::invalid_argument("evolve: duration must be positive");
    const SparseMatrix& h = chain.hamiltonian;
    auto rhs = [&h](const Vector& y) -> Vector { return Complex(0.0, -1.0) * (h * y); };
    detail::AdaptiveStepper<decltype(rhs)> stepper(rhs, tol);

    PacketTrajectory traj;
    const int n_left = chain.n_left, n_right = chain.n_right;
    const int c0 = chain.first_center_row(), r0 = chain.first_right_row();
    auto record = [&](double t, const Vector& y) {
        traj.times.push_back(t);
        traj.states.push_back(y);
        const double nl = y.head(n_left).squaredNorm();
        const double nc = y.segment(c0, chain.center_sites).squaredNorm();
        const double nr = y.tail(n_right).squaredNorm();
        traj.region_norms.push_back({nl, nc, nr});
        traj.total_norms.push_back(nl + nc + nr);
    };
    record(0.0, psi0);

    Vector y = psi0;
    bool first_step_checked = false;
    double t = 0.0;
    for (int s = 1; s < samples; ++s) {
        const double t_target = duration * s / (samples - 1);
        while (t < t_target - 1e-12 * duration) {
            if (!first_step_checked) {
                const Vector before = y;
                const double taken = stepper.step(y, t_target - t);
                Vector twice = before;
                detail::AdaptiveStepper<decltype(rhs)> half(rhs, tol);
                half.set_dt(taken / 2.0);
                double th = 0.0;
                while (th < taken - 1e-15) th += half.step(twice, taken - th);
                traj.step_halving_error = (y - twice).cwiseAbs().maxCoeff();
                t += taken;
                first_step_checked = true;
                continue;
            }
            t += stepper.step(y, t_target - t);
        }
        t = t_target;
        record(t, y);
    }
    traj.accepted_steps = stepper.accepted;
    traj.rejected_steps = stepper.rejected;

    // boundary contact check at every sample
    const int guard = 10;
    for (const auto& state : traj.states) {
        double outer = 0.0;
        if (n_left > 0) outer += state.head(std::min(guard, n_left)).squaredNorm();
        if (n_right > 0) outer += state.tail(std::min(guard, n_right)).squaredNorm();
        if (outer >= 1e-8) throw BoundaryContact(outer);
    }

    const auto& first = traj.region_norms.front();
    traj.incidence = first[0] >= first[2] ? Side::Left : Side::Right;
    const auto& last = traj.region_norms.back();
    traj.reflected = traj.incidence == Side::Left ? last[0] : last[2];
    traj.transmitted = traj.incidence == Side::Left ? last[2] : last[0];
    traj.absorbed = 1.0 - traj.total_norms.back();
    return traj;
}

/// Average of f(k) over the packet's momentum distribution
/// |g(k)|^2 ~ exp(-2 sigma^2 (k - k0)^2), restricted to the band (0, pi).
/// Simpson quadrature; f is sampled on 4001 points.
inline double packet_average(const std::function<double(double)>& f, double k0, double sigma) {
    const double half_width = 6.0 / sigma;
    const double lo = std::max(k0 - half_width, 1e-9);
    const double hi = std::min(k0 + half_width, kPi - 1e-9);
    const int n = 4000;  // even
    const double dk = (hi - lo) / n;
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double k = lo + i * dk;
        const double w = std::exp(-2.0 * sigma * sigma * (k - k0) * (k - k0));
        const double simpson = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        num += simpson * w * f(k);
        den += simpson * w;
    }
    return num / den;
}

struct DirectionResult {
    double transmitted = 0.0, reflected = 0.0, absorbed = 0.0;
    double predicted_transmitted = 0.0, predicted_reflected = 0.0;
    double transmitted_agreement = 0.0;  // measured / predicted
};

/// Left- and right-incident packets on the same chain, compared against the
/// packet-averaged steady-state predictions from the closed form.
struct DiodeExperimentReport {
    DirectionResult left, right;
    PacketTrajectory left_trajectory, right_trajectory;
};

inline DiodeExperimentReport diode_experiment(const TriangleParams& p, const PacketSpec& spec,
                                              int n_left = 300, int n_right = 300,
                                              double duration = 150.0, double tol = 1e-9,
                                              int samples = 64) {
    const auto chain = build_finite_chain(build_triangle_center(p), n_left, n_right);
    PacketSpec left_spec = spec;
    left_spec.center_site = -std::abs(spec.center_site);
    left_spec.direction = +1;
    PacketSpec right_spec = spec;
    right_spec.center_site = std::abs(spec.center_site);
    right_spec.direction = -1;

    DiodeExperimentReport rep;
    rep.left_trajectory = evolve(chain, make_packet(chain, left_spec), duration, tol, samples);
    rep.right_trajectory = evolve(chain, make_packet(chain, right_spec), duration, tol, samples);

    auto closed = [&](double k) { return closed_form_amplitudes(Momentum(k), p); };
    rep.left.transmitted = rep.left_trajectory.transmitted;
    rep.left.reflected = rep.left_trajectory.reflected;
    rep.left.absorbed = rep.left_trajectory.absorbed;
    rep.left.predicted_transmitted =
        packet_average([&](double k) { return std::norm(closed(k).tL); }, spec.k0, spec.sigma);
    rep.left.predicted_reflected =
        packet_average([&](double k) { return std::norm(closed(k).rL); }, spec.k0, spec.sigma);
    rep.left.transmitted_agreement = rep.left.transmitted / rep.left.predicted_transmitted;

    rep.right.transmitted = rep.right_trajectory.transmitted;
    rep.right.reflected = rep.right_trajectory.reflected;
    rep.right.absorbed = rep.right_trajectory.absorbed;
    rep.right.predicted_transmitted =
        packet_average([&](double k) { return std::norm(closed(k).tR); }, spec.k0, spec.sigma);
    rep.right.predicted_reflected =
        packet_average([&](double k) { return std::norm(closed(k).rR); }, spec.k0, spec.sigma);
    rep.right.transmitted_agreement = rep.right.transmitted / rep.right.predicted_transmitted;
    return rep;
}

struct AbsorberReport {
    double reflected = 0.0, absorbed = 0.0;
    double predicted_reflected = 0.0;
    double reflected_agreement = 0.0;
    PacketTrajectory trajectory;
};

/// One lead cut off; the packet rides in on the surviving lead and whatever
/// is not reflected is eaten by the lossy center.
inline AbsorberReport absorber_experiment(const TriangleParams& p, Side cut, const PacketSpec& spec,
                                          int n_lead = 300, double duration = 150.0,
                                          double tol = 1e-9, int samples = 64) {
    const auto center = build_triangle_center(p);
    const bool cut_right = cut == Side::Right;
    const auto chain = cut_right ? build_finite_chain(center, n_lead, 0)
                                 : build_finite_chain(center, 0, n_lead);
    PacketSpec s = spec;
    s.center_site = cut_right ? -std::abs(spec.center_site) : std::abs(spec.center_site);
    s.direction = cut_right ? +1 : -1;

    AbsorberReport rep;
    rep.trajectory = evolve(chain, make_packet(chain, s), duration, tol, samples);
    rep.reflected = rep.trajectory.reflected;
    rep.absorbed = rep.trajectory.absorbed;
    const Side survivor = cut_right ? Side::Left : Side::Right;
    rep.predicted_reflected = packet_average(
        [&](double k) {
            return std::norm(solve_semi_infinite(center, Momentum(k), survivor).reflection());
        },
        spec.k0, spec.sigma);
    rep.reflected_agreement = rep.reflected / rep.predicted_reflected;
    return rep;
}

}  // namespace nhdiode
