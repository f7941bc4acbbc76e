#pragma once

#include <stdexcept>
#include <string>

namespace nhdiode {

/// Closed-form denominator |Omega| fell below the singular threshold: the
/// scattering eigenfunction does not exist at this (k, phi, gamma).
struct SingularDenominator : std::domain_error {
    double omega_magnitude;
    explicit SingularDenominator(double mag)
        : std::domain_error("scattering amplitudes singular: |Omega| = " + std::to_string(mag)),
          omega_magnitude(mag) {}
};

/// The matching linear system is rank-deficient beyond tolerance, which
/// signals a spectral singularity of the center at this momentum.
struct SingularSystem : std::domain_error {
    double condition_estimate;
    explicit SingularSystem(double cond)
        : std::domain_error("matching system singular: condition estimate " + std::to_string(cond)),
          condition_estimate(cond) {}
};

/// Transfer matrix is undefined because |tR| is numerically zero.
struct ZeroTransmission : std::domain_error {
    ZeroTransmission() : std::domain_error("transfer matrix undefined: |tR| is zero") {}
};

/// No port-exchanging site permutation could be derived for this center.
struct NoMirror : std::invalid_argument {
    explicit NoMirror(const std::string& what) : std::invalid_argument(what) {}
};

/// The requested point is not a spectral singularity.
struct NotSingular : std::invalid_argument {
    double omega_magnitude;
    explicit NotSingular(double mag)
        : std::invalid_argument("|Omega| = " + std::to_string(mag) + " exceeds the singularity tolerance"),
          omega_magnitude(mag) {}
};

/// Packet violates the 4-sigma separation rule on the given chain.
struct PacketTooWide : std::invalid_argument {
    explicit PacketTooWide(const std::string& what) : std::invalid_argument(what) {}
};

/// A wave packet reached the truncated chain boundary; results are invalid.
struct BoundaryContact : std::runtime_error {
    double boundary_norm;
    explicit BoundaryContact(double norm)
        : std::runtime_error("wave packet touched the chain boundary: outer-site norm " + std::to_string(norm)),
          boundary_norm(norm) {}
};

}  // namespace nhdiode
