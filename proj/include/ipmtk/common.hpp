#pragma once

#include <stdexcept>
#include <string>

namespace ipmtk {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMu0 = 4.0 * kPi * 1e-7;  // vacuum permeability, H/m

// Loading/parsing problems in material DBs, machine files, configs.
struct LoadError : std::runtime_error {
    explicit LoadError(const std::string& what) : std::runtime_error(what) {}
};

// Inconsistent geometry (e.g. negative computed volume).
struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

// Nonlinear solve failed to converge.
struct SolveError : std::runtime_error {
    SolveError(const std::string& what, int iterations, double residual)
        : std::runtime_error(what), iterations(iterations), residual(residual) {}
    int iterations;
    double residual;
};

// Singular or disconnected network.
struct StructureError : std::runtime_error {
    explicit StructureError(const std::string& what) : std::runtime_error(what) {}
};

// Undamped forcing too close to a natural frequency.
struct ResonanceError : std::runtime_error {
    explicit ResonanceError(const std::string& what) : std::runtime_error(what) {}
};

// Missing or invalid calibration data.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ipmtk
