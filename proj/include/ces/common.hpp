#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ces {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Thrown when an iterative scheme fails to reach its requested tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a Gaussian integral or overlap is evaluated outside its
/// convergence region.
struct DivergentIntegralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when the principal square-root branch cannot be certified.
struct BranchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Central numeric knobs.  Every module reads its defaults from here so the
// whole artifact is tuned in one place.
struct Tolerances {
    double matrix_exp_rel = 1e-12;     // operator/state exponential target
    double unitary_check = 1e-12;      // passive transform admission
    double symmetry_check = 1e-12;     // EQState F symmetry admission
    double squeeze_guard = 1e-6;       // |1 - g F11| lower bound in Bogoliubov update
    double f_norm_guard = 1.0 + 1e-9;  // spectral norm of F after squeezing
    int headroom = 4;                  // per-mode padding for truncated evolutions
};

inline const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

inline double sq(double x) { return x * x; }

}  // namespace ces
