#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ghzprism/core.hpp"

namespace ghz {

// Coordinate-window length of the continuum model. The forced bands of f
// must stay disjoint, which bounds delta by pi/3.
struct WindowWidth {
    double delta;

    explicit WindowWidth(double d);
};

// Analyzer phase angles (already reparametrized so the target conditional
// is (1 - ijk cos(alpha+beta+gamma)) / 8). Taken modulo 2 pi.
struct ContinuousSettings {
    double alpha{0.0};
    double beta{0.0};
    double gamma{0.0};

    double sum_mod_2pi() const;
};

// The one-dimensional reduction weight of the triple integral over a
// delta-cube: the threefold self-convolution of the indicator of [0, delta].
// Supported on [0, 3 delta], piecewise quadratic, integral delta^3.
double window_kernel(double s, double delta);

// Right-hand side of the integral equation: (1 - cos w) / 8.
double target_rhs(double w);

struct SolverFailure : std::runtime_error {
    double best_residual;
    SolverFailure(const std::string& msg, double residual)
        : std::runtime_error(msg), best_residual(residual) {}
};

struct DegenerateDensity : std::runtime_error {
    explicit DegenerateDensity(const std::string& msg) : std::runtime_error(msg) {}
};

// Discretized densities f(w), rho(w) on a uniform periodic w-grid over
// [0, 2 pi), solving the conditional-probability integral equation.
// rho is normalized so that the total measure over the eight regions,
// (2 pi)^2 * integral of rho, equals 1.
struct DensitySolution {
    double delta{0.0};
    int grid_n{0};
    std::vector<double> w;
    std::vector<double> f;
    std::vector<double> rho;
    double residual{0.0};  // max |lhs_ratio - target_rhs| over the grid

    double step() const;
    double single_efficiency() const;  // omega = delta / (2 pi)

    // Periodic linear interpolation.
    double f_at(double wv) const;
    double rho_at(double wv) const;
    double max_rho() const;

    void validate(double tol) const;  // all structural invariants
};

// Kernel-weighted ratio integral((K f rho)) / integral(K rho) at w0,
// trapezoid quadrature on the solution grid.
double lhs_ratio(const DensitySolution& sol, double w0);

// Triple detection probability at window origin w0 = alpha+beta+gamma:
// integral of K(s) rho(w0+s) ds, with sub-cell refined quadrature.
double triple_probability(const DensitySolution& sol, double w0);

// Solves the integral equation for (f, rho) by damped Gauss-Newton on the
// grid residuals, with f clipped to [0, 1/4] and pinned on the forced
// bands (f = 0 on [0, 3 delta], f = 1/4 on [pi, pi + 3 delta]).
// grid_n must be even and at least 256.
DensitySolution solve_densities(WindowWidth delta, int grid_n, double tol,
                                int max_iter);

// (w, p_triple) over one period.
std::vector<std::pair<double, double>> triple_efficiency_curve(
    const DensitySolution& sol, int points);

// p(outcome signs | triple detection) at the given settings:
// (1 - ijk cos w) / 8 up to the solver residual.
double conditional_prob_continuous(const DensitySolution& sol,
                                   const ContinuousSettings& settings,
                                   const OutcomeSign& signs);

// Solution file round-trip (JSON).
void save_solution(const DensitySolution& sol, const std::string& path);
DensitySolution load_solution(const std::string& path);

}  // namespace ghz
