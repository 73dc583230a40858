#pragma once

// Adaptive Dormand-Prince 5(4) integrator for small non-stiff systems.

#include <cstddef>
#include <functional>
#include <vector>

namespace scrambler {

struct OdeOptions {
    double rel_tol = 1e-10;
    // Negative means rel_tol * 1e-2.
    double abs_tol = -1.0;
    double initial_step = 0.0;  // 0 picks a step from the local derivative
    std::size_t max_steps = 50'000'000;
};

// dy = f(t, y); both arrays have the system dimension.
using OdeRhs = std::function<void(double t, const double* y, double* dy)>;

struct OdeStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
};

// Integrates from t_grid.front() with state y0 and returns the state at every
// grid time (row i belongs to t_grid[i]). The grid must be non-decreasing.
// Throws IntegrationError when the step size underflows or max_steps is hit.
std::vector<std::vector<double>> integrate_dopri5(const OdeRhs& f, std::vector<double> y0,
                                                  const std::vector<double>& t_grid,
                                                  const OdeOptions& options = {},
                                                  OdeStats* stats = nullptr);

}  // namespace scrambler
