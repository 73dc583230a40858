#include "scrambler/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scrambler/errors.hpp"

namespace scrambler {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b_hat: coefficients of the embedded error estimate.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

std::vector<std::vector<double>> integrate_dopri5(const OdeRhs& f, std::vector<double> y0,
                                                  const std::vector<double>& t_grid,
                                                  const OdeOptions& options, OdeStats* stats) {
    std::vector<std::vector<double>> out;
    if (t_grid.empty()) return out;
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] >= t_grid[i - 1])) throw UsageError("time grid must be non-decreasing");
    if (!(options.rel_tol > 0.0)) throw DomainError("rel_tol must be positive");

    const std::size_t dim = y0.size();
    const double rtol = options.rel_tol;
    const double atol = options.abs_tol < 0.0 ? rtol * 1e-2 : options.abs_tol;

    OdeStats local;
    OdeStats& st = stats ? *stats : local;

    std::vector<double> y = std::move(y0), ynew(dim), ytmp(dim);
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);

    double t = t_grid.front();
    out.reserve(t_grid.size());
    out.push_back(y);
    if (dim == 0) {
        out.resize(t_grid.size());
        return out;
    }

    f(t, y.data(), k1.data());
    ++st.evaluations;

    auto scaled_norm = [&](const std::vector<double>& v, const std::vector<double>& ref) {
        double s = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            double w = v[i] / (atol + rtol * std::abs(ref[i]));
            s += w * w;
        }
        return std::sqrt(s / static_cast<double>(dim));
    };

    double h = options.initial_step;
    if (h <= 0.0) {
        double d0 = scaled_norm(y, y);
        double d1 = scaled_norm(k1, y);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        double span = t_grid.back() - t_grid.front();
        if (span > 0.0) h = std::min(h, span);
        if (h <= 0.0) h = 1e-6;
    }

    std::size_t steps = 0;
    for (std::size_t gi = 1; gi < t_grid.size(); ++gi) {
        const double target = t_grid[gi];
        while (t < target) {
            if (++steps > options.max_steps)
                throw IntegrationError("ODE integration exceeded the step budget", t);
            bool lands = t + h >= target;
            double step = lands ? target - t : h;
            if (step <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)) &&
                !lands)
                throw IntegrationError("ODE step size underflow", t);

            auto stage = [&](double c, std::initializer_list<std::pair<double, const std::vector<double>*>> terms,
                             std::vector<double>& k) {
                for (std::size_t i = 0; i < dim; ++i) {
                    double acc = 0.0;
                    for (const auto& [a, kv] : terms) acc += a * (*kv)[i];
                    ytmp[i] = y[i] + step * acc;
                }
                f(t + c * step, ytmp.data(), k.data());
            };
            stage(c2, {{a21, &k1}}, k2);
            stage(c3, {{a31, &k1}, {a32, &k2}}, k3);
            stage(c4, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, k4);
            stage(c5, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, k5);
            stage(1.0, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, k6);
            for (std::size_t i = 0; i < dim; ++i)
                ynew[i] = y[i] + step * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                         b6 * k6[i]);
            f(t + step, ynew.data(), k7.data());
            st.evaluations += 6;

            double err = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                double e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
                double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                err += (e / sc) * (e / sc);
            }
            err = std::sqrt(err / static_cast<double>(dim));
            if (!std::isfinite(err)) err = 1e10;

            double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            if (err <= 1.0) {
                ++st.accepted;
                t = lands ? target : t + step;
                y.swap(ynew);
                k1.swap(k7);  // first-same-as-last
                // A step shortened to hit the grid says nothing about the
                // step the solution allows, so keep the previous proposal.
                if (!lands || step >= h) h = step * factor;
            } else {
                ++st.rejected;
                h = step * std::max(factor, 0.2);
            }
        }
        out.push_back(y);
    }
    return out;
}

}  // namespace scrambler
