// Truncated power-series evolution of the generating function. The flow's
// right-hand side is a polynomial in Z, and coefficient s of Z^k depends only
// on coefficients <= s, so truncating at s_max leaves c_0..c_{s_max} exact.

#include <algorithm>
#include <cmath>

#include "scrambler/errors.hpp"
#include "scrambler/kernels.hpp"
#include "scrambler/ode.hpp"
#include "scrambler/sizeflow.hpp"

namespace scrambler {

namespace {

class SeriesRhs {
  public:
    SeriesRhs(const GeneratingFlow& flow, std::size_t len)
        : terms_(flow.terms()), len_(len), kernels_(kernels::active()) {
        for (const auto& t : terms_) max_power_ = std::max(max_power_, t.power);
        if (max_power_ >= 2) powers_.assign(static_cast<std::size_t>(max_power_ - 1), std::vector<double>(len));
    }

    void operator()(const double* c, double* dc) {
        // powers_[k-2] holds Z^k for k >= 2.
        for (int k = 2; k <= max_power_; ++k) {
            const double* prev = k == 2 ? c : powers_[k - 3].data();
            kernels_.convolve_truncated(prev, c, powers_[k - 2].data(), len_);
        }
        std::fill(dc, dc + len_, 0.0);
        for (const auto& t : terms_) {
            if (t.power == 0) {
                dc[0] += t.rate;
            } else {
                const double* zp = powers_[t.power - 2].data();
                for (std::size_t s = 0; s < len_; ++s) dc[s] += t.rate * zp[s];
            }
            for (std::size_t s = 0; s < len_; ++s) dc[s] -= t.rate * c[s];
        }
    }

  private:
    const std::vector<GeneratingFlow::Term>& terms_;
    std::size_t len_;
    const kernels::KernelTable& kernels_;
    int max_power_ = 0;
    std::vector<std::vector<double>> powers_;
};

void check_grid(const std::vector<double>& t_grid) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!std::isfinite(t_grid[i]) || t_grid[i] < 0.0)
            throw DomainError("time grid must be finite and >= 0");
        if (i > 0 && !(t_grid[i] >= t_grid[i - 1])) throw UsageError("time grid must be non-decreasing");
    }
}

}  // namespace

std::vector<GeneratingSeries> generating_series(const CouplingMenu& menu, const Filling& filling,
                                                const std::vector<double>& t_grid,
                                                const SeriesOptions& options) {
    if (options.s_max < 1) throw DomainError("s_max must be >= 1");
    check_grid(t_grid);
    GeneratingFlow flow(menu, filling);
    const std::size_t len = options.s_max + 1;

    std::vector<double> c0(len, 0.0);
    c0[1] = 1.0;

    std::vector<std::vector<double>> rows;
    if (flow.terms().empty()) {
        rows.assign(t_grid.size(), c0);
    } else {
        SeriesRhs rhs(flow, len);
        std::vector<double> grid{0.0};
        grid.insert(grid.end(), t_grid.begin(), t_grid.end());
        OdeOptions opt;
        opt.rel_tol = options.rel_tol;
        rows = integrate_dopri5([&rhs](double, const double* y, double* dy) { rhs(y, dy); }, c0,
                                grid, opt);
        rows.erase(rows.begin());
    }

    std::vector<GeneratingSeries> out;
    out.reserve(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        GeneratingSeries g{t_grid[i], std::move(rows[i]), 0.0};
        double sum = 0.0;
        for (double c : g.coeffs) sum += c;
        g.tail = 1.0 - sum;
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<SizeDistribution> size_distribution_from_series(const CouplingMenu& menu,
                                                            const Filling& filling,
                                                            const std::vector<double>& t_grid,
                                                            const SeriesOptions& options) {
    auto series = generating_series(menu, filling, t_grid, options);
    std::vector<SizeDistribution> out;
    out.reserve(series.size());
    for (auto& g : series) {
        SizeDistribution d;
        d.t = g.t;
        d.probs = std::move(g.coeffs);
        double sum = 0.0;
        for (double& p : d.probs) {
            if (p < 0.0) p = 0.0;
            sum += p;
        }
        d.tail_mass = 1.0 - sum;
        d.truncation_warning = d.tail_mass > options.tail_budget;
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<SizeDistribution> size_distribution_adaptive(const CouplingMenu& menu,
                                                         const Filling& filling,
                                                         const std::vector<double>& t_grid,
                                                         const SeriesOptions& options,
                                                         std::size_t s_max_cap) {
    SeriesOptions opt = options;
    opt.s_max = std::max<std::size_t>(1, std::min(opt.s_max, s_max_cap));
    while (true) {
        auto out = size_distribution_from_series(menu, filling, t_grid, opt);
        bool ok = std::none_of(out.begin(), out.end(),
                               [](const SizeDistribution& d) { return d.truncation_warning; });
        if (ok || opt.s_max >= s_max_cap) return out;
        opt.s_max = std::min(2 * opt.s_max, s_max_cap);
    }
}

}  // namespace scrambler
