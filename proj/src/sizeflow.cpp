#include "scrambler/sizeflow.hpp"

#include <cmath>
#include <limits>

#include "scrambler/errors.hpp"
#include "scrambler/ode.hpp"
#include "scrambler/parallel.hpp"

namespace scrambler {

std::string_view phase_name(Phase phase) {
    switch (phase) {
        case Phase::kScrambling:
            return "scrambling";
        case Phase::kDissipative:
            return "dissipative";
        case Phase::kCritical:
            return "critical";
    }
    return "unknown";
}

Phase classify(double kappa, double atol) {
    if (std::abs(kappa) <= atol) return Phase::kCritical;
    return kappa > 0.0 ? Phase::kScrambling : Phase::kDissipative;
}

GrowthRate lyapunov_exponent(const CouplingMenu& menu, const Filling& filling, double atol) {
    require_valid(menu);
    GrowthRate out;
    for (const auto& term : expand_terms(menu)) {
        double rate = term_rate(term, filling);
        // Written as rate * (power - 1) so q = 2 and p1 + p2 = 2 give an exact 0.
        double value = rate == 0.0 ? 0.0 : rate * static_cast<double>(term.growth_power - 1);
        out.breakdown.push_back({term.key, value});
        out.kappa += value;
    }
    out.classification = classify(out.kappa, atol);
    return out;
}

std::vector<CriticalPoint> transition_boundary(double u3, const std::vector<double>& n_grid) {
    if (!(u3 > 0.0) || !std::isfinite(u3)) throw DomainError("u3 must be finite and > 0");
    std::vector<CriticalPoint> out;
    out.reserve(n_grid.size());
    for (double n : n_grid) {
        Filling f = Filling::from_density(n);
        out.push_back({n, u3 * f.pauli()});
    }
    return out;
}

namespace {

void set_strength(CouplingMenu& menu, const TermKey& key, double value) {
    if (key.is_intra())
        menu.intra[key.q] = value;
    else
        menu.cross[key.cross] = value;
}

void erase_strength(CouplingMenu& menu, const TermKey& key) {
    if (key.is_intra())
        menu.intra.erase(key.q);
    else
        menu.cross.erase(key.cross);
}

}  // namespace

double critical_coupling(const CouplingMenu& menu, const Filling& filling, const TermKey& key,
                         double rel_tol) {
    require_valid(menu);
    if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be positive");

    CouplingMenu probe = menu;
    set_strength(probe, key, 1.0);
    require_valid(probe);
    MenuTerm unit{key, 1.0, key.is_intra() ? key.q : key.cross.total_order(),
                  key.is_intra() ? key.q - 1 : key.cross.system_order() - 1};
    double weight = term_rate(unit, filling);
    if (weight == 0.0 || unit.growth_power == 1)
        throw NumericalError("kappa does not depend on the strength of " + key.label());

    CouplingMenu rest = menu;
    erase_strength(rest, key);
    double gamma_rest = quasiparticle_rate(rest, filling).gamma;
    double kappa_rest = lyapunov_exponent(rest, filling).kappa;
    // |d kappa / d u| = weight |power - 1| >= weight, so the root cannot lie
    // beyond |kappa_rest| / weight.
    double gamma_max = (gamma_rest + std::abs(kappa_rest)) / weight;

    auto kappa_at = [&](double u) {
        set_strength(probe, key, u);
        return lyapunov_exponent(probe, filling).kappa;
    };

    double lo = 0.0, hi = gamma_max;
    double k_lo = kappa_at(lo);
    if (k_lo == 0.0) return 0.0;
    double k_hi = kappa_at(hi);
    if (k_hi == 0.0) return hi;
    if ((k_lo > 0.0) == (k_hi > 0.0))
        throw NumericalError("kappa does not change sign on [0, Gamma_max] for " + key.label());

    for (int it = 0; it < 400; ++it) {
        double mid = 0.5 * (lo + hi);
        if (hi - lo <= rel_tol * std::abs(mid) * 1e-2 || mid == lo || mid == hi) break;
        double k_mid = kappa_at(mid);
        if (k_mid == 0.0) return mid;
        if ((k_mid > 0.0) == (k_lo > 0.0)) {
            lo = mid;
            k_lo = k_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<CriticalPoint> transition_boundary(const CouplingMenu& menu, const TermKey& key,
                                               const std::vector<double>& n_grid,
                                               double rel_tol) {
    std::vector<CriticalPoint> out;
    out.reserve(n_grid.size());
    for (double n : n_grid)
        out.push_back({n, critical_coupling(menu, Filling::from_density(n), key, rel_tol)});
    return out;
}

GeneratingFlow::GeneratingFlow(const CouplingMenu& menu, const Filling& filling) {
    require_valid(menu);
    for (const auto& term : expand_terms(menu)) {
        double rate = term_rate(term, filling);
        if (rate == 0.0 || term.growth_power == 1) continue;
        terms_.push_back({rate, term.growth_power});
    }
}

namespace {

double ipow(double z, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= z;
    return r;
}

}  // namespace

double GeneratingFlow::rhs(double z) const {
    double d = 0.0;
    for (const auto& term : terms_) d += term.rate * (ipow(z, term.power) - z);
    return d;
}

std::vector<double> GeneratingFlow::solve(double x, const std::vector<double>& t_grid,
                                          double rel_tol) const {
    if (!std::isfinite(x)) throw DomainError("initial value must be finite");
    std::vector<double> out;
    out.reserve(t_grid.size());
    if (terms_.empty()) {
        out.assign(t_grid.size(), x);
        return out;
    }
    std::vector<double> grid;
    grid.reserve(t_grid.size() + 1);
    grid.push_back(0.0);
    grid.insert(grid.end(), t_grid.begin(), t_grid.end());
    OdeOptions opt;
    opt.rel_tol = rel_tol;
    auto rows = integrate_dopri5([this](double, const double* y, double* dy) { dy[0] = rhs(y[0]); },
                                 {x}, grid, opt);
    for (std::size_t i = 1; i < rows.size(); ++i) out.push_back(rows[i][0]);
    return out;
}

GeneratingGrid integrate_generating_function(const CouplingMenu& menu, const Filling& filling,
                                             const std::vector<double>& x_points,
                                             const std::vector<double>& t_grid, double rel_tol) {
    if (!(rel_tol >= 1e-12 && rel_tol <= 1e-3)) throw DomainError("rel_tol must lie in [1e-12, 1e-3]");
    for (double x : x_points)
        if (!(x >= 0.0 && x <= 1.0)) throw DomainError("x points must lie in [0,1]");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!std::isfinite(t_grid[i]) || t_grid[i] < 0.0)
            throw DomainError("time grid must be finite and start at t >= 0");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw UsageError("time grid must be increasing");
    }

    GeneratingFlow flow(menu, filling);
    GeneratingGrid out{x_points, t_grid, std::vector<std::vector<double>>(x_points.size())};
    parallel_for(x_points.size(), [&](std::size_t i) {
        auto z = flow.solve(x_points[i], t_grid, rel_tol);
        for (double& v : z) v = std::min(1.0, std::max(0.0, v));
        out.z[i] = std::move(z);
    });
    return out;
}

SimplifiedDynamics SimplifiedDynamics::from_model(const SimplifiedModel& model) {
    SimplifiedDynamics d{model.r(), model.kappa(), model.scrambling_rate()};
    d.validate();
    return d;
}

SimplifiedDynamics SimplifiedDynamics::from_r_kappa(double r, double kappa) {
    if (r == 1.0)
        throw DomainError("at r = 1 kappa vanishes for every rate; pass the scrambling rate explicitly");
    SimplifiedDynamics d{r, kappa, kappa / (1.0 - r)};
    d.validate();
    return d;
}

void SimplifiedDynamics::validate() const {
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("r must be finite and >= 0");
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw DomainError("(r, kappa) must come from a model with u3 n(1-n) > 0");
    if (!std::isfinite(kappa)) throw DomainError("kappa must be finite");
    double expect = rate * (1.0 - r);
    if (std::abs(kappa - expect) > 1e-9 * std::max({rate, std::abs(kappa), 1e-300}))
        throw DomainError("kappa must equal u3 n(1-n) (1 - r)");
}

namespace {

// phi(z) = (e^z - 1) / z and its logarithm, exact at z = 0.
double phi(double z) { return z == 0.0 ? 1.0 : std::expm1(z) / z; }

double log_phi(double z) {
    if (z == 0.0) return 0.0;
    if (z < 0.0) return std::log(-std::expm1(z)) - std::log(-z);
    if (z < 700.0) return std::log(std::expm1(z) / z);
    return z + std::log1p(-std::exp(-z)) - std::log(z);
}

// log(1 + e^a) without overflow.
double log1p_exp(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("t must be finite and >= 0");
}

}  // namespace

double closed_form_Z(const SimplifiedDynamics& dyn, double x, double t) {
    dyn.validate();
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("x must lie in [0,1]");
    check_time(t);
    double w = 1.0 - x;
    if (w == 0.0) return 1.0;
    // 1 - Z solves the logistic equation W' = kappa W - rate W^2; this is its
    // solution written so that kappa = 0 needs no separate branch.
    double denom = 1.0 + (dyn.r - x) * dyn.rate * t * phi(-dyn.kappa * t);
    if (std::abs(denom) < 1e-14) throw NumericalError("closed-form Z denominator vanishes");
    return 1.0 - w / denom;
}

double closed_form_Z(double r, double kappa, double x, double t) {
    return closed_form_Z(SimplifiedDynamics::from_r_kappa(r, kappa), x, t);
}

double closed_form_P(const SimplifiedDynamics& dyn, long long s, double t) {
    dyn.validate();
    if (s < 0) throw DomainError("size must be >= 0");
    check_time(t);
    if (t == 0.0) return s == 1 ? 1.0 : 0.0;

    // u = rate t phi(kappa t) = (e^{kappa t} - 1)/(1 - r) away from r = 1.
    double z = dyn.kappa * t;
    double log_u = std::log(dyn.rate * t) + log_phi(z);
    if (s == 0) return dyn.r / (1.0 + std::exp(-log_u));
    double log_p = z + static_cast<double>(s - 1) * log_u - static_cast<double>(s + 1) * log1p_exp(log_u);
    return std::exp(log_p);
}

double closed_form_P(double r, double kappa, long long s, double t) {
    return closed_form_P(SimplifiedDynamics::from_r_kappa(r, kappa), s, t);
}

double mean_size(const CouplingMenu& menu, const Filling& filling, double t) {
    check_time(t);
    return std::exp(lyapunov_exponent(menu, filling).kappa * t);
}

double SizeDistribution::mean() const {
    double m = 0.0;
    for (std::size_t s = 0; s < probs.size(); ++s) m += static_cast<double>(s) * probs[s];
    return m;
}

double GeneratingSeries::evaluate(double x) const {
    double acc = 0.0;
    for (std::size_t s = coeffs.size(); s-- > 0;) acc = acc * x + coeffs[s];
    return acc;
}

}  // namespace scrambler
