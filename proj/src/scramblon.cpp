#include "scrambler/scramblon.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "scrambler/errors.hpp"

namespace scrambler {

namespace {

constexpr double kQuadratureTarget = 1e-10;

QuadratureResult integrate(const std::function<double(double)>& f, std::vector<double> cuts) {
    using boost::math::quadrature::gauss_kronrod;
    QuadratureResult out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        double err = 0.0;
        out.value += gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 20, 1e-13, &err);
        out.error += err;
    }
    return out;
}

void require_target(const QuadratureResult& q, const char* what) {
    if (!(q.error <= kQuadratureTarget) || !std::isfinite(q.value)) {
        std::ostringstream os;
        os << what << ": quadrature did not converge (estimate " << q.value << ", error bound "
           << q.error << ")";
        throw NumericalError(os.str());
    }
}

double checked_log_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and > 0");
    return std::log(lambda);
}

}  // namespace

ScramblonParams::ScramblonParams(double r, double n, double system_size, double kappa)
    : r_(r), n_(n), system_size_(system_size), kappa_(kappa) {
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("scramblon theory needs r in [0,1]");
    if (!(n > 0.0 && n < 1.0)) throw DomainError("n must lie in (0,1)");
    if (!(system_size > 0.0) || !std::isfinite(system_size)) throw DomainError("N must be > 0");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be finite and >= 0");
}

ScramblonParams ScramblonParams::from_model(const SimplifiedModel& model, double system_size) {
    return ScramblonParams(model.r(), model.filling().n(), system_size, std::max(0.0, model.kappa()));
}

double ScramblonParams::amplitude() const { return std::sqrt(n_ * (1.0 - n_)); }

double ScramblonParams::coupling() const {
    return 4.0 * n_ * (1.0 - n_) * (1.0 - r_) * (1.0 - r_) * system_size_;
}

double ScramblonParams::saturation() const { return 4.0 * n_ * (1.0 - n_) * (1.0 - r_); }

double ScramblonParams::log_lambda(double t) const {
    if (!(r_ < 1.0) || !(kappa_ > 0.0))
        throw DomainError("lambda(t) needs the scrambling phase (r < 1, kappa > 0)");
    if (!std::isfinite(t)) throw DomainError("t must be finite");
    return kappa_ * t - std::log(coupling());
}

double ScramblonParams::lambda(double t) const { return std::exp(log_lambda(t)); }

ScramblonParams scramblon_params(const CouplingMenu& menu, const Filling& filling,
                                 double system_size) {
    require_valid(menu);
    bool ok = menu.intra.empty();
    for (const auto& [key, u] : menu.cross)
        if (key != kHoppingKey && key != kScramblingKey) ok = false;
    if (!ok || menu.cross.count(kScramblingKey) == 0)
        throw UnsupportedModelError(
            "scramblon vertices are known only for the model with hopping (1,0,0,1) and "
            "scrambling (2,1,0,1) cross terms");
    double u1 = menu.cross.count(kHoppingKey) ? menu.cross.at(kHoppingKey) : 0.0;
    SimplifiedModel model(u1, menu.cross.at(kScramblingKey), filling);
    if (model.r() > 1.0) throw DomainError("scramblon theory applies only for r <= 1");
    return ScramblonParams::from_model(model, system_size);
}

VertexFactor vertex_factor(const ScramblonParams& params, long long m) {
    if (m < 0) throw DomainError("vertex index must be >= 0");
    VertexFactor out;
    double g = params.amplitude();
    if (m == 0) {
        out.value = g;
        out.log_magnitude = std::log(g);
        out.sign = 1;
        return out;
    }
    double one_minus_r = 1.0 - params.r();
    if (one_minus_r == 0.0) {
        out.value = 0.0;
        out.log_magnitude = -std::numeric_limits<double>::infinity();
        out.sign = 0;
        return out;
    }
    out.sign = 1;
    if (m <= 20) {
        double fact = 1.0;
        for (long long k = 2; k <= m; ++k) fact *= static_cast<double>(k);
        out.value = g * one_minus_r * fact;
        out.log_magnitude = std::log(out.value);
        return out;
    }
    out.log_magnitude = std::log(g) + std::log(one_minus_r) + std::lgamma(static_cast<double>(m) + 1.0);
    out.value = std::exp(out.log_magnitude);
    out.representable = std::isfinite(out.value);
    return out;
}

double f_function(const ScramblonParams& params, double x) {
    if (!(x >= 0.0)) throw DomainError("x must be >= 0");
    double r = params.r();
    if (std::isinf(x)) return params.amplitude() * r;
    return params.amplitude() * (r + (1.0 - r) / (1.0 + x));
}

HValue h_function(const ScramblonParams& params, double y) {
    if (!(y >= 0.0)) throw DomainError("y must be >= 0");
    double g = params.amplitude();
    return {g * (1.0 - params.r()) * std::exp(-y), g * params.r()};
}

namespace {

QuadratureResult late_time_log(const ScramblonParams& params, double v, double log_lambda) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("v must be finite and >= 0");
    double r = params.r();
    if (v == 0.0) return {1.0, 0.0};
    double decay = v * params.saturation();
    // y = e^tau. The factor lambda y / (1 + lambda y) switches on around
    // tau = -log lambda over a width of order one, so the integrand is smooth
    // in tau. The cut-offs drop less than 1e-17 of weight.
    auto integrand = [&](double tau) {
        double y = std::exp(tau);
        double frac = 1.0 / (1.0 + std::exp(-(log_lambda + tau)));
        return std::exp(tau - y - decay * frac);
    };
    const double lo = -42.0, hi = std::log(45.0);
    std::vector<double> cuts{lo};
    double mid = -log_lambda;
    if (mid > lo && mid < hi) cuts.push_back(mid);
    cuts.push_back(hi);
    QuadratureResult q = integrate(integrand, cuts);
    require_target(q, "late-time generating function");
    return {r + (1.0 - r) * q.value, (1.0 - r) * q.error};
}

// Regular density at gap w = s_sc - sigma > 0, evaluated in log form.
double density_from_gap(const ScramblonParams& params, double log_lambda, double w) {
    double s_sc = params.saturation();
    double one_minus_r = 1.0 - params.r();
    if (one_minus_r == 0.0 || s_sc == 0.0) return 0.0;
    if (!(w > 0.0) || w > s_sc) return 0.0;
    double lambda_w = std::exp(log_lambda) * w;
    double log_p = std::log(s_sc * one_minus_r) - (s_sc - w) / lambda_w - log_lambda - 2.0 * std::log(w);
    return std::exp(log_p);
}

QuadratureResult regular_integral(const ScramblonParams& params, double log_lambda, bool moment) {
    double s_sc = params.saturation();
    if (params.r() == 1.0 || s_sc == 0.0) return {0.0, 0.0};
    // w = s_sc e^{-tau}; the weight sits where s_sc/(lambda w) is of order one.
    auto integrand = [&](double tau) {
        double w = s_sc * std::exp(-tau);
        double p = density_from_gap(params, log_lambda, w) * w;
        return moment ? p * (s_sc - w) : p;
    };
    double lambda = std::exp(log_lambda);
    double hi = std::isfinite(lambda) ? std::log1p(60.0 * lambda) : log_lambda + std::log(60.0);
    std::vector<double> cuts{0.0};
    if (log_lambda > 0.0 && log_lambda < hi) cuts.push_back(log_lambda);
    cuts.push_back(hi);
    QuadratureResult q = integrate(integrand, cuts);
    require_target(q, "continuum normalization");
    return q;
}

}  // namespace

QuadratureResult late_time_generating_at(const ScramblonParams& params, double v, double lambda) {
    return late_time_log(params, v, checked_log_lambda(lambda));
}

double late_time_generating(const ScramblonParams& params, double v, double t) {
    return late_time_log(params, v, params.log_lambda(t)).value;
}

double continuum_density(const ScramblonParams& params, double lambda, double sigma) {
    double log_lambda = checked_log_lambda(lambda);
    if (!(sigma >= 0.0)) return 0.0;
    return density_from_gap(params, log_lambda, params.saturation() - sigma);
}

QuadratureResult continuum_regular_mass(const ScramblonParams& params, double lambda) {
    return regular_integral(params, checked_log_lambda(lambda), false);
}

QuadratureResult continuum_regular_moment(const ScramblonParams& params, double lambda) {
    return regular_integral(params, checked_log_lambda(lambda), true);
}

namespace {

ContinuumSizeDistribution distribution_log(const ScramblonParams& params, double log_lambda,
                                           const std::vector<double>& sigma_grid) {
    ContinuumSizeDistribution out;
    out.singular_weight = params.r();
    out.lambda = std::exp(log_lambda);
    out.s_sc = params.saturation();
    out.endpoint_note =
        "density at sigma = s_sc is the one-sided limit 0 (essential singularity)";
    out.sigma = sigma_grid;
    out.density.reserve(sigma_grid.size());
    for (double s : sigma_grid) {
        if (!(s >= 0.0 && s <= 1.0)) throw DomainError("sigma grid must lie in [0,1]");
        out.density.push_back(density_from_gap(params, log_lambda, out.s_sc - s));
    }
    return out;
}

}  // namespace

ContinuumSizeDistribution continuum_distribution_at(const ScramblonParams& params, double lambda,
                                                    const std::vector<double>& sigma_grid) {
    return distribution_log(params, checked_log_lambda(lambda), sigma_grid);
}

ContinuumSizeDistribution continuum_distribution(const ScramblonParams& params, double t,
                                                 const std::vector<double>& sigma_grid) {
    return distribution_log(params, params.log_lambda(t), sigma_grid);
}

double saturation_size(const ScramblonParams& params) { return params.saturation(); }

}  // namespace scrambler
