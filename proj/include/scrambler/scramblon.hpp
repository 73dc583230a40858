#pragma once

// Late-time size statistics of the two-coupling model in the scrambling
// phase: vertex factors, the auxiliary pair f/h, the resummed generating
// function S(v, t) and the continuum distribution of sigma = s/N.
//
// Only gauge-invariant outputs (S, the distribution, s_sc) are convention
// independent; C and the raw vertex factors depend on the chosen gauge.

#include <string>
#include <vector>

#include "scrambler/core.hpp"

namespace scrambler {

class ScramblonParams {
  public:
    // r in [0,1], n in (0,1), N > 0, kappa >= 0.
    ScramblonParams(double r, double n, double system_size, double kappa);

    static ScramblonParams from_model(const SimplifiedModel& model, double system_size);

    double r() const { return r_; }
    double n() const { return n_; }
    double system_size() const { return system_size_; }
    double kappa() const { return kappa_; }

    // sqrt(n(1-n)), equal to A(mu) and to the m = 0 vertex.
    double amplitude() const;
    // C = 4 n(1-n) (1-r)^2 N.
    double coupling() const;
    // s_sc = 4 n(1-n) (1-r).
    double saturation() const;
    // log lambda(t) = kappa t - log C; needs r < 1 and kappa > 0.
    double log_lambda(double t) const;
    double lambda(double t) const;

  private:
    double r_;
    double n_;
    double system_size_;
    double kappa_;
};

// Accepts only menus made of the hopping and scrambling cross terms.
ScramblonParams scramblon_params(const CouplingMenu& menu, const Filling& filling,
                                 double system_size);

struct VertexFactor {
    double value = 0.0;          // +inf when the magnitude overflows a double
    double log_magnitude = 0.0;  // -inf when the vertex vanishes
    int sign = 0;
    bool representable = true;
};

VertexFactor vertex_factor(const ScramblonParams& params, long long m);

double f_function(const ScramblonParams& params, double x);

struct HValue {
    double regular = 0.0;
    double delta_weight = 0.0;  // coefficient of delta(y)
};

HValue h_function(const ScramblonParams& params, double y);

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

// S(v) at a given lambda; throws NumericalError when the quadrature misses
// the 1e-10 absolute target.
QuadratureResult late_time_generating_at(const ScramblonParams& params, double v, double lambda);
double late_time_generating(const ScramblonParams& params, double v, double t);

// Regular density P^r(sigma) at a given lambda; zero outside (0, s_sc).
double continuum_density(const ScramblonParams& params, double lambda, double sigma);

// Quadrature of the regular density and of sigma times it.
QuadratureResult continuum_regular_mass(const ScramblonParams& params, double lambda);
QuadratureResult continuum_regular_moment(const ScramblonParams& params, double lambda);

struct ContinuumSizeDistribution {
    double singular_weight = 0.0;
    double lambda = 0.0;
    double s_sc = 0.0;
    std::vector<double> sigma;
    std::vector<double> density;
    std::string endpoint_note;
};

ContinuumSizeDistribution continuum_distribution_at(const ScramblonParams& params, double lambda,
                                                    const std::vector<double>& sigma_grid);
ContinuumSizeDistribution continuum_distribution(const ScramblonParams& params, double t,
                                                 const std::vector<double>& sigma_grid);

double saturation_size(const ScramblonParams& params);

}  // namespace scrambler
