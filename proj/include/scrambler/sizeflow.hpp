#pragma once

// Large-N operator-size dynamics: the growth exponent kappa, the phase it
// selects, the generating-function flow dZ/dt = sum rate (Z^p - Z) and the
// closed forms of the two-coupling model.

#include <cstddef>
#include <string_view>
#include <vector>

#include "scrambler/core.hpp"
#include "scrambler/greens.hpp"

namespace scrambler {

enum class Phase { kScrambling, kDissipative, kCritical };

std::string_view phase_name(Phase phase);

inline constexpr double kCriticalAtol = 1e-12;

struct GrowthRate {
    double kappa = 0.0;
    std::vector<TermContribution> breakdown;
    Phase classification = Phase::kCritical;
};

Phase classify(double kappa, double atol = kCriticalAtol);

GrowthRate lyapunov_exponent(const CouplingMenu& menu, const Filling& filling,
                             double atol = kCriticalAtol);

struct CriticalPoint {
    double n = 0.0;
    double u1_critical = 0.0;
};

// Two-coupling model: u1_c = u3 n(1-n).
std::vector<CriticalPoint> transition_boundary(double u3, const std::vector<double>& n_grid);

// General menus: the strength of `key` at which kappa vanishes, every other
// strength held fixed. Bisection on [0, Gamma_max], where Gamma_max bounds the
// root from the remaining terms. Throws NumericalError if kappa keeps its
// sign on the bracket.
double critical_coupling(const CouplingMenu& menu, const Filling& filling, const TermKey& key,
                         double rel_tol = 1e-10);

std::vector<CriticalPoint> transition_boundary(const CouplingMenu& menu, const TermKey& key,
                                               const std::vector<double>& n_grid,
                                               double rel_tol = 1e-10);

// Right-hand side of the generating-function flow with rates evaluated.
class GeneratingFlow {
  public:
    GeneratingFlow(const CouplingMenu& menu, const Filling& filling);

    double rhs(double z) const;

    // Solution from Z(0) = x at every grid time. x is not range-checked here
    // so that derivatives around x = 1 can be taken from both sides.
    std::vector<double> solve(double x, const std::vector<double>& t_grid, double rel_tol) const;

    struct Term {
        double rate;
        int power;
    };
    const std::vector<Term>& terms() const { return terms_; }

  private:
    std::vector<Term> terms_;
};

struct GeneratingGrid {
    std::vector<double> x;
    std::vector<double> t;
    std::vector<std::vector<double>> z;  // z[ix][it]
};

GeneratingGrid integrate_generating_function(const CouplingMenu& menu, const Filling& filling,
                                             const std::vector<double>& x_points,
                                             const std::vector<double>& t_grid,
                                             double rel_tol = 1e-10);

// (r, kappa, rate) of the two-coupling model, rate = u3 n(1-n). The pair
// (r, kappa) alone cannot describe r = 1, where kappa = 0 for every rate.
struct SimplifiedDynamics {
    double r = 0.0;
    double kappa = 0.0;
    double rate = 0.0;

    static SimplifiedDynamics from_model(const SimplifiedModel& model);
    // rate = kappa / (1 - r); requires r != 1.
    static SimplifiedDynamics from_r_kappa(double r, double kappa);
    // Checks r >= 0, rate > 0 and kappa = rate (1 - r).
    void validate() const;
};

double closed_form_Z(const SimplifiedDynamics& dyn, double x, double t);
double closed_form_Z(double r, double kappa, double x, double t);

double closed_form_P(const SimplifiedDynamics& dyn, long long s, double t);
double closed_form_P(double r, double kappa, long long s, double t);

// Mean size e^{kappa t} of an operator that starts with size 1.
double mean_size(const CouplingMenu& menu, const Filling& filling, double t);

struct SizeDistribution {
    double t = 0.0;
    std::vector<double> probs;  // s = 0..s_max
    double tail_mass = 0.0;     // 1 - sum(probs)
    bool truncation_warning = false;

    double mean() const;
};

struct GeneratingSeries {
    double t = 0.0;
    std::vector<double> coeffs;  // Z = sum_s coeffs[s] x^s + O(x^{s_max+1})
    double tail = 0.0;

    double evaluate(double x) const;
};

struct SeriesOptions {
    std::size_t s_max = 64;
    double rel_tol = 1e-12;
    double tail_budget = 1e-6;
};

std::vector<GeneratingSeries> generating_series(const CouplingMenu& menu, const Filling& filling,
                                                const std::vector<double>& t_grid,
                                                const SeriesOptions& options = {});

std::vector<SizeDistribution> size_distribution_from_series(const CouplingMenu& menu,
                                                            const Filling& filling,
                                                            const std::vector<double>& t_grid,
                                                            const SeriesOptions& options = {});

// Doubles s_max, starting from options.s_max, until every grid time meets
// options.tail_budget or s_max_cap is reached (then the warning flag stays set).
std::vector<SizeDistribution> size_distribution_adaptive(const CouplingMenu& menu,
                                                         const Filling& filling,
                                                         const std::vector<double>& t_grid,
                                                         const SeriesOptions& options = {},
                                                         std::size_t s_max_cap = 1 << 14);

}  // namespace scrambler
