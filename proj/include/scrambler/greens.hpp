#pragma once

// Steady-state two-point functions of the Brownian model on the single
// Keldysh contour. The self-energies are frequency independent, so the
// time-domain matrix is a closed form in the quasiparticle rate.

#include <complex>
#include <vector>

#include "scrambler/core.hpp"

namespace scrambler {

struct TermContribution {
    TermKey key;
    double value = 0.0;
};

struct QuasiparticleRate {
    double gamma = 0.0;
    std::vector<TermContribution> breakdown;
};

QuasiparticleRate quasiparticle_rate(const CouplingMenu& menu, const Filling& filling);

// Which one-sided limit to take at t = 0, where sgn(t) jumps.
enum class Side { kPositive, kNegative };

// Branch indices (u, d) x (u, d).
struct GreensMatrix {
    double t = 0.0;
    double uu = 0.0;
    double ud = 0.0;
    double du = 0.0;
    double dd = 0.0;
};

// t must be non-zero; use the Side overload to evaluate at t = 0+ or 0-.
GreensMatrix greens_matrix(const CouplingMenu& menu, const Filling& filling, double t);
GreensMatrix greens_matrix(const CouplingMenu& menu, const Filling& filling, double t, Side side);

// G^R(t) = -i theta(t) exp(-Gamma|t|/2); t = 0 needs an explicit side.
std::complex<double> retarded_greens(const CouplingMenu& menu, const Filling& filling, double t);
std::complex<double> retarded_greens(const CouplingMenu& menu, const Filling& filling, double t,
                                     Side side);
// G^A(t) = +i theta(-t) exp(-Gamma|t|/2).
std::complex<double> advanced_greens(const CouplingMenu& menu, const Filling& filling, double t);
std::complex<double> advanced_greens(const CouplingMenu& menu, const Filling& filling, double t,
                                     Side side);

}  // namespace scrambler
