#pragma once

// Model description shared by every module: the coupling menu of the
// Brownian system/environment Hamiltonian, the steady-state filling and the
// two-parameter (U1, U3) model used for closed-form results.

#include <array>
#include <compare>
#include <map>
#include <string>
#include <vector>

namespace scrambler {

// (p1, p2, p3, p4) counts of (c^dag, c, e^dag, e) in a system/environment
// coupling monomial. A key stands for the monomial family together with its
// hermitian conjugate.
struct CrossKey {
    std::array<int, 4> p{};

    int system_order() const { return p[0] + p[1]; }
    int environment_order() const { return p[2] + p[3]; }
    int total_order() const { return p[0] + p[1] + p[2] + p[3]; }
    bool self_conjugate() const { return p[0] == p[1] && p[2] == p[3]; }
    CrossKey conjugate() const { return {{p[1], p[0], p[3], p[2]}}; }
    std::string label() const;

    auto operator<=>(const CrossKey&) const = default;
};

inline constexpr CrossKey kHoppingKey{{1, 0, 0, 1}};
// Canonical representative of the "three system, one environment" term.
inline constexpr CrossKey kScramblingKey{{2, 1, 0, 1}};

struct CouplingMenu {
    std::map<int, double> intra;        // q -> J_q
    std::map<CrossKey, double> cross;   // (p1,p2,p3,p4) -> U_p

    bool empty() const { return intra.empty() && cross.empty(); }
};

struct MenuViolation {
    std::string key;
    std::string rule;
};

std::vector<MenuViolation> validate_menu(const CouplingMenu& menu);

// Throws ValidationError listing every violation.
void require_valid(const CouplingMenu& menu);

// Identifies one term of a menu: either an intra-system q-body term or a
// cross term.
struct TermKey {
    int q = 0;
    CrossKey cross{};

    static TermKey intra(int q) { return {q, {}}; }
    static TermKey coupling(CrossKey p) { return {0, p}; }

    bool is_intra() const { return q > 0; }
    std::string label() const;

    auto operator<=>(const TermKey&) const = default;
};

// One term flattened into the quantities the mean-field formulas need.
struct MenuTerm {
    TermKey key;
    double strength = 0.0;
    int total_order = 0;   // q, or p1+p2+p3+p4
    int growth_power = 0;  // q-1, or p1+p2-1: the power of Z in the flow
};

std::vector<MenuTerm> expand_terms(const CouplingMenu& menu);

class Filling {
  public:
    static Filling from_density(double n);
    static Filling from_mu(double mu);

    double n() const { return n_; }
    double mu() const { return mu_; }
    // n(1-n), the Pauli-blocking factor.
    double pauli() const { return pauli_; }
    // A(mu) = 1/(2 cosh(mu/2)) = sqrt(n(1-n)).
    double amplitude() const { return amplitude_; }

  private:
    Filling(double n, double mu, double pauli, double amplitude)
        : n_(n), mu_(mu), pauli_(pauli), amplitude_(amplitude) {}

    double n_;
    double mu_;
    double pauli_;
    double amplitude_;
};

Filling filling_from_mu(double mu);
Filling mu_from_filling(double n);

// J [n(1-n)]^{order/2 - 1}: a term's contribution to the quasiparticle rate.
// Zero for environment-only cross terms (p1 = p2 = 0).
double term_rate(const MenuTerm& term, const Filling& filling);

// Model with only the hopping U1 = U_{1,0,0,1} and the scrambling term U3.
class SimplifiedModel {
  public:
    SimplifiedModel(double u1, double u3, Filling filling);

    // u1 chosen so that U1 / (U3 n(1-n)) = r.
    static SimplifiedModel from_ratio(double r, double u3, Filling filling);

    double u1() const { return u1_; }
    double u3() const { return u3_; }
    const Filling& filling() const { return filling_; }

    double scrambling_rate() const { return u3_ * filling_.pauli(); }
    double r() const { return u1_ / scrambling_rate(); }
    double kappa() const { return scrambling_rate() - u1_; }

    CouplingMenu menu() const;

  private:
    double u1_;
    double u3_;
    Filling filling_;
};

}  // namespace scrambler
