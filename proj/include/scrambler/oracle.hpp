#pragma once

// Exact small-system Monte Carlo for the Brownian model. Operators on the
// single copy (system c_1..c_N, environment e_1..e_M) map to states on the
// doubled space through the maximally entangled reference |I>; the operator
// size becomes a diagonal operator after rotating each (c_j, xi_j) pair to
// the (d_j, g_j) modes.
//
// Storage: a doubled-space vector is a D x D row-major matrix psi[b][a],
// D = 2^(N+M), with a the original-copy occupation bits and b the auxiliary
// bits. Doubled mode order is c, e, xi, eta; mode m has Jordan-Wigner string
// over the modes below it.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scrambler/core.hpp"
#include "scrambler/rng.hpp"
#include "scrambler/sizeflow.hpp"

namespace scrambler::oracle {

using cplx = std::complex<double>;

struct ModeLayout {
    int n_sys = 1;
    int n_env = 0;

    int single_modes() const { return n_sys + n_env; }
    int doubled_modes() const { return 2 * single_modes(); }
    std::size_t single_dim() const { return std::size_t{1} << single_modes(); }
    std::size_t doubled_dim() const { return std::size_t{1} << doubled_modes(); }

    int c(int i) const { return i; }
    int e(int a) const { return n_sys + a; }
    int xi(int i) const { return single_modes() + i; }
    int eta(int a) const { return single_modes() + n_sys + a; }
};

// 1 <= N <= 6, 0 <= M <= 4, 2(N+M) <= 20; ValidationError otherwise.
ModeLayout make_layout(int n_sys, int n_env);

// Row-major dense complex matrix, used for small exact checks and blocks.
struct CMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cplx> a;

    CMatrix() = default;
    CMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}
    static CMatrix identity(std::size_t n);

    cplx& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    CMatrix adjoint() const;
    double max_abs() const;
};

CMatrix operator*(const CMatrix& x, const CMatrix& y);
CMatrix operator+(const CMatrix& x, const CMatrix& y);
CMatrix operator-(const CMatrix& x, const CMatrix& y);
CMatrix operator*(cplx s, const CMatrix& x);

// Jordan-Wigner ladder operator on a register of fermion modes.
struct LadderOperator {
    int mode = 0;
    bool dagger = false;

    // Returns 0 when the state is annihilated, otherwise the sign, and the
    // image basis state in `out`.
    int act(std::uint64_t state, std::uint64_t& out) const;
    LadderOperator adjoint() const { return {mode, !dagger}; }
    CMatrix dense(int n_modes) const;
};

struct ModeOperators {
    ModeLayout layout;
    std::vector<LadderOperator> annihilators;  // doubled-space mode order

    const LadderOperator& c(int i) const { return annihilators[layout.c(i)]; }
    const LadderOperator& e(int a) const { return annihilators[layout.e(a)]; }
    const LadderOperator& xi(int i) const { return annihilators[layout.xi(i)]; }
    const LadderOperator& eta(int a) const { return annihilators[layout.eta(a)]; }
};

ModeOperators build_mode_operators(int n_sys, int n_env);

// Sign p(a) of the component |a, complement(a)> of |I> = prod_i (a_i^dag +
// a_{K+i}^dag)/sqrt(2) |vac>, indexed by the original-copy bits a.
std::vector<int> reference_signs(const ModeLayout& layout);

// Operator on the doubled space as (X (x) 1)|I> for a single-copy matrix X.
struct OperatorState {
    ModeLayout layout;
    std::vector<cplx> amplitudes;  // psi[b][a], D x D
    double norm_sq = 0.0;

    void refresh_norm();
    void normalize();
};

// |rho^{1/4} X rho^{1/4}> / norm, rho = e^{-mu Q}. Unnormalizable input
// (zero weight) raises DomainError.
OperatorState operator_state(const ModeLayout& layout, const Filling& filling, const CMatrix& x);

// Identifiers: "c1" (default), "c<j>", "cdag<j>", "identity", "charge<j>"
// (2 c_j^dag c_j - 1); j is 1-based.
CMatrix single_copy_operator(const ModeLayout& layout, const std::string& id);

// Diagonal description of the size operator: every doubled basis vector of
// the rotated frame has integer size sum_j [n_d,j + 1 - n_g,j].
class SizeSpectrum {
  public:
    SizeSpectrum(const ModeLayout& layout, const Filling& filling);

    const ModeLayout& layout() const { return layout_; }
    int max_size() const { return 2 * layout_.n_sys; }
    double cos_theta() const { return cos_; }
    double sin_theta() const { return sin_; }

    // Rewrites amplitudes (c, xi basis) into the (d, g) basis.
    void rotate(std::vector<cplx>& amplitudes) const;
    int label(std::size_t doubled_index) const;
    // Number of rotated basis vectors with each size (environment included).
    std::vector<std::uint64_t> multiplicities() const;

    // Unnormalized weight per size of a rotated state.
    std::vector<double> masses(const std::vector<cplx>& rotated) const;

  private:
    ModeLayout layout_;
    double cos_;
    double sin_;
};

// sum_j (d_j^dag d_j + g_j g_j^dag) as a dense doubled-space matrix; only for
// doubled dimension <= 4096.
CMatrix size_operator_dense(const ModeLayout& layout, const Filling& filling);

// The d_j, g_j annihilators as dense doubled-space matrices (same limit).
struct RotatedModes {
    std::vector<CMatrix> d;
    std::vector<CMatrix> g;
};
RotatedModes rotated_modes_dense(const ModeLayout& layout, const Filling& filling);

struct OracleDistribution {
    std::vector<double> probs;  // s = 0..2N
    double raw_norm = 0.0;      // <psi|psi> before division
    double mean() const;
    // Z(nu) = sum_s e^{-nu s} P(s)
    std::vector<double> generating(const std::vector<double>& nu) const;
};

OracleDistribution size_distribution_oracle(const OperatorState& state,
                                            const SizeSpectrum& spectrum);

enum class VarianceConvention {
    // Variances chosen so each term's mean-field decay rate equals its
    // quasiparticle-rate entry (default).
    kRateMatched,
    // Literal normalization including the p2 prefactor of the cross terms.
    kVerbatim,
};

// One independent Brownian channel family of the step Hamiltonian: monomials
// X with coefficient g (E|g|^2 = weight/dt) entering as g X + g^* X^dag, or a
// real coefficient when X is hermitian.
struct Channel {
    double weight = 0.0;
    bool hermitian = false;
    // Nonzero matrix elements X[row][col] = sign.
    std::vector<std::uint32_t> rows;
    std::vector<std::uint32_t> cols;
    std::vector<std::int8_t> signs;
    std::string label;
};

class StepHamiltonianModel {
  public:
    StepHamiltonianModel(const CouplingMenu& menu, const ModeLayout& layout,
                         VarianceConvention convention);

    const ModeLayout& layout() const { return layout_; }
    const std::vector<Channel>& channels() const { return channels_; }

    // Charge blocks: states of the single copy grouped by particle number.
    const std::vector<std::vector<std::uint32_t>>& blocks() const { return blocks_; }

    // E ||H||_F^2 dt over the noise.
    double expected_frobenius_sq_dt() const;

    // Draws H_k for a step of length dt; returned per charge block.
    std::vector<CMatrix> sample_blocks(RngStream& rng, double dt) const;
    CMatrix assemble_dense(const std::vector<CMatrix>& blocks) const;

  private:
    ModeLayout layout_;
    std::vector<Channel> channels_;
    std::vector<std::vector<std::uint32_t>> blocks_;
    std::vector<std::uint32_t> block_of_;
    std::vector<std::uint32_t> position_;
};

// Dense hermitian H_k on the single-copy space.
CMatrix sample_step_hamiltonian(const CouplingMenu& menu, const ModeLayout& layout, double dt,
                                RngStream& rng,
                                VarianceConvention convention = VarianceConvention::kRateMatched);

// exp(-i H dt) for a hermitian block: Taylor series with scaling and
// squaring, truncated once the remainder bound drops below 1e-17.
CMatrix unitary_step(const CMatrix& h, double dt);
double unitarity_deviation(const CMatrix& u);

struct OracleConfig {
    int n_sys = 1;
    int n_env = 0;
    CouplingMenu menu;
    Filling filling = Filling::from_density(0.5);
    double dt = 1e-3;
    double t_final = 1.0;
    int realizations = 1;
    std::uint64_t seed = 0;
    std::string initial_operator = "c1";
    VarianceConvention convention = VarianceConvention::kRateMatched;
    // Evolve only the charge blocks the initial operator occupies.
    bool restrict_charge_sector = false;
    // Every realization uses the stream of index 0.
    bool force_identical_streams = false;
    // Record times; empty means 21 evenly spaced times on [0, t_final]. Each
    // must be a multiple of dt.
    std::vector<double> record_times;
    std::size_t threads = 0;  // 0 = SCRAMBLER_THREADS / hardware
};

// Bounds, dt * Gamma <= 0.05, record grid; ValidationError on failure.
void validate_config(const OracleConfig& config);

struct RealizationResult {
    std::vector<double> t;
    std::vector<std::vector<double>> probs;  // [time][s]
    std::vector<double> mean_size;
    double max_unitarity_deviation = 0.0;
    double max_norm_deviation = 0.0;
};

// Trajectory of one realization; states at the record times.
std::vector<OperatorState> evolve_operator_state(const OracleConfig& config,
                                                 std::uint64_t realization);

RealizationResult run_realization(const OracleConfig& config, std::uint64_t realization);

struct AveragedResult {
    std::vector<double> t;
    std::vector<std::vector<double>> p_mean;    // [time][s]
    std::vector<std::vector<double>> p_stderr;  // [time][s]
    std::vector<double> mean_size;
    std::vector<double> mean_size_stderr;
    // Per-realization mean size, kept for paired statistics.
    std::vector<std::vector<double>> realization_mean_size;  // [realization][time]
    double max_unitarity_deviation = 0.0;
    double max_norm_deviation = 0.0;
    int realizations = 0;
    double wall_seconds = 0.0;
};

AveragedResult disorder_average(const OracleConfig& config);

struct ComparisonReport {
    std::vector<double> t;
    std::vector<double> discrepancy;  // oracle - analytic
    std::vector<double> z_scores;
    std::vector<bool> flagged;
    double sup_discrepancy = 0.0;
    bool any_flagged = false;
    bool exact_agreement = false;
};

// Flags times where |oracle - analytic| exceeds both 3 standard errors and
// budget * |analytic|. Grids must match to 1e-12.
ComparisonReport compare_to_meanfield(const std::vector<double>& t_oracle,
                                      const std::vector<double>& oracle_mean,
                                      const std::vector<double>& oracle_stderr,
                                      const std::vector<double>& t_analytic,
                                      const std::vector<double>& analytic,
                                      double budget = 0.10);

struct EnvironmentSweepEntry {
    int n_env = 0;
    AveragedResult result;
};

// Repeats the run for each environment size, everything else fixed.
std::vector<EnvironmentSweepEntry> environment_sweep(const OracleConfig& config,
                                                     const std::vector<int>& env_sizes);

}  // namespace scrambler::oracle
