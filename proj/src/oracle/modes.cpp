#include <bit>
#include <cmath>
#include <regex>

#include "scrambler/errors.hpp"
#include "scrambler/kernels.hpp"
#include "scrambler/oracle.hpp"

namespace scrambler::oracle {

ModeLayout make_layout(int n_sys, int n_env) {
    if (n_sys < 1 || n_sys > 6) throw ValidationError("n_sys must lie in 1..6");
    if (n_env < 0 || n_env > 4) throw ValidationError("n_env must lie in 0..4");
    if (2 * (n_sys + n_env) > 20) throw ValidationError("doubled space exceeds 20 modes");
    return {n_sys, n_env};
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& v : a) m = std::max(m, std::abs(v));
    return m;
}

CMatrix operator*(const CMatrix& x, const CMatrix& y) {
    if (x.cols != y.rows) throw UsageError("matrix shape mismatch");
    CMatrix out(x.rows, y.cols);
    if (out.a.empty()) return out;
    kernels::active().cgemm(x.rows, y.cols, x.cols, x.a.data(), x.cols, y.a.data(), y.cols,
                            out.a.data(), out.cols);
    return out;
}

CMatrix operator+(const CMatrix& x, const CMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw UsageError("matrix shape mismatch");
    CMatrix out = x;
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += y.a[i];
    return out;
}

CMatrix operator-(const CMatrix& x, const CMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw UsageError("matrix shape mismatch");
    CMatrix out = x;
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] -= y.a[i];
    return out;
}

CMatrix operator*(cplx s, const CMatrix& x) {
    CMatrix out = x;
    for (auto& v : out.a) v *= s;
    return out;
}

int LadderOperator::act(std::uint64_t state, std::uint64_t& out) const {
    std::uint64_t bit = std::uint64_t{1} << mode;
    bool occupied = (state & bit) != 0;
    if (occupied == dagger) return 0;
    out = state ^ bit;
    return (std::popcount(state & (bit - 1)) & 1) ? -1 : 1;
}

CMatrix LadderOperator::dense(int n_modes) const {
    std::size_t dim = std::size_t{1} << n_modes;
    CMatrix m(dim, dim);
    for (std::uint64_t s = 0; s < dim; ++s) {
        std::uint64_t t;
        if (int sign = act(s, t)) m(t, s) = static_cast<double>(sign);
    }
    return m;
}

ModeOperators build_mode_operators(int n_sys, int n_env) {
    ModeOperators ops{make_layout(n_sys, n_env), {}};
    for (int m = 0; m < ops.layout.doubled_modes(); ++m) ops.annihilators.push_back({m, false});
    return ops;
}

std::vector<int> reference_signs(const ModeLayout& layout) {
    const int k = layout.single_modes();
    // Sparse build of prod_i (a_i^dag + a_{K+i}^dag) |vac>, rightmost factor first.
    std::vector<std::pair<std::uint64_t, int>> terms{{0, 1}}, next;
    for (int i = k - 1; i >= 0; --i) {
        next.clear();
        LadderOperator up_orig{i, true}, up_aux{k + i, true};
        for (const auto& [state, sign] : terms) {
            std::uint64_t out;
            if (int s = up_orig.act(state, out)) next.push_back({out, sign * s});
            if (int s = up_aux.act(state, out)) next.push_back({out, sign * s});
        }
        terms.swap(next);
    }
    std::vector<int> p(layout.single_dim(), 0);
    const std::uint64_t mask = layout.single_dim() - 1;
    for (const auto& [state, sign] : terms) p[state & mask] = sign;
    return p;
}

void OperatorState::refresh_norm() {
    norm_sq = kernels::active().norm_sq(amplitudes.data(), amplitudes.size());
}

void OperatorState::normalize() {
    refresh_norm();
    if (!(norm_sq > 0.0)) throw DomainError("operator has zero weight in the steady state");
    double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& v : amplitudes) v *= inv;
    norm_sq = 1.0;
}

OperatorState operator_state(const ModeLayout& layout, const Filling& filling, const CMatrix& x) {
    const std::size_t dim = layout.single_dim();
    if (x.rows != dim || x.cols != dim) throw UsageError("operator does not match the layout");
    const std::uint64_t mask = dim - 1;
    auto p = reference_signs(layout);
    std::vector<double> w(dim);
    for (std::size_t a = 0; a < dim; ++a)
        w[a] = std::exp(-0.25 * filling.mu() * std::popcount(a));

    OperatorState st{layout, std::vector<cplx>(dim * dim), 0.0};
    // psi[b][a] = 2^{-K/2} p(~b) Y[a][~b], Y = rho^{1/4} X rho^{1/4}; the
    // overall constant drops out in the normalization.
    for (std::size_t b = 0; b < dim; ++b) {
        std::size_t col = ~b & mask;
        double pb = p[col] * w[col];
        for (std::size_t a = 0; a < dim; ++a) st.amplitudes[b * dim + a] = pb * w[a] * x(a, col);
    }
    st.normalize();
    return st;
}

CMatrix single_copy_operator(const ModeLayout& layout, const std::string& id) {
    const int k = layout.single_modes();
    const std::size_t dim = layout.single_dim();
    if (id == "identity") return CMatrix::identity(dim);
    static const std::regex pattern(R"((cdag|c|charge)([0-9]+))");
    std::smatch m;
    if (!std::regex_match(id, m, pattern)) throw ValidationError("unknown initial operator '" + id + "'");
    int j = std::stoi(m[2].str());
    if (j < 1 || j > layout.n_sys) throw ValidationError("initial operator site out of range: " + id);
    LadderOperator c{layout.c(j - 1), false};
    if (m[1] == "c") return c.dense(k);
    if (m[1] == "cdag") return c.adjoint().dense(k);
    CMatrix n = c.adjoint().dense(k) * c.dense(k);
    return 2.0 * n - CMatrix::identity(dim);
}

}  // namespace scrambler::oracle
