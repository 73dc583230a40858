#include <bit>
#include <cmath>

#include "scrambler/errors.hpp"
#include "scrambler/kernels.hpp"
#include "scrambler/oracle.hpp"

namespace scrambler::oracle {

SizeSpectrum::SizeSpectrum(const ModeLayout& layout, const Filling& filling) : layout_(layout) {
    double norm = std::sqrt(2.0 * std::cosh(0.5 * filling.mu()));
    cos_ = std::exp(0.25 * filling.mu()) / norm;
    sin_ = std::exp(-0.25 * filling.mu()) / norm;
}

void SizeSpectrum::rotate(std::vector<cplx>& psi) const {
    const int k = layout_.single_modes();
    const std::size_t total = layout_.doubled_dim();
    if (psi.size() != total) throw UsageError("state does not match the layout");
    for (int j = 0; j < layout_.n_sys; ++j) {
        const std::uint64_t u = std::uint64_t{1} << j;
        const std::uint64_t v = std::uint64_t{1} << (k + j);
        const std::uint64_t between = (v - 1) & ~((u << 1) - 1);
        // (c_j, xi_j) = (cos d + sin g, -sin d + cos g) on the one-particle
        // pair states; sigma is the Jordan-Wigner sign between the two modes.
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            if (!(idx & u) || (idx & v)) continue;
            std::uint64_t partner = idx ^ u ^ v;
            double sigma = (std::popcount(idx & between) & 1) ? -1.0 : 1.0;
            cplx pu = psi[idx], pv = psi[partner];
            psi[idx] = cos_ * pu - sigma * sin_ * pv;
            psi[partner] = cos_ * pv + sigma * sin_ * pu;
        }
    }
}

int SizeSpectrum::label(std::size_t idx) const {
    const int k = layout_.single_modes();
    const std::uint64_t sys = (std::uint64_t{1} << layout_.n_sys) - 1;
    return std::popcount(idx & sys) + layout_.n_sys - std::popcount((idx >> k) & sys);
}

std::vector<std::uint64_t> SizeSpectrum::multiplicities() const {
    std::vector<std::uint64_t> m(max_size() + 1, 0);
    for (std::size_t idx = 0; idx < layout_.doubled_dim(); ++idx) ++m[label(idx)];
    return m;
}

std::vector<double> SizeSpectrum::masses(const std::vector<cplx>& rotated) const {
    const std::size_t dim = layout_.single_dim();
    const std::size_t period = std::size_t{1} << layout_.n_sys;
    if (rotated.size() != dim * dim) throw UsageError("state does not match the layout");
    // bucket[b_sys][a_sys] = sum over environment bits of |psi|^2.
    std::vector<double> bucket(period * period, 0.0);
    const auto& kern = kernels::active();
    for (std::size_t b = 0; b < dim; ++b)
        kern.periodic_norm_accumulate(rotated.data() + b * dim, dim, period,
                                      bucket.data() + (b & (period - 1)) * period);
    std::vector<double> mass(max_size() + 1, 0.0);
    for (std::size_t bs = 0; bs < period; ++bs)
        for (std::size_t as = 0; as < period; ++as)
            mass[std::popcount(as) + layout_.n_sys - std::popcount(bs)] += bucket[bs * period + as];
    return mass;
}

RotatedModes rotated_modes_dense(const ModeLayout& layout, const Filling& filling) {
    if (layout.doubled_dim() > 4096) throw UsageError("dense size operator limited to 12 modes");
    SizeSpectrum spec(layout, filling);
    double a = spec.cos_theta(), b = spec.sin_theta();
    int modes = layout.doubled_modes();
    RotatedModes out;
    for (int j = 0; j < layout.n_sys; ++j) {
        CMatrix c = LadderOperator{layout.c(j), false}.dense(modes);
        CMatrix xi = LadderOperator{layout.xi(j), false}.dense(modes);
        out.d.push_back(cplx(a) * c - cplx(b) * xi);
        out.g.push_back(cplx(b) * c + cplx(a) * xi);
    }
    return out;
}

CMatrix size_operator_dense(const ModeLayout& layout, const Filling& filling) {
    RotatedModes modes = rotated_modes_dense(layout, filling);
    std::size_t dim = layout.doubled_dim();
    CMatrix s(dim, dim);
    for (int j = 0; j < layout.n_sys; ++j) {
        s = s + modes.d[j].adjoint() * modes.d[j];
        s = s + modes.g[j] * modes.g[j].adjoint();
    }
    return s;
}

double OracleDistribution::mean() const {
    double m = 0.0;
    for (std::size_t s = 0; s < probs.size(); ++s) m += static_cast<double>(s) * probs[s];
    return m;
}

std::vector<double> OracleDistribution::generating(const std::vector<double>& nu) const {
    std::vector<double> z;
    z.reserve(nu.size());
    for (double v : nu) {
        double acc = 0.0;
        for (std::size_t s = 0; s < probs.size(); ++s) acc += std::exp(-v * static_cast<double>(s)) * probs[s];
        z.push_back(acc);
    }
    return z;
}

OracleDistribution size_distribution_oracle(const OperatorState& state,
                                            const SizeSpectrum& spectrum) {
    std::vector<cplx> rotated = state.amplitudes;
    spectrum.rotate(rotated);
    OracleDistribution out;
    out.probs = spectrum.masses(rotated);
    for (double m : out.probs) out.raw_norm += m;
    if (!(out.raw_norm > 0.0)) throw DomainError("state has zero norm");
    for (double& p : out.probs) p /= out.raw_norm;
    return out;
}

}  // namespace scrambler::oracle
