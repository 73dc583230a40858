#include <bit>
#include <cmath>
#include <functional>

#include "scrambler/errors.hpp"
#include "scrambler/oracle.hpp"

namespace scrambler::oracle {

namespace {

using Combo = std::vector<int>;

std::vector<Combo> combinations(int n, int k) {
    std::vector<Combo> out;
    if (k < 0 || k > n) return out;
    Combo cur;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i < n; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

struct Monomial {
    Combo creators_sys, annihilators_sys, creators_env, annihilators_env;

    auto tie() const { return std::tie(creators_sys, annihilators_sys, creators_env, annihilators_env); }
    Monomial conjugate() const { return {annihilators_sys, creators_sys, annihilators_env, creators_env}; }
};

// Operator string, leftmost factor first.
std::vector<LadderOperator> ladder_string(const Monomial& m, const ModeLayout& layout) {
    std::vector<LadderOperator> ops;
    for (int i : m.creators_sys) ops.push_back({layout.c(i), true});
    for (int j : m.annihilators_sys) ops.push_back({layout.c(j), false});
    for (int a : m.creators_env) ops.push_back({layout.e(a), true});
    for (int b : m.annihilators_env) ops.push_back({layout.e(b), false});
    return ops;
}

std::string monomial_label(const std::string& family, const Monomial& m) {
    auto join = [](const Combo& c) {
        std::string s;
        for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i] + 1);
        return s;
    };
    return family + "[" + join(m.creators_sys) + "|" + join(m.annihilators_sys) + "|" +
           join(m.creators_env) + "|" + join(m.annihilators_env) + "]";
}

void fill_entries(Channel& ch, const std::vector<LadderOperator>& ops, std::size_t dim) {
    for (std::uint64_t s = 0; s < dim; ++s) {
        std::uint64_t state = s;
        int sign = 1;
        for (auto it = ops.rbegin(); it != ops.rend() && sign != 0; ++it) {
            std::uint64_t out;
            int step = it->act(state, out);
            sign *= step;
            state = out;
        }
        if (sign == 0) continue;
        ch.rows.push_back(static_cast<std::uint32_t>(state));
        ch.cols.push_back(static_cast<std::uint32_t>(s));
        ch.signs.push_back(static_cast<std::int8_t>(sign));
    }
}

}  // namespace

StepHamiltonianModel::StepHamiltonianModel(const CouplingMenu& menu, const ModeLayout& layout,
                                           VarianceConvention convention)
    : layout_(layout) {
    require_valid(menu);
    const int n = layout.n_sys, m = layout.n_env;
    const std::size_t dim = layout.single_dim();
    const double nd = n, md = m;

    auto add_family = [&](const std::string& family, int p1, int p2, int p3, int p4,
                          double pair_weight, bool self_conjugate) {
        if (pair_weight == 0.0) return;
        for (const auto& ci : combinations(n, p1))
            for (const auto& cj : combinations(n, p2))
                for (const auto& ea : combinations(m, p3))
                    for (const auto& eb : combinations(m, p4)) {
                        Monomial mono{ci, cj, ea, eb};
                        bool hermitian = false;
                        if (self_conjugate) {
                            Monomial conj = mono.conjugate();
                            if (conj.tie() < mono.tie()) continue;  // counted with its partner
                            hermitian = conj.tie() == mono.tie();
                        }
                        Channel ch;
                        ch.weight = pair_weight;
                        ch.hermitian = hermitian;
                        ch.label = monomial_label(family, mono);
                        fill_entries(ch, ladder_string(mono, layout), dim);
                        if (!ch.rows.empty()) channels_.push_back(std::move(ch));
                    }
    };

    for (const auto& [q, j] : menu.intra) {
        int h = q / 2;
        double w = 0.0;
        if (convention == VarianceConvention::kRateMatched)
            w = j * factorial(h) * factorial(h - 1) / std::pow(nd, q - 1);
        else
            w = j / (factorial(h) * factorial(h - 1) * std::pow(nd, q - 1));
        add_family("J" + std::to_string(q), h, h, 0, 0, w, true);
    }
    for (const auto& [key, u] : menu.cross) {
        const auto& p = key.p;
        double fact = factorial(p[0]) * factorial(p[1]) * factorial(p[2]) * factorial(p[3]);
        double sys_scale = std::pow(nd, std::max(key.system_order() - 1, 0));
        double env_scale = std::pow(md, key.environment_order());
        double base = 0.0;
        if (convention == VarianceConvention::kRateMatched)
            base = u * fact / (std::max(key.system_order(), 1) * sys_scale * env_scale);
        else
            base = p[1] * u / (fact * sys_scale * env_scale);
        bool sc = key.self_conjugate();
        // Rate matching counts a self-conjugate family once where the other
        // keys stand for a pair; the literal variance is per coefficient.
        double w = sc && convention == VarianceConvention::kRateMatched ? 2.0 * base : base;
        add_family("U" + key.label(), p[0], p[1], p[2], p[3], w, sc);
    }

    const int k = layout.single_modes();
    blocks_.assign(k + 1, {});
    block_of_.resize(dim);
    position_.resize(dim);
    for (std::uint32_t s = 0; s < dim; ++s) {
        int q = std::popcount(s);
        block_of_[s] = q;
        position_[s] = static_cast<std::uint32_t>(blocks_[q].size());
        blocks_[q].push_back(s);
    }
    for (const auto& ch : channels_)
        for (std::size_t e = 0; e < ch.rows.size(); ++e)
            if (block_of_[ch.rows[e]] != block_of_[ch.cols[e]])
                throw ValidationError("coupling " + ch.label + " does not conserve total charge");
}

double StepHamiltonianModel::expected_frobenius_sq_dt() const {
    double s = 0.0;
    for (const auto& ch : channels_)
        s += ch.weight * static_cast<double>(ch.rows.size()) * (ch.hermitian ? 1.0 : 2.0);
    return s;
}

std::vector<CMatrix> StepHamiltonianModel::sample_blocks(RngStream& rng, double dt) const {
    if (!(dt > 0.0)) throw DomainError("dt must be > 0");
    std::vector<CMatrix> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) out.emplace_back(b.size(), b.size());
    for (const auto& ch : channels_) {
        double var = ch.weight / dt;
        if (ch.hermitian) {
            double h = std::sqrt(var) * rng.normal();
            for (std::size_t e = 0; e < ch.rows.size(); ++e) {
                auto& blk = out[block_of_[ch.rows[e]]];
                blk(position_[ch.rows[e]], position_[ch.cols[e]]) += h * ch.signs[e];
            }
        } else {
            cplx g = rng.complex_normal(var);
            cplx gc = std::conj(g);
            for (std::size_t e = 0; e < ch.rows.size(); ++e) {
                auto& blk = out[block_of_[ch.rows[e]]];
                std::uint32_t r = position_[ch.rows[e]], c = position_[ch.cols[e]];
                double sg = ch.signs[e];
                blk(r, c) += g * sg;
                blk(c, r) += gc * sg;
            }
        }
    }
    return out;
}

CMatrix StepHamiltonianModel::assemble_dense(const std::vector<CMatrix>& blocks) const {
    std::size_t dim = layout_.single_dim();
    CMatrix h(dim, dim);
    for (std::size_t q = 0; q < blocks_.size(); ++q)
        for (std::size_t i = 0; i < blocks_[q].size(); ++i)
            for (std::size_t j = 0; j < blocks_[q].size(); ++j)
                h(blocks_[q][i], blocks_[q][j]) = blocks[q](i, j);
    return h;
}

CMatrix sample_step_hamiltonian(const CouplingMenu& menu, const ModeLayout& layout, double dt,
                                RngStream& rng, VarianceConvention convention) {
    StepHamiltonianModel model(menu, layout, convention);
    return model.assemble_dense(model.sample_blocks(rng, dt));
}

}  // namespace scrambler::oracle
