#pragma once

#include <utility>
#include <vector>

#include "scrambler/oracle.hpp"

namespace scrambler::oracle {

// Shared, read-only per-configuration data for running realizations.
class Evolver {
  public:
    explicit Evolver(const OracleConfig& config);

    std::vector<double> record_times() const;
    std::vector<OperatorState> trajectory(std::uint64_t realization) const;
    RealizationResult realization(std::uint64_t index) const;

  private:
    CMatrix audited_unitary(const CMatrix& h, double& max_dev) const;
    void step(std::vector<cplx>& psi, RngStream& rng, double& max_dev) const;
    template <class Visitor>
    void run(std::uint64_t realization, Visitor&& visit, double& max_dev) const;

    OracleConfig config_;
    ModeLayout layout_;
    StepHamiltonianModel model_;
    SizeSpectrum spectrum_;
    std::vector<int> signs_;
    OperatorState initial_;
    std::vector<std::size_t> record_steps_;
    std::vector<std::vector<std::uint32_t>> aux_rows_;
    std::vector<std::pair<int, int>> active_blocks_;
};

}  // namespace scrambler::oracle
