#ifndef BMC_EXPERIMENTS_HPP
#define BMC_EXPERIMENTS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "bmc/config.hpp"
#include "bmc/density.hpp"
#include "bmc/harness.hpp"
#include "bmc/kernels.hpp"
#include "bmc/moments.hpp"

namespace bmc {

/// Statistics computed for one replicate at one (depth, x).
struct ReplicateStats {
    double estimate_gen = 0.0;
    double estimate_tree = 0.0;
    double w_gen = 0.0;   // sqrt(|G_n| h)(est - mu(x))
    double w_tree = 0.0;  // sqrt(|T_n| h)(est - mu(x))
    double n_zero = 0.0;
    double n_id = 0.0;
    double normalized = 0.0;     // primary region, divided by b_n
    double self_norm = 0.0;      // self-normalized at b_n
    double self_norm_clt = 0.0;  // self-normalized at b = 1
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    int covered = 0;
};

struct ExperimentData {
    ExperimentConfig cfg;  // resolved (eval points materialized)
    Kernel kernel;
    DensityOracle oracle;
    std::vector<double> xs;
    // rows[depth_index][x_index][replicate]
    std::vector<std::vector<std::vector<ReplicateStats>>> rows;
};

/// Replicated simulation of the configured statistics.  One tree per
/// replicate at the deepest configured depth; shallower depths reuse its
/// prefix (the per-node streams make that exact).
ExperimentData run_experiment(const ExperimentConfig& cfg, int threads);

struct CrossGenData {
    ExperimentConfig cfg;
    double x = 0.0;
    std::vector<std::vector<double>> vectors;  // replicate x (lags+1)
    std::vector<double> combined;              // cross-generation functional
    double sigma2_theory = 0.0;                // (sum 2^l a_l^2) ||K||_2^2 mu(x)
};
CrossGenData run_crossgen(const ExperimentConfig& cfg, int threads);

/// Formula-versus-enumeration consistency sweep over seeded random finite
/// instances (m in {2,3}, n <= 3).
struct OracleCheckResult {
    std::uint64_t instances = 0;
    double max_abs_diff = 0.0;
    bool pass = false;  // max_abs_diff <= 1e-10
};
OracleCheckResult run_oracle_check(std::uint64_t seed, int instances = 20);

/// Simulator-versus-formula loop closure: Monte Carlo mean of the
/// generation sum against the exact expectation, in standard-error units.
struct SimulatorCheckResult {
    double max_se_distance = 0.0;  // max |mc - exact| / se
    bool pass = false;             // <= 4 standard errors
};
SimulatorCheckResult run_simulator_check(std::uint64_t seed, int instances = 5,
                                         std::uint64_t replicates = 100'000,
                                         int depth = 5);

struct CommandResult {
    int exit_code = 0;
    std::vector<std::string> files;
};

CommandResult cmd_simulate(const ExperimentConfig& cfg, int threads,
                           std::ostream& log);
CommandResult cmd_estimate(const ExperimentConfig& cfg, int threads,
                           std::ostream& log);
CommandResult cmd_oracle_check(std::uint64_t seed, const std::string& out_dir,
                               std::ostream& log);
CommandResult cmd_verify_clt(const ExperimentConfig& cfg, int threads,
                             std::ostream& log);
CommandResult cmd_verify_mdp(const ExperimentConfig& cfg, int threads,
                             std::ostream& log);
CommandResult cmd_verify_crossgen(const ExperimentConfig& cfg, int threads,
                                  std::ostream& log);
CommandResult cmd_export_density(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace bmc

#endif  // BMC_EXPERIMENTS_HPP
