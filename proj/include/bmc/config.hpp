#ifndef BMC_CONFIG_HPP
#define BMC_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmc/estimator.hpp"
#include "bmc/models.hpp"

namespace bmc {

/// Raised when a configuration violates a model assumption; the CLI maps it
/// to exit code 2.
struct ConfigValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One experiment: model, kernel, exponents, regions, depths, replication
/// and output settings.  Loaded from a JSON document; to_json materializes
/// every default so reports are re-runnable from their own metadata.
struct ExperimentConfig {
    BmcModel model = GaussianBar{};
    InitialDistribution initial = InitialDistribution::stationary();
    std::string kernel_name = "gaussian";
    int kernel_order = 1;
    double gamma = 0.2;
    double beta = 0.0;       // 0 = CLT scale (b_n = 1); > 0 = deviation scale
    double holder_s = 2.0;
    std::vector<Region> regions = {Region::Generation, Region::Subtree};
    Region star_region = Region::Generation;
    std::vector<int> depths = {8};
    std::vector<double> eval_points;  // empty = the oracle mean
    std::uint64_t replicates = 2000;
    std::uint64_t seed = 1;
    std::vector<double> deltas = {0.5, 1.0};
    double ci_level = 0.9;
    std::vector<double> crossgen_coefficients = {1.0, 1.0, 1.0};
    std::string out_dir = "out";
    int threads = 0;  // 0 = hardware default (BMC_THREADS env respected)
    double alpha = 0.0;  // 0 = derive from the model

    /// Ergodic rate used by feasibility checks: the explicit value when
    /// given, the spectral rate for finite models, the slope proxy for
    /// continuous ones.
    double resolved_alpha() const;

    /// Throws ConfigValidationError naming the violated assumption.  The
    /// speed interval is enforced only for beta > 0 (the deviation regime);
    /// beta = 0 runs at the central-limit scale where b_n = 1.
    void validate() const;

    nlohmann::json to_json() const;
    /// Metadata echoed into report files: the full resolved config minus the
    /// execution-only keys (threads, out), which do not affect results.
    nlohmann::json provenance_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load_file(const std::string& path);
};

nlohmann::json model_to_json(const BmcModel& model);
BmcModel model_from_json(const nlohmann::json& j);
nlohmann::json initial_to_json(const InitialDistribution& d);
InitialDistribution initial_from_json(const nlohmann::json& j);

}  // namespace bmc

#endif  // BMC_CONFIG_HPP
