#ifndef BMC_HARNESS_HPP
#define BMC_HARNESS_HPP

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "bmc/estimator.hpp"
#include "bmc/models.hpp"
#include "bmc/rng.hpp"

namespace bmc {

/// Feasibility of the speed exponent beta for b_n = 2^(beta n): the MDP
/// speed conditions reduce to the open interval
///   ( max(0, (1 - gamma(2s+d))/2),  (1 - gamma d)/2 ),
/// the polynomial factor being absorbed by strict exponent inequality.
struct SpeedFeasibility {
    double lower = 0.0;
    double upper = 0.0;
    bool pass = false;
    bool empty = false;
};
SpeedFeasibility validate_speed(double gamma, int d, double s, double beta);

/// For ergodic rate alpha > 1/2 the bandwidth exponent must additionally
/// satisfy 2^(1 - gamma d) * alpha < 1; below 1/2 the rate never binds.
struct AlphaBandwidthCheck {
    bool pass = false;
    double value = 0.0;       // 2^(1 - gamma d) * alpha
    bool alpha_binds = false; // alpha > 1/2
};
AlphaBandwidthCheck validate_alpha_bandwidth(double alpha, double gamma,
                                             int d = 1);

/// Deterministic replicate engine: row r is computed from the derived seed
/// base_seed xor hash(r), and lands in slot r, so results are byte-identical
/// for every thread count.
template <class Row, class Fn>
std::vector<Row> run_replicates(std::uint64_t replicates, int threads,
                                std::uint64_t base_seed, Fn&& fn) {
    std::vector<Row> rows(replicates);
    unsigned hw = std::thread::hardware_concurrency();
    int t = threads > 0 ? threads : static_cast<int>(hw > 0 ? hw : 1);
    if (static_cast<std::uint64_t>(t) > replicates)
        t = static_cast<int>(replicates);
    if (t <= 1) {
        for (std::uint64_t r = 0; r < replicates; ++r)
            rows[r] = fn(r, base_seed ^ hash_u64(r));
        return rows;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&]() {
        while (true) {
            std::uint64_t r = next.fetch_add(1);
            if (r >= replicates) return;
            try {
                rows[r] = fn(r, base_seed ^ hash_u64(r));
            } catch (...) {
                std::scoped_lock lock(error_mu);
                if (!error) error = std::current_exception();
                next.store(replicates);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (int i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return rows;
}

/// One (depth, delta) row of an empirical deviation-rate report.
struct DeviationCell {
    int n = 0;
    std::string region = "gen";
    double x = 0.0;
    double delta = 0.0;
    std::uint64_t total = 0;
    std::uint64_t exceed = 0;
    double p_hat = 0.0;
    double p_lo = 0.0;
    double p_hi = 0.0;
    double rate_hat = 0.0;    // -(1/b_n^2) log p_hat; a lower bound when flagged
    double rate_theory = 0.0; // I(delta)
    double speed_sq = 1.0;    // b_n^2 (not serialized)
    std::string flag;         // "zero-exceed" marks the one-sided bound
};

struct DeviationReport {
    std::vector<DeviationCell> cells;

    void write_csv(const std::string& path, const std::string& config_echo) const;
};

/// Empirical tail log-rates from per-depth samples of a deviation statistic.
/// Zero exceedances are reported as a flagged one-sided lower bound
/// -(1/b_n^2) log(1/R), never as infinity.
DeviationReport tail_rate_estimate(
    const std::map<int, std::vector<double>>& samples_by_depth,
    const SpeedSequence& speed, const std::vector<double>& deltas,
    const std::function<double(double)>& rate_theory,
    const std::string& region, double x, std::uint64_t min_replicates = 100);

/// Per-delta verdict of the deviation report against the theoretical rate:
/// PASS when the deepest ratio sits in [0.5, 2] and the rate sequence moves
/// toward the theory value with at most one inversion inside Wilson bounds.
struct MdpVerdict {
    double delta = 0.0;
    double rate_theory = 0.0;
    std::vector<int> depths;
    std::vector<double> rates;
    double final_ratio = 0.0;
    bool ratio_ok = false;
    bool trend_ok = false;
    bool pass = false;
    bool skipped = false;  // delta with zero theory rate
};
std::vector<MdpVerdict> mdp_rate_compare(const DeviationReport& report);

/// Empirical-to-theory variance ratio.  The statistic's limit mean is zero,
/// so the empirical side is the second moment about zero; the centered
/// sample variance is kept as a diagnostic.
struct VarianceCheck {
    double ratio = 0.0;
    double se = 0.0;  // jackknife standard error of the ratio
    double mean_square = 0.0;
    double sample_var = 0.0;
    bool degenerate = false;
};
VarianceCheck clt_variance_check(std::span<const double> samples,
                                 double sigma2_theory,
                                 std::uint64_t min_replicates = 500);

int resolve_threads(int flag_threads, int config_threads);

}  // namespace bmc

#endif  // BMC_HARNESS_HPP
