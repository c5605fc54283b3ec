#include "bmc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "bmc/stats.hpp"

namespace bmc {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

SpeedFeasibility validate_speed(double gamma, int d, double s, double beta) {
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    if (!(gamma > 0.0) || !(gamma < 1.0 / d))
        throw std::invalid_argument("bandwidth exponent requires 0 < gamma < 1/d");
    if (!(s > 0.0)) throw std::invalid_argument("smoothness order must be > 0");
    SpeedFeasibility out;
    double raw_lower = (1.0 - gamma * (2.0 * s + d)) / 2.0;
    out.lower = std::max(raw_lower, 0.0);
    out.upper = (1.0 - gamma * d) / 2.0;
    out.empty = !(out.lower < out.upper);
    out.pass = !out.empty && beta > out.lower && beta < out.upper;
    return out;
}

AlphaBandwidthCheck validate_alpha_bandwidth(double alpha, double gamma, int d) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("ergodic rate must lie in (0, 1)");
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    if (!(gamma > 0.0) || !(gamma < 1.0 / d))
        throw std::invalid_argument("bandwidth exponent requires 0 < gamma < 1/d");
    AlphaBandwidthCheck out;
    out.value = std::exp2(1.0 - gamma * d) * alpha;
    out.alpha_binds = alpha > 0.5;
    out.pass = !out.alpha_binds || out.value < 1.0;
    return out;
}

void DeviationReport::write_csv(const std::string& path,
                                const std::string& config_echo) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    if (!config_echo.empty()) out << "# config: " << config_echo << '\n';
    out << "n,region,x,delta,R,exceed,p_hat,p_lo,p_hi,rate_hat,rate_theory,flag\n";
    for (const auto& c : cells) {
        out << c.n << ',' << c.region << ',' << fmt(c.x) << ',' << fmt(c.delta)
            << ',' << c.total << ',' << c.exceed << ',' << fmt(c.p_hat) << ','
            << fmt(c.p_lo) << ',' << fmt(c.p_hi) << ',' << fmt(c.rate_hat)
            << ',' << fmt(c.rate_theory) << ',' << c.flag << '\n';
    }
}

DeviationReport tail_rate_estimate(
    const std::map<int, std::vector<double>>& samples_by_depth,
    const SpeedSequence& speed, const std::vector<double>& deltas,
    const std::function<double(double)>& rate_theory,
    const std::string& region, double x, std::uint64_t min_replicates) {
    DeviationReport report;
    for (const auto& [n, samples] : samples_by_depth) {
        if (samples.size() < min_replicates)
            throw std::invalid_argument(
                "tail rate estimation needs more replicates");
        double b = speed.at(n);
        double b2 = b * b;
        for (double delta : deltas) {
            DeviationCell cell;
            cell.n = n;
            cell.region = region;
            cell.x = x;
            cell.delta = delta;
            cell.total = samples.size();
            for (double z : samples)
                if (std::abs(z) > delta) ++cell.exceed;
            double r = static_cast<double>(cell.total);
            cell.p_hat = static_cast<double>(cell.exceed) / r;
            WilsonInterval wi = wilson_interval(cell.exceed, cell.total);
            cell.p_lo = wi.lo;
            cell.p_hi = wi.hi;
            cell.rate_theory = rate_theory(delta);
            cell.speed_sq = b2;
            if (cell.exceed == 0) {
                cell.rate_hat = -std::log(1.0 / r) / b2;
                cell.flag = "zero-exceed";
            } else {
                cell.rate_hat = -std::log(cell.p_hat) / b2;
            }
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

std::vector<MdpVerdict> mdp_rate_compare(const DeviationReport& report) {
    std::map<double, std::vector<const DeviationCell*>> by_delta;
    for (const auto& c : report.cells) by_delta[c.delta].push_back(&c);

    std::vector<MdpVerdict> verdicts;
    for (auto& [delta, cells] : by_delta) {
        MdpVerdict v;
        v.delta = delta;
        std::sort(cells.begin(), cells.end(),
                  [](const DeviationCell* a, const DeviationCell* b) {
                      return a->n < b->n;
                  });
        v.rate_theory = cells.back()->rate_theory;
        if (!(v.rate_theory > 0.0)) {
            v.skipped = true;
            verdicts.push_back(std::move(v));
            continue;
        }
        if (cells.size() < 3)
            throw std::invalid_argument("rate comparison needs >= 3 depths");
        for (const auto* c : cells) {
            v.depths.push_back(c->n);
            v.rates.push_back(c->rate_hat);
        }
        v.final_ratio = v.rates.back() / v.rate_theory;
        v.ratio_ok = v.final_ratio >= 0.5 && v.final_ratio <= 2.0;

        // Wilson bounds transported to the rate scale (rate decreasing in p;
        // zero-exceed cells have no finite upper bound).
        auto rate_bounds = [](const DeviationCell& c) {
            double lo = c.p_hi > 0.0 ? -std::log(c.p_hi) / c.speed_sq : 0.0;
            double hi = c.p_lo > 0.0 ? -std::log(c.p_lo) / c.speed_sq
                                     : std::numeric_limits<double>::infinity();
            return std::pair<double, double>(lo, hi);
        };

        double direction = v.rate_theory - v.rates.front();
        int inversions = 0;
        bool inversion_outside_bounds = false;
        for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
            double step = v.rates[i + 1] - v.rates[i];
            bool wrong_way = (direction >= 0.0) ? step < 0.0 : step > 0.0;
            if (!wrong_way) continue;
            ++inversions;
            auto [alo, ahi] = rate_bounds(*cells[i]);
            auto [blo, bhi] = rate_bounds(*cells[i + 1]);
            bool overlap = alo <= bhi && blo <= ahi;
            if (!overlap) inversion_outside_bounds = true;
        }
        v.trend_ok = inversions == 0 ||
                     (inversions == 1 && !inversion_outside_bounds);
        v.pass = v.ratio_ok && v.trend_ok;
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

VarianceCheck clt_variance_check(std::span<const double> samples,
                                 double sigma2_theory,
                                 std::uint64_t min_replicates) {
    if (samples.size() < min_replicates)
        throw std::invalid_argument("variance check needs more replicates");
    if (!(sigma2_theory > 0.0))
        throw std::invalid_argument("theory variance must be positive");
    VarianceCheck out;
    out.sample_var = sample_variance(samples);
    out.mean_square = second_moment_about(samples, 0.0);
    if (out.sample_var == 0.0) {
        out.degenerate = true;
        out.ratio = 0.0;
        return out;
    }
    out.ratio = out.mean_square / sigma2_theory;
    out.se = jackknife_se(samples, [sigma2_theory](std::span<const double> xs) {
        return second_moment_about(xs, 0.0) / sigma2_theory;
    });
    return out;
}

int resolve_threads(int flag_threads, int config_threads) {
    if (flag_threads > 0) return flag_threads;
    if (const char* env = std::getenv("BMC_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    if (config_threads > 0) return config_threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace bmc
