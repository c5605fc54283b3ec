#ifndef BMC_STATS_HPP
#define BMC_STATS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bmc {

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// Upper tail P(Z > z) for standard normal Z.
inline double normal_tail(double z) {
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

inline double sample_mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Unbiased variance about the sample mean.
inline double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance needs >= 2 points");
    double m = sample_mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

/// Mean square about a fixed center (the limit mean of a centered
/// statistic), the natural empirical check of "converges to N(0, sigma^2)".
inline double second_moment_about(std::span<const double> xs, double center) {
    if (xs.empty()) throw std::invalid_argument("empty sample");
    double s = 0.0;
    for (double x : xs) s += (x - center) * (x - center);
    return s / static_cast<double>(xs.size());
}

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval for a binomial proportion (default z ~ 95%).
inline WilsonInterval wilson_interval(std::uint64_t successes,
                                      std::uint64_t total, double z = 1.96) {
    if (total == 0) throw std::invalid_argument("empty binomial sample");
    double n = static_cast<double>(total);
    double p = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(center - half, 0.0), std::min(center + half, 1.0)};
}

/// Correlation matrix of samples given as rows of a matrix (columns are the
/// vector coordinates).
inline Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& samples) {
    if (samples.rows() < 2)
        throw std::invalid_argument("correlation needs >= 2 samples");
    Eigen::RowVectorXd mean = samples.colwise().mean();
    Eigen::MatrixXd centered = samples.rowwise() - mean;
    Eigen::MatrixXd cov = (centered.transpose() * centered) /
                          static_cast<double>(samples.rows() - 1);
    Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
    Eigen::MatrixXd corr = cov;
    for (Eigen::Index i = 0; i < corr.rows(); ++i)
        for (Eigen::Index j = 0; j < corr.cols(); ++j) {
            double d = sd[i] * sd[j];
            corr(i, j) = d > 0.0 ? cov(i, j) / d : 0.0;
        }
    return corr;
}

/// Delete-one jackknife standard error of a statistic of the sample.
template <class Fn>
double jackknife_se(std::span<const double> xs, Fn&& statistic) {
    const std::size_t n = xs.size();
    if (n < 2) throw std::invalid_argument("jackknife needs >= 2 points");
    std::vector<double> loo(n);
    std::vector<double> work(xs.begin(), xs.end());
    for (std::size_t i = 0; i < n; ++i) {
        std::swap(work[i], work[n - 1]);
        loo[i] = statistic(std::span<const double>(work.data(), n - 1));
        std::swap(work[i], work[n - 1]);
    }
    double m = sample_mean(loo);
    double s = 0.0;
    for (double v : loo) s += (v - m) * (v - m);
    return std::sqrt(s * static_cast<double>(n - 1) / static_cast<double>(n));
}

}  // namespace bmc

#endif  // BMC_STATS_HPP
