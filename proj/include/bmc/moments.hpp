#ifndef BMC_MOMENTS_HPP
#define BMC_MOMENTS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "bmc/models.hpp"

namespace bmc {

/// E_x[ M_{G_n}(f) ] = 2^n (Q^n f)(x); exact tensor path.
double expected_mgn(const FiniteBmc& model, const Eigen::VectorXd& f, int n,
                    int x);

/// E_x[ M_{G_n}(f)^2 ] =
///   2^n Q^n(f^2)(x) + sum_{k=0}^{n-1} 2^{n+k} Q^{n-k-1}(P(Q^k f (x) Q^k f))(x).
double second_moment_mgn(const FiniteBmc& model, const Eigen::VectorXd& f,
                         int n, int x);

/// E_x[ M_{G_n}(f) M_{G_m}(g) ] for n >= m >= 0:
///   2^n Q^m(g Q^{n-m} f)(x)
///   + sum_{k=0}^{m-1} 2^{n+k} Q^{m-k-1}(P(Q^k g (x)_sym Q^{n-m+k} f))(x).
double cross_moment(const FiniteBmc& model, const Eigen::VectorXd& f, int n,
                    const Eigen::VectorXd& g, int m, int x);

/// Same formulas on the continuous model, with Q and P resolved by grid
/// quadrature.  Accuracy is limited by the grid resolution; use smooth test
/// functions and the model's default grid or wider.
double expected_mgn(const GaussianBar& model, const GridFunction& f, int n,
                    double x);
double second_moment_mgn(const GaussianBar& model, const GridFunction& f,
                         int n, double x);
double cross_moment(const GaussianBar& model, const GridFunction& f, int n,
                    const GridFunction& g, int m, double x);

/// Exhaustive enumeration oracle: sums (sum_{G_n} f)^power over every state
/// assignment of the depth-n subtree, weighted by the product of tensor
/// probabilities.  The root is pinned at x, so m^(tree_size(n) - 1)
/// assignments are enumerated; instances beyond 1e7 assignments throw.
double brute_force_moment(const FiniteBmc& model, const Eigen::VectorXd& f,
                          int n, int x, int power);

/// Enumeration oracle for E_x[ M_{G_n}(f) M_{G_m}(g) ], n >= m.
double brute_force_cross_moment(const FiniteBmc& model,
                                const Eigen::VectorXd& f, int n,
                                const Eigen::VectorXd& g, int m, int x);

/// First and second moments of M_{G_n}(f) plus the (n, m) cross moment with
/// g, from a single enumeration pass.
struct BruteForceMoments {
    double first = 0.0;
    double second = 0.0;
    double cross = 0.0;
};
BruteForceMoments brute_force_moments(const FiniteBmc& model,
                                      const Eigen::VectorXd& f, int n,
                                      const Eigen::VectorXd& g, int m, int x);

struct MomentEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    bool exact = true;
};

/// E_x[ M_{G_n}(f)^4 ]: exhaustive enumeration when the instance fits the
/// enumeration budget, otherwise Monte Carlo over mc_budget trees with a
/// reported standard error (mc_budget == 0 demands the exact path).
MomentEstimate fourth_moment_mgn(const FiniteBmc& model,
                                 const Eigen::VectorXd& f, int n, int x,
                                 std::uint64_t mc_budget = 0,
                                 std::uint64_t seed = 0);

/// Monte Carlo estimate of E[ M_{G_n}(f)^power ] with standard error; f is
/// evaluated on raw states (state indices for finite models).
MomentEstimate mc_moment(const BmcModel& model,
                         const std::function<double(double)>& f, int n,
                         const InitialDistribution& initial, int power,
                         std::uint64_t replicates, std::uint64_t seed);

}  // namespace bmc

#endif  // BMC_MOMENTS_HPP
