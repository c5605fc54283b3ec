#ifndef BMC_MODELS_HPP
#define BMC_MODELS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bmc/grid.hpp"
#include "bmc/tree_index.hpp"

namespace bmc {

/// Geometric ergodicity profile: sup-norm decay |Q^n f - <mu,f>| <=
/// M * alpha^n * ||f||_inf.
struct ErgodicityProfile {
    double alpha = 0.5;
    double M = 1.0;

    void validate() const;
};

/// Gaussian bifurcating autoregression: children of a node with state x are
///   X_child0 = a0*x + b0 + eps0,   X_child1 = a1*x + b1 + eps1,
/// with (eps0, eps1) jointly Gaussian, independent across nodes.
struct GaussianBar {
    double a0 = 0.5;
    double a1 = 0.5;
    double b0 = 0.0;
    double b1 = 0.0;
    Eigen::Matrix2d noise_cov = Eigen::Matrix2d::Identity();
    std::optional<ErgodicityProfile> ergodicity;

    void validate() const;
    bool symmetric() const;
    double noise_std0() const;
    double noise_std1() const;
    /// Lower-triangular factor L with L*L^T = noise_cov (eigen-clamped for
    /// semidefinite covariances).
    Eigen::Matrix2d noise_factor() const;
};

/// Documented default proxy for the ergodic rate of the random-lineage
/// chain of a Gaussian BAR model.
double default_alpha_proxy(const GaussianBar& model);

/// Mean and variance of the random-lineage chain's invariant law (exact for
/// any stable BAR model; the law itself is Gaussian only in the symmetric
/// case).
struct StationaryMoments {
    double mean = 0.0;
    double var = 1.0;
};
StationaryMoments bar_stationary_moments(const GaussianBar& model);

/// Finite-state model: tensor[x](y, z) is the joint probability that the
/// children of a state-x node land in states (y, z).
struct FiniteBmc {
    std::vector<Eigen::MatrixXd> tensor;
    std::optional<ErgodicityProfile> ergodicity;

    int num_states() const { return static_cast<int>(tensor.size()); }
    void validate() const;
    /// Mean transition matrix Q(x, y) = (P0 + P1)(x, y) / 2.
    Eigen::MatrixXd q_matrix() const;
};

using BmcModel = std::variant<GaussianBar, FiniteBmc>;

void validate_model(const BmcModel& model);

/// Initial distribution of the root state.
struct InitialDistribution {
    enum class Kind { PointMass, Stationary, Gaussian };
    Kind kind = Kind::Stationary;
    double value = 0.0;  // point-mass location (state index for finite models)
    double mean = 0.0;
    double var = 1.0;

    static InitialDistribution point(double v);
    static InitialDistribution stationary();
    static InitialDistribution gaussian(double mean, double var);
};

/// A realized tree: states for every node of the depth-n subtree, stored
/// flat and addressed by heap index.
struct TreeData {
    int depth = 0;
    std::uint64_t seed = 0;
    std::vector<double> states;

    double state(NodeId u) const { return states[u - 1]; }
    int state_index(NodeId u) const { return static_cast<int>(states[u - 1]); }
};

/// Simulate a full realization over the depth-n subtree.  Children of node
/// u are drawn from the counter stream keyed by (seed, u), so the result is
/// bit-identical across runs and thread schedules, and the depth-m tree is
/// a prefix of the depth-n tree for m < n.  For an asymmetric model started
/// from its stationary law, pass the stationary grid density so replicate
/// loops do not recompute the fixed point.
TreeData simulate_tree(const BmcModel& model, int n, std::uint64_t seed,
                       const InitialDistribution& initial,
                       const GridFunction* stationary_density = nullptr);

/// Simulate a single random lineage of the auxiliary chain (root state,
/// then a uniformly chosen child at each step), returning the state at the
/// given depth.
double simulate_lineage(const BmcModel& model, int depth, std::uint64_t seed,
                        const InitialDistribution& initial,
                        const GridFunction* stationary_density = nullptr);

/// Q^reps f for the finite model, by repeated matrix-vector products.
Eigen::VectorXd q_apply(const FiniteBmc& model, const Eigen::VectorXd& f,
                        int reps);

/// Q^reps f for the continuous model: each application evaluates
/// E[ f(a0*x + b0 + eps0)/2 + f(a1*x + b1 + eps1)/2 ] by Gauss-Hermite
/// quadrature at every grid point.  Throws std::domain_error when the grid
/// does not cover 6 noise standard deviations around the mapped range.
GridFunction q_apply(const GaussianBar& model, const GridFunction& f, int reps,
                     int gh_order = 64);

/// x -> E[ g(child0, child1) | x ] by tensor contraction; g(y, z) given as
/// a matrix over (y, z).
Eigen::VectorXd p_apply_pair(const FiniteBmc& model, const Eigen::MatrixXd& g);

/// x -> E[ g(child0, child1) | x ] on a grid, by 2-D Gauss-Hermite over the
/// joint child distribution.  Same coverage contract as q_apply.
GridFunction p_apply_pair(const GaussianBar& model,
                          const std::function<double(double, double)>& g,
                          const GridSpec& out, int gh_order = 32);

/// Two-argument tensor builders feeding p_apply_pair.
std::function<double(double, double)> tensor_product(GridFunction f,
                                                     GridFunction g);
std::function<double(double, double)> tensor_sym(GridFunction f,
                                                 GridFunction g);
Eigen::MatrixXd tensor_product(const Eigen::VectorXd& f,
                               const Eigen::VectorXd& g);
Eigen::MatrixXd tensor_sym(const Eigen::VectorXd& f, const Eigen::VectorXd& g);

/// Invariant law of the mean transition matrix by power iteration from the
/// uniform vector (residual <= 1e-12 in L1).  Throws std::runtime_error on
/// non-convergence (reducible or periodic chain).
Eigen::VectorXd stationary_distribution(const FiniteBmc& model,
                                        double tol = 1e-12,
                                        int max_iter = 1'000'000);

/// Second-largest eigenvalue modulus of the mean transition matrix.
double ergodicity_rate(const FiniteBmc& model);

/// Closed-form invariant density parameters for a symmetric model:
/// N(b/(1-a), var_eps/(1-a^2)).
struct GaussianDensity {
    double mean = 0.0;
    double var = 1.0;
};
GaussianDensity bar_invariant_density(const GaussianBar& model);

/// Default operator grid for a continuous model: centered at the stationary
/// mean, wide enough that one kernel application keeps the 6-sigma coverage
/// contract, with 4096 points.
GridSpec default_grid(const GaussianBar& model, Eigen::Index points = 4096);

/// Invariant density on a grid by fixed-point iteration of the density
/// transport (adjoint of Q), L1 tolerance 1e-10.  Works for asymmetric
/// models, where no closed form exists.
GridFunction bar_invariant_density_grid(const GaussianBar& model,
                                        const GridSpec& spec,
                                        double tol = 1e-10,
                                        int max_iter = 100'000);
GridFunction bar_invariant_density_grid(const GaussianBar& model);

}  // namespace bmc

#endif  // BMC_MODELS_HPP
