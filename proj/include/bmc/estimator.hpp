#ifndef BMC_ESTIMATOR_HPP
#define BMC_ESTIMATOR_HPP

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bmc/density.hpp"
#include "bmc/kernels.hpp"
#include "bmc/models.hpp"

namespace bmc {

/// Node set the estimator averages over: one generation or the whole
/// subtree up to a depth.
enum class Region { Generation, Subtree };

struct RegionSelector {
    Region tag = Region::Generation;
    int n = 0;
};

const char* region_name(Region r);

std::uint64_t region_size(const RegionSelector& sel);

/// Parzen-Rosenblatt estimate over the selected region:
///   (|A| h)^-1 sum_{u in A} K((x - X_u) / h).
double kde(const TreeData& tree, const RegionSelector& sel, const Kernel& kernel,
           double h, double x);
std::vector<double> kde(const TreeData& tree, const RegionSelector& sel,
                        const Kernel& kernel, double h,
                        std::span<const double> xs);

/// Default evaluation points: equispaced across the oracle's +-3 standard
/// deviation range.
std::vector<double> default_eval_points(const DensityOracle& oracle,
                                        int count = 33);

/// Per-generation function sequence defining an additive functional.  The
/// kernel variants use f_n^x(y) = h_n^{-1/2} K((x - y)/h_n):
///   Zero      f_{0,n} = f_n^x, all other levels vanish;
///   Id        f_{l,n} = f_n^x for every l <= n;
///   CrossGen  f_{l,n} = 2^l a_l f_{n-l}^x for l <= k (coefficients a_l),
///             so the statistic combines the per-generation errors with
///             weights 2^{l/2} a_l and its limit variance carries
///             sum_l 2^l a_l^2;
///   Custom    caller-provided functions per level.
struct AdditiveFunctionalSpec {
    enum class Variant { Zero, Id, CrossGen, Custom };
    Variant variant = Variant::Zero;
    double x = 0.0;
    Kernel kernel;
    BandwidthSchedule schedule;
    std::vector<double> coefficients;  // CrossGen: a_0..a_k
    std::vector<std::function<double(double)>> custom;  // Custom: f_{l,n}

    static AdditiveFunctionalSpec zero(double x, Kernel k, BandwidthSchedule s);
    static AdditiveFunctionalSpec id(double x, Kernel k, BandwidthSchedule s);
    static AdditiveFunctionalSpec cross_gen(double x, Kernel k,
                                            BandwidthSchedule s,
                                            std::vector<double> coeffs);
};

/// Additive functional with its level functions and oracle means resolved
/// for a fixed depth, so replicate loops do not repeat quadrature.
class PreparedAdditiveFunctional {
  public:
    PreparedAdditiveFunctional(const AdditiveFunctionalSpec& spec,
                               const DensityOracle& oracle, int depth);

    /// N = |G_n|^{-1/2} sum_l M_{G_{n-l}}(f_{l,n} - <mu, f_{l,n}>).
    double evaluate(const TreeData& tree) const;

    int depth() const { return depth_; }

  private:
    struct Level {
        int generation;  // n - l
        std::function<double(double)> f;
        double mean;
    };
    std::vector<Level> levels_;
    int depth_;
};

double additive_functional(const TreeData& tree,
                           const AdditiveFunctionalSpec& spec,
                           const DensityOracle& oracle);

/// Speed sequence b_n = 2^(beta n).
struct SpeedSequence {
    double beta = 0.0;

    double at(int n) const;
};

/// Plug-in floor sequence for the self-normalized statistic; the default
/// decays slowly so the floor stays inactive wherever mu(x) > 0.
double default_varpi(int n);

/// b_n^-1 sqrt(|A_n| h_n) (mu_hat(x) - mu(x)).
double normalized_error(const TreeData& tree, const RegionSelector& sel,
                        const DensityOracle& oracle, const Kernel& kernel,
                        const BandwidthSchedule& schedule,
                        const SpeedSequence& speed, double x);

/// Normalized error divided by max(||K||_2 sqrt(plug-in estimate), varpi_n);
/// the oracle enters only through the mu(x) centering.
double self_normalized(const TreeData& tree, const RegionSelector& sel,
                       const RegionSelector& star_sel,
                       const DensityOracle& oracle, const Kernel& kernel,
                       const BandwidthSchedule& schedule,
                       const SpeedSequence& speed, double varpi_n, double x);

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 0.0;
    double nominal_level = 0.0;
};

/// Interval centered at the estimate with half-width
/// delta * b_n * (||K||_2 sqrt(plug-in) v varpi_n) / sqrt(|A_n| h), and the
/// asymptotic level 1 - exp(-b_n^2 delta^2 / 2), clamped to [0, 1).
ConfidenceInterval confidence_interval(double estimate, double plug_in,
                                       double delta, double b_n,
                                       double varpi_n,
                                       std::uint64_t region_count, double h,
                                       double kernel_l2);

/// Per-generation error vector
///   ( sqrt(|G_{n-l}| h_{n-l}) (mu_hat_{G_{n-l}}(x) - mu(x)) )_{l=0..k}.
std::vector<double> cross_gen_vector(const TreeData& tree, int lags,
                                     const DensityOracle& oracle,
                                     const Kernel& kernel,
                                     const BandwidthSchedule& schedule,
                                     double x);

struct SigmaSquared {
    double finite_n = 0.0;                 // sum_l 2^-l <mu, f_{l,n}^2>
    std::optional<double> analytic_limit;  // closed form when available
};

/// Limit variance of the additive functional: the finite-n quadrature sum
/// and, for the kernel variants, the analytic n -> infinity value.
SigmaSquared sigma2_limit(const AdditiveFunctionalSpec& spec,
                          const DensityOracle& oracle, int n);

}  // namespace bmc

#endif  // BMC_ESTIMATOR_HPP
