#ifndef BMC_DENSITY_HPP
#define BMC_DENSITY_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "bmc/grid.hpp"
#include "bmc/kernels.hpp"
#include "bmc/models.hpp"

namespace bmc {

/// Ground truth for the invariant density of the random-lineage chain:
/// closed form for symmetric continuous models, a fixed-point grid density
/// for asymmetric ones, and the stationary probability vector for finite
/// models (which has no Lebesgue density; continuous-only operations throw).
class DensityOracle {
  public:
    static DensityOracle gaussian(double mean, double var);
    static DensityOracle from_grid(GridFunction density);
    static DensityOracle finite(Eigen::VectorXd stationary);

    /// Build the matching oracle for a model.
    static DensityOracle for_model(const BmcModel& model);

    bool is_continuous() const;

    /// mu(x); throws std::domain_error for finite-state oracles.
    double density(double x) const;

    /// <mu, f> by quadrature (continuous) or dot product (finite, where f
    /// is read at the integer states).
    double mean_of(const std::function<double(double)>& f) const;

    double mean() const;
    double stddev() const;

    /// Integration window that carries all but a negligible tail of mu.
    std::pair<double, double> support() const;

    const Eigen::VectorXd& stationary_vector() const;

  private:
    struct Gaussian {
        double mean;
        double var;
    };
    struct Finite {
        Eigen::VectorXd mu;
    };
    std::variant<Gaussian, GridFunction, Finite> impl_;

    explicit DensityOracle(std::variant<Gaussian, GridFunction, Finite> impl)
        : impl_(std::move(impl)) {}
};

/// Smoothed density (K_h * mu)(x) = integral of h^-1 K((x-y)/h) mu(y) dy,
/// quadrature absolute error <= 1e-8.
double smoothed_density(const DensityOracle& oracle, const Kernel& kernel,
                        double h, double x);

/// Bias of the kernel estimator at x: (K_h * mu)(x) - mu(x).
double bias(const DensityOracle& oracle, const Kernel& kernel, double h,
            double x);

/// |K_{2^-m} * mu(x) - mu(x)| for m = 0..m_max; continuous oracles only.
std::vector<double> bochner_check(const DensityOracle& oracle,
                                  const Kernel& kernel, double x, int m_max);

/// Least-squares slope of log|bias| against log h.
double bias_log_slope(const DensityOracle& oracle, const Kernel& kernel,
                      const std::vector<double>& hs, double x);

/// Write (x, mu(x)) rows for plotting.
void export_density_csv(const DensityOracle& oracle, const std::string& path,
                        int points = 201);

}  // namespace bmc

#endif  // BMC_DENSITY_HPP
