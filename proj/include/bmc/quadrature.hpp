#ifndef BMC_QUADRATURE_HPP
#define BMC_QUADRATURE_HPP

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

namespace bmc {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive Gauss-Kronrod (G7/K15) integration of f over [a, b] with
/// interval bisection until the summed error estimate is below abs_tol.
/// Throws QuadratureError when the subdivision budget is exhausted.
double adaptive_integrate(const std::function<double(double)>& f, double a,
                          double b, double abs_tol = 1e-10,
                          int max_intervals = 4096);

/// Gauss-Hermite rule for integrals against exp(-t^2); nodes and weights
/// are computed once per order by Golub-Welsch.
class GaussHermite {
  public:
    explicit GaussHermite(int order);

    const Eigen::VectorXd& nodes() const { return nodes_; }
    const Eigen::VectorXd& weights() const { return weights_; }

    /// E[f(mean + stddev * Z)] for Z standard normal.
    double normal_expectation(const std::function<double(double)>& f,
                              double mean, double stddev) const;

    static const GaussHermite& shared(int order);

  private:
    Eigen::VectorXd nodes_;
    Eigen::VectorXd weights_;
};

}  // namespace bmc

#endif  // BMC_QUADRATURE_HPP
