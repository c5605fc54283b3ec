#ifndef BMC_KERNELS_HPP
#define BMC_KERNELS_HPP

#include <functional>
#include <string>

namespace bmc {

/// A 1-D kernel function with its moment order and norm metadata.
/// `order` is the largest r such that the moments 1..r all vanish;
/// `support_radius` bounds the effective support (evaluations outside
/// [-radius, radius] are numerically negligible or exactly zero).
struct Kernel {
    std::string name;
    std::function<double(double)> f;
    double support_radius = 1.0;
    int order = 1;
    double l2_sq = 0.0;  // integral of K^2
    double l1 = 0.0;     // integral of |K|
    double sup = 0.0;    // sup |K|

    double operator()(double x) const { return f(x); }
    double l2() const;
};

/// Dyadic bandwidth schedule h_n = 2^(-n*gamma), with 0 < gamma*dim < 1.
struct BandwidthSchedule {
    double gamma = 0.2;
    int dim = 1;

    void validate() const;
};

/// Bandwidth at depth n, evaluated as an exact binary-float power.
double bandwidth(const BandwidthSchedule& schedule, int n);

/// Smoothness class parameters used by feasibility validation.
struct HolderSpec {
    double s = 2.0;
    double L = 1.0;

    void validate() const;
};

/// Shipped base kernels: "gaussian", "epanechnikov", "box".
Kernel make_kernel(const std::string& name);

/// j-th moment of the kernel by adaptive quadrature (abs error <= 1e-10).
double kernel_moment(const Kernel& k, int j);

/// Integral of K^2 by adaptive quadrature.
double l2_norm_sq(const Kernel& k);

/// Build a kernel with vanishing moments 1..r as (polynomial * base),
/// the polynomial coefficients solving the base's moment system.
/// Requires a symmetric base with finite moments up to 2r.
Kernel make_higher_order(const Kernel& base, int r);

/// Kernel lookup by name plus target order ("gaussian" order 3 etc.).
Kernel make_kernel(const std::string& name, int order);

}  // namespace bmc

#endif  // BMC_KERNELS_HPP
