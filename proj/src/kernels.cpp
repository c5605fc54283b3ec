#include "bmc/kernels.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bmc/quadrature.hpp"

namespace bmc {

namespace {

constexpr double kQuadTol = 1e-10;

// Quadrature window for unbounded kernels.  phi(12) ~ 2e-32, so moments up
// to x^8 are captured far below the 1e-10 tolerance.
constexpr double kGaussianRadius = 12.0;

double integrate_over_support(const Kernel& k,
                              const std::function<double(double)>& f) {
    return adaptive_integrate(f, -k.support_radius, k.support_radius, kQuadTol);
}

/// Largest r <= probe_max with numerically vanishing moments 1..r.
int detect_order(const Kernel& k, int probe_max = 8) {
    for (int j = 1; j <= probe_max; ++j) {
        if (std::abs(kernel_moment(k, j)) > 1e-8) return j - 1;
    }
    return probe_max;
}

void fill_norms(Kernel& k) {
    k.l2_sq = integrate_over_support(
        k, [&k](double x) { return k.f(x) * k.f(x); });
    k.l1 = integrate_over_support(
        k, [&k](double x) { return std::abs(k.f(x)); });
    double s = 0.0;
    const int probes = 4096;
    for (int i = 0; i <= probes; ++i) {
        double x = -k.support_radius +
                   2.0 * k.support_radius * static_cast<double>(i) / probes;
        s = std::max(s, std::abs(k.f(x)));
    }
    k.sup = s;
}

}  // namespace

double Kernel::l2() const { return std::sqrt(l2_sq); }

void BandwidthSchedule::validate() const {
    if (dim < 1) throw std::invalid_argument("bandwidth dimension must be >= 1");
    if (!(gamma > 0.0) || !(gamma * dim < 1.0))
        throw std::invalid_argument("bandwidth exponent requires 0 < gamma*d < 1");
}

double bandwidth(const BandwidthSchedule& schedule, int n) {
    schedule.validate();
    if (n < 0) throw std::invalid_argument("bandwidth depth must be >= 0");
    return std::exp2(-static_cast<double>(n) * schedule.gamma);
}

void HolderSpec::validate() const {
    if (!(s > 0.0)) throw std::invalid_argument("smoothness order must be > 0");
    if (!(L > 0.0)) throw std::invalid_argument("smoothness constant must be > 0");
}

Kernel make_kernel(const std::string& name) {
    Kernel k;
    k.name = name;
    if (name == "gaussian") {
        k.f = [](double x) {
            return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        };
        k.support_radius = kGaussianRadius;
    } else if (name == "epanechnikov") {
        k.f = [](double x) {
            return std::abs(x) <= 1.0 ? 0.75 * (1.0 - x * x) : 0.0;
        };
        k.support_radius = 1.0;
    } else if (name == "box") {
        k.f = [](double x) { return std::abs(x) <= 1.0 ? 0.5 : 0.0; };
        k.support_radius = 1.0;
    } else {
        throw std::invalid_argument("unknown kernel: " + name);
    }
    fill_norms(k);
    k.order = detect_order(k);
    double mass = kernel_moment(k, 0);
    if (std::abs(mass - 1.0) > 1e-10)
        throw std::runtime_error("kernel does not integrate to 1: " + name);
    return k;
}

double kernel_moment(const Kernel& k, int j) {
    if (j < 0) throw std::invalid_argument("moment index must be >= 0");
    return integrate_over_support(k, [&k, j](double x) {
        return std::pow(x, j) * k.f(x);
    });
}

double l2_norm_sq(const Kernel& k) {
    return integrate_over_support(k, [&k](double x) {
        double v = k.f(x);
        return v * v;
    });
}

Kernel make_higher_order(const Kernel& base, int r) {
    if (r < 1) throw std::invalid_argument("target order must be >= 1");
    if (base.order >= r) return base;

    // Solve sum_j c_j m_{j+i} = delta_{i0} for i = 0..r, where m_i are the
    // base moments.  The resulting q(x) = sum c_j x^j reweights the base so
    // moments 1..r vanish while the total mass stays 1.
    const int dim = r + 1;
    Eigen::MatrixXd moment_matrix(dim, dim);
    for (int i = 0; i <= r; ++i)
        for (int j = 0; j <= r; ++j)
            moment_matrix(i, j) = kernel_moment(base, i + j);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    rhs[0] = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(moment_matrix);
    if (!lu.isInvertible())
        throw std::runtime_error("moment matrix is singular; cannot raise order");
    Eigen::VectorXd coeff = lu.solve(rhs);

    Kernel out;
    out.name = base.name + "-order" + std::to_string(r);
    out.support_radius = base.support_radius;
    auto base_f = base.f;
    out.f = [base_f, coeff](double x) {
        double q = 0.0;
        for (Eigen::Index j = coeff.size() - 1; j >= 0; --j) q = q * x + coeff[j];
        return q * base_f(x);
    };
    fill_norms(out);
    out.order = r;
    return out;
}

Kernel make_kernel(const std::string& name, int order) {
    Kernel base = make_kernel(name);
    if (order <= base.order) return base;
    return make_higher_order(base, order);
}

}  // namespace bmc
