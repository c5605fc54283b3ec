#ifndef BMC_GRID_HPP
#define BMC_GRID_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace bmc {

/// Uniform 1-D grid description.
struct GridSpec {
    double lo = -1.0;
    double hi = 1.0;
    Eigen::Index points = 2;

    double step() const { return (hi - lo) / static_cast<double>(points - 1); }

    void validate() const {
        if (!(hi > lo)) throw std::invalid_argument("grid requires hi > lo");
        if (points < 2) throw std::invalid_argument("grid requires >= 2 points");
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument("grid bounds must be finite");
    }

    double point(Eigen::Index i) const { return lo + step() * static_cast<double>(i); }
};

/// A scalar function sampled on a uniform grid.  Evaluation interpolates
/// linearly between samples and extrapolates linearly from the edge
/// segment outside [lo, hi], which keeps affine functions exact on the
/// whole line and adds only tail-sized error for decaying functions.
class GridFunction {
  public:
    GridFunction() = default;

    GridFunction(GridSpec spec, Eigen::ArrayXd values)
        : spec_(spec), values_(std::move(values)) {
        spec_.validate();
        if (values_.size() != spec_.points)
            throw std::invalid_argument("grid value count does not match spec");
    }

    static GridFunction from_function(const GridSpec& spec,
                                      const std::function<double(double)>& f) {
        spec.validate();
        Eigen::ArrayXd v(spec.points);
        for (Eigen::Index i = 0; i < spec.points; ++i) v[i] = f(spec.point(i));
        return GridFunction(spec, std::move(v));
    }

    static GridFunction constant(const GridSpec& spec, double c) {
        spec.validate();
        return GridFunction(spec, Eigen::ArrayXd::Constant(spec.points, c));
    }

    const GridSpec& spec() const { return spec_; }
    double lo() const { return spec_.lo; }
    double hi() const { return spec_.hi; }
    double step() const { return spec_.step(); }
    Eigen::Index size() const { return values_.size(); }
    const Eigen::ArrayXd& values() const { return values_; }
    Eigen::ArrayXd& values() { return values_; }
    double point(Eigen::Index i) const { return spec_.point(i); }

    double operator()(double x) const {
        const double h = spec_.step();
        double t = (x - spec_.lo) / h;
        Eigen::Index i;
        if (t <= 0.0) {
            i = 0;
        } else if (t >= static_cast<double>(spec_.points - 1)) {
            i = spec_.points - 2;
        } else {
            i = static_cast<Eigen::Index>(t);
            if (i > spec_.points - 2) i = spec_.points - 2;
        }
        double w = t - static_cast<double>(i);
        return values_[i] * (1.0 - w) + values_[i + 1] * w;
    }

    /// Trapezoidal integral over [lo, hi].
    double integrate() const {
        double s = 0.5 * (values_[0] + values_[values_.size() - 1]);
        s += values_.segment(1, values_.size() - 2).sum();
        return s * spec_.step();
    }

  private:
    GridSpec spec_;
    Eigen::ArrayXd values_;
};

}  // namespace bmc

#endif  // BMC_GRID_HPP
