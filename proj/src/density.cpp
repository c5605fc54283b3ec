#include "bmc/density.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "bmc/quadrature.hpp"

namespace bmc {

namespace {

double gaussian_pdf(double x, double mean, double var) {
    double z = (x - mean) / std::sqrt(var);
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi * var);
}

}  // namespace

DensityOracle DensityOracle::gaussian(double mean, double var) {
    if (!(var > 0.0)) throw std::invalid_argument("density variance must be > 0");
    return DensityOracle(Gaussian{mean, var});
}

DensityOracle DensityOracle::from_grid(GridFunction density) {
    double total = density.integrate();
    if (!(total > 0.0))
        throw std::invalid_argument("grid density must have positive mass");
    if (std::abs(total - 1.0) > 1e-6)
        throw std::invalid_argument("grid density must integrate to 1 within 1e-6");
    if (density.values().minCoeff() < -1e-12)
        throw std::invalid_argument("grid density must be nonnegative");
    return DensityOracle(std::move(density));
}

DensityOracle DensityOracle::finite(Eigen::VectorXd stationary) {
    if (stationary.size() < 1 || stationary.minCoeff() < 0.0 ||
        std::abs(stationary.sum() - 1.0) > 1e-10)
        throw std::invalid_argument("stationary vector must be a probability");
    return DensityOracle(Finite{std::move(stationary)});
}

DensityOracle DensityOracle::for_model(const BmcModel& model) {
    if (const auto* bar = std::get_if<GaussianBar>(&model)) {
        if (bar->symmetric()) {
            GaussianDensity d = bar_invariant_density(*bar);
            return gaussian(d.mean, d.var);
        }
        return from_grid(bar_invariant_density_grid(*bar));
    }
    return finite(stationary_distribution(std::get<FiniteBmc>(model)));
}

bool DensityOracle::is_continuous() const {
    return !std::holds_alternative<Finite>(impl_);
}

double DensityOracle::density(double x) const {
    if (const auto* g = std::get_if<Gaussian>(&impl_))
        return gaussian_pdf(x, g->mean, g->var);
    if (const auto* grid = std::get_if<GridFunction>(&impl_)) {
        if (x < grid->lo() || x > grid->hi()) return 0.0;
        return std::max((*grid)(x), 0.0);
    }
    throw std::domain_error(
        "finite-state oracle has no Lebesgue density (continuous-only operation)");
}

double DensityOracle::mean_of(const std::function<double(double)>& f) const {
    if (const auto* fin = std::get_if<Finite>(&impl_)) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < fin->mu.size(); ++i)
            acc += fin->mu[i] * f(static_cast<double>(i));
        return acc;
    }
    auto [lo, hi] = support();
    return adaptive_integrate(
        [this, &f](double y) { return f(y) * density(y); }, lo, hi, 1e-10,
        16384);
}

double DensityOracle::mean() const {
    if (const auto* g = std::get_if<Gaussian>(&impl_)) return g->mean;
    if (const auto* fin = std::get_if<Finite>(&impl_)) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < fin->mu.size(); ++i) acc += fin->mu[i] * i;
        return acc;
    }
    return mean_of([](double y) { return y; });
}

double DensityOracle::stddev() const {
    if (const auto* g = std::get_if<Gaussian>(&impl_)) return std::sqrt(g->var);
    double m = mean();
    double second = mean_of([](double y) { return y * y; });
    return std::sqrt(std::max(second - m * m, 0.0));
}

std::pair<double, double> DensityOracle::support() const {
    if (const auto* g = std::get_if<Gaussian>(&impl_)) {
        double sd = std::sqrt(g->var);
        return {g->mean - 10.0 * sd, g->mean + 10.0 * sd};
    }
    if (const auto* grid = std::get_if<GridFunction>(&impl_))
        return {grid->lo(), grid->hi()};
    throw std::domain_error("finite-state oracle has no continuous support");
}

const Eigen::VectorXd& DensityOracle::stationary_vector() const {
    if (const auto* fin = std::get_if<Finite>(&impl_)) return fin->mu;
    throw std::domain_error("oracle is not finite-state");
}

double smoothed_density(const DensityOracle& oracle, const Kernel& kernel,
                        double h, double x) {
    if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    if (!oracle.is_continuous())
        throw std::domain_error(
            "smoothing requires a continuous oracle (finite models have no density)");
    // Integration window: kernel support scaled by h, clipped to the
    // oracle's own support (bounded, reproducible truncation error).
    double radius = std::min(kernel.support_radius, 8.0) * h;
    auto [slo, shi] = oracle.support();
    double lo = std::max(x - radius, slo);
    double hi = std::min(x + radius, shi);
    if (!(hi > lo)) return 0.0;
    return adaptive_integrate(
        [&](double y) { return kernel((x - y) / h) * oracle.density(y) / h; },
        lo, hi, 1e-8 * std::min(1.0, h), 16384);
}

double bias(const DensityOracle& oracle, const Kernel& kernel, double h,
            double x) {
    return smoothed_density(oracle, kernel, h, x) - oracle.density(x);
}

std::vector<double> bochner_check(const DensityOracle& oracle,
                                  const Kernel& kernel, double x, int m_max) {
    if (m_max < 0) throw std::invalid_argument("m_max must be >= 0");
    std::vector<double> errs;
    errs.reserve(m_max + 1);
    for (int m = 0; m <= m_max; ++m)
        errs.push_back(std::abs(bias(oracle, kernel, std::exp2(-m), x)));
    return errs;
}

double bias_log_slope(const DensityOracle& oracle, const Kernel& kernel,
                      const std::vector<double>& hs, double x) {
    if (hs.size() < 2)
        throw std::invalid_argument("slope fit needs at least two bandwidths");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double h : hs) {
        double lx = std::log(h);
        double ly = std::log(std::abs(bias(oracle, kernel, h, x)));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double n = static_cast<double>(hs.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void export_density_csv(const DensityOracle& oracle, const std::string& path,
                        int points) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "x,mu\n";
    out.precision(17);
    if (!oracle.is_continuous()) {
        const auto& mu = oracle.stationary_vector();
        for (Eigen::Index i = 0; i < mu.size(); ++i)
            out << i << ',' << mu[i] << '\n';
        return;
    }
    auto [lo, hi] = oracle.support();
    for (int i = 0; i < points; ++i) {
        double x = lo + (hi - lo) * i / (points - 1);
        out << x << ',' << oracle.density(x) << '\n';
    }
}

}  // namespace bmc
