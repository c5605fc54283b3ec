#include "bmc/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "bmc/quadrature.hpp"
#include "bmc/tree_index.hpp"

namespace bmc {

namespace {

std::pair<NodeId, NodeId> node_range(const RegionSelector& sel) {
    if (sel.n < 0) throw std::invalid_argument("region depth must be >= 0");
    if (sel.tag == Region::Generation) return generation_range(sel.n);
    return {kRoot, tree_size(sel.n) + 1};
}

/// <mu, f^2> for f(y) = h^{-1/2} K((x-y)/h).
double kernel_sq_weighted_mean(const DensityOracle& oracle, const Kernel& kernel,
                               double h, double x) {
    double radius = std::min(kernel.support_radius, 8.0) * h;
    auto [slo, shi] = oracle.support();
    double lo = std::max(x - radius, slo);
    double hi = std::min(x + radius, shi);
    if (!(hi > lo)) return 0.0;
    return adaptive_integrate(
        [&](double y) {
            double k = kernel((x - y) / h);
            return k * k * oracle.density(y) / h;
        },
        lo, hi, 1e-10, 16384);
}

}  // namespace

const char* region_name(Region r) {
    return r == Region::Generation ? "gen" : "tree";
}

std::uint64_t region_size(const RegionSelector& sel) {
    return sel.tag == Region::Generation ? generation_size(sel.n)
                                         : tree_size(sel.n);
}

double kde(const TreeData& tree, const RegionSelector& sel, const Kernel& kernel,
           double h, double x) {
    if (sel.n > tree.depth)
        throw std::invalid_argument("region depth exceeds tree depth");
    if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    auto [first, last] = node_range(sel);
    double acc = 0.0;
    for (NodeId u = first; u < last; ++u) {
        double s = tree.states[u - 1];
        if (!std::isfinite(s))
            throw std::invalid_argument("tree contains non-finite states");
        acc += kernel((x - s) / h);
    }
    return acc / (static_cast<double>(last - first) * h);
}

std::vector<double> kde(const TreeData& tree, const RegionSelector& sel,
                        const Kernel& kernel, double h,
                        std::span<const double> xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(kde(tree, sel, kernel, h, x));
    return out;
}

std::vector<double> default_eval_points(const DensityOracle& oracle, int count) {
    if (count < 1) throw std::invalid_argument("need at least one point");
    double m = oracle.mean();
    double sd = oracle.stddev();
    std::vector<double> xs(count);
    if (count == 1) {
        xs[0] = m;
        return xs;
    }
    for (int i = 0; i < count; ++i)
        xs[i] = m - 3.0 * sd + 6.0 * sd * i / (count - 1);
    return xs;
}

AdditiveFunctionalSpec AdditiveFunctionalSpec::zero(double x, Kernel k,
                                                    BandwidthSchedule s) {
    AdditiveFunctionalSpec spec;
    spec.variant = Variant::Zero;
    spec.x = x;
    spec.kernel = std::move(k);
    spec.schedule = s;
    return spec;
}

AdditiveFunctionalSpec AdditiveFunctionalSpec::id(double x, Kernel k,
                                                  BandwidthSchedule s) {
    AdditiveFunctionalSpec spec = zero(x, std::move(k), s);
    spec.variant = Variant::Id;
    return spec;
}

AdditiveFunctionalSpec AdditiveFunctionalSpec::cross_gen(
    double x, Kernel k, BandwidthSchedule s, std::vector<double> coeffs) {
    if (coeffs.empty())
        throw std::invalid_argument("cross-generation spec needs coefficients");
    AdditiveFunctionalSpec spec = zero(x, std::move(k), s);
    spec.variant = Variant::CrossGen;
    spec.coefficients = std::move(coeffs);
    return spec;
}

PreparedAdditiveFunctional::PreparedAdditiveFunctional(
    const AdditiveFunctionalSpec& spec, const DensityOracle& oracle, int depth)
    : depth_(depth) {
    if (depth < 0) throw std::invalid_argument("depth must be >= 0");
    const double x = spec.x;
    auto kernel_level = [&](int generation) {
        double h = bandwidth(spec.schedule, generation);
        double scale = 1.0 / std::sqrt(h);
        auto kf = spec.kernel.f;
        return std::function<double(double)>(
            [kf, x, h, scale](double y) { return scale * kf((x - y) / h); });
    };
    auto level_mean = [&](int generation) {
        double h = bandwidth(spec.schedule, generation);
        return std::sqrt(h) * smoothed_density(oracle, spec.kernel, h, x);
    };

    switch (spec.variant) {
        case AdditiveFunctionalSpec::Variant::Zero:
            levels_.push_back({depth, kernel_level(depth), level_mean(depth)});
            break;
        case AdditiveFunctionalSpec::Variant::Id: {
            auto f = kernel_level(depth);
            double m = level_mean(depth);
            for (int l = 0; l <= depth; ++l)
                levels_.push_back({depth - l, f, m});
            break;
        }
        case AdditiveFunctionalSpec::Variant::CrossGen: {
            int k = static_cast<int>(spec.coefficients.size()) - 1;
            if (k >= depth)
                throw std::invalid_argument("lag count must be below the depth");
            for (int l = 0; l <= k; ++l) {
                double scale = std::exp2(l) * spec.coefficients[l];
                if (scale == 0.0) continue;
                auto f = kernel_level(depth - l);
                double m = level_mean(depth - l);
                levels_.push_back(
                    {depth - l,
                     [f, scale](double y) { return scale * f(y); },
                     scale * m});
            }
            break;
        }
        case AdditiveFunctionalSpec::Variant::Custom: {
            if (static_cast<int>(spec.custom.size()) > depth + 1)
                throw std::invalid_argument("more custom levels than generations");
            for (int l = 0; l < static_cast<int>(spec.custom.size()); ++l) {
                const auto& f = spec.custom[l];
                if (!f) continue;
                levels_.push_back({depth - l, f, oracle.mean_of(f)});
            }
            break;
        }
    }
}

double PreparedAdditiveFunctional::evaluate(const TreeData& tree) const {
    if (tree.depth < depth_)
        throw std::invalid_argument("tree shallower than the functional depth");
    double acc = 0.0;
    for (const auto& level : levels_) {
        auto [first, last] = generation_range(level.generation);
        double sum = 0.0;
        for (NodeId u = first; u < last; ++u) sum += level.f(tree.states[u - 1]);
        acc += sum - static_cast<double>(last - first) * level.mean;
    }
    return acc / std::sqrt(static_cast<double>(generation_size(depth_)));
}

double additive_functional(const TreeData& tree,
                           const AdditiveFunctionalSpec& spec,
                           const DensityOracle& oracle) {
    return PreparedAdditiveFunctional(spec, oracle, tree.depth).evaluate(tree);
}

double SpeedSequence::at(int n) const {
    if (n < 0) throw std::invalid_argument("depth must be >= 0");
    if (beta < 0.0) throw std::invalid_argument("speed exponent must be >= 0");
    return std::exp2(beta * n);
}

double default_varpi(int n) { return n == 0 ? 1.0 : 1.0 / n; }

double normalized_error(const TreeData& tree, const RegionSelector& sel,
                        const DensityOracle& oracle, const Kernel& kernel,
                        const BandwidthSchedule& schedule,
                        const SpeedSequence& speed, double x) {
    double h = bandwidth(schedule, sel.n);
    double estimate = kde(tree, sel, kernel, h, x);
    double scale = std::sqrt(static_cast<double>(region_size(sel)) * h);
    return scale * (estimate - oracle.density(x)) / speed.at(sel.n);
}

double self_normalized(const TreeData& tree, const RegionSelector& sel,
                       const RegionSelector& star_sel,
                       const DensityOracle& oracle, const Kernel& kernel,
                       const BandwidthSchedule& schedule,
                       const SpeedSequence& speed, double varpi_n, double x) {
    double numer = normalized_error(tree, sel, oracle, kernel, schedule, speed, x);
    double h = bandwidth(schedule, star_sel.n);
    double plug_in = kde(tree, star_sel, kernel, h, x);
    double sigma_hat = kernel.l2() * std::sqrt(std::max(plug_in, 0.0));
    return numer / std::max(sigma_hat, varpi_n);
}

ConfidenceInterval confidence_interval(double estimate, double plug_in,
                                       double delta, double b_n, double varpi_n,
                                       std::uint64_t region_count, double h,
                                       double kernel_l2) {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    double sigma_hat = kernel_l2 * std::sqrt(std::max(plug_in, 0.0));
    double half = delta * b_n * std::max(sigma_hat, varpi_n) /
                  std::sqrt(static_cast<double>(region_count) * h);
    double level = 1.0 - std::exp(-0.5 * b_n * b_n * delta * delta);
    level = std::min(std::max(level, 0.0), std::nextafter(1.0, 0.0));
    return {estimate - half, estimate + half, level};
}

std::vector<double> cross_gen_vector(const TreeData& tree, int lags,
                                     const DensityOracle& oracle,
                                     const Kernel& kernel,
                                     const BandwidthSchedule& schedule,
                                     double x) {
    if (lags < 0) throw std::invalid_argument("lag count must be >= 0");
    if (lags >= tree.depth)
        throw std::invalid_argument("lag count must be below the tree depth");
    double mu_x = oracle.density(x);
    std::vector<double> out;
    out.reserve(lags + 1);
    for (int l = 0; l <= lags; ++l) {
        int m = tree.depth - l;
        double h = bandwidth(schedule, m);
        RegionSelector sel{Region::Generation, m};
        double estimate = kde(tree, sel, kernel, h, x);
        double scale = std::sqrt(static_cast<double>(generation_size(m)) * h);
        out.push_back(scale * (estimate - mu_x));
    }
    return out;
}

SigmaSquared sigma2_limit(const AdditiveFunctionalSpec& spec,
                          const DensityOracle& oracle, int n) {
    if (n < 0) throw std::invalid_argument("depth must be >= 0");
    SigmaSquared out;
    double base = kernel_sq_weighted_mean(
        oracle, spec.kernel, bandwidth(spec.schedule, n), spec.x);
    double mu_l2 = oracle.density(spec.x) * spec.kernel.l2_sq;
    switch (spec.variant) {
        case AdditiveFunctionalSpec::Variant::Zero:
            out.finite_n = base;
            out.analytic_limit = mu_l2;
            break;
        case AdditiveFunctionalSpec::Variant::Id:
            out.finite_n = (2.0 - std::exp2(-n)) * base;
            out.analytic_limit = 2.0 * mu_l2;
            break;
        case AdditiveFunctionalSpec::Variant::CrossGen: {
            double finite = 0.0, weight = 0.0;
            int k = static_cast<int>(spec.coefficients.size()) - 1;
            if (k >= n)
                throw std::invalid_argument("lag count must be below the depth");
            for (int l = 0; l <= k; ++l) {
                double a = spec.coefficients[l];
                // 2^-l ||2^l a f^x_{n-l}||^2 = 2^l a^2 ||f^x_{n-l}||^2.
                finite += std::exp2(l) * a * a *
                          kernel_sq_weighted_mean(
                              oracle, spec.kernel,
                              bandwidth(spec.schedule, n - l), spec.x);
                weight += std::exp2(l) * a * a;
            }
            out.finite_n = finite;
            out.analytic_limit = weight * mu_l2;
            break;
        }
        case AdditiveFunctionalSpec::Variant::Custom: {
            double finite = 0.0;
            for (int l = 0; l < static_cast<int>(spec.custom.size()); ++l) {
                const auto& f = spec.custom[l];
                if (!f) continue;
                finite += std::exp2(-l) *
                          oracle.mean_of([&f](double y) {
                              double v = f(y);
                              return v * v;
                          });
            }
            out.finite_n = finite;
            break;
        }
    }
    return out;
}

}  // namespace bmc
