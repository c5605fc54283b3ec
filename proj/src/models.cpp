#include "bmc/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bmc/quadrature.hpp"
#include "bmc/rng.hpp"

namespace bmc {

namespace {

double normal_pdf(double x, double mean, double stddev) {
    double z = (x - mean) / stddev;
    return std::exp(-0.5 * z * z) /
           (stddev * std::sqrt(2.0 * std::numbers::pi));
}

/// Draw from a discrete law by inverting the cumulative sums.
int draw_categorical(const Eigen::VectorXd& probs, double u) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
}

/// Draw from a grid density by inverse transform on its trapezoid CDF.
/// TODO: invert the piecewise-quadratic CDF exactly inside each cell; the
/// linear in-cell inversion below carries an O(step) bias within a cell.
double draw_from_grid_density(const GridFunction& density, double u) {
    const auto& v = density.values();
    const double step = density.step();
    double total = density.integrate();
    double target = u * total;
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < v.size(); ++i) {
        double cell = 0.5 * (v[i] + v[i + 1]) * step;
        if (acc + cell >= target) {
            double w = cell > 0.0 ? (target - acc) / cell : 0.5;
            return density.point(i) + w * step;
        }
        acc += cell;
    }
    return density.hi();
}

void check_coverage(const GaussianBar& model, double lo, double hi) {
    const double s0 = model.noise_std0();
    const double s1 = model.noise_std1();
    const double branches[2][3] = {{model.a0, model.b0, s0},
                                   {model.a1, model.b1, s1}};
    for (const auto& br : branches) {
        double c1 = br[0] * lo + br[1];
        double c2 = br[0] * hi + br[1];
        double need_lo = std::min(c1, c2) - 6.0 * br[2];
        double need_hi = std::max(c1, c2) + 6.0 * br[2];
        if (need_lo < lo || need_hi > hi)
            throw std::domain_error(
                "grid does not cover 6 noise standard deviations around the "
                "mapped range");
    }
}

}  // namespace

void ErgodicityProfile::validate() const {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("ergodic rate must lie in (0, 1)");
    if (!(M > 0.0))
        throw std::invalid_argument("ergodicity prefactor must be positive");
}

void GaussianBar::validate() const {
    if (!(std::max(std::abs(a0), std::abs(a1)) < 1.0))
        throw std::invalid_argument("autoregression slopes must satisfy |a| < 1");
    if (std::abs(noise_cov(0, 1) - noise_cov(1, 0)) > 1e-12)
        throw std::invalid_argument("noise covariance must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(noise_cov);
    if (es.eigenvalues().minCoeff() < -1e-12)
        throw std::invalid_argument("noise covariance must be positive semi-definite");
    if (ergodicity) ergodicity->validate();
}

bool GaussianBar::symmetric() const {
    return a0 == a1 && b0 == b1 && noise_cov(0, 0) == noise_cov(1, 1);
}

double GaussianBar::noise_std0() const { return std::sqrt(std::max(noise_cov(0, 0), 0.0)); }
double GaussianBar::noise_std1() const { return std::sqrt(std::max(noise_cov(1, 1), 0.0)); }

Eigen::Matrix2d GaussianBar::noise_factor() const {
    Eigen::LLT<Eigen::Matrix2d> llt(noise_cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    // Semidefinite case: eigen-decompose and clamp.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(noise_cov);
    Eigen::Vector2d d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal();
}

double default_alpha_proxy(const GaussianBar& model) {
    return std::max(std::abs(model.a0), std::abs(model.a1));
}

StationaryMoments bar_stationary_moments(const GaussianBar& model) {
    model.validate();
    // Lineage chain: Y' = a_J Y + b_J + eps_J with J uniform on {0, 1}.
    double abar = 0.5 * (model.a0 + model.a1);
    double bbar = 0.5 * (model.b0 + model.b1);
    double mean = bbar / (1.0 - abar);
    double a2 = 0.5 * (model.a0 * model.a0 + model.a1 * model.a1);
    double rhs = 0.5 * (2.0 * model.a0 * model.b0 * mean + model.b0 * model.b0 +
                        model.noise_cov(0, 0)) +
                 0.5 * (2.0 * model.a1 * model.b1 * mean + model.b1 * model.b1 +
                        model.noise_cov(1, 1));
    double second = rhs / (1.0 - a2);
    return {mean, second - mean * mean};
}

void FiniteBmc::validate() const {
    const int m = num_states();
    if (m < 1) throw std::invalid_argument("finite model needs >= 1 state");
    for (const auto& page : tensor) {
        if (page.rows() != m || page.cols() != m)
            throw std::invalid_argument("transition tensor must be m x m x m");
        if (page.minCoeff() < 0.0)
            throw std::invalid_argument("transition probabilities must be >= 0");
        if (std::abs(page.sum() - 1.0) > 1e-12)
            throw std::invalid_argument("transition tensor rows must sum to 1");
    }
    if (ergodicity) ergodicity->validate();
}

Eigen::MatrixXd FiniteBmc::q_matrix() const {
    const int m = num_states();
    Eigen::MatrixXd q(m, m);
    for (int x = 0; x < m; ++x) {
        // Q(x, y) = (P0(x, y) + P1(x, y)) / 2: row sums plus column sums of
        // the joint child law.
        Eigen::VectorXd row = tensor[x].rowwise().sum();
        Eigen::VectorXd col = tensor[x].colwise().sum();
        q.row(x) = 0.5 * (row + col).transpose();
    }
    return q;
}

void validate_model(const BmcModel& model) {
    std::visit([](const auto& m) { m.validate(); }, model);
}

InitialDistribution InitialDistribution::point(double v) {
    InitialDistribution d;
    d.kind = Kind::PointMass;
    d.value = v;
    return d;
}

InitialDistribution InitialDistribution::stationary() {
    return InitialDistribution{};
}

InitialDistribution InitialDistribution::gaussian(double mean, double var) {
    if (!(var >= 0.0)) throw std::invalid_argument("initial variance must be >= 0");
    InitialDistribution d;
    d.kind = Kind::Gaussian;
    d.mean = mean;
    d.var = var;
    return d;
}

namespace {

double draw_root(const GaussianBar& model, std::uint64_t seed,
                 const InitialDistribution& initial,
                 const GridFunction* stationary_density) {
    CounterRng rng = root_stream(seed);
    switch (initial.kind) {
        case InitialDistribution::Kind::PointMass:
            return initial.value;
        case InitialDistribution::Kind::Gaussian:
            return initial.mean + std::sqrt(initial.var) * rng.next_normal();
        case InitialDistribution::Kind::Stationary: {
            if (model.symmetric()) {
                GaussianDensity d = bar_invariant_density(model);
                return d.mean + std::sqrt(d.var) * rng.next_normal();
            }
            if (stationary_density == nullptr)
                throw std::invalid_argument(
                    "asymmetric model: pass the stationary grid density to "
                    "sample the stationary root");
            return draw_from_grid_density(*stationary_density,
                                          rng.next_uniform());
        }
    }
    throw std::logic_error("unreachable");
}

int draw_root(const FiniteBmc& model, std::uint64_t seed,
              const InitialDistribution& initial) {
    CounterRng rng = root_stream(seed);
    switch (initial.kind) {
        case InitialDistribution::Kind::PointMass: {
            int idx = static_cast<int>(initial.value);
            if (idx < 0 || idx >= model.num_states())
                throw std::invalid_argument("point-mass state index out of range");
            return idx;
        }
        case InitialDistribution::Kind::Gaussian:
            throw std::invalid_argument(
                "Gaussian initial law is undefined for finite state spaces");
        case InitialDistribution::Kind::Stationary: {
            Eigen::VectorXd mu = stationary_distribution(model);
            return draw_categorical(mu, rng.next_uniform());
        }
    }
    throw std::logic_error("unreachable");
}

/// Children of a state-x node of the continuous model.
std::pair<double, double> draw_children(const GaussianBar& model,
                                        const Eigen::Matrix2d& chol, double x,
                                        CounterRng& rng) {
    auto [z0, z1] = rng.next_normal_pair();
    double e0 = chol(0, 0) * z0 + chol(0, 1) * z1;
    double e1 = chol(1, 0) * z0 + chol(1, 1) * z1;
    return {model.a0 * x + model.b0 + e0, model.a1 * x + model.b1 + e1};
}

/// Children of a state-x node of the finite model: one uniform draw walks
/// the joint (y, z) cells in row-major order.
std::pair<int, int> draw_children(const FiniteBmc& model, int x,
                                  CounterRng& rng) {
    const Eigen::MatrixXd& page = model.tensor[x];
    const int m = model.num_states();
    double u = rng.next_uniform();
    double acc = 0.0;
    for (int y = 0; y < m; ++y) {
        for (int z = 0; z < m; ++z) {
            acc += page(y, z);
            if (u < acc) return {y, z};
        }
    }
    return {m - 1, m - 1};
}

}  // namespace

TreeData simulate_tree(const BmcModel& model, int n, std::uint64_t seed,
                       const InitialDistribution& initial,
                       const GridFunction* stationary_density) {
    validate_model(model);
    const std::uint64_t total = tree_size(n);
    if (total > (std::uint64_t{1} << 31))
        throw std::overflow_error("tree too large to materialize");
    TreeData tree;
    tree.depth = n;
    tree.seed = seed;
    tree.states.resize(static_cast<std::size_t>(total));

    if (const auto* bar = std::get_if<GaussianBar>(&model)) {
        const Eigen::Matrix2d chol = bar->noise_factor();
        tree.states[0] = draw_root(*bar, seed, initial, stationary_density);
        const NodeId internal_end = n > 0 ? tree_size(n - 1) : 0;
        for (NodeId u = 1; u <= internal_end; ++u) {
            CounterRng rng = node_stream(seed, u);
            auto [c0, c1] = draw_children(*bar, chol, tree.states[u - 1], rng);
            tree.states[2 * u - 1] = c0;
            tree.states[2 * u] = c1;
        }
    } else {
        const auto& fin = std::get<FiniteBmc>(model);
        tree.states[0] = static_cast<double>(draw_root(fin, seed, initial));
        const NodeId internal_end = n > 0 ? tree_size(n - 1) : 0;
        for (NodeId u = 1; u <= internal_end; ++u) {
            CounterRng rng = node_stream(seed, u);
            auto [c0, c1] =
                draw_children(fin, static_cast<int>(tree.states[u - 1]), rng);
            tree.states[2 * u - 1] = static_cast<double>(c0);
            tree.states[2 * u] = static_cast<double>(c1);
        }
    }
    return tree;
}

double simulate_lineage(const BmcModel& model, int depth, std::uint64_t seed,
                        const InitialDistribution& initial,
                        const GridFunction* stationary_density) {
    validate_model(model);
    if (const auto* bar = std::get_if<GaussianBar>(&model)) {
        const Eigen::Matrix2d chol = bar->noise_factor();
        double x = draw_root(*bar, seed, initial, stationary_density);
        NodeId u = kRoot;
        for (int k = 0; k < depth; ++k) {
            CounterRng rng = node_stream(seed, u);
            auto [c0, c1] = draw_children(*bar, chol, x, rng);
            bool go1 = (rng.next_uniform() < 0.5);
            x = go1 ? c1 : c0;
            u = go1 ? child1(u) : child0(u);
        }
        return x;
    }
    const auto& fin = std::get<FiniteBmc>(model);
    int x = draw_root(fin, seed, initial);
    NodeId u = kRoot;
    for (int k = 0; k < depth; ++k) {
        CounterRng rng = node_stream(seed, u);
        auto [c0, c1] = draw_children(fin, x, rng);
        bool go1 = (rng.next_uniform() < 0.5);
        x = go1 ? c1 : c0;
        u = go1 ? child1(u) : child0(u);
    }
    return static_cast<double>(x);
}

Eigen::VectorXd q_apply(const FiniteBmc& model, const Eigen::VectorXd& f,
                        int reps) {
    if (reps < 0) throw std::invalid_argument("iteration count must be >= 0");
    if (f.size() != model.num_states())
        throw std::invalid_argument("test function length must match state count");
    Eigen::MatrixXd q = model.q_matrix();
    Eigen::VectorXd out = f;
    for (int k = 0; k < reps; ++k) out = q * out;
    return out;
}

GridFunction q_apply(const GaussianBar& model, const GridFunction& f, int reps,
                     int gh_order) {
    if (reps < 0) throw std::invalid_argument("iteration count must be >= 0");
    GridFunction cur = f;
    const auto& gh = GaussHermite::shared(gh_order);
    for (int k = 0; k < reps; ++k) {
        check_coverage(model, cur.lo(), cur.hi());
        Eigen::ArrayXd next(cur.size());
        const GridFunction& src = cur;
        for (Eigen::Index i = 0; i < cur.size(); ++i) {
            double x = cur.point(i);
            double m0 = model.a0 * x + model.b0;
            double m1 = model.a1 * x + model.b1;
            double v0 = gh.normal_expectation([&src](double y) { return src(y); },
                                              m0, model.noise_std0());
            double v1 = gh.normal_expectation([&src](double y) { return src(y); },
                                              m1, model.noise_std1());
            next[i] = 0.5 * (v0 + v1);
        }
        cur = GridFunction(cur.spec(), std::move(next));
    }
    return cur;
}

Eigen::VectorXd p_apply_pair(const FiniteBmc& model, const Eigen::MatrixXd& g) {
    const int m = model.num_states();
    if (g.rows() != m || g.cols() != m)
        throw std::invalid_argument("pair function must be m x m");
    Eigen::VectorXd out(m);
    for (int x = 0; x < m; ++x)
        out[x] = (model.tensor[x].array() * g.array()).sum();
    return out;
}

GridFunction p_apply_pair(const GaussianBar& model,
                          const std::function<double(double, double)>& g,
                          const GridSpec& out, int gh_order) {
    out.validate();
    check_coverage(model, out.lo, out.hi);
    const auto& gh = GaussHermite::shared(gh_order);
    const Eigen::Matrix2d chol = model.noise_factor();
    const double scale = std::numbers::sqrt2;
    const auto& t = gh.nodes();
    const auto& w = gh.weights();
    Eigen::ArrayXd vals(out.points);
    for (Eigen::Index i = 0; i < out.points; ++i) {
        double x = out.point(i);
        double m0 = model.a0 * x + model.b0;
        double m1 = model.a1 * x + model.b1;
        double acc = 0.0;
        for (Eigen::Index p = 0; p < t.size(); ++p) {
            double zp = scale * t[p];
            double partial = 0.0;
            for (Eigen::Index q = 0; q < t.size(); ++q) {
                double zq = scale * t[q];
                double e0 = chol(0, 0) * zp + chol(0, 1) * zq;
                double e1 = chol(1, 0) * zp + chol(1, 1) * zq;
                partial += w[q] * g(m0 + e0, m1 + e1);
            }
            acc += w[p] * partial;
        }
        vals[i] = acc / std::numbers::pi;
    }
    return GridFunction(out, std::move(vals));
}

std::function<double(double, double)> tensor_product(GridFunction f,
                                                     GridFunction g) {
    return [f = std::move(f), g = std::move(g)](double y, double z) {
        return f(y) * g(z);
    };
}

std::function<double(double, double)> tensor_sym(GridFunction f,
                                                 GridFunction g) {
    return [f = std::move(f), g = std::move(g)](double y, double z) {
        return 0.5 * (f(y) * g(z) + g(y) * f(z));
    };
}

Eigen::MatrixXd tensor_product(const Eigen::VectorXd& f,
                               const Eigen::VectorXd& g) {
    return f * g.transpose();
}

Eigen::MatrixXd tensor_sym(const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
    return 0.5 * (f * g.transpose() + g * f.transpose());
}

namespace {

Eigen::RowVectorXd power_iterate(const Eigen::MatrixXd& q,
                                 Eigen::RowVectorXd mu, double tol,
                                 int max_iter) {
    for (int it = 0; it < max_iter; ++it) {
        Eigen::RowVectorXd next = mu * q;
        next /= next.sum();
        if ((next - mu).cwiseAbs().sum() <= tol &&
            (next * q - next).cwiseAbs().sum() <= tol)
            return next;
        mu = next;
    }
    throw std::runtime_error(
        "power iteration did not converge: chain may be reducible or periodic");
}

}  // namespace

Eigen::VectorXd stationary_distribution(const FiniteBmc& model, double tol,
                                        int max_iter) {
    model.validate();
    const int m = model.num_states();
    Eigen::MatrixXd q = model.q_matrix();
    Eigen::RowVectorXd mu = power_iterate(
        q, Eigen::RowVectorXd::Constant(m, 1.0 / m), tol, max_iter);
    if (m > 1) {
        // The uniform start can sit on a fixed point of a periodic or
        // reducible chain; a point-mass start must reach the same limit.
        Eigen::RowVectorXd probe = Eigen::RowVectorXd::Zero(m);
        probe[0] = 1.0;
        Eigen::RowVectorXd check = power_iterate(q, probe, tol, max_iter);
        if ((check - mu).cwiseAbs().sum() > 1e6 * tol)
            throw std::runtime_error(
                "power iteration limits disagree: chain is reducible");
    }
    return mu.transpose();
}

double ergodicity_rate(const FiniteBmc& model) {
    model.validate();
    (void)stationary_distribution(model);
    Eigen::MatrixXd q = model.q_matrix();
    if (q.rows() == 1) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(q);
    std::vector<double> mods(q.rows());
    for (Eigen::Index i = 0; i < q.rows(); ++i)
        mods[i] = std::abs(es.eigenvalues()[i]);
    std::sort(mods.begin(), mods.end(), std::greater<>());
    double slem = mods[1];
    // Numerical zero cleanup for rank-one chains.
    return slem < 1e-12 ? 0.0 : slem;
}

GaussianDensity bar_invariant_density(const GaussianBar& model) {
    model.validate();
    if (!model.symmetric())
        throw std::invalid_argument(
            "closed-form invariant density requires the symmetric model");
    double a = model.a0;
    double var_eps = model.noise_cov(0, 0);
    return {model.b0 / (1.0 - a), var_eps / (1.0 - a * a)};
}

GridSpec default_grid(const GaussianBar& model, Eigen::Index points) {
    StationaryMoments sm = bar_stationary_moments(model);
    double sd = std::sqrt(std::max(sm.var, 1e-12));
    double half = 8.0 * sd;
    const double branches[2][3] = {{model.a0, model.b0, model.noise_std0()},
                                   {model.a1, model.b1, model.noise_std1()}};
    for (const auto& br : branches) {
        double drift = std::abs(br[0] * sm.mean + br[1] - sm.mean);
        double need = (7.0 * br[2] + 2.0 * drift) / (1.0 - std::abs(br[0]));
        half = std::max(half, need);
    }
    return {sm.mean - half, sm.mean + half, points};
}

GridFunction bar_invariant_density_grid(const GaussianBar& model,
                                        const GridSpec& spec, double tol,
                                        int max_iter) {
    model.validate();
    spec.validate();
    const double s0 = model.noise_std0();
    const double s1 = model.noise_std1();
    if (s0 <= 0.0 || s1 <= 0.0)
        throw std::invalid_argument(
            "density transport requires non-degenerate branch noise");

    const Eigen::Index n = spec.points;
    const double step = spec.step();
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = spec.point(i);

    // Transport matrix: T(j, i) = q(x_i, y_j) * w_i with trapezoid weights,
    // where q is the lineage transition density.
    Eigen::MatrixXd transport(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double w = (i == 0 || i == n - 1) ? 0.5 * step : step;
        double m0 = model.a0 * x[i] + model.b0;
        double m1 = model.a1 * x[i] + model.b1;
        for (Eigen::Index j = 0; j < n; ++j) {
            double q = 0.5 * (normal_pdf(x[j], m0, s0) + normal_pdf(x[j], m1, s1));
            transport(j, i) = q * w;
        }
    }

    StationaryMoments sm = bar_stationary_moments(model);
    Eigen::VectorXd rho(n);
    for (Eigen::Index i = 0; i < n; ++i)
        rho[i] = normal_pdf(x[i], sm.mean, std::sqrt(sm.var));

    auto normalize = [&](Eigen::VectorXd& v) {
        double total = 0.0;
        for (Eigen::Index i = 0; i + 1 < n; ++i)
            total += 0.5 * (v[i] + v[i + 1]) * step;
        v /= total;
    };
    normalize(rho);

    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd next = transport * rho;
        normalize(next);
        double l1 = 0.0;
        for (Eigen::Index i = 0; i + 1 < n; ++i)
            l1 += 0.5 * (std::abs(next[i] - rho[i]) +
                         std::abs(next[i + 1] - rho[i + 1])) *
                  step;
        rho = next;
        if (l1 <= tol) return GridFunction(spec, rho.array());
    }
    throw std::runtime_error("density transport fixed point did not converge");
}

GridFunction bar_invariant_density_grid(const GaussianBar& model) {
    return bar_invariant_density_grid(model, default_grid(model));
}

}  // namespace bmc
