#include "bmc/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bmc/rng.hpp"
#include "bmc/tree_index.hpp"

namespace bmc {

namespace {

constexpr double kEnumBudget = 1e7;

void check_request(int n, int x, int states) {
    if (n < 0) throw std::invalid_argument("generation index must be >= 0");
    if (x < 0 || x >= states)
        throw std::invalid_argument("initial state out of range");
}

std::vector<Eigen::VectorXd> q_powers(const Eigen::MatrixXd& q,
                                      const Eigen::VectorXd& f, int up_to) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(up_to + 1);
    out.push_back(f);
    for (int k = 1; k <= up_to; ++k) out.push_back(q * out.back());
    return out;
}

/// Depth-first enumeration over all child-pair assignments of the internal
/// nodes, carrying the running probability and per-generation partial sums.
class Enumerator {
  public:
    Enumerator(const FiniteBmc& model, int n, int x)
        : model_(model),
          n_(n),
          total_(tree_size(n)),
          internal_(n > 0 ? tree_size(n - 1) : 0),
          states_(total_ + 1, 0) {
        states_[1] = x;
    }

    /// Runs fn(states, prob) for every full assignment; accumulation is the
    /// visitor's job.
    template <class Visitor>
    void run(Visitor&& fn) {
        descend(1, 1.0, std::forward<Visitor>(fn));
    }

    static double assignments(const FiniteBmc& model, int n) {
        return std::pow(static_cast<double>(model.num_states()),
                        static_cast<double>(tree_size(n)) - 1.0);
    }

  private:
    template <class Visitor>
    void descend(NodeId u, double prob, Visitor&& fn) {
        if (u > internal_) {
            fn(states_, prob);
            return;
        }
        const Eigen::MatrixXd& page = model_.tensor[states_[u]];
        const int m = model_.num_states();
        for (int y = 0; y < m; ++y) {
            for (int z = 0; z < m; ++z) {
                double p = page(y, z);
                if (p == 0.0) continue;
                states_[2 * u] = y;
                states_[2 * u + 1] = z;
                descend(u + 1, prob * p, fn);
            }
        }
    }

    const FiniteBmc& model_;
    int n_;
    NodeId total_;
    NodeId internal_;
    std::vector<int> states_;
};

void check_enum_budget(const FiniteBmc& model, int n) {
    if (Enumerator::assignments(model, n) > kEnumBudget)
        throw std::invalid_argument(
            "instance too large for exhaustive enumeration");
}

double generation_sum(const std::vector<int>& states, int gen,
                      const Eigen::VectorXd& f) {
    auto [first, last] = generation_range(gen);
    double s = 0.0;
    for (NodeId u = first; u < last; ++u) s += f[states[u]];
    return s;
}

}  // namespace

double expected_mgn(const FiniteBmc& model, const Eigen::VectorXd& f, int n,
                    int x) {
    model.validate();
    check_request(n, x, model.num_states());
    return std::exp2(n) * q_apply(model, f, n)[x];
}

double second_moment_mgn(const FiniteBmc& model, const Eigen::VectorXd& f,
                         int n, int x) {
    model.validate();
    check_request(n, x, model.num_states());
    Eigen::MatrixXd q = model.q_matrix();
    Eigen::VectorXd fsq = f.cwiseProduct(f);
    double acc = std::exp2(n) * q_apply(model, fsq, n)[x];
    auto qf = q_powers(q, f, n > 0 ? n - 1 : 0);
    for (int k = 0; k <= n - 1; ++k) {
        Eigen::VectorXd pair = p_apply_pair(model, tensor_product(qf[k], qf[k]));
        acc += std::exp2(n + k) * q_apply(model, pair, n - k - 1)[x];
    }
    return acc;
}

double cross_moment(const FiniteBmc& model, const Eigen::VectorXd& f, int n,
                    const Eigen::VectorXd& g, int m, int x) {
    model.validate();
    check_request(n, x, model.num_states());
    if (m < 0 || m > n)
        throw std::invalid_argument("cross moment requires n >= m >= 0");
    Eigen::MatrixXd q = model.q_matrix();
    auto qf = q_powers(q, f, n);
    auto qg = q_powers(q, g, m > 0 ? m - 1 : 0);
    Eigen::VectorXd inner = g.cwiseProduct(qf[n - m]);
    double acc = std::exp2(n) * q_apply(model, inner, m)[x];
    for (int k = 0; k <= m - 1; ++k) {
        Eigen::VectorXd pair =
            p_apply_pair(model, tensor_sym(qg[k], qf[n - m + k]));
        acc += std::exp2(n + k) * q_apply(model, pair, m - k - 1)[x];
    }
    return acc;
}

double expected_mgn(const GaussianBar& model, const GridFunction& f, int n,
                    double x) {
    if (n < 0) throw std::invalid_argument("generation index must be >= 0");
    return std::exp2(n) * q_apply(model, f, n)(x);
}

double second_moment_mgn(const GaussianBar& model, const GridFunction& f,
                         int n, double x) {
    if (n < 0) throw std::invalid_argument("generation index must be >= 0");
    GridFunction fsq(f.spec(), f.values().square());
    double acc = std::exp2(n) * q_apply(model, fsq, n)(x);
    GridFunction qkf = f;
    for (int k = 0; k <= n - 1; ++k) {
        if (k > 0) qkf = q_apply(model, qkf, 1);
        GridFunction pair =
            p_apply_pair(model, tensor_product(qkf, qkf), f.spec());
        acc += std::exp2(n + k) * q_apply(model, pair, n - k - 1)(x);
    }
    return acc;
}

double cross_moment(const GaussianBar& model, const GridFunction& f, int n,
                    const GridFunction& g, int m, double x) {
    if (n < 0) throw std::invalid_argument("generation index must be >= 0");
    if (m < 0 || m > n)
        throw std::invalid_argument("cross moment requires n >= m >= 0");
    GridFunction qnm_f = q_apply(model, f, n - m);
    GridFunction inner(g.spec(), g.values() * qnm_f.values());
    double acc = std::exp2(n) * q_apply(model, inner, m)(x);
    GridFunction qkg = g;
    GridFunction qf = qnm_f;
    for (int k = 0; k <= m - 1; ++k) {
        if (k > 0) {
            qkg = q_apply(model, qkg, 1);
            qf = q_apply(model, qf, 1);
        }
        GridFunction pair = p_apply_pair(model, tensor_sym(qkg, qf), f.spec());
        acc += std::exp2(n + k) * q_apply(model, pair, m - k - 1)(x);
    }
    return acc;
}

double brute_force_moment(const FiniteBmc& model, const Eigen::VectorXd& f,
                          int n, int x, int power) {
    model.validate();
    check_request(n, x, model.num_states());
    if (power < 0) throw std::invalid_argument("moment power must be >= 0");
    check_enum_budget(model, n);
    Enumerator walker(model, n, x);
    double acc = 0.0;
    walker.run([&](const std::vector<int>& states, double prob) {
        acc += prob * std::pow(generation_sum(states, n, f), power);
    });
    return acc;
}

double brute_force_cross_moment(const FiniteBmc& model,
                                const Eigen::VectorXd& f, int n,
                                const Eigen::VectorXd& g, int m, int x) {
    model.validate();
    check_request(n, x, model.num_states());
    if (m < 0 || m > n)
        throw std::invalid_argument("cross moment requires n >= m >= 0");
    check_enum_budget(model, n);
    Enumerator walker(model, n, x);
    double acc = 0.0;
    walker.run([&](const std::vector<int>& states, double prob) {
        acc += prob * generation_sum(states, n, f) * generation_sum(states, m, g);
    });
    return acc;
}

BruteForceMoments brute_force_moments(const FiniteBmc& model,
                                      const Eigen::VectorXd& f, int n,
                                      const Eigen::VectorXd& g, int m, int x) {
    model.validate();
    check_request(n, x, model.num_states());
    if (m < 0 || m > n)
        throw std::invalid_argument("cross moment requires n >= m >= 0");
    check_enum_budget(model, n);
    Enumerator walker(model, n, x);
    BruteForceMoments out;
    walker.run([&](const std::vector<int>& states, double prob) {
        double sf = generation_sum(states, n, f);
        double sg = generation_sum(states, m, g);
        out.first += prob * sf;
        out.second += prob * sf * sf;
        out.cross += prob * sf * sg;
    });
    return out;
}

MomentEstimate fourth_moment_mgn(const FiniteBmc& model,
                                 const Eigen::VectorXd& f, int n, int x,
                                 std::uint64_t mc_budget, std::uint64_t seed) {
    model.validate();
    check_request(n, x, model.num_states());
    if (Enumerator::assignments(model, n) <= kEnumBudget)
        return {brute_force_moment(model, f, n, x, 4), 0.0, true};
    if (mc_budget == 0)
        throw std::invalid_argument(
            "instance too large for exact enumeration and no Monte Carlo "
            "budget given");
    auto fn = [&f](double s) { return f[static_cast<int>(s)]; };
    return mc_moment(BmcModel{model}, fn, n, InitialDistribution::point(x), 4,
                     mc_budget, seed);
}

MomentEstimate mc_moment(const BmcModel& model,
                         const std::function<double(double)>& f, int n,
                         const InitialDistribution& initial, int power,
                         std::uint64_t replicates, std::uint64_t seed) {
    if (replicates < 2)
        throw std::invalid_argument("Monte Carlo needs >= 2 replicates");
    double sum = 0.0, sumsq = 0.0;
    auto [first, last] = generation_range(n);
    for (std::uint64_t r = 0; r < replicates; ++r) {
        TreeData tree = simulate_tree(model, n, seed ^ hash_u64(r), initial);
        double s = 0.0;
        for (NodeId u = first; u < last; ++u) s += f(tree.states[u - 1]);
        double v = std::pow(s, power);
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / static_cast<double>(replicates);
    double var = (sumsq - sum * mean) / static_cast<double>(replicates - 1);
    double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(replicates));
    return {mean, se, false};
}

}  // namespace bmc
