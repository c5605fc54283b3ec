#include "bmc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

namespace bmc {

namespace {

// Kronrod-15 abscissae on [-1, 1]; odd-indexed entries are the Gauss-7 nodes.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};

constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469};

struct PanelResult {
    double value;
    double error;
};

PanelResult gauss_kronrod_15(const std::function<double(double)>& f, double a,
                             double b) {
    const double c = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(c);
    double result_gauss = fc * kWg[3];
    double result_kronrod = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        double x = half * kXgk[j];
        double fsum = f(c - x) + f(c + x);
        result_kronrod += kWgk[j] * fsum;
        if (j % 2 == 1) result_gauss += kWg[j / 2] * fsum;
    }
    double value = result_kronrod * half;
    double err = std::abs((result_kronrod - result_gauss) * half);
    // Standard QUADPACK-style sharpening of the raw difference.
    err = std::min(err, std::pow(200.0 * err, 1.5));
    return {value, err};
}

struct Interval {
    double a, b, value, error;
};

}  // namespace

double adaptive_integrate(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, int max_intervals) {
    if (!(b > a)) {
        if (a == b) return 0.0;
        return -adaptive_integrate(f, b, a, abs_tol, max_intervals);
    }
    std::vector<Interval> heap;
    auto push = [&heap, &f](double lo, double hi) {
        PanelResult r = gauss_kronrod_15(f, lo, hi);
        heap.push_back({lo, hi, r.value, r.error});
        std::push_heap(heap.begin(), heap.end(),
                       [](const Interval& x, const Interval& y) {
                           return x.error < y.error;
                       });
    };
    push(a, b);
    while (true) {
        double total_err = 0.0, total_val = 0.0;
        for (const auto& iv : heap) {
            total_err += iv.error;
            total_val += iv.value;
        }
        if (total_err <= abs_tol) return total_val;
        if (static_cast<int>(heap.size()) >= max_intervals)
            throw QuadratureError("adaptive quadrature did not reach tolerance");
        std::pop_heap(heap.begin(), heap.end(),
                      [](const Interval& x, const Interval& y) {
                          return x.error < y.error;
                      });
        Interval worst = heap.back();
        heap.pop_back();
        double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw QuadratureError("adaptive quadrature interval underflow");
        push(worst.a, mid);
        push(mid, worst.b);
    }
}

GaussHermite::GaussHermite(int order) {
    if (order < 1) throw std::invalid_argument("Gauss-Hermite order >= 1");
    // Golub-Welsch: Jacobi matrix for Hermite polynomials (weight e^{-t^2})
    // has zero diagonal and off-diagonal sqrt(k/2).
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        double beta = std::sqrt(0.5 * k);
        jacobi(k, k - 1) = beta;
        jacobi(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    nodes_ = es.eigenvalues();
    weights_.resize(order);
    const double mu0 = std::sqrt(std::numbers::pi);
    for (int i = 0; i < order; ++i) {
        double v0 = es.eigenvectors()(0, i);
        weights_[i] = mu0 * v0 * v0;
    }
}

double GaussHermite::normal_expectation(const std::function<double(double)>& f,
                                        double mean, double stddev) const {
    const double scale = std::numbers::sqrt2 * stddev;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < nodes_.size(); ++i)
        acc += weights_[i] * f(mean + scale * nodes_[i]);
    return acc / std::sqrt(std::numbers::pi);
}

const GaussHermite& GaussHermite::shared(int order) {
    static std::mutex mu;
    static std::map<int, GaussHermite> cache;
    std::scoped_lock lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, GaussHermite(order)).first;
    return it->second;
}

}  // namespace bmc
