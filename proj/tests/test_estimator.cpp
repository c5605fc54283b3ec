#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "bmc/estimator.hpp"
#include "bmc/stats.hpp"
#include "bmc/tree_index.hpp"

using namespace bmc;

namespace {

TreeData constant_tree(int depth, double value) {
    TreeData t;
    t.depth = depth;
    t.states.assign(tree_size(depth), value);
    return t;
}

}  // namespace

TEST_CASE("kde on a single node with the box kernel") {
    TreeData t = constant_tree(0, 0.0);
    RegionSelector sel{Region::Generation, 0};
    CHECK(kde(t, sel, make_kernel("box"), 1.0, 0.0) ==
          doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("kde with identical states is a single kernel bump") {
    const double c = 0.7, h = 0.3;
    TreeData t = constant_tree(6, c);
    Kernel gauss = make_kernel("gaussian");
    RegionSelector sel{Region::Subtree, 6};
    for (double x : {-1.0, 0.0, 0.7, 2.0}) {
        double expect = gauss((x - c) / h) / h;
        CHECK(kde(t, sel, gauss, h, x) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("subtree kde is the node-weighted generation average") {
    GaussianBar bar;
    TreeData tree = simulate_tree(bar, 9, 31, InitialDistribution::stationary());
    Kernel gauss = make_kernel("gaussian");
    const double h = 0.21, x = 0.4;
    for (int n = 0; n <= 9; ++n) {
        double weighted = 0.0;
        for (int l = 0; l <= n; ++l) {
            RegionSelector gen{Region::Generation, l};
            weighted += static_cast<double>(generation_size(l)) *
                        kde(tree, gen, gauss, h, x);
        }
        weighted /= static_cast<double>(tree_size(n));
        RegionSelector sub{Region::Subtree, n};
        CHECK(kde(tree, sub, gauss, h, x) ==
              doctest::Approx(weighted).epsilon(1e-12));
    }
}

TEST_CASE("kde rejects bad inputs") {
    TreeData t = constant_tree(3, 0.0);
    Kernel gauss = make_kernel("gaussian");
    CHECK_THROWS_AS(kde(t, RegionSelector{Region::Generation, 4}, gauss, 0.5, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(kde(t, RegionSelector{Region::Generation, 1}, gauss, 0.0, 0.0),
                    std::invalid_argument);
    t.states[2] = std::nan("");
    CHECK_THROWS_AS(kde(t, RegionSelector{Region::Generation, 1}, gauss, 0.5, 0.0),
                    std::invalid_argument);
}

TEST_CASE("zero-variant additive functional equals the scaled kde error") {
    GaussianBar bar;
    DensityOracle oracle = DensityOracle::for_model(bar);
    Kernel gauss = make_kernel("gaussian");
    BandwidthSchedule schedule{0.2, 1};
    const int n = 8;
    const double x = 0.25;
    TreeData tree = simulate_tree(bar, n, 77, InitialDistribution::stationary());

    auto spec = AdditiveFunctionalSpec::zero(x, gauss, schedule);
    double value = additive_functional(tree, spec, oracle);

    double h = bandwidth(schedule, n);
    double est = kde(tree, RegionSelector{Region::Generation, n}, gauss, h, x);
    double smoothed = smoothed_density(oracle, gauss, h, x);
    double expect =
        std::sqrt(static_cast<double>(generation_size(n)) * h) * (est - smoothed);
    CHECK(value == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("all-zero functional evaluates to zero") {
    GaussianBar bar;
    DensityOracle oracle = DensityOracle::for_model(bar);
    TreeData tree = simulate_tree(bar, 5, 3, InitialDistribution::stationary());
    AdditiveFunctionalSpec spec;
    spec.variant = AdditiveFunctionalSpec::Variant::Custom;
    spec.custom = {nullptr, nullptr};
    CHECK(additive_functional(tree, spec, oracle) == 0.0);
}

TEST_CASE("id-variant splits into per-generation zero variants") {
    GaussianBar bar;
    DensityOracle oracle = DensityOracle::for_model(bar);
    Kernel gauss = make_kernel("gaussian");
    BandwidthSchedule schedule{0.2, 1};
    const int n = 7;
    const double x = -0.4;
    TreeData tree = simulate_tree(bar, n, 13, InitialDistribution::stationary());

    double id_value = additive_functional(
        tree, AdditiveFunctionalSpec::id(x, gauss, schedule), oracle);

    double h = bandwidth(schedule, n);
    double smoothed = smoothed_density(oracle, gauss, h, x);
    double total = 0.0;
    for (int l = 0; l <= n; ++l) {
        RegionSelector gen{Region::Generation, n - l};
        double est = kde(tree, gen, gauss, h, x);
        total += static_cast<double>(generation_size(n - l)) * std::sqrt(h) *
                 (est - smoothed);
    }
    total /= std::sqrt(static_cast<double>(generation_size(n)));
    CHECK(id_value == doctest::Approx(total).epsilon(1e-9));
}

TEST_CASE("replicated kde mean matches the smoothed density") {
    GaussianBar bar;  // a = 0.5 symmetric
    DensityOracle oracle = DensityOracle::for_model(bar);
    Kernel gauss = make_kernel("gaussian");
    BandwidthSchedule schedule{0.2, 1};
    const int n = 10;
    const double h = bandwidth(schedule, n);
    RegionSelector sel{Region::Generation, n};

    const int reps = 400;
    double sum = 0.0, sumsq = 0.0;
    for (int r = 0; r < reps; ++r) {
        TreeData tree =
            simulate_tree(bar, n, 9000 + r, InitialDistribution::stationary());
        double est = kde(tree, sel, gauss, h, 0.0);
        sum += est;
        sumsq += est * est;
    }
    double mean = sum / reps;
    double se = std::sqrt((sumsq / reps - mean * mean) / reps);
    // E[kde] = K_h * mu(0) = mu(0) + bias(h); three-standard-error band.
    double target = oracle.density(0.0) + bias(oracle, gauss, h, 0.0);
    CHECK(std::abs(mean - target) <= 3.0 * se);
}

TEST_CASE("normalized error scales linearly in the speed") {
    GaussianBar bar;
    DensityOracle oracle = DensityOracle::for_model(bar);
    Kernel gauss = make_kernel("gaussian");
    BandwidthSchedule schedule{0.2, 1};
    TreeData tree = simulate_tree(bar, 8, 21, InitialDistribution::stationary());
    RegionSelector sel{Region::Generation, 8};

    double w0 = normalized_error(tree, sel, oracle, gauss, schedule,
                                 SpeedSequence{0.0}, 0.0);
    double w1 = normalized_error(tree, sel, oracle, gauss, schedule,
                                 SpeedSequence{0.125}, 0.0);
    CHECK(w1 == doctest::Approx(w0 / std::exp2(8 * 0.125)).epsilon(1e-14));
}

TEST_CASE("self-normalization floors at the varpi sequence") {
    GaussianBar bar;
    DensityOracle oracle = DensityOracle::for_model(bar);
    Kernel gauss = make_kernel("gaussian");
    BandwidthSchedule schedule{0.2, 1};
    const int n = 6;
    TreeData tree = simulate_tree(bar, n, 5, InitialDistribution::stationary());
    RegionSelector sel{Region::Generation, n};

    // Evaluate far in the tail where the plug-in estimate is ~0: the divisor
    // must be the floor, keeping the statistic finite.
    double x_tail = 40.0;
    double varpi = default_varpi(n);
    double numer = normalized_error(tree, sel, oracle, gauss, schedule,
                                    SpeedSequence{0.0}, x_tail);
    double self = self_normalized(tree, sel, sel, oracle, gauss, schedule,
                                  SpeedSequence{0.0}, varpi, x_tail);
    CHECK(std::isfinite(self));
    CHECK(self == doctest::Approx(numer / varpi).epsilon(1e-12));

    // Plug-in equal to mu(x) reduces to the oracle normalization.
    double x0 = 0.0;
    double h = bandwidth(schedule, n);
    double plug_in = kde(tree, sel, gauss, h, x0);
    double expect = normalized_error(tree, sel, oracle, gauss, schedule,
                                     SpeedSequence{0.0}, x0) /
                    std::max(gauss.l2() * std::sqrt(plug_in), varpi);
    CHECK(self_normalized(tree, sel, sel, oracle, gauss, schedule,
                          SpeedSequence{0.0}, varpi, x0) ==
          doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("confidence interval algebra") {
    // b^2 delta^2 = 2 ln 20 gives nominal level 0.95.
    double delta = std::sqrt(2.0 * std::log(20.0));
    ConfidenceInterval ci =
        confidence_interval(1.0, 0.25, delta, 1.0, 0.1, 1024, 0.25,
                            std::sqrt(0.2820947917738781));
    CHECK(ci.nominal_level == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(ci.hi - ci.lo > 0.0);
    CHECK((ci.lo + ci.hi) / 2 == doctest::Approx(1.0).epsilon(1e-12));

    // Larger b_n at fixed delta widens the interval and raises the level.
    ConfidenceInterval wider =
        confidence_interval(1.0, 0.25, delta, 2.0, 0.1, 1024, 0.25,
                            std::sqrt(0.2820947917738781));
    CHECK(wider.hi - wider.lo > ci.hi - ci.lo);
    CHECK(wider.nominal_level > ci.nominal_level);
    CHECK(wider.nominal_level < 1.0);
}

TEST_CASE("cross-generation vector collapses to the normalized error") {
    GaussianBar bar;
    DensityOracle oracle = DensityOracle::for_model(bar);
    Kernel gauss = make_kernel("gaussian");
    BandwidthSchedule schedule{0.2, 1};
    TreeData tree = simulate_tree(bar, 9, 44, InitialDistribution::stationary());

    auto v0 = cross_gen_vector(tree, 0, oracle, gauss, schedule, 0.3);
    REQUIRE(v0.size() == 1);
    double w = normalized_error(tree, RegionSelector{Region::Generation, 9},
                                oracle, gauss, schedule, SpeedSequence{0.0}, 0.3);
    CHECK(v0[0] == doctest::Approx(w).epsilon(1e-12));

    auto v2 = cross_gen_vector(tree, 2, oracle, gauss, schedule, 0.3);
    CHECK(v2.size() == 3);
    CHECK_THROWS_AS(cross_gen_vector(tree, 9, oracle, gauss, schedule, 0.3),
                    std::invalid_argument);
}

TEST_CASE("sigma2 analytic limits for the kernel variants") {
    GaussianBar bar;  // a = 0.5, mu = N(0, 4/3)
    DensityOracle oracle = DensityOracle::for_model(bar);
    Kernel gauss = make_kernel("gaussian");
    BandwidthSchedule schedule{0.2, 1};
    const double x = 0.0;
    double mu_l2 = oracle.density(x) * gauss.l2_sq;

    auto zero = sigma2_limit(AdditiveFunctionalSpec::zero(x, gauss, schedule),
                             oracle, 20);
    REQUIRE(zero.analytic_limit.has_value());
    CHECK(*zero.analytic_limit == doctest::Approx(mu_l2).epsilon(1e-12));

    auto id = sigma2_limit(AdditiveFunctionalSpec::id(x, gauss, schedule),
                           oracle, 20);
    CHECK(*id.analytic_limit == doctest::Approx(2.0 * mu_l2).epsilon(1e-12));

    auto cg = sigma2_limit(
        AdditiveFunctionalSpec::cross_gen(x, gauss, schedule, {1.0, 1.0}),
        oracle, 20);
    CHECK(*cg.analytic_limit == doctest::Approx(3.0 * mu_l2).epsilon(1e-12));
}

TEST_CASE("finite-n sigma2 converges to the analytic limit") {
    GaussianBar bar;
    DensityOracle oracle = DensityOracle::for_model(bar);
    Kernel gauss = make_kernel("gaussian");
    BandwidthSchedule schedule{0.2, 1};
    for (auto variant : {AdditiveFunctionalSpec::zero(0.0, gauss, schedule),
                         AdditiveFunctionalSpec::id(0.0, gauss, schedule)}) {
        auto s7 = sigma2_limit(variant, oracle, 7);
        auto s15 = sigma2_limit(variant, oracle, 15);
        auto s30 = sigma2_limit(variant, oracle, 30);
        double limit = *s30.analytic_limit;
        // Cauchy-style contraction toward the limit.
        CHECK(std::abs(s30.finite_n - s15.finite_n) <
              std::abs(s15.finite_n - s7.finite_n));
        CHECK(std::abs(s30.finite_n - limit) / limit < 0.02);
    }
}

TEST_CASE("default evaluation points span the oracle range") {
    DensityOracle oracle = DensityOracle::gaussian(1.0, 4.0);
    auto xs = default_eval_points(oracle);
    REQUIRE(xs.size() == 33);
    CHECK(xs.front() == doctest::Approx(1.0 - 6.0).epsilon(1e-12));
    CHECK(xs.back() == doctest::Approx(1.0 + 6.0).epsilon(1e-12));
}
