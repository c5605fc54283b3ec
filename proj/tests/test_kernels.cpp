#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bmc/kernels.hpp"
#include "bmc/quadrature.hpp"

using namespace bmc;

TEST_CASE("bandwidth is the exact dyadic power") {
    BandwidthSchedule s{0.2, 1};
    CHECK(bandwidth(s, 0) == 1.0);
    CHECK(bandwidth(s, 10) == doctest::Approx(0.25).epsilon(1e-15));
    BandwidthSchedule half{0.5, 1};
    CHECK(bandwidth(half, 7) == doctest::Approx(std::exp2(-3.5)).epsilon(1e-15));
    CHECK(bandwidth(half, 7) == doctest::Approx(0.08838834764831845).epsilon(1e-12));
    CHECK_THROWS_AS(bandwidth(BandwidthSchedule{1.2, 1}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(bandwidth(s, -1), std::invalid_argument);
}

TEST_CASE("bandwidth schedule monotonicity and |G_n| h_n growth") {
    BandwidthSchedule s{0.3, 1};
    double prev_h = 2.0, prev_g = 0.0;
    for (int n = 0; n <= 30; ++n) {
        double h = bandwidth(s, n);
        CHECK(h < prev_h);
        double g = std::exp2(n) * h;  // |G_n| h_n = 2^{n(1-gamma)}
        CHECK(g > prev_g);
        prev_h = h;
        prev_g = g;
    }
}

TEST_CASE("kernel moments") {
    Kernel gauss = make_kernel("gaussian");
    CHECK(kernel_moment(gauss, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(kernel_moment(gauss, 1)) < 1e-10);
    CHECK(kernel_moment(gauss, 2) == doctest::Approx(1.0).epsilon(1e-9));

    Kernel epan = make_kernel("epanechnikov");
    CHECK(kernel_moment(epan, 2) == doctest::Approx(0.2).epsilon(1e-10));
    CHECK_THROWS_AS(kernel_moment(gauss, -1), std::invalid_argument);
}

TEST_CASE("L2 norms against closed forms") {
    CHECK(l2_norm_sq(make_kernel("epanechnikov")) ==
          doctest::Approx(0.6).epsilon(1e-10));
    CHECK(l2_norm_sq(make_kernel("gaussian")) ==
          doctest::Approx(1.0 / (2.0 * std::sqrt(std::numbers::pi)))
              .epsilon(1e-9));
    CHECK(l2_norm_sq(make_kernel("box")) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("norm metadata is filled at construction") {
    Kernel box = make_kernel("box");
    CHECK(box.l1 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(box.sup == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(box.order == 1);
    Kernel gauss = make_kernel("gaussian");
    CHECK(gauss.sup == doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi))
                           .epsilon(1e-10));
    // |x| K(x) vanishing at the support edge.
    double r = 1.2 * gauss.support_radius;
    CHECK(std::abs(r * gauss(r)) <= 1e-8);
}

TEST_CASE("gaussian raised to order 3 is (3/2 - x^2/2) phi(x)") {
    Kernel gauss = make_kernel("gaussian");
    CHECK(make_higher_order(gauss, 1).name == gauss.name);  // already order 1

    Kernel g3 = make_higher_order(gauss, 3);
    CHECK(g3.order == 3);
    for (double x : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
        double phi = std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi);
        CHECK(g3(x) == doctest::Approx((1.5 - 0.5 * x * x) * phi).epsilon(1e-9));
    }
    CHECK(kernel_moment(g3, 0) == doctest::Approx(1.0).epsilon(1e-10));
    for (int j = 1; j <= 3; ++j) CHECK(std::abs(kernel_moment(g3, j)) <= 1e-8);
}

TEST_CASE("epanechnikov raised to order 2 has vanishing first moments") {
    Kernel e2 = make_higher_order(make_kernel("epanechnikov"), 2);
    CHECK(kernel_moment(e2, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(kernel_moment(e2, 1)) <= 1e-8);
    CHECK(std::abs(kernel_moment(e2, 2)) <= 1e-8);
}

TEST_CASE("higher-order construction keeps mass 1 for every target order") {
    Kernel gauss = make_kernel("gaussian");
    for (int r = 2; r <= 5; ++r) {
        Kernel k = make_higher_order(gauss, r);
        CHECK(kernel_moment(k, 0) == doctest::Approx(1.0).epsilon(1e-10));
        for (int j = 1; j <= r; ++j) CHECK(std::abs(kernel_moment(k, j)) <= 1e-8);
    }
}

TEST_CASE("fractional-order absolute moments stay integrable") {
    // integral |x|^s K(x) dx finite for s up to 4 on shipped kernels.
    for (const char* name : {"gaussian", "epanechnikov", "box"}) {
        Kernel k = make_kernel(name);
        for (double s : {0.5, 1.5, 2.5, 4.0}) {
            double v = adaptive_integrate(
                [&](double x) { return std::pow(std::abs(x), s) * k(x); },
                -k.support_radius, k.support_radius, 1e-10);
            CHECK(std::isfinite(v));
            CHECK(v > 0.0);
        }
    }
}

TEST_CASE("unknown kernel names are rejected") {
    CHECK_THROWS_AS(make_kernel("triweight"), std::invalid_argument);
    CHECK_THROWS_AS(make_higher_order(make_kernel("gaussian"), 0),
                    std::invalid_argument);
}

TEST_CASE("holder spec validation") {
    HolderSpec ok{2.0, 1.0}, zero_s{0.0, 1.0}, zero_l{1.0, 0.0};
    CHECK_NOTHROW(ok.validate());
    CHECK_THROWS_AS(zero_s.validate(), std::invalid_argument);
    CHECK_THROWS_AS(zero_l.validate(), std::invalid_argument);
}
