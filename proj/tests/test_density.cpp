#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "bmc/density.hpp"
#include "bmc/quadrature.hpp"

using namespace bmc;

namespace {

double gaussian_pdf(double x, double mean, double var) {
    double z = (x - mean) / std::sqrt(var);
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi * var);
}

}  // namespace

TEST_CASE("gaussian-kernel smoothing of a gaussian is the convolution") {
    DensityOracle oracle = DensityOracle::gaussian(0.0, 1.0);
    Kernel gauss = make_kernel("gaussian");
    for (double h : {0.5, 0.25, 0.1}) {
        for (int i = 0; i <= 20; ++i) {
            double x = -4.0 + 8.0 * i / 20.0;
            double expect = gaussian_pdf(x, 0.0, 1.0 + h * h);
            CHECK(smoothed_density(oracle, gauss, h, x) ==
                  doctest::Approx(expect).epsilon(1e-6));
        }
    }
}

TEST_CASE("box-kernel smoothing is the window average") {
    // mu = N(0, 4/3) (the a = 0.5 invariant law), box kernel, h = 0.25.
    DensityOracle oracle = DensityOracle::gaussian(0.0, 4.0 / 3.0);
    Kernel box = make_kernel("box");
    double direct = adaptive_integrate(
        [&](double y) { return oracle.density(y); }, -0.25, 0.25, 1e-12);
    direct /= 0.5;
    CHECK(smoothed_density(oracle, box, 0.25, 0.0) ==
          doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("bias values") {
    DensityOracle oracle = DensityOracle::gaussian(0.0, 1.0);
    Kernel gauss = make_kernel("gaussian");
    double expect = gaussian_pdf(0.0, 0.0, 1.25) - gaussian_pdf(0.0, 0.0, 1.0);
    CHECK(bias(oracle, gauss, 0.5, 0.0) ==
          doctest::Approx(expect).epsilon(1e-8));
    CHECK(bias(oracle, gauss, 0.5, 0.0) == doctest::Approx(-0.042117).epsilon(1e-4));

    // Convolution preserves near-constant regions.
    DensityOracle wide = DensityOracle::gaussian(0.0, 10000.0);
    CHECK(std::abs(bias(wide, gauss, 0.01, 0.0)) < 1e-9);
}

TEST_CASE("bochner error sequence decreases to zero") {
    DensityOracle oracle = DensityOracle::gaussian(0.0, 1.0);
    Kernel gauss = make_kernel("gaussian");
    auto errs = bochner_check(oracle, gauss, 0.0, 10);
    REQUIRE(errs.size() == 11);
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) CHECK(errs[i + 1] < errs[i]);
    CHECK(errs.back() <= 1e-3);
    CHECK(errs.back() <= errs.front());

    auto single = bochner_check(oracle, gauss, 0.0, 0);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == doctest::Approx(std::abs(bias(oracle, gauss, 1.0, 0.0)))
                           .epsilon(1e-12));
}

TEST_CASE("bochner on shipped models and kernels") {
    GaussianBar bar;  // a = 0.5 symmetric
    DensityOracle oracle = DensityOracle::for_model(bar);
    for (const char* name : {"gaussian", "epanechnikov", "box"}) {
        auto errs = bochner_check(oracle, make_kernel(name), 0.1, 10);
        CHECK(errs.back() <= 1e-3);
        CHECK(errs.back() <= errs.front());
    }
}

TEST_CASE("finite oracles reject continuous-only operations") {
    Eigen::VectorXd mu(2);
    mu << 0.5, 0.5;
    DensityOracle oracle = DensityOracle::finite(mu);
    CHECK(!oracle.is_continuous());
    Kernel gauss = make_kernel("gaussian");
    CHECK_THROWS_AS(smoothed_density(oracle, gauss, 0.5, 0.0),
                    std::domain_error);
    CHECK_THROWS_AS(bochner_check(oracle, gauss, 0.0, 3), std::domain_error);
    // <mu, f> still works through the counting measure.
    CHECK(oracle.mean_of([](double s) { return s; }) ==
          doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("log-log bias slope is near 2 for smooth targets") {
    DensityOracle oracle = DensityOracle::gaussian(0.0, 1.0);
    Kernel gauss = make_kernel("gaussian");
    std::vector<double> hs{0.25, 0.125, 0.0625, 0.03125, 0.015625};
    double slope = bias_log_slope(oracle, gauss, hs, 0.0);
    CHECK(slope > 1.8);
    CHECK(slope < 2.2);
}

TEST_CASE("grid oracle evaluates through interpolation") {
    GridSpec spec{-8.0, 8.0, 2001};
    GridFunction vals = GridFunction::from_function(
        spec, [](double x) { return gaussian_pdf(x, 0.0, 1.0); });
    DensityOracle oracle = DensityOracle::from_grid(vals);
    CHECK(oracle.is_continuous());
    CHECK(oracle.density(0.3) ==
          doctest::Approx(gaussian_pdf(0.3, 0.0, 1.0)).epsilon(1e-4));
    CHECK(oracle.mean() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(oracle.stddev() == doctest::Approx(1.0).epsilon(1e-4));
    Kernel gauss = make_kernel("gaussian");
    CHECK(smoothed_density(oracle, gauss, 0.25, 0.0) ==
          doctest::Approx(gaussian_pdf(0.0, 0.0, 1.0625)).epsilon(1e-4));
}

TEST_CASE("density export writes the table") {
    DensityOracle oracle = DensityOracle::gaussian(0.0, 1.0);
    std::string path = "density_export_test.csv";
    export_density_csv(oracle, path, 11);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,mu");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 11);
    std::remove(path.c_str());
}
