#include <doctest.h>

#include <cmath>
#include <vector>

#include "bmc/rng.hpp"

using namespace bmc;

TEST_CASE("streams are reproducible and keyed") {
    CounterRng a(7, 42), b(7, 42), c(7, 43), d(8, 42);
    std::vector<std::uint64_t> seq;
    for (int i = 0; i < 16; ++i) seq.push_back(a.next_u64());
    for (int i = 0; i < 16; ++i) CHECK(b.next_u64() == seq[i]);
    bool differs = false;
    for (int i = 0; i < 16; ++i)
        differs |= (c.next_u64() != seq[i]) || (d.next_u64() != seq[i]);
    CHECK(differs);
}

TEST_CASE("uniform draws stay strictly inside (0, 1) and look uniform") {
    CounterRng rng(123, 1);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0, prev = 0.5, lag = 0.0;
    for (int i = 0; i < n; ++i) {
        double u = rng.next_uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        sum += u;
        sumsq += u * u;
        lag += (u - 0.5) * (prev - 0.5);
        prev = u;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 0.005);          // se ~ 0.00065
    CHECK(std::abs(var - 1.0 / 12) < 0.003);      // se ~ 0.0002
    CHECK(std::abs(lag / n) < 0.003);             // lag-1 autocovariance
}

TEST_CASE("normal pairs have the right first moments") {
    CounterRng rng(99, 5);
    const int n = 100000;
    double s = 0.0, s2 = 0.0, s3 = 0.0, cross = 0.0;
    for (int i = 0; i < n; ++i) {
        auto [z0, z1] = rng.next_normal_pair();
        s += z0 + z1;
        s2 += z0 * z0 + z1 * z1;
        s3 += z0 * z0 * z0 + z1 * z1 * z1;
        cross += z0 * z1;
    }
    double m = s / (2 * n);
    CHECK(std::abs(m) < 0.01);
    CHECK(std::abs(s2 / (2 * n) - 1.0) < 0.02);
    CHECK(std::abs(s3 / (2 * n)) < 0.05);
    CHECK(std::abs(cross / n) < 0.01);
}
