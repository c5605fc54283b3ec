#include <doctest.h>

#include <fstream>

#include "bmc/config.hpp"

using namespace bmc;

TEST_CASE("config json round trip preserves every field") {
    ExperimentConfig cfg;
    cfg.kernel_name = "epanechnikov";
    cfg.kernel_order = 2;
    cfg.gamma = 0.25;
    cfg.beta = 0.1;
    cfg.depths = {6, 8, 10};
    cfg.eval_points = {0.0, 0.5};
    cfg.replicates = 321;
    cfg.seed = 99;
    cfg.deltas = {0.25, 0.75};
    cfg.ci_level = 0.8;
    cfg.regions = {Region::Subtree};
    cfg.star_region = Region::Subtree;
    cfg.out_dir = "elsewhere";
    cfg.threads = 3;
    cfg.initial = InitialDistribution::gaussian(0.5, 2.0);

    ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
    CHECK(back.kernel_name == cfg.kernel_name);
    CHECK(back.kernel_order == cfg.kernel_order);
    CHECK(back.gamma == cfg.gamma);
    CHECK(back.beta == cfg.beta);
    CHECK(back.depths == cfg.depths);
    CHECK(back.eval_points == cfg.eval_points);
    CHECK(back.replicates == cfg.replicates);
    CHECK(back.seed == cfg.seed);
    CHECK(back.deltas == cfg.deltas);
    CHECK(back.ci_level == cfg.ci_level);
    CHECK(back.regions == cfg.regions);
    CHECK(back.star_region == cfg.star_region);
    CHECK(back.out_dir == cfg.out_dir);
    CHECK(back.threads == cfg.threads);
    CHECK(back.initial.kind == InitialDistribution::Kind::Gaussian);
    CHECK(back.initial.mean == 0.5);
    CHECK(back.initial.var == 2.0);
}

TEST_CASE("model serialization round trips") {
    GaussianBar bar;
    bar.a0 = 0.6;
    bar.a1 = 0.3;
    bar.b0 = 0.1;
    bar.b1 = -0.2;
    bar.noise_cov << 1.0, 0.25, 0.25, 2.0;
    bar.ergodicity = ErgodicityProfile{0.6, 3.0};
    BmcModel m = bar;
    BmcModel back = model_from_json(model_to_json(m));
    const auto& b = std::get<GaussianBar>(back);
    CHECK(b.a0 == bar.a0);
    CHECK(b.a1 == bar.a1);
    CHECK(b.b0 == bar.b0);
    CHECK(b.b1 == bar.b1);
    CHECK(b.noise_cov == bar.noise_cov);
    REQUIRE(b.ergodicity.has_value());
    CHECK(b.ergodicity->alpha == 0.6);

    FiniteBmc fin;
    Eigen::MatrixXd page(2, 2);
    page << 0.25, 0.25, 0.25, 0.25;
    fin.tensor = {page, page};
    BmcModel fback = model_from_json(model_to_json(fin));
    CHECK(std::get<FiniteBmc>(fback).tensor[1] == page);
}

TEST_CASE("defaults are materialized into the resolved document") {
    ExperimentConfig cfg;
    nlohmann::json j = cfg.to_json();
    for (const char* key :
         {"model", "initial", "kernel", "gamma", "beta", "holder_s", "regions",
          "star_region", "depths", "eval_points", "replicates", "seed",
          "deltas", "ci_level", "crossgen_coefficients", "out", "threads",
          "alpha"})
        CHECK(j.contains(key));
}

TEST_CASE("validation failures name the violated condition") {
    ExperimentConfig cfg;
    cfg.alpha = 0.8;
    cfg.gamma = 0.2;
    try {
        cfg.validate();
        FAIL("expected a validation error");
    } catch (const ConfigValidationError& e) {
        std::string msg = e.what();
        CHECK(msg.find("bandwidth-ergodicity") != std::string::npos);
        CHECK(msg.find("1.39") != std::string::npos);
    }

    ExperimentConfig speedy;
    speedy.beta = 0.45;  // outside (0, 0.4) for gamma = 0.2, s = 2
    CHECK_THROWS_AS(speedy.validate(), ConfigValidationError);

    ExperimentConfig fine;
    fine.beta = 0.1;
    CHECK_NOTHROW(fine.validate());
}

TEST_CASE("config file loading") {
    const char* path = "config_load_test.json";
    {
        std::ofstream out(path);
        out << R"({"gamma": 0.25, "depths": [4, 6], "replicates": 12,
                   "model": {"type": "gaussian-bar", "a0": 0.4}})";
    }
    ExperimentConfig cfg = ExperimentConfig::load_file(path);
    CHECK(cfg.gamma == 0.25);
    CHECK(cfg.depths == std::vector<int>{4, 6});
    CHECK(cfg.replicates == 12);
    const auto& bar = std::get<GaussianBar>(cfg.model);
    CHECK(bar.a0 == 0.4);
    CHECK(bar.a1 == 0.4);  // a1 defaults to a0
    std::remove(path);
    CHECK_THROWS(ExperimentConfig::load_file("missing.json"));
}
