#include "bmc/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bmc/harness.hpp"

namespace bmc {

namespace {

Region region_from_string(const std::string& s) {
    if (s == "gen" || s == "generation") return Region::Generation;
    if (s == "tree" || s == "subtree") return Region::Subtree;
    throw ConfigValidationError("unknown region: " + s);
}

}  // namespace

nlohmann::json model_to_json(const BmcModel& model) {
    nlohmann::json j;
    if (const auto* bar = std::get_if<GaussianBar>(&model)) {
        j["type"] = "gaussian-bar";
        j["a0"] = bar->a0;
        j["a1"] = bar->a1;
        j["b0"] = bar->b0;
        j["b1"] = bar->b1;
        j["noise_cov"] = {{bar->noise_cov(0, 0), bar->noise_cov(0, 1)},
                          {bar->noise_cov(1, 0), bar->noise_cov(1, 1)}};
        if (bar->ergodicity) {
            j["ergodicity"] = {{"alpha", bar->ergodicity->alpha},
                               {"M", bar->ergodicity->M}};
        }
    } else {
        const auto& fin = std::get<FiniteBmc>(model);
        j["type"] = "finite";
        auto tensor = nlohmann::json::array();
        for (const auto& page : fin.tensor) {
            auto rows = nlohmann::json::array();
            for (Eigen::Index y = 0; y < page.rows(); ++y) {
                auto row = nlohmann::json::array();
                for (Eigen::Index z = 0; z < page.cols(); ++z)
                    row.push_back(page(y, z));
                rows.push_back(row);
            }
            tensor.push_back(rows);
        }
        j["tensor"] = tensor;
        if (fin.ergodicity) {
            j["ergodicity"] = {{"alpha", fin.ergodicity->alpha},
                               {"M", fin.ergodicity->M}};
        }
    }
    return j;
}

BmcModel model_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    std::optional<ErgodicityProfile> profile;
    if (j.contains("ergodicity")) {
        profile = ErgodicityProfile{j["ergodicity"].at("alpha").get<double>(),
                                    j["ergodicity"].value("M", 1.0)};
    }
    if (type == "gaussian-bar") {
        GaussianBar bar;
        bar.a0 = j.value("a0", 0.5);
        bar.a1 = j.value("a1", bar.a0);
        bar.b0 = j.value("b0", 0.0);
        bar.b1 = j.value("b1", bar.b0);
        if (j.contains("noise_cov")) {
            const auto& c = j["noise_cov"];
            bar.noise_cov << c.at(0).at(0).get<double>(),
                c.at(0).at(1).get<double>(), c.at(1).at(0).get<double>(),
                c.at(1).at(1).get<double>();
        }
        bar.ergodicity = profile;
        bar.validate();
        return bar;
    }
    if (type == "finite") {
        FiniteBmc fin;
        const auto& tensor = j.at("tensor");
        for (const auto& rows : tensor) {
            Eigen::MatrixXd page(rows.size(), rows.size());
            for (std::size_t y = 0; y < rows.size(); ++y)
                for (std::size_t z = 0; z < rows.size(); ++z)
                    page(static_cast<Eigen::Index>(y),
                         static_cast<Eigen::Index>(z)) =
                        rows.at(y).at(z).get<double>();
            fin.tensor.push_back(std::move(page));
        }
        fin.ergodicity = profile;
        fin.validate();
        return fin;
    }
    throw ConfigValidationError("unknown model type: " + type);
}

nlohmann::json initial_to_json(const InitialDistribution& d) {
    switch (d.kind) {
        case InitialDistribution::Kind::PointMass:
            return {{"type", "point"}, {"value", d.value}};
        case InitialDistribution::Kind::Gaussian:
            return {{"type", "gaussian"}, {"mean", d.mean}, {"var", d.var}};
        case InitialDistribution::Kind::Stationary:
            return {{"type", "stationary"}};
    }
    throw std::logic_error("unreachable");
}

InitialDistribution initial_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "point") return InitialDistribution::point(j.at("value").get<double>());
    if (type == "stationary") return InitialDistribution::stationary();
    if (type == "gaussian")
        return InitialDistribution::gaussian(j.at("mean").get<double>(),
                                             j.at("var").get<double>());
    throw ConfigValidationError("unknown initial distribution: " + type);
}

double ExperimentConfig::resolved_alpha() const {
    if (alpha > 0.0) return alpha;
    if (const auto* fin = std::get_if<FiniteBmc>(&model)) {
        if (fin->ergodicity) return fin->ergodicity->alpha;
        return ergodicity_rate(*fin);
    }
    const auto& bar = std::get<GaussianBar>(model);
    if (bar.ergodicity) return bar.ergodicity->alpha;
    return default_alpha_proxy(bar);
}

void ExperimentConfig::validate() const {
    validate_model(model);
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw ConfigValidationError("bandwidth exponent requires 0 < gamma < 1");
    if (depths.empty()) throw ConfigValidationError("depths list is empty");
    for (int n : depths)
        if (n < 0 || n > 25)
            throw ConfigValidationError("depths must lie in [0, 25]");
    if (replicates < 1) throw ConfigValidationError("replicates must be >= 1");
    if (!(ci_level > 0.0) || !(ci_level < 1.0))
        throw ConfigValidationError("confidence level must lie in (0, 1)");
    if (regions.empty()) throw ConfigValidationError("regions list is empty");

    double a = resolved_alpha();
    if (a > 0.0 && a < 1.0) {
        AlphaBandwidthCheck ac = validate_alpha_bandwidth(a, gamma);
        if (!ac.pass) {
            std::ostringstream msg;
            msg << "bandwidth-ergodicity condition violated: 2^(1-gamma*d)*alpha = "
                << ac.value << " >= 1 (alpha = " << a << ", gamma = " << gamma
                << ")";
            throw ConfigValidationError(msg.str());
        }
    }
    if (beta > 0.0) {
        SpeedFeasibility sf = validate_speed(gamma, 1, holder_s, beta);
        if (!sf.pass) {
            std::ostringstream msg;
            msg << "speed condition violated: beta = " << beta
                << " outside the feasible interval (" << sf.lower << ", "
                << sf.upper << ") for gamma = " << gamma << ", s = " << holder_s;
            throw ConfigValidationError(msg.str());
        }
    }
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["model"] = model_to_json(model);
    j["initial"] = initial_to_json(initial);
    j["kernel"] = {{"name", kernel_name}, {"order", kernel_order}};
    j["gamma"] = gamma;
    j["beta"] = beta;
    j["holder_s"] = holder_s;
    auto region_list = nlohmann::json::array();
    for (Region r : regions) region_list.push_back(region_name(r));
    j["regions"] = region_list;
    j["star_region"] = region_name(star_region);
    j["depths"] = depths;
    j["eval_points"] = eval_points;
    j["replicates"] = replicates;
    j["seed"] = seed;
    j["deltas"] = deltas;
    j["ci_level"] = ci_level;
    j["crossgen_coefficients"] = crossgen_coefficients;
    j["out"] = out_dir;
    j["threads"] = threads;
    j["alpha"] = alpha;
    return j;
}

nlohmann::json ExperimentConfig::provenance_json() const {
    nlohmann::json j = to_json();
    j.erase("threads");
    j.erase("out");
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (j.contains("model")) cfg.model = model_from_json(j["model"]);
    if (j.contains("initial")) cfg.initial = initial_from_json(j["initial"]);
    if (j.contains("kernel")) {
        cfg.kernel_name = j["kernel"].value("name", cfg.kernel_name);
        cfg.kernel_order = j["kernel"].value("order", cfg.kernel_order);
    }
    cfg.gamma = j.value("gamma", cfg.gamma);
    cfg.beta = j.value("beta", cfg.beta);
    cfg.holder_s = j.value("holder_s", cfg.holder_s);
    if (j.contains("regions")) {
        cfg.regions.clear();
        for (const auto& r : j["regions"])
            cfg.regions.push_back(region_from_string(r.get<std::string>()));
    }
    if (j.contains("star_region"))
        cfg.star_region = region_from_string(j["star_region"].get<std::string>());
    if (j.contains("depths")) cfg.depths = j["depths"].get<std::vector<int>>();
    if (j.contains("eval_points"))
        cfg.eval_points = j["eval_points"].get<std::vector<double>>();
    cfg.replicates = j.value("replicates", cfg.replicates);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("deltas")) cfg.deltas = j["deltas"].get<std::vector<double>>();
    cfg.ci_level = j.value("ci_level", cfg.ci_level);
    if (j.contains("crossgen_coefficients"))
        cfg.crossgen_coefficients =
            j["crossgen_coefficients"].get<std::vector<double>>();
    cfg.out_dir = j.value("out", cfg.out_dir);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.alpha = j.value("alpha", cfg.alpha);
    return cfg;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

}  // namespace bmc
