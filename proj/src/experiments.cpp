#include "bmc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "bmc/stats.hpp"
#include "bmc/tree_index.hpp"

namespace bmc {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

std::vector<double> resolved_points(const ExperimentConfig& cfg,
                                    const DensityOracle& oracle,
                                    bool grid_default) {
    if (!cfg.eval_points.empty()) return cfg.eval_points;
    if (grid_default) return default_eval_points(oracle);
    return {oracle.mean()};
}

double ci_delta_for_level(double level, double b_n) {
    return std::sqrt(-2.0 * std::log(1.0 - level)) / b_n;
}

/// Seeded random finite instance for the consistency sweeps.
FiniteBmc random_finite_instance(CounterRng& rng, int m) {
    FiniteBmc fin;
    for (int x = 0; x < m; ++x) {
        Eigen::MatrixXd page(m, m);
        double total = 0.0;
        for (int y = 0; y < m; ++y)
            for (int z = 0; z < m; ++z) {
                page(y, z) = rng.next_uniform();
                total += page(y, z);
            }
        page /= total;
        // Exact row-sum renormalization (the validator demands 1e-12).
        page(m - 1, m - 1) += 1.0 - page.sum();
        fin.tensor.push_back(std::move(page));
    }
    fin.validate();
    return fin;
}

Eigen::VectorXd random_test_function(CounterRng& rng, int m) {
    Eigen::VectorXd f(m);
    for (int i = 0; i < m; ++i) f[i] = 2.0 * rng.next_uniform() - 1.0;
    return f;
}

const GaussianBar& require_bar(const ExperimentConfig& cfg) {
    if (const auto* bar = std::get_if<GaussianBar>(&cfg.model)) return *bar;
    throw ConfigValidationError(
        "this command estimates a density and needs a continuous model");
}

}  // namespace

ExperimentData run_experiment(const ExperimentConfig& cfg, int threads) {
    cfg.validate();
    const GaussianBar& bar = require_bar(cfg);

    ExperimentData data{cfg, make_kernel(cfg.kernel_name, cfg.kernel_order),
                        DensityOracle::for_model(cfg.model), {}, {}};
    data.xs = resolved_points(cfg, data.oracle, false);
    data.cfg.eval_points = data.xs;

    const BandwidthSchedule schedule{cfg.gamma, 1};
    const SpeedSequence speed{cfg.beta};
    std::vector<int> depths = cfg.depths;
    std::sort(depths.begin(), depths.end());
    const int n_max = depths.back();

    // Stationary grid density, needed only to sample asymmetric roots.
    std::optional<GridFunction> stat_grid;
    if (!bar.symmetric() &&
        cfg.initial.kind == InitialDistribution::Kind::Stationary)
        stat_grid = bar_invariant_density_grid(bar);

    // Oracle quantities resolved once per (depth, x).
    struct DepthPoint {
        double h;
        double b_n;
        double varpi;
        double delta_ci;
        double mu_x;
        PreparedAdditiveFunctional zero;
        PreparedAdditiveFunctional id;
    };
    std::vector<std::vector<DepthPoint>> prep;
    for (int n : depths) {
        std::vector<DepthPoint> per_x;
        for (double x : data.xs) {
            auto zero_spec =
                AdditiveFunctionalSpec::zero(x, data.kernel, schedule);
            auto id_spec = AdditiveFunctionalSpec::id(x, data.kernel, schedule);
            per_x.push_back(DepthPoint{
                bandwidth(schedule, n), speed.at(n), default_varpi(n),
                ci_delta_for_level(cfg.ci_level, speed.at(n)),
                data.oracle.density(x),
                PreparedAdditiveFunctional(zero_spec, data.oracle, n),
                PreparedAdditiveFunctional(id_spec, data.oracle, n)});
        }
        prep.push_back(std::move(per_x));
    }

    const Region primary = cfg.regions.front();
    using Row = std::vector<ReplicateStats>;  // flattened (depth, x)
    auto rows = run_replicates<Row>(
        cfg.replicates, threads, cfg.seed,
        [&](std::uint64_t, std::uint64_t seed_r) {
            TreeData tree = simulate_tree(cfg.model, n_max, seed_r, cfg.initial,
                                          stat_grid ? &*stat_grid : nullptr);
            Row row;
            row.reserve(depths.size() * data.xs.size());
            for (std::size_t di = 0; di < depths.size(); ++di) {
                int n = depths[di];
                RegionSelector gen{Region::Generation, n};
                RegionSelector sub{Region::Subtree, n};
                RegionSelector prim{primary, n};
                for (std::size_t xi = 0; xi < data.xs.size(); ++xi) {
                    const DepthPoint& dp = prep[di][xi];
                    double x = data.xs[xi];
                    ReplicateStats st;
                    st.estimate_gen = kde(tree, gen, data.kernel, dp.h, x);
                    st.estimate_tree = kde(tree, sub, data.kernel, dp.h, x);
                    double sg = std::sqrt(
                        static_cast<double>(generation_size(n)) * dp.h);
                    double stt =
                        std::sqrt(static_cast<double>(tree_size(n)) * dp.h);
                    st.w_gen = sg * (st.estimate_gen - dp.mu_x);
                    st.w_tree = stt * (st.estimate_tree - dp.mu_x);
                    st.n_zero = dp.zero.evaluate(tree);
                    st.n_id = dp.id.evaluate(tree);
                    double w_prim =
                        primary == Region::Generation ? st.w_gen : st.w_tree;
                    st.normalized = w_prim / dp.b_n;
                    double plug_in = cfg.star_region == Region::Generation
                                         ? st.estimate_gen
                                         : st.estimate_tree;
                    double sigma_hat = data.kernel.l2() *
                                       std::sqrt(std::max(plug_in, 0.0));
                    double denom = std::max(sigma_hat, dp.varpi);
                    st.self_norm = st.normalized / denom;
                    st.self_norm_clt = w_prim / denom;
                    double est_prim = primary == Region::Generation
                                          ? st.estimate_gen
                                          : st.estimate_tree;
                    ConfidenceInterval ci = confidence_interval(
                        est_prim, plug_in, dp.delta_ci, dp.b_n, dp.varpi,
                        region_size(prim), dp.h, data.kernel.l2());
                    st.ci_lo = ci.lo;
                    st.ci_hi = ci.hi;
                    st.covered = (dp.mu_x >= ci.lo && dp.mu_x <= ci.hi) ? 1 : 0;
                    row.push_back(st);
                }
            }
            return row;
        });

    data.rows.assign(depths.size(), {});
    for (std::size_t di = 0; di < depths.size(); ++di) {
        data.rows[di].assign(data.xs.size(), {});
        for (auto& v : data.rows[di]) v.reserve(cfg.replicates);
    }
    for (const auto& row : rows) {
        std::size_t idx = 0;
        for (std::size_t di = 0; di < depths.size(); ++di)
            for (std::size_t xi = 0; xi < data.xs.size(); ++xi)
                data.rows[di][xi].push_back(row[idx++]);
    }
    data.cfg.depths = depths;
    return data;
}

CrossGenData run_crossgen(const ExperimentConfig& cfg, int threads) {
    cfg.validate();
    const GaussianBar& bar = require_bar(cfg);
    if (cfg.crossgen_coefficients.empty())
        throw ConfigValidationError("cross-generation coefficients are empty");

    CrossGenData data;
    data.cfg = cfg;
    Kernel kernel = make_kernel(cfg.kernel_name, cfg.kernel_order);
    DensityOracle oracle = DensityOracle::for_model(cfg.model);
    data.x = resolved_points(cfg, oracle, false).front();
    data.cfg.eval_points = {data.x};

    const BandwidthSchedule schedule{cfg.gamma, 1};
    const int n = *std::max_element(cfg.depths.begin(), cfg.depths.end());
    const int lags = static_cast<int>(cfg.crossgen_coefficients.size()) - 1;
    if (lags >= n)
        throw ConfigValidationError("lag count must be below the depth");

    auto cg_spec = AdditiveFunctionalSpec::cross_gen(
        data.x, kernel, schedule, cfg.crossgen_coefficients);
    PreparedAdditiveFunctional prepared(cg_spec, oracle, n);
    SigmaSquared sig = sigma2_limit(cg_spec, oracle, n);
    data.sigma2_theory = *sig.analytic_limit;

    std::optional<GridFunction> stat_grid;
    if (!bar.symmetric() &&
        cfg.initial.kind == InitialDistribution::Kind::Stationary)
        stat_grid = bar_invariant_density_grid(bar);

    struct Row {
        std::vector<double> z;
        double combined;
    };
    auto rows = run_replicates<Row>(
        cfg.replicates, threads, cfg.seed,
        [&](std::uint64_t, std::uint64_t seed_r) {
            TreeData tree = simulate_tree(cfg.model, n, seed_r, cfg.initial,
                                          stat_grid ? &*stat_grid : nullptr);
            Row row;
            row.z = cross_gen_vector(tree, lags, oracle, kernel, schedule,
                                     data.x);
            row.combined = prepared.evaluate(tree);
            return row;
        });

    data.vectors.reserve(rows.size());
    data.combined.reserve(rows.size());
    for (auto& r : rows) {
        data.vectors.push_back(std::move(r.z));
        data.combined.push_back(r.combined);
    }
    return data;
}

OracleCheckResult run_oracle_check(std::uint64_t seed, int instances) {
    OracleCheckResult result;
    for (int k = 0; k < instances; ++k) {
        CounterRng rng(seed, static_cast<std::uint64_t>(k), /*tag=*/7);
        int m = (k % 2 == 0) ? 2 : 3;
        int n = 1 + k % 3;
        FiniteBmc fin = random_finite_instance(rng, m);
        Eigen::VectorXd f = random_test_function(rng, m);
        Eigen::VectorXd g = random_test_function(rng, m);
        int x = static_cast<int>(rng.next_u64() % static_cast<unsigned>(m));
        int mm = n > 0 ? n - 1 : 0;

        BruteForceMoments oracle = brute_force_moments(fin, f, n, g, mm, x);
        double d1 = std::abs(expected_mgn(fin, f, n, x) - oracle.first);
        double d2 = std::abs(second_moment_mgn(fin, f, n, x) - oracle.second);
        double d3 = std::abs(cross_moment(fin, f, n, g, mm, x) - oracle.cross);
        result.max_abs_diff =
            std::max({result.max_abs_diff, d1, d2, d3});
        ++result.instances;
    }
    result.pass = result.max_abs_diff <= 1e-10;
    return result;
}

SimulatorCheckResult run_simulator_check(std::uint64_t seed, int instances,
                                         std::uint64_t replicates, int depth) {
    SimulatorCheckResult result;
    for (int k = 0; k < instances; ++k) {
        CounterRng rng(seed, static_cast<std::uint64_t>(k), /*tag=*/8);
        int m = (k % 2 == 0) ? 2 : 3;
        FiniteBmc fin = random_finite_instance(rng, m);
        Eigen::VectorXd f = random_test_function(rng, m);
        int x = static_cast<int>(rng.next_u64() % static_cast<unsigned>(m));

        double exact = expected_mgn(fin, f, depth, x);
        auto fn = [&f](double s) { return f[static_cast<int>(s)]; };
        MomentEstimate mc =
            mc_moment(BmcModel{fin}, fn, depth, InitialDistribution::point(x),
                      1, replicates, seed ^ hash_u64(k));
        double dist = std::abs(mc.value - exact) /
                      std::max(mc.standard_error, 1e-300);
        result.max_se_distance = std::max(result.max_se_distance, dist);
    }
    result.pass = result.max_se_distance <= 4.0;
    return result;
}

CommandResult cmd_simulate(const ExperimentConfig& cfg, int threads,
                           std::ostream& log) {
    (void)threads;
    cfg.validate();
    const int n = *std::max_element(cfg.depths.begin(), cfg.depths.end());
    std::optional<GridFunction> stat_grid;
    if (const auto* bar = std::get_if<GaussianBar>(&cfg.model)) {
        if (!bar->symmetric() &&
            cfg.initial.kind == InitialDistribution::Kind::Stationary)
            stat_grid = bar_invariant_density_grid(*bar);
    }
    TreeData tree = simulate_tree(cfg.model, n, cfg.seed, cfg.initial,
                                  stat_grid ? &*stat_grid : nullptr);
    std::string path = out_path(cfg, "tree.csv");
    auto out = open_out(path);
    out << "# config: " << cfg.provenance_json().dump() << '\n';
    out << "node,generation,state\n";
    for (NodeId u = 1; u <= tree_size(n); ++u)
        out << u << ',' << generation_of(u) << ',' << fmt(tree.state(u)) << '\n';
    log << "simulated depth-" << n << " tree (" << tree_size(n)
        << " nodes) -> " << path << '\n';
    return {0, {path}};
}

CommandResult cmd_estimate(const ExperimentConfig& cfg, int threads,
                           std::ostream& log) {
    (void)threads;
    cfg.validate();
    require_bar(cfg);
    Kernel kernel = make_kernel(cfg.kernel_name, cfg.kernel_order);
    DensityOracle oracle = DensityOracle::for_model(cfg.model);
    std::vector<double> xs = resolved_points(cfg, oracle, true);
    BandwidthSchedule schedule{cfg.gamma, 1};
    SpeedSequence speed{cfg.beta};

    const int n_max = *std::max_element(cfg.depths.begin(), cfg.depths.end());
    TreeData tree = simulate_tree(cfg.model, n_max, cfg.seed, cfg.initial);

    ExperimentConfig echo = cfg;
    echo.eval_points = xs;
    std::string path = out_path(cfg, "estimate.csv");
    auto out = open_out(path);
    out << "# config: " << echo.provenance_json().dump() << '\n';
    out << "seed,n,region,x,h,estimate,statistic\n";
    for (int n : cfg.depths) {
        double h = bandwidth(schedule, n);
        for (Region region : cfg.regions) {
            RegionSelector sel{region, n};
            for (double x : xs) {
                double est = kde(tree, sel, kernel, h, x);
                double stat = normalized_error(tree, sel, oracle, kernel,
                                               schedule, speed, x);
                out << cfg.seed << ',' << n << ',' << region_name(region) << ','
                    << fmt(x) << ',' << fmt(h) << ',' << fmt(est) << ','
                    << fmt(stat) << '\n';
            }
        }
    }
    log << "estimates for " << xs.size() << " points -> " << path << '\n';
    return {0, {path}};
}

CommandResult cmd_oracle_check(std::uint64_t seed, const std::string& out_dir,
                               std::ostream& log) {
    OracleCheckResult res = run_oracle_check(seed);
    std::filesystem::create_directories(out_dir);
    std::string path =
        (std::filesystem::path(out_dir) / "oracle_check.csv").string();
    auto out = open_out(path);
    out << "instances,max_abs_diff,pass\n";
    out << res.instances << ',' << fmt(res.max_abs_diff) << ','
        << (res.pass ? 1 : 0) << '\n';
    log << "max |formula - enumeration| = " << fmt(res.max_abs_diff) << " over "
        << res.instances << " instances: " << (res.pass ? "PASS" : "FAIL")
        << '\n';
    return {res.pass ? 0 : 1, {path}};
}

namespace {

void write_experiment_jsonl(const ExperimentData& data,
                            const std::string& path) {
    auto out = open_out(path);
    out << nlohmann::json{{"config", data.cfg.provenance_json()}}.dump() << '\n';
    const auto& depths = data.cfg.depths;
    for (std::uint64_t r = 0; r < data.cfg.replicates; ++r) {
        for (std::size_t di = 0; di < depths.size(); ++di) {
            for (std::size_t xi = 0; xi < data.xs.size(); ++xi) {
                const ReplicateStats& st = data.rows[di][xi][r];
                nlohmann::json row{{"replicate", r},
                                   {"n", depths[di]},
                                   {"x", data.xs[xi]},
                                   {"estimate_gen", st.estimate_gen},
                                   {"estimate_tree", st.estimate_tree},
                                   {"w_gen", st.w_gen},
                                   {"w_tree", st.w_tree},
                                   {"n_zero", st.n_zero},
                                   {"n_id", st.n_id},
                                   {"normalized", st.normalized},
                                   {"self_normalized", st.self_norm},
                                   {"ci_lo", st.ci_lo},
                                   {"ci_hi", st.ci_hi},
                                   {"covered", st.covered}};
                out << row.dump() << '\n';
            }
        }
    }
}

struct VarianceRow {
    std::string statistic;
    std::string region;
    int n;
    double x;
    std::uint64_t total;
    VarianceCheck check;
    double theory;
};

void write_variance_csv(const std::vector<VarianceRow>& rows,
                        const std::string& path,
                        const std::string& config_echo) {
    auto out = open_out(path);
    out << "# config: " << config_echo << '\n';
    out << "statistic,region,n,x,R,mean_square,sample_variance,theory,ratio,se,"
           "degenerate\n";
    for (const auto& r : rows) {
        out << r.statistic << ',' << r.region << ',' << r.n << ',' << fmt(r.x)
            << ',' << r.total << ',' << fmt(r.check.mean_square) << ','
            << fmt(r.check.sample_var) << ',' << fmt(r.theory) << ','
            << fmt(r.check.ratio) << ',' << fmt(r.check.se) << ','
            << (r.check.degenerate ? 1 : 0) << '\n';
    }
}

std::vector<double> column(const std::vector<ReplicateStats>& rows,
                           double ReplicateStats::* field) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.*field);
    return out;
}

}  // namespace

CommandResult cmd_verify_clt(const ExperimentConfig& cfg, int threads,
                             std::ostream& log) {
    ExperimentData data = run_experiment(cfg, threads);
    const std::string echo = data.cfg.provenance_json().dump();
    const double l2sq = data.kernel.l2_sq;

    std::vector<VarianceRow> var_rows;
    std::map<int, std::vector<double>> self_by_depth;
    for (std::size_t di = 0; di < data.cfg.depths.size(); ++di) {
        int n = data.cfg.depths[di];
        for (std::size_t xi = 0; xi < data.xs.size(); ++xi) {
            double x = data.xs[xi];
            double mu_x = data.oracle.density(x);
            const auto& rows = data.rows[di][xi];
            const std::uint64_t total = rows.size();

            auto add = [&](const std::string& name, const std::string& region,
                           std::vector<double> samples, double theory) {
                var_rows.push_back(VarianceRow{
                    name, region, n, x, total,
                    clt_variance_check(samples, theory), theory});
            };
            for (Region region : data.cfg.regions) {
                if (region == Region::Generation)
                    add("clt_gen", "gen", column(rows, &ReplicateStats::w_gen),
                        l2sq * mu_x);
                else
                    add("clt_tree", "tree",
                        column(rows, &ReplicateStats::w_tree), l2sq * mu_x);
            }
            add("additive_zero", region_name(Region::Generation),
                column(rows, &ReplicateStats::n_zero), l2sq * mu_x);
            add("additive_id", region_name(Region::Subtree),
                column(rows, &ReplicateStats::n_id), 2.0 * l2sq * mu_x);
            add("self_normalized", region_name(data.cfg.regions.front()),
                column(rows, &ReplicateStats::self_norm_clt), 1.0);

            double coverage = 0.0;
            for (const auto& r : rows) coverage += r.covered;
            coverage /= static_cast<double>(total);
            VarianceRow cov_row{"coverage",
                                region_name(data.cfg.regions.front()),
                                n,
                                x,
                                total,
                                VarianceCheck{},
                                data.cfg.ci_level};
            cov_row.check.ratio = coverage;
            cov_row.check.mean_square = coverage;
            var_rows.push_back(cov_row);
        }
        // Tail rates are reported at the first evaluation point.
        self_by_depth[n] = column(data.rows[di][0], &ReplicateStats::self_norm);
    }

    std::string var_path = out_path(cfg, "clt_variance.csv");
    write_variance_csv(var_rows, var_path, echo);

    DeviationReport report = tail_rate_estimate(
        self_by_depth, SpeedSequence{data.cfg.beta}, data.cfg.deltas,
        [](double d) { return 0.5 * d * d; },
        region_name(data.cfg.regions.front()), data.xs.front());
    std::string report_path = out_path(cfg, "clt_report.csv");
    report.write_csv(report_path, echo);

    std::string jsonl_path = out_path(cfg, "clt_samples.jsonl");
    write_experiment_jsonl(data, jsonl_path);

    for (const auto& r : var_rows)
        log << r.statistic << " n=" << r.n << " x=" << r.x
            << " ratio=" << r.check.ratio << " (theory " << r.theory << ")\n";
    return {0, {var_path, report_path, jsonl_path}};
}

CommandResult cmd_verify_mdp(const ExperimentConfig& cfg, int threads,
                             std::ostream& log) {
    ExperimentData data = run_experiment(cfg, threads);
    const std::string echo = data.cfg.provenance_json().dump();
    const double mu_x = data.oracle.density(data.xs.front());
    const double sigma2 = data.kernel.l2_sq * mu_x;

    std::map<int, std::vector<double>> self_by_depth;
    std::map<int, std::vector<double>> norm_by_depth;
    for (std::size_t di = 0; di < data.cfg.depths.size(); ++di) {
        int n = data.cfg.depths[di];
        self_by_depth[n] = column(data.rows[di][0], &ReplicateStats::self_norm);
        norm_by_depth[n] =
            column(data.rows[di][0], &ReplicateStats::normalized);
    }

    SpeedSequence speed{data.cfg.beta};
    DeviationReport self_report = tail_rate_estimate(
        self_by_depth, speed, data.cfg.deltas,
        [](double d) { return 0.5 * d * d; },
        region_name(data.cfg.regions.front()), data.xs.front());
    DeviationReport norm_report = tail_rate_estimate(
        norm_by_depth, speed, data.cfg.deltas,
        [sigma2](double d) { return d * d / (2.0 * sigma2); },
        region_name(data.cfg.regions.front()), data.xs.front());

    std::string self_path = out_path(cfg, "mdp_report.csv");
    self_report.write_csv(self_path, echo);
    std::string norm_path = out_path(cfg, "mdp_report_normalized.csv");
    norm_report.write_csv(norm_path, echo);

    auto verdicts = mdp_rate_compare(self_report);
    std::string verdict_path = out_path(cfg, "mdp_verdicts.csv");
    {
        auto out = open_out(verdict_path);
        out << "# config: " << echo << '\n';
        out << "delta,rate_theory,final_ratio,ratio_ok,trend_ok,pass,skipped\n";
        for (const auto& v : verdicts)
            out << fmt(v.delta) << ',' << fmt(v.rate_theory) << ','
                << fmt(v.final_ratio) << ',' << v.ratio_ok << ',' << v.trend_ok
                << ',' << v.pass << ',' << v.skipped << '\n';
    }

    std::string jsonl_path = out_path(cfg, "mdp_samples.jsonl");
    write_experiment_jsonl(data, jsonl_path);

    for (const auto& v : verdicts) {
        if (v.skipped) {
            log << "delta=" << v.delta << ": skipped (zero theory rate)\n";
            continue;
        }
        log << "delta=" << v.delta << ": rates";
        for (double r : v.rates) log << ' ' << r;
        log << " -> I=" << v.rate_theory << " ratio=" << v.final_ratio << ' '
            << (v.pass ? "PASS" : "FAIL") << '\n';
    }
    return {0, {self_path, norm_path, verdict_path, jsonl_path}};
}

CommandResult cmd_verify_crossgen(const ExperimentConfig& cfg, int threads,
                                  std::ostream& log) {
    CrossGenData data = run_crossgen(cfg, threads);
    const std::string echo = data.cfg.provenance_json().dump();
    const std::size_t k1 = data.vectors.front().size();

    Eigen::MatrixXd samples(data.vectors.size(), k1);
    for (std::size_t r = 0; r < data.vectors.size(); ++r)
        for (std::size_t j = 0; j < k1; ++j)
            samples(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
                data.vectors[r][j];
    Eigen::MatrixXd corr = correlation_matrix(samples);

    VarianceCheck sigma_check =
        clt_variance_check(data.combined, data.sigma2_theory);

    std::string report_path = out_path(cfg, "crossgen_report.csv");
    {
        auto out = open_out(report_path);
        out << "# config: " << echo << '\n';
        out << "quantity,i,j,value,theory\n";
        double max_off = 0.0;
        for (Eigen::Index i = 0; i < corr.rows(); ++i)
            for (Eigen::Index j = 0; j < corr.cols(); ++j) {
                out << "corr," << i << ',' << j << ',' << fmt(corr(i, j)) << ','
                    << (i == j ? 1 : 0) << '\n';
                if (i != j) max_off = std::max(max_off, std::abs(corr(i, j)));
            }
        out << "max_offdiag,-1,-1," << fmt(max_off) << ",0\n";
        out << "crossgen_sigma2,-1,-1," << fmt(sigma_check.mean_square) << ','
            << fmt(data.sigma2_theory) << '\n';
        out << "crossgen_ratio,-1,-1," << fmt(sigma_check.ratio) << ",1\n";
    }

    std::string jsonl_path = out_path(cfg, "crossgen_samples.jsonl");
    {
        auto out = open_out(jsonl_path);
        out << nlohmann::json{{"config", data.cfg.provenance_json()}}.dump() << '\n';
        for (std::size_t r = 0; r < data.vectors.size(); ++r) {
            nlohmann::json row{{"replicate", r},
                               {"z", data.vectors[r]},
                               {"combined", data.combined[r]}};
            out << row.dump() << '\n';
        }
    }

    log << "correlation matrix:\n" << corr << '\n';
    log << "combined functional: mean_square=" << sigma_check.mean_square
        << " theory=" << data.sigma2_theory << " ratio=" << sigma_check.ratio
        << '\n';
    return {0, {report_path, jsonl_path}};
}

CommandResult cmd_export_density(const ExperimentConfig& cfg,
                                 std::ostream& log) {
    cfg.validate();
    DensityOracle oracle = DensityOracle::for_model(cfg.model);
    std::string path = out_path(cfg, "density.csv");
    export_density_csv(oracle, path);
    log << "density table -> " << path << '\n';
    return {0, {path}};
}

}  // namespace bmc
