#include <CLI11.hpp>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "bmc/config.hpp"
#include "bmc/experiments.hpp"
#include "bmc/harness.hpp"

namespace {

struct SharedOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool dry_run = false;
};

void add_shared(CLI::App* cmd, SharedOptions& opt) {
    cmd->add_option("--config", opt.config_path, "experiment config file (JSON)");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--seed", opt.seed, "base seed override");
    cmd->add_option("--threads", opt.threads,
                    "worker thread cap (default: BMC_THREADS or all cores)");
    cmd->add_flag("--dry-run", opt.dry_run,
                  "print the resolved config and exit");
}

bmc::ExperimentConfig resolve(const SharedOptions& opt) {
    bmc::ExperimentConfig cfg;
    if (!opt.config_path.empty())
        cfg = bmc::ExperimentConfig::load_file(opt.config_path);
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.threads > 0) cfg.threads = opt.threads;
    return cfg;
}

int run_command(const SharedOptions& opt,
                const std::function<bmc::CommandResult(
                    const bmc::ExperimentConfig&, int)>& body) {
    try {
        bmc::ExperimentConfig cfg = resolve(opt);
        if (opt.dry_run) {
            std::cout << cfg.to_json().dump(2) << '\n';
            return 0;
        }
        int threads = bmc::resolve_threads(opt.threads, cfg.threads);
        return body(cfg, threads).exit_code;
    } catch (const bmc::ConfigValidationError& e) {
        std::cerr << "validation failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "bmckit: simulation, density estimation and deviation-rate "
        "verification for bifurcating Markov chains"};
    app.require_subcommand(1);

    SharedOptions sim_opt, est_opt, clt_opt, mdp_opt, cg_opt, exp_opt;
    SharedOptions oracle_opt, val_opt;

    auto* sim = app.add_subcommand("simulate", "simulate a tree and dump it");
    add_shared(sim, sim_opt);

    auto* est = app.add_subcommand(
        "estimate", "kernel density estimates from one simulated tree");
    add_shared(est, est_opt);

    auto* oracle = app.add_subcommand(
        "oracle-check",
        "moment formulas against exhaustive enumeration on random instances");
    add_shared(oracle, oracle_opt);

    auto* clt = app.add_subcommand(
        "verify-clt", "replicated variance and coverage checks at b_n = 1");
    add_shared(clt, clt_opt);

    auto* mdp = app.add_subcommand(
        "verify-mdp", "empirical deviation rates against the rate function");
    add_shared(mdp, mdp_opt);

    auto* cg = app.add_subcommand(
        "verify-crossgen",
        "cross-generation independence and combined-variance checks");
    add_shared(cg, cg_opt);

    auto* val = app.add_subcommand(
        "validate", "feasibility checks for the configured exponents");
    add_shared(val, val_opt);
    double val_gamma = 0.0, val_alpha = 0.0, val_beta = 0.0, val_s = 2.0;
    val->add_option("--gamma", val_gamma, "bandwidth exponent");
    val->add_option("--alpha", val_alpha, "ergodic rate");
    val->add_option("--beta", val_beta, "speed exponent");
    val->add_option("--s", val_s, "smoothness order (default 2)");

    auto* exp = app.add_subcommand("export-density",
                                   "write the invariant density table");
    add_shared(exp, exp_opt);

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed())
        return run_command(sim_opt, [](const auto& cfg, int threads) {
            return bmc::cmd_simulate(cfg, threads, std::cout);
        });
    if (est->parsed())
        return run_command(est_opt, [](const auto& cfg, int threads) {
            return bmc::cmd_estimate(cfg, threads, std::cout);
        });
    if (oracle->parsed())
        return run_command(oracle_opt, [](const auto& cfg, int) {
            return bmc::cmd_oracle_check(cfg.seed, cfg.out_dir, std::cout);
        });
    if (clt->parsed())
        return run_command(clt_opt, [](const auto& cfg, int threads) {
            return bmc::cmd_verify_clt(cfg, threads, std::cout);
        });
    if (mdp->parsed())
        return run_command(mdp_opt, [](const auto& cfg, int threads) {
            return bmc::cmd_verify_mdp(cfg, threads, std::cout);
        });
    if (cg->parsed())
        return run_command(cg_opt, [](const auto& cfg, int threads) {
            return bmc::cmd_verify_crossgen(cfg, threads, std::cout);
        });
    if (exp->parsed())
        return run_command(exp_opt, [](const auto& cfg, int) {
            return bmc::cmd_export_density(cfg, std::cout);
        });

    if (val->parsed()) {
        try {
            bmc::ExperimentConfig cfg = resolve(val_opt);
            bool have_config = !val_opt.config_path.empty();
            double gamma = val_gamma > 0.0 ? val_gamma : cfg.gamma;
            double alpha = val_alpha > 0.0
                               ? val_alpha
                               : (have_config ? cfg.resolved_alpha() : 0.0);
            double beta = val_beta > 0.0 ? val_beta : (have_config ? cfg.beta : 0.0);
            if (val_opt.dry_run) {
                std::cout << cfg.to_json().dump(2) << '\n';
                return 0;
            }
            bool ok = true;
            if (alpha > 0.0) {
                auto ac = bmc::validate_alpha_bandwidth(alpha, gamma);
                if (ac.pass) {
                    std::cout << "alpha-bandwidth: PASS (2^(1-gamma*d)*alpha = "
                              << ac.value << ")";
                    if (ac.alpha_binds)
                        std::cout << " [alpha > 1/2: the rate constrains the "
                                     "bandwidth in this regime]";
                    std::cout << '\n';
                } else {
                    std::cout << "alpha-bandwidth: FAIL "
                              << "(2^(1-gamma*d)*alpha = " << ac.value
                              << " >= 1 for alpha = " << alpha
                              << ", gamma = " << gamma << ")\n";
                    ok = false;
                }
            }
            if (beta > 0.0) {
                auto sf = bmc::validate_speed(gamma, 1, val_s, beta);
                std::cout << "speed: " << (sf.pass ? "PASS" : "FAIL")
                          << " (feasible interval (" << sf.lower << ", "
                          << sf.upper << "), beta = " << beta << ")\n";
                ok = ok && sf.pass;
            }
            return ok ? 0 : 2;
        } catch (const std::exception& e) {
            std::cerr << "validation failure: " << e.what() << '\n';
            return 2;
        }
    }
    return 0;
}
