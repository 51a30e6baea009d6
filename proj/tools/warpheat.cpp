// warpheat: batch front end. One command per invocation; outputs land in
// --out, else the config's out_dir, else $WARPHEAT_OUT, else ./out.

#include "commands.hpp"

#include "warpheat/dirichlet_spectral.hpp"
#include "warpheat/output.hpp"
#include "warpheat/warp_metric.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace warpheat;

int main(int argc, char** argv)
{
    CLI::App app{"Heat kernels on doubly warped products and radial model spaces"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir;
    int threads = 0;
    double slack = -1;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads for independent solves")->check(CLI::Range(1, 256));
    app.add_option("--slack", slack, "certification slack on r^2 Rc")->check(CLI::Range(0.0, 1e-6));
    app.add_option("--set", overrides, "configuration override KEY=VALUE (repeatable)");

    struct Command {
        const char* name;
        const char* help;
        int (*run)(const RunConfig&, const std::string&);
    };
    const Command commands[] = {
        {"params", "generate and check the warped-product parameter schedule", cli::cmd_params},
        {"certify", "certify nonnegative Ricci curvature on the generated profile", cli::cmd_certify},
        {"solve", "radial heat kernel runs, normalized diagonal and kernel bounds", cli::cmd_solve},
        {"spectral", "Dirichlet eigenpairs, spectral bounds and ball-to-global convergence", cli::cmd_spectral},
        {"blowdown", "limit volume exponents along blow-down sequences", cli::cmd_blowdown},
        {"demo-oscillation", "normalized diagonal clusters on the oscillating surrogate", cli::cmd_demo_oscillation},
    };
    for (const Command& c : commands) app.add_subcommand(c.name, c.help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : cli::io_or_config;
    }

    RunConfig cfg;
    std::string out;
    try {
        if (!config_path.empty()) cfg = RunConfig::load(config_path);
        for (const std::string& kv : overrides) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (threads > 0) cfg.threads = threads;
        if (slack >= 0) cfg.slack = slack;
        cfg.validate();
        out = !out_dir.empty() ? out_dir : !cfg.out_dir.empty() ? cfg.out_dir : "";
        if (out.empty()) {
            const char* env = std::getenv("WARPHEAT_OUT");
            out = env && *env ? env : "out";
        }
        ensure_directory(out);
    } catch (const std::exception& e) {
        std::cerr << "warpheat: " << e.what() << '\n';
        return cli::io_or_config;
    }

    for (const Command& c : commands) {
        if (!app.got_subcommand(c.name)) continue;
        try {
            return c.run(cfg, out);
        } catch (const InfeasibleSchedule& e) {
            std::cerr << "warpheat: " << e.what() << '\n';
            return cli::check_failed;
        } catch (const ConfigError& e) {
            std::cerr << "warpheat: " << e.what() << '\n';
            return cli::io_or_config;
        } catch (const IoError& e) {
            std::cerr << "warpheat: " << e.what() << '\n';
            return cli::io_or_config;
        } catch (const InvalidBands& e) {
            std::cerr << "warpheat: " << e.what() << '\n';
            return cli::io_or_config;
        } catch (const SeedTimeError& e) {
            std::cerr << "warpheat: " << e.what() << '\n';
            return cli::io_or_config;
        } catch (const std::exception& e) {
            // solver failures, truncation and precision exhaustion
            std::cerr << "warpheat: " << e.what() << '\n';
            return cli::no_convergence;
        }
    }
    return cli::io_or_config;
}
