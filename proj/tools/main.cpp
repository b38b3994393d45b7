#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "fracstefan/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal Stefan problem solver and stable-process Monte Carlo"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    uint64_t seed = 0;
    bool seed_set = false, workers_set = false;
    int workers = 0;

    const char* modes[] = {"melt", "freeze", "mc", "validate", "exit-law", "tail"};
    const char* help[] = {
        "solve the melting problem and emit the solution bundle",
        "solve the freezing problem and emit the solution bundle",
        "run the particle system against the computed barrier",
        "run the theorem-level check suite",
        "sample the ball-exit law and compare to the explicit density",
        "fit the survival-tail decay rate",
    };
    for (int i = 0; i < 6; ++i) {
        CLI::App* sub = app.add_subcommand(modes[i], help[i]);
        sub->add_option("--config", config_path, "JSON config file (defaults when omitted)");
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        auto* so = sub->add_option("--seed", seed, "Monte Carlo master seed (overrides config)");
        auto* wo = sub->add_option("--workers", workers, "Monte Carlo worker threads");
        sub->callback([&, so, wo]() {
            seed_set = so->count() > 0;
            workers_set = wo->count() > 0;
        });
    }

    CLI11_PARSE(app, argc, argv);
    std::string mode = app.get_subcommands().front()->get_name();

    try {
        fracstefan::RunConfig cfg;
        if (!config_path.empty()) {
            cfg = fracstefan::parse_config(config_path, mode);
        } else {
            cfg = fracstefan::parse_config_json("{}", mode);
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed_set) cfg.mc.seed = seed;
        if (workers_set) cfg.mc.workers = workers;
        return fracstefan::run(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
