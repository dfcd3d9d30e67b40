#include "ucplab/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Common {
    std::string config;
    std::string output;
    std::optional<unsigned> workers;
    std::optional<long> seed;
    std::vector<std::string> overrides;
};

struct Flag {
    std::string name;
    std::string key;
    std::string help;
    std::optional<std::string> value;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments for scale-free unique continuation and uncertainty relations"};
    app.require_subcommand(1);

    std::vector<Common> commons(ucplab::experiment_names().size());
    // Per-experiment convenience flags mapped onto config keys.
    std::vector<std::vector<Flag>> flags(commons.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < commons.size(); ++i) {
        const std::string& name = ucplab::experiment_names()[i];
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        Common& c = commons[i];
        sub->add_option("-c,--config", c.config, "key = value config file");
        sub->add_option("-o,--output", c.output, "CSV output path (default stdout)");
        sub->add_option("-w,--workers", c.workers, "worker threads (default UCPLAB_WORKERS or all cores)")
            ->check(CLI::Range(1u, 4096u));
        sub->add_option("-s,--seed", c.seed, "root seed");
        sub->add_option("overrides", c.overrides, "key=value parameter overrides");

        auto& f = flags[i];
        if (name == "shannon") {
            f = {{"--bandwidth", "bandwidth", "bandwidth K", {}},
                 {"--truncation", "truncation", "starting truncation J", {}},
                 {"--jitter", "jitter", "node jitter amplitude in [0, 1/2)", {}}};
        } else if (name == "observability" || name == "sweep") {
            f = {{"--delta", "delta", "ball radius (list for sweep)", {}},
                 {"--jitter-seed", "jitter_seed", "seed for jittered centres", {}},
                 {"--jitter-amp", "jitter", "jitter amplitude; selects arrangement=jitter", {}}};
        } else if (name == "adversarial") {
            f = {{"--delta", "delta", "ball radius", {}}, {"--target", "target", "centers, potential or both", {}}};
        }
        for (auto& flag : f) sub->add_option(flag.name, flag.value, flag.help);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (!subs[i]->parsed()) continue;
            const Common& c = commons[i];
            ucplab::ExperimentConfig cfg;
            if (!c.config.empty()) cfg = ucplab::load_config(c.config);
            if (!cfg.experiment.empty() && cfg.experiment != ucplab::experiment_names()[i]) {
                std::cerr << "error: config names experiment '" << cfg.experiment << "' but subcommand is '"
                          << ucplab::experiment_names()[i] << "'\n";
                return 2;
            }
            cfg.experiment = ucplab::experiment_names()[i];
            for (const auto& flag : flags[i]) {
                if (!flag.value) continue;
                cfg.params[flag.key] = *flag.value;
                if (flag.key == "jitter" && cfg.experiment != "shannon") cfg.params["arrangement"] = "jitter";
            }
            if (c.workers) cfg.params["workers"] = std::to_string(*c.workers);
            if (c.seed) cfg.params["seed"] = std::to_string(*c.seed);
            for (const auto& o : c.overrides) ucplab::apply_override(cfg, o);
            if (!c.output.empty()) cfg.output = c.output;
            ucplab::run(cfg, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
