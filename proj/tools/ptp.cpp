#include <CLI11.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "ptp/workers/workers.hpp"
#include "ptp/zoo/zoo.hpp"

namespace {

struct Cli {
    ptp::workers::RunOptions options;
    std::vector<std::string> configs;
    CLI::Option* seed_option = nullptr;
};

void add_common_flags(CLI::App* sub, Cli& cli) {
    sub->add_option("--config", cli.configs,
                    "Configuration file(s), merged left to right (comma separated or repeated)")
        ->required()
        ->delimiter(',');
    sub->add_option("--expdir", cli.options.expdir,
                    "Directory under which the experiment directory is created");
    cli.seed_option = sub->add_option("--seed", cli.options.seed,
                                      "Random seed (written into the saved configuration)");
    sub->add_option("--log-level", cli.options.log_level, "Logging threshold")
        ->check(CLI::IsMember({"debug", "info", "warning", "error"}));
    sub->add_option("--set", cli.options.overrides,
                    "key.path=value override applied after all configuration files")
        ->take_all();
    sub->add_option("--prefetch", cli.options.prefetch,
                    "Number of batches to prepare ahead of training (0 = synchronous)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Component pipeline runner: configuration-driven training and evaluation"};
    app.require_subcommand(1);

    Cli offline, online, process;
    add_common_flags(app.add_subcommand("train-offline", "Epoch-based trainer with validation "
                                                         "after every epoch"),
                     offline);
    add_common_flags(app.add_subcommand("train-online", "Episode-based trainer with single-batch "
                                                        "validation at a fixed interval"),
                     online);
    add_common_flags(app.add_subcommand("process", "Single evaluation pass over the test task"),
                     process);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    ptp::pipeline::ComponentFactory factory;
    ptp::zoo::register_zoo(factory);

    const auto run = [&](Cli& cli, ptp::workers::WorkerKind kind) {
        for (const auto& path : cli.configs) cli.options.configs.emplace_back(path);
        cli.options.seed_given = cli.seed_option->count() > 0;
        return ptp::workers::run_worker(kind, cli.options, factory);
    };

    if (app.got_subcommand("train-offline"))
        return run(offline, ptp::workers::WorkerKind::offline_trainer);
    if (app.got_subcommand("train-online"))
        return run(online, ptp::workers::WorkerKind::online_trainer);
    return run(process, ptp::workers::WorkerKind::processor);
}
