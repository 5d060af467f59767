#pragma once

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ptp/config/config_tree.hpp"
#include "ptp/config/global_params.hpp"
#include "ptp/config/yaml.hpp"
#include "ptp/errors.hpp"
#include "ptp/numeric/optimizer.hpp"
#include "ptp/pipeline/pipeline.hpp"
#include "ptp/stats/checkpoint.hpp"
#include "ptp/stats/collector.hpp"
#include "ptp/util/logger.hpp"

namespace ptp::workers {

struct RunOptions {
    std::vector<std::filesystem::path> configs;
    std::filesystem::path expdir = "./experiments";
    std::uint64_t seed = 1337;
    bool seed_given = false;  // an explicit --seed beats a seed in the config file
    std::string log_level = "info";
    std::vector<std::string> overrides;  // raw key.path=value texts
    std::size_t prefetch = 0;            // 0 = synchronous batch preparation
};

inline void apply_override(config::ConfigTree& tree, const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("Override must look like key.path=value, got '" + text + "'");
    tree.set(text.substr(0, eq), config::parse_scalar_text(text.substr(eq + 1)));
}

// Merges config files left-to-right, applies --set overrides as the final
// layer, and pins the effective seed into the tree so the saved copy
// reproduces the run.
inline config::ConfigTree assemble_config(const RunOptions& options) {
    if (options.configs.empty()) throw ConfigError("At least one configuration file is required");
    config::ConfigTree tree = config::load_config(options.configs);
    for (const auto& text : options.overrides) apply_override(tree, text);
    if (options.seed_given || !tree.has("seed")) tree.set("seed", config::Json(options.seed));
    return tree;
}

inline std::string directory_stamp_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%d_%H%M%S", &tm);
    return buf;
}

// Creates <base>/<stamp>/, appending _1, _2, ... when the name is taken.
inline std::filesystem::path create_experiment_dir(const std::filesystem::path& base,
                                                   const std::string& stamp = directory_stamp_now()) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(base, ec);
    if (ec) throw IoError("Cannot create experiment root " + base.string() + ": " + ec.message());
    for (int n = 0;; ++n) {
        const fs::path candidate =
            base / (n == 0 ? stamp : stamp + "_" + std::to_string(n));
        if (fs::create_directory(candidate, ec)) return candidate;
        if (ec && !fs::exists(candidate))
            throw IoError("Cannot create experiment directory " + candidate.string() + ": " +
                          ec.message());
    }
}

inline std::string format_value(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

// "loss=0.693 accuracy=0.5" over the aggregated means, in key order.
inline std::string summary_text(const stats::StatisticsAggregation& agg) {
    std::string out;
    for (const auto& [key, entry] : agg.entries) {
        if (!out.empty()) out += ' ';
        out += key + "=" + format_value(entry.mean);
    }
    return out;
}

// Everything a worker run needs: the merged config, the experiment
// directory, the initialized pipeline with per-section statistics
// collectors, and one optimizer per model.
class Experiment {
public:
    static Experiment create(const RunOptions& options, const pipeline::ComponentFactory& factory,
                             const std::vector<pipeline::Section>& required_sections) {
        config::ConfigTree tree = assemble_config(options);
        const std::uint64_t seed = tree.get_or<std::uint64_t>("seed", options.seed);

        util::LogLevel level = util::LogLevel::info;
        if (!util::parse_log_level(options.log_level, level))
            throw ConfigError("Unknown log level '" + options.log_level + "'");

        const std::filesystem::path directory = create_experiment_dir(options.expdir);
        util::Logger& log = util::logger();
        log.set_level(level);
        log.open_file((directory / "experiment.log").string());
        log.info("experiment directory: " + directory.string());
        log.info("seed: " + std::to_string(seed));
        config::save_yaml(tree, directory / "training_configuration.yml");

        pipeline::PipelineOptions pipeline_options;
        pipeline_options.seed = seed;
        pipeline::Pipeline built = pipeline::Pipeline::build(tree, factory, pipeline_options);
        Experiment e(std::move(tree), std::move(built), directory, seed, options.prefetch);
        for (pipeline::Section section : required_sections) e.pipeline.task(section);

        e.globals.publish("experiment_dir", directory.string(), "worker");
        e.pipeline.initialize(e.globals);
        e.check_handshakes();
        stats::apply_load_specs(e.pipeline);

        if (e.pipeline.has_section(pipeline::Section::training)) e.create_optimizers();
        for (pipeline::Section section : pipeline::all_sections()) {
            if (!e.pipeline.has_section(section)) continue;
            auto& collector = e.collectors_[section];
            for (pipeline::Component* c : e.pipeline.execution_order(section))
                c->register_statistics(collector);
        }
        return e;
    }

    stats::StatisticsCollector& collector(pipeline::Section section) {
        return collectors_.at(section);
    }

    std::filesystem::path csv_path(pipeline::Section section) const {
        return directory / (std::string(pipeline::section_name(section)) + ".csv");
    }

    void export_section(pipeline::Section section) {
        stats::StatisticsAggregation agg = stats::aggregate(collector(section));
        agg.episode = status.episode;
        agg.epoch = status.epoch;
        stats::export_csv(agg, csv_path(section));
        util::logger().info(std::string(pipeline::section_name(section)) + " | episode " +
                            std::to_string(status.episode) + " | epoch " +
                            std::to_string(status.epoch) + " | " + summary_text(agg));
        last_aggregation_[section] = std::move(agg);
    }

    const stats::StatisticsAggregation& last_aggregation(pipeline::Section section) const {
        return last_aggregation_.at(section);
    }

    void save_checkpoint(const std::string& filename) {
        stats::save_checkpoint(directory / filename, pipeline, optimizers, status);
        util::logger().info("saved " + filename + " at episode " + std::to_string(status.episode));
    }

    // Sum of the aggregated means of every loss component's statistic keys.
    // Empty when the section has no loss statistics to read.
    std::optional<double> section_loss(pipeline::Section section,
                                       const stats::StatisticsAggregation& agg) const {
        double total = 0.0;
        bool any = false;
        for (pipeline::Component* loss : pipeline.losses(section)) {
            for (const auto& key : loss->statistic_keys()) {
                if (!agg.has(key)) continue;
                total += agg.mean(key);
                any = true;
            }
        }
        if (!any) return std::nullopt;
        return total;
    }

    void dump_state() const {
        auto& log = util::logger();
        log.error("state dump: episode=" + std::to_string(status.episode) +
                  " epoch=" + std::to_string(status.epoch));
        for (pipeline::Component* model : pipeline.models()) {
            const numeric::ParameterStore* store = model->parameters();
            for (const auto& name : store->names()) {
                const numeric::NDArray& value = store->value(name);
                double lo = value[0], hi = value[0];
                for (std::size_t i = 1; i < value.size(); ++i) {
                    lo = std::min(lo, value[i]);
                    hi = std::max(hi, value[i]);
                }
                log.error("  " + model->name() + "." + name + " " + value.shape_text() +
                          " min=" + format_value(lo) + " max=" + format_value(hi));
            }
        }
    }

    config::ConfigTree config;
    pipeline::Pipeline pipeline;
    std::filesystem::path directory;
    std::uint64_t seed;
    std::size_t prefetch;
    config::GlobalParams globals;
    stats::CheckpointStatus status;
    std::map<std::string, numeric::Optimizer> optimizers;

private:
    Experiment(config::ConfigTree tree, pipeline::Pipeline p, std::filesystem::path dir,
               std::uint64_t s, std::size_t pf)
        : config(std::move(tree)),
          pipeline(std::move(p)),
          directory(std::move(dir)),
          seed(s),
          prefetch(pf) {}

    void check_handshakes() {
        std::vector<pipeline::Diagnostic> all;
        for (pipeline::Section section : pipeline::all_sections()) {
            if (!pipeline.has_section(section)) continue;
            for (auto& d : pipeline.handshake(section)) all.push_back(std::move(d));
        }
        if (all.empty()) return;
        for (const auto& d : all) util::logger().error(d.message);
        throw ConfigError("Handshake failed with " + std::to_string(all.size()) +
                          " diagnostic(s):\n" + pipeline::format_diagnostics(all));
    }

    void create_optimizers() {
        const config::Json* node = config.find("training.optimizer");
        const config::ConfigTree tree(node != nullptr ? *node : config::Json::object());
        const numeric::OptimizerConfig optimizer_config = numeric::OptimizerConfig::from_tree(tree);
        for (pipeline::Component* model : pipeline.models())
            optimizers.emplace(model->name(), numeric::Optimizer(optimizer_config));
    }

    std::map<pipeline::Section, stats::StatisticsCollector> collectors_;
    std::map<pipeline::Section, stats::StatisticsAggregation> last_aggregation_;
};

}  // namespace ptp::workers
