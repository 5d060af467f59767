#pragma once

#include <optional>
#include <string>

#include "ptp/workers/batch_feed.hpp"
#include "ptp/workers/experiment.hpp"

namespace ptp::workers {

struct TerminalConditions {
    double loss_stop = 1e-5;
    std::optional<std::size_t> max_epochs;  // offline; unbounded when absent
    std::size_t max_episodes = 0;           // online
    std::size_t validation_interval = 0;    // online

    static TerminalConditions offline(const config::ConfigTree& config) {
        TerminalConditions t;
        t.loss_stop = config.get_or<double>("training.terminal_conditions.loss_stop", 1e-5);
        const config::Json* node = config.find("training.terminal_conditions.max_epochs");
        if (node != nullptr && !node->is_null()) {
            if (!node->is_number_integer() || node->get<long long>() < 0)
                throw ConfigError("terminal_conditions.max_epochs must be a non-negative integer");
            t.max_epochs = node->get<std::size_t>();
        }
        return t;
    }

    static TerminalConditions online(const config::ConfigTree& config) {
        TerminalConditions t;
        t.loss_stop = config.get_or<double>("training.terminal_conditions.loss_stop", 1e-5);
        t.max_episodes = positive(config, "training.terminal_conditions.max_episodes");
        t.validation_interval = positive(config, "training.terminal_conditions.validation_interval");
        return t;
    }

private:
    static std::size_t positive(const config::ConfigTree& config, const std::string& key) {
        const config::Json* node = config.find(key);
        if (node == nullptr || node->is_null())
            throw ConfigError("Missing required setting '" + key + "'");
        if (!node->is_number_integer() || node->get<long long>() < 1)
            throw ConfigError("'" + key + "' must be a positive integer");
        return node->get<std::size_t>();
    }
};

namespace detail {

inline void require_trainable(Experiment& e) {
    if (e.pipeline.models().empty())
        throw ConfigError("Training requires at least one component with parameters");
    if (e.pipeline.losses(pipeline::Section::training).empty())
        throw ConfigError("Training requires at least one loss component");
}

// One training step: forward, statistics, backward, optimizer update.
inline void train_on(Experiment& e, streams::Batch& batch) {
    e.pipeline.forward(pipeline::Section::training, batch);
    for (pipeline::Component* c : e.pipeline.execution_order(pipeline::Section::training))
        c->collect_statistics(e.collector(pipeline::Section::training), batch);
    e.pipeline.backward(pipeline::Section::training, batch);
    for (auto& [name, optimizer] : e.optimizers)
        optimizer.step(*e.pipeline.component(name)->parameters());
    ++e.status.episode;
}

// Forward-only pass over `count` batches of a section, collecting statistics.
inline void evaluate(Experiment& e, pipeline::Section section, std::size_t count) {
    e.pipeline.set_mode(pipeline::Mode::evaluation);
    pipeline::TaskComponent& task = e.pipeline.task(section);
    for (std::size_t i = 0; i < count; ++i) {
        streams::Batch batch = task.next_batch();
        e.pipeline.forward(section, batch);
        for (pipeline::Component* c : e.pipeline.execution_order(section))
            c->collect_statistics(e.collector(section), batch);
    }
}

// Exports the section's aggregation and returns its summed loss mean.
inline std::optional<double> validation_round(Experiment& e, std::size_t batches) {
    evaluate(e, pipeline::Section::validation, batches);
    e.export_section(pipeline::Section::validation);
    return e.section_loss(pipeline::Section::validation,
                          e.last_aggregation(pipeline::Section::validation));
}

// track_best + loss_stop handling shared by both trainers. Returns true when
// training should stop.
inline bool process_validation_loss(Experiment& e, std::optional<double> loss, double loss_stop) {
    if (!loss) return false;
    stats::track_best(e.status, *loss, [&] { e.save_checkpoint("best.ckpt"); });
    if (*loss < loss_stop) {
        util::logger().info("validation loss " + format_value(*loss) + " fell below loss_stop " +
                            format_value(loss_stop));
        return true;
    }
    return false;
}

}  // namespace detail

// Epoch-based training: a full pass over the training task, then a full pass
// over the validation task, repeated until loss_stop or max_epochs.
inline void run_offline_trainer(Experiment& e) {
    const TerminalConditions terms = TerminalConditions::offline(e.config);
    detail::require_trainable(e);
    pipeline::TaskComponent& training_task = e.pipeline.task(pipeline::Section::training);
    pipeline::TaskComponent& validation_task = e.pipeline.task(pipeline::Section::validation);

    while (!terms.max_epochs || e.status.epoch < *terms.max_epochs) {
        ++e.status.epoch;
        e.pipeline.set_mode(pipeline::Mode::training);
        {
            BatchFeed feed(training_task, training_task.batches_per_epoch(), e.prefetch);
            while (auto batch = feed.next()) detail::train_on(e, *batch);
        }
        e.export_section(pipeline::Section::training);

        const auto loss = detail::validation_round(e, validation_task.batches_per_epoch());
        if (detail::process_validation_loss(e, loss, terms.loss_stop)) break;
    }
    e.save_checkpoint("final.ckpt");
}

// Episode-based training: one batch per episode with the training task
// recycled across epoch boundaries; every validation_interval episodes a
// single validation batch is scored, exported, and checked against loss_stop.
inline void run_online_trainer(Experiment& e) {
    const TerminalConditions terms = TerminalConditions::online(e.config);
    detail::require_trainable(e);
    pipeline::TaskComponent& training_task = e.pipeline.task(pipeline::Section::training);
    e.pipeline.task(pipeline::Section::validation);
    const std::size_t batches_per_epoch = training_task.batches_per_epoch();

    BatchFeed feed(training_task, terms.max_episodes, e.prefetch);
    while (e.status.episode < terms.max_episodes) {
        e.pipeline.set_mode(pipeline::Mode::training);
        auto batch = feed.next();
        detail::train_on(e, *batch);
        e.status.epoch = e.status.episode / batches_per_epoch;

        if (e.status.episode % terms.validation_interval != 0) continue;
        e.export_section(pipeline::Section::training);
        const auto loss = detail::validation_round(e, 1);
        if (detail::process_validation_loss(e, loss, terms.loss_stop)) break;
    }
    e.save_checkpoint("final.ckpt");
}

// Single evaluation pass over the test task; statistics are logged and
// exported, exporter components write their files during forward.
inline void run_processor(Experiment& e) {
    pipeline::TaskComponent& task = e.pipeline.task(pipeline::Section::test);
    const std::size_t batches = task.batches_per_epoch();
    e.pipeline.set_mode(pipeline::Mode::evaluation);

    BatchFeed feed(task, batches, e.prefetch);
    while (auto batch = feed.next()) {
        e.pipeline.forward(pipeline::Section::test, *batch);
        for (pipeline::Component* c : e.pipeline.execution_order(pipeline::Section::test))
            c->collect_statistics(e.collector(pipeline::Section::test), *batch);
        ++e.status.episode;
    }

    if (!e.collector(pipeline::Section::test).empty()) {
        e.export_section(pipeline::Section::test);
        const auto& agg = e.last_aggregation(pipeline::Section::test);
        for (const auto& [key, entry] : agg.entries)
            util::logger().info("test " + key + ": mean=" + format_value(entry.mean) +
                                " min=" + format_value(entry.min) + " max=" +
                                format_value(entry.max) + " std=" + format_value(entry.std) +
                                " batches=" + std::to_string(entry.batches));
    }
    util::logger().info("processed " + std::to_string(batches) + " batches (" +
                        std::to_string(task.dataset_size()) + " samples)");
}

enum class WorkerKind { offline_trainer, online_trainer, processor };

// Builds the experiment and runs the chosen worker, mapping failures to exit
// codes: 0 success, 1 configuration/handshake errors, 2 numeric failures.
inline int run_worker(WorkerKind kind, const RunOptions& options,
                      const pipeline::ComponentFactory& factory) {
    const std::vector<pipeline::Section> required =
        kind == WorkerKind::processor
            ? std::vector<pipeline::Section>{pipeline::Section::test}
            : std::vector<pipeline::Section>{pipeline::Section::training,
                                             pipeline::Section::validation};
    try {
        Experiment e = Experiment::create(options, factory, required);
        try {
            switch (kind) {
                case WorkerKind::offline_trainer: run_offline_trainer(e); break;
                case WorkerKind::online_trainer: run_online_trainer(e); break;
                case WorkerKind::processor: run_processor(e); break;
            }
        } catch (const NumericError& err) {
            util::logger().error(err.what());
            e.dump_state();
            return 2;
        }
        return 0;
    } catch (const NumericError& err) {
        util::logger().error(err.what());
        return 2;
    } catch (const std::exception& err) {
        util::logger().error(err.what());
        return 1;
    }
}

}  // namespace ptp::workers
