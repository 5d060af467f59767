#pragma once

#include <map>
#include <string>
#include <vector>

#include "ptp/config/component_config.hpp"
#include "ptp/config/global_params.hpp"
#include "ptp/numeric/parameter_store.hpp"
#include "ptp/numeric/rng.hpp"
#include "ptp/pipeline/grad_table.hpp"
#include "ptp/stats/collector.hpp"
#include "ptp/streams/batch.hpp"
#include "ptp/streams/stream_definition.hpp"

namespace ptp::pipeline {

enum class ComponentRole { task, model, loss, general };

enum class Mode { training, evaluation };

class Component {
public:
    explicit Component(config::ComponentConfig config)
        : config_(std::move(config)), rng_(config_.seed) {}
    virtual ~Component() = default;

    virtual ComponentRole role() const { return ComponentRole::general; }

    // Differentiable components take part in the backward traversal; the
    // pipeline never calls backward on the others.
    virtual bool differentiable() const { return false; }

    // Stream contracts in terms of default names; renames are applied by the
    // remapped_* accessors so component code never sees actual names directly.
    virtual std::map<std::string, streams::StreamDefinition> input_definitions() const { return {}; }
    virtual std::map<std::string, streams::StreamDefinition> output_definitions() const { return {}; }

    virtual void initialize(config::GlobalParams&) {}
    virtual void execute(streams::Batch&) {}
    virtual void backward(streams::Batch&, GradTable&) {}

    // Loss components only: write d(total)/d(input streams) scaled by weight.
    virtual void seed_gradients(streams::Batch&, GradTable&, double /*weight*/) {}

    // Default stream name carrying the scalar loss (loss components only).
    virtual std::string loss_stream() const { return "loss"; }

    // Keys this component will collect; claimed once per collector.
    virtual std::vector<std::string> statistic_keys() const { return {}; }

    void register_statistics(stats::StatisticsCollector& collector) const {
        for (const auto& key : statistic_keys()) collector.register_key(key);
    }

    virtual void collect_statistics(stats::StatisticsCollector&, const streams::Batch&) {}

    virtual numeric::ParameterStore* parameters() { return nullptr; }
    const numeric::ParameterStore* parameters() const {
        return const_cast<Component*>(this)->parameters();
    }

    void set_mode(Mode mode) { mode_ = mode; }
    Mode mode() const { return mode_; }
    bool training() const { return mode_ == Mode::training; }

    const config::ComponentConfig& config() const { return config_; }
    const std::string& name() const { return config_.name; }
    double priority() const { return config_.priority; }

    const std::string& stream(const std::string& default_name) const {
        return config_.stream(default_name);
    }
    const std::string& global(const std::string& default_key) const {
        return config_.global(default_key);
    }

    std::map<std::string, streams::StreamDefinition> remapped_inputs() const {
        return remap(input_definitions());
    }
    std::map<std::string, streams::StreamDefinition> remapped_outputs() const {
        return remap(output_definitions());
    }

protected:
    numeric::Rng& rng() { return rng_; }

    config::ComponentConfig config_;

private:
    std::map<std::string, streams::StreamDefinition> remap(
        std::map<std::string, streams::StreamDefinition> defs) const {
        std::map<std::string, streams::StreamDefinition> out;
        for (auto& [default_name, def] : defs) out.emplace(stream(default_name), std::move(def));
        return out;
    }

    Mode mode_ = Mode::evaluation;
    numeric::Rng rng_;
};

// Batch producer driving a pipeline section. Tasks seed the handshake with
// their output definitions but are not executed by forward.
class TaskComponent : public Component {
public:
    using Component::Component;

    ComponentRole role() const final { return ComponentRole::task; }

    virtual std::size_t dataset_size() const = 0;
    virtual std::size_t batch_size() const = 0;
    virtual streams::Batch next_batch() = 0;

    std::size_t batches_per_epoch() const {
        return (dataset_size() + batch_size() - 1) / batch_size();
    }
};

}  // namespace ptp::pipeline
