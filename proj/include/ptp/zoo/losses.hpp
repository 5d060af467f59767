#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "ptp/numeric/ndarray.hpp"
#include "ptp/pipeline/component.hpp"
#include "ptp/pipeline/grad_table.hpp"
#include "ptp/stats/collector.hpp"

namespace ptp::zoo {

// Shared loss plumbing: produce the scalar `loss` stream and report it under
// the `statistics_key` parameter (default "loss"). The statistic key is
// deliberately independent of stream remapping so renaming streams never
// changes CSV columns.
class LossComponent : public pipeline::Component {
public:
    using Component::Component;

    pipeline::ComponentRole role() const final { return pipeline::ComponentRole::loss; }

    std::vector<std::string> statistic_keys() const final {
        return {config_.params.get_or<std::string>("statistics_key", "loss")};
    }

    void collect_statistics(stats::StatisticsCollector& collector,
                            const streams::Batch& batch) final {
        collector.collect(statistic_keys()[0], batch.get(stream(loss_stream())).scalar(),
                          batch.batch_size());
    }

protected:
    void publish_loss(streams::Batch& batch, double value) {
        if (!std::isfinite(value))
            throw NumericError("Component '" + name() + "': loss is non-finite");
        batch.add(stream(loss_stream()), streams::Value{value});
    }
};

// Negative log likelihood over row-wise log-probabilities and index targets.
class NllLoss : public LossComponent {
public:
    using LossComponent::LossComponent;

    std::map<std::string, streams::StreamDefinition> input_definitions() const override {
        return {{"predictions", streams::StreamDefinition::numeric(
                                    {streams::Dim::batch(), streams::Dim::any()})},
                {"targets", streams::StreamDefinition::index_list()}};
    }
    std::map<std::string, streams::StreamDefinition> output_definitions() const override {
        return {{"loss", streams::StreamDefinition::scalar()}};
    }

    void execute(streams::Batch& batch) override {
        const numeric::NDArray& preds = batch.get(stream("predictions")).array();
        const streams::IndexList& targets = targets_for(batch, preds);
        double total = 0.0;
        for (std::size_t i = 0; i < targets.size(); ++i)
            total += preds.at(i, std::size_t(targets[i]));
        publish_loss(batch, -total / double(targets.size()));
    }

    void seed_gradients(streams::Batch& batch, pipeline::GradTable& grads,
                        double weight) override {
        const numeric::NDArray& preds = batch.get(stream("predictions")).array();
        const streams::IndexList& targets = targets_for(batch, preds);
        numeric::NDArray grad(preds.shape());
        const double scale = -weight / double(targets.size());
        for (std::size_t i = 0; i < targets.size(); ++i)
            grad.at(i, std::size_t(targets[i])) = scale;
        grads.accumulate(stream("predictions"), grad);
    }

private:
    const streams::IndexList& targets_for(const streams::Batch& batch,
                                          const numeric::NDArray& preds) const {
        const streams::IndexList& targets = batch.get(stream("targets")).indices();
        if (targets.size() != preds.dim(0))
            throw StreamError("Component '" + name() + "': " + std::to_string(targets.size()) +
                              " targets for " + std::to_string(preds.dim(0)) + " predictions");
        for (std::size_t i = 0; i < targets.size(); ++i)
            if (std::size_t(targets[i]) >= preds.dim(1))
                throw StreamError("Component '" + name() + "': target " +
                                  std::to_string(targets[i]) + " out of range for " +
                                  std::to_string(preds.dim(1)) + " classes");
        return targets;
    }
};

// Mean squared error over all elements of two equally shaped arrays.
class MseLoss : public LossComponent {
public:
    using LossComponent::LossComponent;

    std::map<std::string, streams::StreamDefinition> input_definitions() const override {
        return {{"predictions", streams::StreamDefinition::numeric(
                                    {streams::Dim::batch(), streams::Dim::any()})},
                {"targets", streams::StreamDefinition::numeric(
                                {streams::Dim::batch(), streams::Dim::any()})}};
    }
    std::map<std::string, streams::StreamDefinition> output_definitions() const override {
        return {{"loss", streams::StreamDefinition::scalar()}};
    }

    void execute(streams::Batch& batch) override {
        const numeric::NDArray& preds = batch.get(stream("predictions")).array();
        const numeric::NDArray& targets = checked_targets(batch, preds);
        double total = 0.0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            const double diff = preds[i] - targets[i];
            total += diff * diff;
        }
        publish_loss(batch, total / double(preds.size()));
    }

    void seed_gradients(streams::Batch& batch, pipeline::GradTable& grads,
                        double weight) override {
        const numeric::NDArray& preds = batch.get(stream("predictions")).array();
        const numeric::NDArray& targets = checked_targets(batch, preds);
        numeric::NDArray grad(preds.shape());
        const double scale = 2.0 * weight / double(preds.size());
        for (std::size_t i = 0; i < preds.size(); ++i) grad[i] = scale * (preds[i] - targets[i]);
        grads.accumulate(stream("predictions"), grad);
    }

private:
    const numeric::NDArray& checked_targets(const streams::Batch& batch,
                                            const numeric::NDArray& preds) const {
        const numeric::NDArray& targets = batch.get(stream("targets")).array();
        if (targets.shape() != preds.shape())
            throw StreamError("Component '" + name() + "': predictions " + preds.shape_text() +
                              " vs targets " + targets.shape_text());
        return targets;
    }
};

}  // namespace ptp::zoo
