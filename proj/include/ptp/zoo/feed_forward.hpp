#pragma once

#include <string>
#include <vector>

#include "ptp/config/global_params.hpp"
#include "ptp/numeric/ndarray.hpp"
#include "ptp/numeric/ops.hpp"
#include "ptp/numeric/parameter_store.hpp"
#include "ptp/pipeline/component.hpp"

namespace ptp::zoo {

// Fully connected stack with a shared hidden activation, inverted dropout
// between hidden layers, and a configurable final activation (log_softmax by
// default, so predictions are row-wise log-probabilities).
class FeedForwardNetwork : public pipeline::Component {
public:
    using Component::Component;

    pipeline::ComponentRole role() const override { return pipeline::ComponentRole::model; }
    bool differentiable() const override { return true; }
    numeric::ParameterStore* parameters() override { return &store_; }

    void initialize(config::GlobalParams& globals) override {
        input_size_ = resolve_size(globals, "input_size", "input_size");
        prediction_size_ = resolve_size(globals, "prediction_size", "num_classes");

        hidden_activation_ =
            numeric::parse_activation(config_.params.get_or<std::string>("activation", "relu"));
        final_activation_ = numeric::parse_activation(
            config_.params.get_or<std::string>("final_activation", "log_softmax"));
        dropout_ = config_.params.get_or<double>("dropout", 0.0);
        if (dropout_ < 0.0 || dropout_ >= 1.0)
            throw ConfigError("Component '" + name() + "': dropout must lie in [0, 1)");

        sizes_ = {input_size_};
        const config::Json* hidden = config_.params.find("hidden_sizes");
        if (hidden != nullptr && !hidden->is_null()) {
            if (!hidden->is_array())
                throw ConfigError("Component '" + name() + "': 'hidden_sizes' must be a list");
            for (const auto& h : *hidden) {
                const auto size = h.get<std::int64_t>();
                if (size <= 0)
                    throw ConfigError("Component '" + name() + "': hidden sizes must be positive");
                sizes_.push_back(std::size_t(size));
            }
        }
        sizes_.push_back(prediction_size_);

        for (std::size_t layer = 0; layer + 1 < sizes_.size(); ++layer) {
            const std::size_t fan_in = sizes_[layer], fan_out = sizes_[layer + 1];
            const double bound = 1.0 / std::sqrt(double(fan_in));
            numeric::NDArray w({fan_in, fan_out});
            for (auto& v : w.values()) v = rng().uniform(-bound, bound);
            numeric::NDArray b({fan_out});
            for (auto& v : b.values()) v = rng().uniform(-bound, bound);
            store_.add(weight_name(layer), std::move(w));
            store_.add(bias_name(layer), std::move(b));
        }
    }

    std::map<std::string, streams::StreamDefinition> input_definitions() const override {
        return {{"inputs", streams::StreamDefinition::numeric(
                               {streams::Dim::batch(), streams::Dim::fixed(input_size_)})}};
    }
    std::map<std::string, streams::StreamDefinition> output_definitions() const override {
        return {{"predictions", streams::StreamDefinition::numeric(
                                    {streams::Dim::batch(), streams::Dim::fixed(prediction_size_)})}};
    }

    void execute(streams::Batch& batch) override {
        const numeric::NDArray& x = batch.get(stream("inputs")).array();
        const std::size_t layers = layer_count();
        state_.inputs.assign(layers, numeric::NDArray());
        state_.pre.assign(layers, numeric::NDArray());
        state_.outputs.assign(layers, numeric::NDArray());
        state_.masks.assign(layers, {});

        numeric::NDArray h = x;
        for (std::size_t layer = 0; layer < layers; ++layer) {
            state_.inputs[layer] = h;
            numeric::NDArray z = numeric::matmul(h, store_.value(weight_name(layer)));
            add_bias(z, store_.value(bias_name(layer)));
            const bool last = layer + 1 == layers;
            numeric::NDArray a = numeric::activation(z, last ? final_activation_ : hidden_activation_);
            state_.outputs[layer] = a;
            if (!last && dropout_ > 0.0) {
                auto dropped = numeric::dropout(a, dropout_, training(), rng());
                state_.masks[layer] = std::move(dropped.mask);
                h = std::move(dropped.output);
            } else {
                h = std::move(a);
            }
            state_.pre[layer] = std::move(z);
        }
        batch.add(stream("predictions"), streams::Value{std::move(h)});
    }

    void backward(streams::Batch&, pipeline::GradTable& grads) override {
        const numeric::NDArray* seed = grads.find(stream("predictions"));
        if (seed == nullptr) return;

        numeric::NDArray g = *seed;
        for (std::size_t layer = layer_count(); layer-- > 0;) {
            const bool last = layer + 1 == layer_count();
            if (!last && !state_.masks[layer].empty())
                g = numeric::dropout_backward(state_.masks[layer], g);
            g = numeric::activation_backward(last ? final_activation_ : hidden_activation_,
                                             state_.pre[layer], state_.outputs[layer], g);

            const numeric::NDArray& input = state_.inputs[layer];
            store_.accumulate_grad(weight_name(layer), numeric::matmul_grad_b(input, g));
            store_.accumulate_grad(bias_name(layer), column_sums(g));
            g = numeric::matmul_grad_a(g, store_.value(weight_name(layer)));
        }
        grads.accumulate(stream("inputs"), g);
    }

private:
    struct ForwardState {
        std::vector<numeric::NDArray> inputs;   // per layer: activation fed in
        std::vector<numeric::NDArray> pre;      // per layer: affine output
        std::vector<numeric::NDArray> outputs;  // per layer: post-activation
        std::vector<std::vector<double>> masks;
    };

    std::size_t resolve_size(config::GlobalParams& globals, const std::string& param,
                             const std::string& global_key) {
        const config::Json* node = config_.params.find(param);
        if (node != nullptr && node->is_number()) {
            const auto value = node->get<std::int64_t>();
            if (value <= 0)
                throw ConfigError("Component '" + name() + "': '" + param + "' must be positive");
            return std::size_t(value);
        }
        const std::string& key = global(global_key);
        if (!globals.has(key))
            throw ConfigError("Component '" + name() + "': cannot resolve '" + param +
                              "', set the parameter or publish global '" + key + "'");
        return globals.get_as<std::size_t>(key);
    }

    static std::string weight_name(std::size_t layer) {
        return "layers." + std::to_string(layer) + ".weight";
    }
    static std::string bias_name(std::size_t layer) {
        return "layers." + std::to_string(layer) + ".bias";
    }

    std::size_t layer_count() const { return sizes_.size() - 1; }

    static void add_bias(numeric::NDArray& z, const numeric::NDArray& bias) {
        for (std::size_t i = 0; i < z.dim(0); ++i)
            for (std::size_t j = 0; j < z.dim(1); ++j) z.at(i, j) += bias[j];
    }

    static numeric::NDArray column_sums(const numeric::NDArray& g) {
        numeric::NDArray out({g.dim(1)});
        for (std::size_t i = 0; i < g.dim(0); ++i)
            for (std::size_t j = 0; j < g.dim(1); ++j) out[j] += g.at(i, j);
        return out;
    }

    numeric::ParameterStore store_;
    std::vector<std::size_t> sizes_;
    std::size_t input_size_ = 0, prediction_size_ = 0;
    numeric::Activation hidden_activation_ = numeric::Activation::relu;
    numeric::Activation final_activation_ = numeric::Activation::log_softmax;
    double dropout_ = 0.0;
    ForwardState state_;
};

}  // namespace ptp::zoo
