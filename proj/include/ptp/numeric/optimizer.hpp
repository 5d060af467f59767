#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include "ptp/config/config_tree.hpp"
#include "ptp/errors.hpp"
#include "ptp/numeric/ndarray.hpp"
#include "ptp/numeric/parameter_store.hpp"

namespace ptp::numeric {

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::sgd;
    double lr = 0.01;
    double momentum = 0.0;     // sgd
    double beta1 = 0.9;        // adam
    double beta2 = 0.999;      // adam
    double epsilon = 1e-8;     // adam

    static OptimizerConfig from_tree(const config::ConfigTree& tree) {
        OptimizerConfig cfg;
        const auto type = tree.get_or<std::string>("type", "sgd");
        if (type == "sgd") cfg.kind = OptimizerKind::sgd;
        else if (type == "adam") cfg.kind = OptimizerKind::adam;
        else throw ConfigError("Unknown optimizer type: " + type);
        cfg.lr = tree.get_or<double>("lr", cfg.lr);
        cfg.momentum = tree.get_or<double>("momentum", cfg.momentum);
        cfg.beta1 = tree.get_or<double>("beta1", cfg.beta1);
        cfg.beta2 = tree.get_or<double>("beta2", cfg.beta2);
        cfg.epsilon = tree.get_or<double>("epsilon", cfg.epsilon);
        if (cfg.lr <= 0.0) throw ConfigError("Optimizer lr must be > 0");
        if (cfg.momentum < 0.0) throw ConfigError("Optimizer momentum must be >= 0");
        if (cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 || cfg.beta2 >= 1.0)
            throw ConfigError("Optimizer betas must lie in [0, 1)");
        if (cfg.epsilon <= 0.0) throw ConfigError("Optimizer epsilon must be > 0");
        return cfg;
    }
};

// One optimizer instance per ParameterStore; state buffers are keyed by
// parameter name and buffer name so they can round-trip through checkpoints.
class Optimizer {
public:
    explicit Optimizer(OptimizerConfig config) : config_(config) {}

    const OptimizerConfig& config() const { return config_; }
    std::int64_t step_count() const { return step_count_; }

    // Applies one update to every parameter in the store from its grad
    // buffer, then zeroes the grads. Frozen stores keep values and state
    // bit-identical; their grads are still zeroed.
    void step(ParameterStore& store) {
        if (store.frozen()) {
            store.zero_grads();
            return;
        }
        if (config_.kind == OptimizerKind::adam) ++step_count_;
        for (const auto& name : store.names()) {
            NDArray& value = store.value(name);
            const NDArray& grad = store.grad(name);
            switch (config_.kind) {
                case OptimizerKind::sgd: {
                    NDArray& velocity = buffer("velocity", name, value.shape());
                    for (std::size_t i = 0; i < value.size(); ++i) {
                        velocity[i] = config_.momentum * velocity[i] + grad[i];
                        value[i] -= config_.lr * velocity[i];
                    }
                    break;
                }
                case OptimizerKind::adam: {
                    NDArray& m = buffer("m", name, value.shape());
                    NDArray& v = buffer("v", name, value.shape());
                    const double bc1 = 1.0 - std::pow(config_.beta1, double(step_count_));
                    const double bc2 = 1.0 - std::pow(config_.beta2, double(step_count_));
                    for (std::size_t i = 0; i < value.size(); ++i) {
                        m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * grad[i];
                        v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
                        const double m_hat = m[i] / bc1;
                        const double v_hat = v[i] / bc2;
                        value[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
                    }
                    break;
                }
            }
        }
        store.zero_grads();
    }

    // State access for checkpointing: buffer name -> parameter name -> array.
    const std::map<std::string, std::map<std::string, NDArray>>& state() const { return state_; }

    void restore(std::int64_t step_count, std::map<std::string, std::map<std::string, NDArray>> state) {
        step_count_ = step_count;
        state_ = std::move(state);
    }

private:
    NDArray& buffer(const std::string& buffer_name, const std::string& param_name,
                    const std::vector<std::size_t>& shape) {
        auto& slot = state_[buffer_name][param_name];
        if (slot.shape() != shape) slot = NDArray(shape);
        return slot;
    }

    OptimizerConfig config_;
    std::int64_t step_count_ = 0;
    std::map<std::string, std::map<std::string, NDArray>> state_;
};

}  // namespace ptp::numeric
