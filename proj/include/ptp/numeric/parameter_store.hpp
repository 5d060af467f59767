#pragma once

#include <map>
#include <string>
#include <vector>

#include "ptp/errors.hpp"
#include "ptp/numeric/ndarray.hpp"
#include "ptp/numeric/ops.hpp"

namespace ptp::numeric {

// Named parameter arrays with gradient buffers and a frozen flag. A frozen
// store never accumulates parameter gradients and optimizer steps leave its
// values bit-identical; stream gradients still flow through the owner.
class ParameterStore {
public:
    void add(const std::string& name, NDArray initial) {
        if (entries_.count(name) > 0)
            throw NumericError("ParameterStore: duplicate parameter '" + name + "'");
        NDArray grad(initial.shape());
        entries_.emplace(name, Param{std::move(initial), std::move(grad)});
    }

    bool has(const std::string& name) const { return entries_.count(name) > 0; }

    NDArray& value(const std::string& name) { return entry(name).value; }
    const NDArray& value(const std::string& name) const { return entry(name).value; }
    const NDArray& grad(const std::string& name) const { return entry(name).grad; }
    NDArray& grad_mutable(const std::string& name) { return entry(name).grad; }

    void accumulate_grad(const std::string& name, const NDArray& delta) {
        if (frozen_) return;
        auto& param = entry(name);
        if (!param.grad.same_shape(delta))
            throw NumericError("ParameterStore: gradient shape " + delta.shape_text() +
                               " does not match parameter '" + name + "' " +
                               param.value.shape_text());
        add_inplace(param.grad, delta);
    }

    void zero_grads() {
        for (auto& [name, param] : entries_) param.grad.fill(0.0);
    }

    // Replaces a parameter value; shape must match (used by checkpoint load).
    void replace(const std::string& name, NDArray value) {
        auto& param = entry(name);
        if (!param.value.same_shape(value))
            throw CheckpointError("Parameter '" + name + "': stored shape " + value.shape_text() +
                                  " does not match component shape " + param.value.shape_text());
        param.value = std::move(value);
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(entries_.size());
        for (const auto& [name, param] : entries_) out.push_back(name);
        return out;
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& [name, param] : entries_) n += param.value.size();
        return n;
    }

    bool frozen() const { return frozen_; }
    void set_frozen(bool frozen) { frozen_ = frozen; }

private:
    struct Param {
        NDArray value;
        NDArray grad;
    };

    Param& entry(const std::string& name) {
        auto it = entries_.find(name);
        if (it == entries_.end())
            throw NumericError("ParameterStore: unknown parameter '" + name + "'");
        return it->second;
    }
    const Param& entry(const std::string& name) const {
        auto it = entries_.find(name);
        if (it == entries_.end())
            throw NumericError("ParameterStore: unknown parameter '" + name + "'");
        return it->second;
    }

    std::map<std::string, Param> entries_;
    bool frozen_ = false;
};

}  // namespace ptp::numeric
