#pragma once

#include <map>
#include <string>

#include "ptp/errors.hpp"
#include "ptp/numeric/ndarray.hpp"
#include "ptp/numeric/ops.hpp"

namespace ptp::pipeline {

// Stream-name keyed gradient accumulator shared by one backward pass.
// Contributions from multiple consumers of the same stream are summed.
class GradTable {
public:
    void accumulate(const std::string& stream, const numeric::NDArray& grad) {
        auto it = grads_.find(stream);
        if (it == grads_.end()) {
            grads_.emplace(stream, grad);
            return;
        }
        if (!it->second.same_shape(grad))
            throw NumericError("Gradient shape mismatch for stream '" + stream + "': " +
                               it->second.shape_text() + " vs " + grad.shape_text());
        numeric::add_inplace(it->second, grad);
    }

    bool has(const std::string& stream) const { return grads_.count(stream) > 0; }

    const numeric::NDArray* find(const std::string& stream) const {
        auto it = grads_.find(stream);
        return it == grads_.end() ? nullptr : &it->second;
    }

    const numeric::NDArray& at(const std::string& stream) const {
        auto it = grads_.find(stream);
        if (it == grads_.end()) throw NumericError("No gradient recorded for stream '" + stream + "'");
        return it->second;
    }

    const std::map<std::string, numeric::NDArray>& entries() const { return grads_; }
    bool empty() const { return grads_.empty(); }

private:
    std::map<std::string, numeric::NDArray> grads_;
};

}  // namespace ptp::pipeline
