#pragma once

#include <map>
#include <string>
#include <vector>

#include "ptp/errors.hpp"
#include "ptp/streams/value.hpp"

namespace ptp::streams {

// Named streams plus the batch size and originating dataset indices.
// Components only ever add streams; overwriting an existing name is a
// collision error.
class Batch {
public:
    Batch(std::size_t batch_size, std::vector<std::size_t> sample_indices)
        : batch_size_(batch_size), sample_indices_(std::move(sample_indices)) {
        if (batch_size_ == 0) throw StreamError("Batch size must be positive");
    }

    explicit Batch(std::size_t batch_size) : Batch(batch_size, default_indices(batch_size)) {}

    std::size_t batch_size() const { return batch_size_; }
    const std::vector<std::size_t>& sample_indices() const { return sample_indices_; }

    // Size conformance (array first dim == batch size, list lengths) is the
    // business of validate_batch, which reports violations instead of
    // aborting; add only rejects collisions.
    void add(const std::string& name, Value value) {
        if (streams_.count(name) > 0)
            throw StreamError("Stream collision: '" + name + "' already present in batch");
        streams_.emplace(name, std::move(value));
    }

    bool has(const std::string& name) const { return streams_.count(name) > 0; }

    const Value& get(const std::string& name) const {
        auto it = streams_.find(name);
        if (it == streams_.end())
            throw StreamError("Missing stream '" + name + "' in batch");
        return it->second;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(streams_.size());
        for (const auto& [name, value] : streams_) out.push_back(name);
        return out;
    }

    std::size_t stream_count() const { return streams_.size(); }

private:
    static std::vector<std::size_t> default_indices(std::size_t n) {
        std::vector<std::size_t> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = i;
        return out;
    }

    std::size_t batch_size_;
    std::vector<std::size_t> sample_indices_;
    std::map<std::string, Value> streams_;
};

}  // namespace ptp::streams
