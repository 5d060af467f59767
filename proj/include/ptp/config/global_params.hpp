#pragma once

#include <map>
#include <string>

#include "ptp/config/config_tree.hpp"
#include "ptp/errors.hpp"

namespace ptp::config {

// Write-once store of experiment-wide values published by components during
// initialization (e.g. a task publishing `num_classes` for a model to read).
class GlobalParams {
public:
    // Idempotent for equal values; conflicting republication is an error
    // naming both publishers.
    void publish(const std::string& key, Json value, const std::string& publisher) {
        if (key.empty()) throw ConfigError("Global parameter key must be nonempty");
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            entries_.emplace(key, Entry{std::move(value), publisher});
            return;
        }
        if (it->second.value != value) {
            throw ConfigError("Global parameter '" + key + "' published with conflicting values by '" +
                              it->second.publisher + "' (" + it->second.value.dump() + ") and '" +
                              publisher + "' (" + value.dump() + ")");
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    const Json& get(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end())
            throw ConfigError("Global parameter '" + key + "' read before being published");
        return it->second.value;
    }

    template <typename T>
    T get_as(const std::string& key) const {
        try {
            return get(key).get<T>();
        } catch (const Json::exception& e) {
            throw ConfigError("Global parameter '" + key + "' has unexpected type: " + e.what());
        }
    }

    const std::string& publisher(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end())
            throw ConfigError("Global parameter '" + key + "' read before being published");
        return it->second.publisher;
    }

    std::size_t size() const { return entries_.size(); }

private:
    struct Entry {
        Json value;
        std::string publisher;
    };
    std::map<std::string, Entry> entries_;
};

}  // namespace ptp::config
