#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptp/errors.hpp"
#include "ptp/util/string.hpp"

namespace ptp::config {

using Json = nlohmann::json;

// Hierarchical key->value document addressed by dotted paths
// (e.g. "training.task.type"). Keys are kept sorted, so serialization is
// deterministic regardless of the textual order in the source files.
class ConfigTree {
public:
    ConfigTree() : root_(Json::object()) {}
    explicit ConfigTree(Json root) : root_(std::move(root)) {
        if (!root_.is_object()) throw ConfigError("ConfigTree root must be a map");
    }

    const Json& root() const { return root_; }
    Json& root() { return root_; }

    bool empty() const { return root_.empty(); }

    // Returns the node at the dotted path, or nullptr when absent.
    const Json* find(std::string_view path) const {
        const Json* node = &root_;
        for (const auto& key : util::split(path, '.')) {
            if (!node->is_object()) return nullptr;
            auto it = node->find(key);
            if (it == node->end()) return nullptr;
            node = &*it;
        }
        return node;
    }

    bool has(std::string_view path) const { return find(path) != nullptr; }

    template <typename T>
    T get(std::string_view path) const {
        const Json* node = find(path);
        if (node == nullptr)
            throw ConfigError("Configuration key not found: " + std::string{path});
        try {
            return node->get<T>();
        } catch (const Json::exception& e) {
            throw ConfigError("Configuration key '" + std::string{path} +
                              "' has unexpected type: " + e.what());
        }
    }

    template <typename T>
    T get_or(std::string_view path, T fallback) const {
        const Json* node = find(path);
        if (node == nullptr || node->is_null()) return fallback;
        try {
            return node->get<T>();
        } catch (const Json::exception& e) {
            throw ConfigError("Configuration key '" + std::string{path} +
                              "' has unexpected type: " + e.what());
        }
    }

    // Subsection as its own tree; missing paths yield an empty tree.
    ConfigTree subtree(std::string_view path) const {
        const Json* node = find(path);
        if (node == nullptr || node->is_null()) return ConfigTree{};
        if (!node->is_object())
            throw ConfigError("Configuration key '" + std::string{path} + "' is not a map");
        return ConfigTree{*node};
    }

    // Writes a value at the dotted path, creating intermediate maps. Existing
    // non-map intermediates are replaced by maps (the override wins).
    void set(std::string_view path, Json value) {
        auto keys = util::split(path, '.');
        if (keys.empty()) throw ConfigError("Empty configuration path");
        Json* node = &root_;
        for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
            if (!node->is_object()) *node = Json::object();
            node = &(*node)[keys[i]];
            if (node->is_null()) *node = Json::object();
        }
        if (!node->is_object()) *node = Json::object();
        (*node)[keys.back()] = std::move(value);
    }

    void erase(const std::string& key) { root_.erase(key); }

    // Canonical serialized form; byte-identical for equal trees.
    std::string dump() const { return root_.dump(2); }

    friend bool operator==(const ConfigTree& a, const ConfigTree& b) {
        return a.root_ == b.root_;
    }

private:
    Json root_;
};

// Deep merge: nested maps merge recursively, scalars and lists in `override`
// replace those in `base`, keys present on one side only are kept.
inline Json merge_json(const Json& base, const Json& override_value) {
    if (!base.is_object() || !override_value.is_object()) return override_value;
    Json out = base;
    for (auto it = override_value.begin(); it != override_value.end(); ++it) {
        auto found = out.find(it.key());
        if (found != out.end()) {
            *found = merge_json(*found, it.value());
        } else {
            out[it.key()] = it.value();
        }
    }
    return out;
}

inline ConfigTree merge(const ConfigTree& base, const ConfigTree& override_tree) {
    return ConfigTree{merge_json(base.root(), override_tree.root())};
}

}  // namespace ptp::config
