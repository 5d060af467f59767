#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ptp/config/config_tree.hpp"
#include "ptp/errors.hpp"
#include "ptp/util/logger.hpp"

namespace ptp::config {

// Reserved keys every component section may carry in addition to its own
// parameters.
inline const std::set<std::string>& reserved_component_keys() {
    static const std::set<std::string> keys{"type",   "priority", "streams", "globals",
                                            "freeze", "load",     "disable"};
    return keys;
}

struct LoadSpec {
    std::string checkpoint;  // checkpoint file path
    std::string model;       // saved-component name inside the checkpoint
};

struct ComponentConfig {
    std::string name;
    std::string type_id;
    double priority = 0.0;
    bool has_priority = false;
    std::map<std::string, std::string> stream_remap;  // default stream name -> actual
    std::map<std::string, std::string> global_remap;  // default global key -> actual
    bool frozen = false;
    std::optional<LoadSpec> load_from;
    std::vector<std::string> disabled_sections;
    std::uint64_t seed = 0;  // per-component seed, derived at build time
    ConfigTree params;       // type defaults merged with the experiment section

    // Resolves a default stream name through the remap table.
    const std::string& stream(const std::string& default_name) const {
        auto it = stream_remap.find(default_name);
        return it == stream_remap.end() ? default_name : it->second;
    }

    const std::string& global(const std::string& default_key) const {
        auto it = global_remap.find(default_key);
        return it == global_remap.end() ? default_key : it->second;
    }

    bool disabled_for(const std::string& section) const {
        for (const auto& s : disabled_sections)
            if (s == section) return true;
        return false;
    }
};

namespace detail {

inline std::map<std::string, std::string> read_remap(const ConfigTree& params,
                                                     const std::string& key,
                                                     const std::string& component) {
    std::map<std::string, std::string> remap;
    const Json* node = params.find(key);
    if (node == nullptr || node->is_null()) return remap;
    if (!node->is_object())
        throw ConfigError("Component '" + component + "': '" + key + "' must be a map");
    for (auto it = node->begin(); it != node->end(); ++it) {
        if (!it.value().is_string() || it.value().get<std::string>().empty())
            throw ConfigError("Component '" + component + "': remap '" + key + "." + it.key() +
                              "' must be a nonempty string");
        remap[it.key()] = it.value().get<std::string>();
    }
    return remap;
}

inline std::vector<std::string> read_disable(const ConfigTree& params, const std::string& component) {
    std::vector<std::string> sections;
    const Json* node = params.find("disable");
    if (node == nullptr || node->is_null()) return sections;
    if (node->is_string()) {
        sections.push_back(node->get<std::string>());
    } else if (node->is_array()) {
        for (const auto& item : *node) {
            if (!item.is_string())
                throw ConfigError("Component '" + component + "': 'disable' entries must be strings");
            sections.push_back(item.get<std::string>());
        }
    } else {
        throw ConfigError("Component '" + component + "': 'disable' must be a string or list");
    }
    return sections;
}

inline std::optional<LoadSpec> read_load(const ConfigTree& params, const std::string& component) {
    const Json* node = params.find("load");
    if (node == nullptr || node->is_null()) return std::nullopt;
    LoadSpec spec;
    if (node->is_string()) {
        spec.checkpoint = node->get<std::string>();
        spec.model = component;  // defaults to the component's own name
        return spec;
    }
    if (node->is_object()) {
        if (!node->contains("checkpoint") || !(*node)["checkpoint"].is_string())
            throw ConfigError("Component '" + component + "': 'load.checkpoint' path is required");
        spec.checkpoint = (*node)["checkpoint"].get<std::string>();
        spec.model = node->contains("model") ? (*node)["model"].get<std::string>() : component;
        return spec;
    }
    throw ConfigError("Component '" + component +
                      "': 'load' must be a checkpoint path or a {checkpoint, model} map");
}

}  // namespace detail

// Merges a component type's default configuration with its experiment
// section and extracts the reserved keys into structured fields.
inline ComponentConfig resolve_component_config(const ConfigTree& type_defaults,
                                                const ConfigTree& experiment_section,
                                                const std::string& name,
                                                bool require_priority = false) {
    ComponentConfig config;
    config.name = name;

    const Json* type_node = experiment_section.find("type");
    if (type_node == nullptr || !type_node->is_string())
        throw ConfigError("Component '" + name + "': missing 'type'");
    config.type_id = type_node->get<std::string>();

    // Unknown keys are permitted for forward compatibility, but warned about.
    for (auto it = experiment_section.root().begin(); it != experiment_section.root().end(); ++it) {
        if (reserved_component_keys().count(it.key()) > 0) continue;
        if (!type_defaults.has(it.key()))
            util::logger().warning("Component '" + name + "': ignoring unknown key '" + it.key() + "'");
    }

    config.params = merge(type_defaults, experiment_section);

    const Json* priority = config.params.find("priority");
    if (priority != nullptr && !priority->is_null()) {
        if (!priority->is_number())
            throw ConfigError("Component '" + name + "': 'priority' must be a number");
        config.priority = priority->get<double>();
        config.has_priority = true;
        if (!std::isfinite(config.priority))
            throw ConfigError("Component '" + name + "': 'priority' must be finite");
    }
    if (require_priority && !config.has_priority)
        throw ConfigError("Component '" + name + "': pipeline components require a 'priority'");

    config.stream_remap = detail::read_remap(config.params, "streams", name);
    config.global_remap = detail::read_remap(config.params, "globals", name);
    config.frozen = config.params.get_or<bool>("freeze", false);
    config.load_from = detail::read_load(config.params, name);
    config.disabled_sections = detail::read_disable(config.params, name);
    return config;
}

}  // namespace ptp::config
