#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ptp/config/component_config.hpp"
#include "ptp/config/config_tree.hpp"
#include "ptp/errors.hpp"
#include "ptp/pipeline/component.hpp"

namespace ptp::pipeline {

// Registry of component types: each type carries its default configuration
// and a constructor taking the resolved component config.
class ComponentFactory {
public:
    using Builder = std::function<std::unique_ptr<Component>(config::ComponentConfig)>;

    void register_type(const std::string& type_id, config::ConfigTree defaults, Builder builder) {
        if (types_.count(type_id) > 0)
            throw ConfigError("Component type '" + type_id + "' registered twice");
        types_.emplace(type_id, Entry{std::move(defaults), std::move(builder)});
    }

    bool has(const std::string& type_id) const { return types_.count(type_id) > 0; }

    const config::ConfigTree& defaults(const std::string& type_id) const {
        return entry(type_id).defaults;
    }

    std::unique_ptr<Component> build(config::ComponentConfig config) const {
        return entry(config.type_id).builder(std::move(config));
    }

    std::vector<std::string> type_ids() const {
        std::vector<std::string> out;
        for (const auto& [id, e] : types_) out.push_back(id);
        return out;
    }

private:
    struct Entry {
        config::ConfigTree defaults;
        Builder builder;
    };

    const Entry& entry(const std::string& type_id) const {
        auto it = types_.find(type_id);
        if (it == types_.end()) throw ConfigError("Unknown component type '" + type_id + "'");
        return it->second;
    }

    std::map<std::string, Entry> types_;
};

}  // namespace ptp::pipeline
