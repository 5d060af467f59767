#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ptp/config/config_tree.hpp"
#include "ptp/config/global_params.hpp"
#include "ptp/errors.hpp"
#include "ptp/numeric/rng.hpp"
#include "ptp/pipeline/component.hpp"
#include "ptp/pipeline/factory.hpp"
#include "ptp/pipeline/grad_table.hpp"
#include "ptp/streams/stream_definition.hpp"

namespace ptp::pipeline {

enum class Section { training, validation, test };

inline const char* section_name(Section s) {
    switch (s) {
        case Section::training: return "training";
        case Section::validation: return "validation";
        case Section::test: return "test";
    }
    return "?";
}

inline Section parse_section(const std::string& name) {
    if (name == "training") return Section::training;
    if (name == "validation") return Section::validation;
    if (name == "test") return Section::test;
    throw ConfigError("Unknown section '" + name + "'");
}

inline const std::vector<Section>& all_sections() {
    static const std::vector<Section> sections{Section::training, Section::validation,
                                               Section::test};
    return sections;
}

struct Diagnostic {
    enum class Kind { missing_stream, incompatible_definition, collision };

    Kind kind;
    std::string component;
    std::string stream;
    std::string message;
};

inline std::string format_diagnostics(const std::vector<Diagnostic>& diagnostics) {
    std::string out;
    for (const auto& d : diagnostics) {
        if (!out.empty()) out += "\n";
        out += d.message;
    }
    return out;
}

struct PipelineOptions {
    std::uint64_t seed = 1337;
    bool validate_batches = false;
};

namespace detail {

inline std::string priority_text(double priority) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", priority);
    return buf;
}

}  // namespace detail

// All components of an experiment, instantiated once and shared across
// sections. A section view is the ascending-priority execution order minus
// the components disabled for that section; each section has its own task,
// which seeds the handshake but is never executed by forward.
class Pipeline {
public:
    static Pipeline build(const config::ConfigTree& config, const ComponentFactory& factory,
                          PipelineOptions options = {}) {
        Pipeline pipeline;
        pipeline.options_ = options;

        const config::Json* pipeline_node = config.find("pipeline");
        if (pipeline_node == nullptr || !pipeline_node->is_object())
            throw ConfigError("Configuration has no 'pipeline' map");

        for (auto it = pipeline_node->begin(); it != pipeline_node->end(); ++it) {
            auto component = pipeline.instantiate(config::ConfigTree(it.value()), factory,
                                                  it.key(), /*require_priority=*/true);
            if (component->role() == ComponentRole::task)
                throw ConfigError("Component '" + it.key() +
                                  "': task types cannot appear inside 'pipeline'");
            pipeline.components_.push_back(std::move(component));
        }

        std::stable_sort(pipeline.components_.begin(), pipeline.components_.end(),
                         [](const auto& a, const auto& b) { return a->priority() < b->priority(); });
        for (std::size_t i = 1; i < pipeline.components_.size(); ++i) {
            const auto& prev = *pipeline.components_[i - 1];
            const auto& cur = *pipeline.components_[i];
            if (prev.priority() == cur.priority())
                throw ConfigError("Components '" + prev.name() + "' and '" + cur.name() +
                                  "' share priority " + detail::priority_text(cur.priority()));
        }

        for (Section section : all_sections()) {
            const std::string key = std::string(section_name(section)) + ".task";
            const config::Json* task_node = config.find(key);
            if (task_node == nullptr || task_node->is_null()) continue;
            if (!task_node->is_object())
                throw ConfigError("Section '" + key + "' must be a map");
            auto component = pipeline.instantiate(config::ConfigTree(*task_node), factory, key,
                                                  /*require_priority=*/false);
            auto* task = dynamic_cast<TaskComponent*>(component.get());
            if (task == nullptr)
                throw ConfigError("Component '" + key + "': type '" +
                                  component->config().type_id + "' is not a task");
            component.release();
            pipeline.tasks_.emplace(section, std::unique_ptr<TaskComponent>(task));
        }

        return pipeline;
    }

    bool has_section(Section section) const { return tasks_.count(section) > 0; }

    TaskComponent& task(Section section) {
        auto it = tasks_.find(section);
        if (it == tasks_.end())
            throw ConfigError("Configuration has no '" + std::string(section_name(section)) +
                              ".task' section");
        return *it->second;
    }

    const std::vector<std::unique_ptr<Component>>& components() const { return components_; }

    Component* component(const std::string& name) {
        for (const auto& c : components_)
            if (c->name() == name) return c.get();
        return nullptr;
    }

    // Ascending-priority execution order for a section.
    std::vector<Component*> execution_order(Section section) const {
        std::vector<Component*> order;
        for (const auto& c : components_)
            if (!c->config().disabled_for(section_name(section))) order.push_back(c.get());
        return order;
    }

    std::vector<Component*> all_components() const {
        std::vector<Component*> out;
        for (const auto& c : components_) out.push_back(c.get());
        return out;
    }

    // Components owning trainable parameters, in priority order.
    std::vector<Component*> models() const {
        std::vector<Component*> out;
        for (const auto& c : components_)
            if (c->parameters() != nullptr) out.push_back(c.get());
        return out;
    }

    std::vector<Component*> losses(Section section) const {
        std::vector<Component*> out;
        for (Component* c : execution_order(section))
            if (c->role() == ComponentRole::loss) out.push_back(c);
        return out;
    }

    // Tasks first (training, validation, test), then components ascending by
    // priority, so published globals are visible to later consumers. Freeze
    // flags are applied after each component has created its parameters.
    void initialize(config::GlobalParams& globals) {
        for (Section section : all_sections()) {
            auto it = tasks_.find(section);
            if (it != tasks_.end()) it->second->initialize(globals);
        }
        for (const auto& c : components_) {
            c->initialize(globals);
            if (auto* params = c->parameters()) params->set_frozen(c->config().frozen);
        }
    }

    void set_mode(Mode mode) {
        for (auto& [section, task] : tasks_) task->set_mode(mode);
        for (const auto& c : components_) c->set_mode(mode);
    }

    // Walks the section ascending by priority from the task's remapped output
    // definitions and collects every diagnostic.
    std::vector<Diagnostic> handshake(Section section) {
        struct Producer {
            streams::StreamDefinition definition;
            std::string component;
        };
        std::vector<Diagnostic> diagnostics;
        std::map<std::string, Producer> table;

        TaskComponent& source = task(section);
        for (auto& [name, def] : source.remapped_outputs())
            table.emplace(name, Producer{def, source.name()});

        for (Component* c : execution_order(section)) {
            for (const auto& [name, required] : c->remapped_inputs()) {
                auto it = table.find(name);
                if (it == table.end()) {
                    diagnostics.push_back(
                        {Diagnostic::Kind::missing_stream, c->name(), name,
                         "Component '" + c->name() + "' (priority " +
                             detail::priority_text(c->priority()) + "): input stream '" + name +
                             "' is not produced by the task or any earlier component"});
                } else if (!streams::definition_satisfies(it->second.definition, required)) {
                    diagnostics.push_back(
                        {Diagnostic::Kind::incompatible_definition, c->name(), name,
                         "Component '" + c->name() + "': input stream '" + name + "' produced by '" +
                             it->second.component + "' as " + it->second.definition.text() +
                             " does not satisfy required " + required.text()});
                }
            }
            for (auto& [name, produced] : c->remapped_outputs()) {
                auto it = table.find(name);
                if (it != table.end()) {
                    diagnostics.push_back({Diagnostic::Kind::collision, c->name(), name,
                                           "Stream '" + name + "' produced by both '" +
                                               it->second.component + "' and '" + c->name() + "'"});
                } else {
                    table.emplace(name, Producer{produced, c->name()});
                }
            }
        }
        return diagnostics;
    }

    // Executes the section's components ascending by priority. The batch
    // gains the produced streams; existing streams are never overwritten
    // (stream collisions throw).
    void forward(Section section, streams::Batch& batch) {
        for (Component* c : execution_order(section)) {
            const std::string where = "Component '" + c->name() + "' (priority " +
                                      detail::priority_text(c->priority()) + "): ";
            try {
                c->execute(batch);
            } catch (const StreamError& e) {
                throw StreamError(where + e.what());
            } catch (const NumericError& e) {
                throw NumericError(where + e.what());
            } catch (const ConfigError& e) {
                throw ConfigError(where + e.what());
            } catch (const std::exception& e) {
                throw NumericError(where + e.what());
            }
            if (options_.validate_batches) {
                const auto violations = streams::validate_batch(batch, c->remapped_outputs());
                if (!violations.empty()) {
                    std::string text = where + "produced non-conforming streams:";
                    for (const auto& v : violations) text += "\n  " + v.stream + ": " + v.message;
                    throw StreamError(text);
                }
            }
        }
    }

    // Seeds gradients from every loss (scaled by its weight), then visits
    // differentiable components descending by priority. Components whose
    // outputs received no gradient are skipped.
    GradTable backward(Section section, streams::Batch& batch,
                       const std::map<std::string, double>& loss_weights = {}) {
        GradTable table;
        const auto order = execution_order(section);

        bool seeded = false;
        for (Component* c : order) {
            if (c->role() != ComponentRole::loss) continue;
            const std::string& stream_name = c->stream(c->loss_stream());
            const double value = batch.get(stream_name).scalar();
            if (!std::isfinite(value))
                throw NumericError("Loss '" + c->name() + "' is non-finite: " +
                                   std::to_string(value));
            auto it = loss_weights.find(c->name());
            const double weight = it != loss_weights.end()
                                      ? it->second
                                      : c->config().params.get_or<double>("loss_weight", 1.0);
            c->seed_gradients(batch, table, weight);
            seeded = true;
        }
        if (!seeded) throw ConfigError("Backward requires at least one loss in the pipeline");

        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            Component* c = *it;
            if (c->role() == ComponentRole::loss) continue;
            if (!c->differentiable()) continue;
            bool has_output_grad = false;
            for (const auto& [name, def] : c->remapped_outputs()) {
                if (table.has(name)) {
                    has_output_grad = true;
                    break;
                }
            }
            if (!has_output_grad) continue;
            c->backward(batch, table);
        }
        return table;
    }

    const PipelineOptions& options() const { return options_; }

private:
    Pipeline() = default;

    std::unique_ptr<Component> instantiate(const config::ConfigTree& section_tree,
                                           const ComponentFactory& factory,
                                           const std::string& name, bool require_priority) {
        const config::Json* type_node = section_tree.find("type");
        if (type_node == nullptr || !type_node->is_string())
            throw ConfigError("Component '" + name + "': missing 'type'");
        const auto type_id = type_node->get<std::string>();
        if (!factory.has(type_id))
            throw ConfigError("Unknown component type '" + type_id + "' for component '" + name +
                              "'");
        auto resolved = config::resolve_component_config(factory.defaults(type_id), section_tree,
                                                         name, require_priority);
        for (const auto& section : resolved.disabled_sections) parse_section(section);
        resolved.seed = numeric::derive_seed(options_.seed, name);
        return factory.build(std::move(resolved));
    }

    PipelineOptions options_;
    std::vector<std::unique_ptr<Component>> components_;
    std::map<Section, std::unique_ptr<TaskComponent>> tasks_;
};

}  // namespace ptp::pipeline
