#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "ptp/config/config_tree.hpp"
#include "ptp/errors.hpp"
#include "ptp/numeric/ndarray.hpp"
#include "ptp/numeric/optimizer.hpp"
#include "ptp/pipeline/pipeline.hpp"
#include "ptp/util/base64.hpp"

namespace ptp::stats {

inline constexpr int kCheckpointFormatVersion = 1;

struct CheckpointStatus {
    std::int64_t episode = 0;
    std::int64_t epoch = 0;
    double best_validation_loss = std::numeric_limits<double>::infinity();
};

inline std::string iso_timestamp_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

// Arrays travel as base64 of explicitly little-endian 64-bit floats, so the
// payload is bit-exact regardless of host byte order.
inline config::Json encode_array(const numeric::NDArray& array) {
    std::vector<std::uint8_t> bytes(array.size() * 8);
    for (std::size_t i = 0; i < array.size(); ++i) {
        const double value = array[i];
        std::uint64_t bits = 0;
        std::memcpy(&bits, &value, 8);
        for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = std::uint8_t(bits >> (8 * b));
    }
    return {{"shape", array.shape()},
            {"data", util::base64_encode(bytes.data(), bytes.size())}};
}

inline numeric::NDArray decode_array(const config::Json& node, const std::string& context) {
    if (!node.is_object() || !node.contains("shape") || !node.contains("data"))
        throw CheckpointError(context + ": array entry needs 'shape' and 'data'");
    const auto shape = node["shape"].get<std::vector<std::size_t>>();
    const auto bytes = util::base64_decode(node["data"].get<std::string>());
    numeric::NDArray array(shape);
    if (bytes.size() != array.size() * 8)
        throw CheckpointError(context + ": payload holds " + std::to_string(bytes.size() / 8) +
                              " values, shape " + array.shape_text() + " needs " +
                              std::to_string(array.size()));
    for (std::size_t i = 0; i < array.size(); ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= std::uint64_t(bytes[i * 8 + b]) << (8 * b);
        double value = 0.0;
        std::memcpy(&value, &bits, 8);
        array[i] = value;
    }
    return array;
}

// Assembles the checkpoint envelope: every component owning parameters is
// saved under its component name, along with per-component optimizer state.
inline config::Json checkpoint_payload(pipeline::Pipeline& pipeline,
                                       const std::map<std::string, numeric::Optimizer>& optimizers,
                                       const CheckpointStatus& status,
                                       const std::string& timestamp = iso_timestamp_now()) {
    config::Json models = config::Json::object();
    for (pipeline::Component* component : pipeline.models()) {
        auto* store = component->parameters();
        if (store == nullptr) continue;
        config::Json params = config::Json::object();
        for (const auto& name : store->names()) params[name] = encode_array(store->value(name));
        models[component->name()] = {{"params", std::move(params)}};
    }

    config::Json optimizer_state = config::Json::object();
    for (const auto& [name, optimizer] : optimizers) {
        config::Json buffers = config::Json::object();
        for (const auto& [buffer_name, slots] : optimizer.state()) {
            config::Json entries = config::Json::object();
            for (const auto& [param_name, array] : slots) entries[param_name] = encode_array(array);
            buffers[buffer_name] = std::move(entries);
        }
        optimizer_state[name] = {{"step_count", optimizer.step_count()},
                                 {"buffers", std::move(buffers)}};
    }

    config::Json status_node = {{"episode", status.episode}, {"epoch", status.epoch}};
    status_node["best_validation_loss"] =
        std::isfinite(status.best_validation_loss) ? config::Json(status.best_validation_loss)
                                                   : config::Json(nullptr);

    return {{"format_version", kCheckpointFormatVersion},
            {"timestamp", timestamp},
            {"status", std::move(status_node)},
            {"models", std::move(models)},
            {"optimizer_state", std::move(optimizer_state)}};
}

// Atomic write: the payload lands in `<path>.tmp` first and is renamed over
// the target, so an interrupted save never clobbers the previous checkpoint.
inline void write_checkpoint(const std::filesystem::path& path, const config::Json& payload) {
    const std::filesystem::path temp = path.string() + ".tmp";
    {
        std::ofstream out(temp, std::ios::out | std::ios::trunc);
        if (!out) throw IoError("Cannot open checkpoint temp file " + temp.string());
        out << payload.dump(2) << '\n';
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(temp);
            throw IoError("Write failed for checkpoint temp file " + temp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(temp, path, ec);
    if (ec) {
        std::filesystem::remove(temp);
        throw IoError("Cannot move checkpoint into place at " + path.string() + ": " +
                      ec.message());
    }
}

inline void save_checkpoint(const std::filesystem::path& path, pipeline::Pipeline& pipeline,
                            const std::map<std::string, numeric::Optimizer>& optimizers,
                            const CheckpointStatus& status,
                            const std::string& timestamp = iso_timestamp_now()) {
    write_checkpoint(path, checkpoint_payload(pipeline, optimizers, status, timestamp));
}

inline config::Json read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("Cannot open checkpoint " + path.string());
    config::Json payload;
    try {
        in >> payload;
    } catch (const std::exception& e) {
        throw CheckpointError("Checkpoint " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!payload.is_object() || !payload.contains("format_version") ||
        !payload["format_version"].is_number_integer())
        throw CheckpointError("Checkpoint " + path.string() + " has no format_version");
    const auto version = payload["format_version"].get<int>();
    if (version != kCheckpointFormatVersion)
        throw CheckpointError("Checkpoint " + path.string() + " has format_version " +
                              std::to_string(version) + ", expected " +
                              std::to_string(kCheckpointFormatVersion));
    return payload;
}

inline CheckpointStatus checkpoint_status(const config::Json& checkpoint) {
    CheckpointStatus status;
    if (!checkpoint.contains("status")) return status;
    const config::Json& node = checkpoint["status"];
    status.episode = node.value("episode", std::int64_t(0));
    status.epoch = node.value("epoch", std::int64_t(0));
    if (node.contains("best_validation_loss") && node["best_validation_loss"].is_number())
        status.best_validation_loss = node["best_validation_loss"].get<double>();
    return status;
}

// The envelope is self-describing: model names are listable without decoding
// any payload.
inline std::vector<std::string> checkpoint_model_names(const config::Json& checkpoint) {
    std::vector<std::string> names;
    if (checkpoint.contains("models"))
        for (auto it = checkpoint["models"].begin(); it != checkpoint["models"].end(); ++it)
            names.push_back(it.key());
    return names;
}

// Replaces the component's parameters with the saved model's. The frozen flag
// is configuration, not checkpoint content, and is never touched here.
inline void load_into_component(const config::Json& checkpoint, const std::string& saved_name,
                                pipeline::Component& component) {
    auto* store = component.parameters();
    if (store == nullptr)
        throw CheckpointError("Component '" + component.name() + "' has no parameters to load");

    if (!checkpoint.contains("models") || !checkpoint["models"].contains(saved_name)) {
        std::string available;
        for (const auto& name : checkpoint_model_names(checkpoint)) {
            if (!available.empty()) available += ", ";
            available += name;
        }
        throw CheckpointError("Checkpoint has no model '" + saved_name + "'; available: [" +
                              available + "]");
    }
    const config::Json& params = checkpoint["models"][saved_name]["params"];

    for (const auto& name : store->names())
        if (!params.contains(name))
            throw CheckpointError("Saved model '" + saved_name + "' lacks parameter '" + name +
                                  "' required by component '" + component.name() + "'");
    for (auto it = params.begin(); it != params.end(); ++it)
        if (!store->has(it.key()))
            throw CheckpointError("Component '" + component.name() + "' has no parameter '" +
                                  it.key() + "' stored in model '" + saved_name + "'");

    for (auto it = params.begin(); it != params.end(); ++it)
        store->replace(it.key(), decode_array(it.value(), "Model '" + saved_name + "' parameter '" +
                                                              it.key() + "'"));
}

// Restores an optimizer's buffers for one saved model; absent state is not an
// error (fresh optimizers are valid after a parameter-only load).
inline bool load_optimizer_state(const config::Json& checkpoint, const std::string& saved_name,
                                 numeric::Optimizer& optimizer) {
    if (!checkpoint.contains("optimizer_state") ||
        !checkpoint["optimizer_state"].contains(saved_name))
        return false;
    const config::Json& node = checkpoint["optimizer_state"][saved_name];
    std::map<std::string, std::map<std::string, numeric::NDArray>> state;
    if (node.contains("buffers")) {
        for (auto buffer = node["buffers"].begin(); buffer != node["buffers"].end(); ++buffer)
            for (auto slot = buffer.value().begin(); slot != buffer.value().end(); ++slot)
                state[buffer.key()][slot.key()] = decode_array(
                    slot.value(), "Optimizer state '" + saved_name + "." + buffer.key() + "." +
                                      slot.key() + "'");
    }
    optimizer.restore(node.value("step_count", std::int64_t(0)), std::move(state));
    return true;
}

// Applies every component's `load:` spec; called once after initialization.
inline void apply_load_specs(pipeline::Pipeline& pipeline,
                             const std::filesystem::path& base_dir = ".") {
    for (pipeline::Component* component : pipeline.all_components()) {
        const auto& spec = component->config().load_from;
        if (!spec.has_value()) continue;
        std::filesystem::path path = spec->checkpoint;
        if (path.is_relative()) path = base_dir / path;
        const config::Json checkpoint = read_checkpoint(path);
        load_into_component(checkpoint, spec->model, *component);
    }
}

// Strict-improvement best tracking: saves only when the loss beats the best
// seen so far.
inline bool track_best(CheckpointStatus& status, double validation_loss,
                       const std::function<void()>& save_best) {
    if (!std::isfinite(validation_loss))
        throw NumericError("Validation loss is non-finite: " + std::to_string(validation_loss));
    if (validation_loss < status.best_validation_loss) {
        status.best_validation_loss = validation_loss;
        if (save_best) save_best();
        return true;
    }
    return false;
}

}  // namespace ptp::stats
