#pragma once

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ptp/config/config_tree.hpp"
#include "ptp/errors.hpp"
#include "ptp/util/string.hpp"

namespace ptp::config {

namespace detail {

inline bool parse_integer(const std::string& text, long long& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

inline bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size();
}

// Plain-scalar tag resolution: null, bool, integer, float, else string.
inline Json resolve_scalar(const YAML::Node& node) {
    const std::string& text = node.Scalar();
    if (node.Tag() == "!") return Json(text);  // quoted scalars stay strings
    if (text.empty() || text == "~" || text == "null" || text == "Null" || text == "NULL")
        return Json(nullptr);
    if (text == "true" || text == "True" || text == "TRUE") return Json(true);
    if (text == "false" || text == "False" || text == "FALSE") return Json(false);
    long long as_int = 0;
    if (parse_integer(text, as_int)) return Json(as_int);
    if (text == ".inf" || text == "+.inf") return Json(std::numeric_limits<double>::infinity());
    if (text == "-.inf") return Json(-std::numeric_limits<double>::infinity());
    if (text == ".nan") return Json(std::numeric_limits<double>::quiet_NaN());
    double as_double = 0;
    if (parse_double(text, as_double)) return Json(as_double);
    return Json(text);
}

inline Json yaml_to_json(const YAML::Node& node, const std::string& context) {
    switch (node.Type()) {
        case YAML::NodeType::Null:
        case YAML::NodeType::Undefined:
            return Json(nullptr);
        case YAML::NodeType::Scalar:
            return resolve_scalar(node);
        case YAML::NodeType::Sequence: {
            Json out = Json::array();
            for (const auto& item : node) out.push_back(yaml_to_json(item, context));
            return out;
        }
        case YAML::NodeType::Map: {
            Json out = Json::object();
            for (const auto& kv : node) {
                const std::string key = kv.first.as<std::string>();
                if (out.contains(key))
                    throw ConfigError("Duplicate key '" + key + "' in " + context);
                out[key] = yaml_to_json(kv.second, context);
            }
            return out;
        }
    }
    return Json(nullptr);
}

inline std::string double_to_text(double value) {
    if (std::isnan(value)) return ".nan";
    if (std::isinf(value)) return value > 0 ? ".inf" : "-.inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    std::string text(buf, ptr);
    if (text.find('.') == std::string::npos && text.find('e') == std::string::npos)
        text += ".0";
    return text;
}

inline void emit_json(YAML::Emitter& out, const Json& node) {
    switch (node.type()) {
        case Json::value_t::null:
            out << YAML::Null;
            break;
        case Json::value_t::boolean:
            out << node.get<bool>();
            break;
        case Json::value_t::number_integer:
            out << node.get<long long>();
            break;
        case Json::value_t::number_unsigned:
            out << node.get<unsigned long long>();
            break;
        case Json::value_t::number_float:
            // Shortest round-trip text, emitted plain so it reloads as a number.
            out << double_to_text(node.get<double>());
            break;
        case Json::value_t::string:
            out << YAML::DoubleQuoted << node.get<std::string>();
            break;
        case Json::value_t::array: {
            out << YAML::BeginSeq;
            for (const auto& item : node) emit_json(out, item);
            out << YAML::EndSeq;
            break;
        }
        case Json::value_t::object: {
            out << YAML::BeginMap;
            for (auto it = node.begin(); it != node.end(); ++it) {
                out << YAML::Key << it.key() << YAML::Value;
                emit_json(out, it.value());
            }
            out << YAML::EndMap;
            break;
        }
        default:
            throw ConfigError("Unsupported value type in configuration emit");
    }
}

inline constexpr int kMaxDefaultConfigDepth = 32;

inline Json load_file_layered(const std::filesystem::path& path,
                              std::vector<std::filesystem::path>& stack, int depth) {
    namespace fs = std::filesystem;
    if (depth > kMaxDefaultConfigDepth)
        throw ConfigError("default_configs recursion depth exceeded (" +
                          std::to_string(kMaxDefaultConfigDepth) + ") at " + path.string());
    std::error_code ec;
    const fs::path canonical = fs::weakly_canonical(path, ec);
    const fs::path resolved = ec ? path : canonical;
    for (const auto& open : stack) {
        if (open == resolved)
            throw ConfigError("default_configs cycle: '" + stack.back().string() +
                              "' refers back to '" + resolved.string() + "'");
    }
    if (!fs::exists(resolved))
        throw ConfigError("Configuration file not found: " + path.string());

    YAML::Node node;
    try {
        node = YAML::LoadFile(resolved.string());
    } catch (const YAML::ParserException& e) {
        throw ConfigError("YAML parse error in " + path.string() + " at line " +
                          std::to_string(e.mark.line + 1) + ": " + e.msg);
    } catch (const YAML::Exception& e) {
        throw ConfigError("Cannot read configuration file " + path.string() + ": " + e.what());
    }
    if (node.IsNull()) return Json::object();
    if (!node.IsMap())
        throw ConfigError("Top level of " + path.string() + " must be a map");

    Json own = yaml_to_json(node, path.string());

    Json base = Json::object();
    if (own.contains("default_configs")) {
        const Json& ref = own["default_configs"];
        if (!ref.is_string())
            throw ConfigError("default_configs in " + path.string() +
                              " must be a comma-separated string of relative paths");
        stack.push_back(resolved);
        for (const auto& rel : util::split_trimmed(ref.get<std::string>(), ',')) {
            const fs::path child = resolved.parent_path() / rel;
            base = merge_json(base, load_file_layered(child, stack, depth + 1));
        }
        stack.pop_back();
        own.erase("default_configs");
    }
    return merge_json(base, own);
}

}  // namespace detail

// Loads and deep-merges YAML files left-to-right (later overrides earlier).
// A top-level `default_configs` key (comma-separated paths relative to the
// referring file) pulls in base layers first, recursively; the referring file
// takes precedence and the key itself is dropped from the result.
inline ConfigTree load_config(const std::vector<std::filesystem::path>& paths) {
    Json merged = Json::object();
    for (const auto& path : paths) {
        std::vector<std::filesystem::path> stack;
        merged = merge_json(merged, detail::load_file_layered(path, stack, 0));
    }
    return ConfigTree{merged};
}

inline ConfigTree load_config(const std::filesystem::path& path) {
    return load_config(std::vector<std::filesystem::path>{path});
}

inline std::string to_yaml_string(const ConfigTree& tree) {
    YAML::Emitter out;
    out.SetIndent(2);
    detail::emit_json(out, tree.root());
    std::string text = out.c_str() ? out.c_str() : "";
    text += '\n';
    return text;
}

inline void save_yaml(const ConfigTree& tree, const std::filesystem::path& path) {
    std::ofstream file(path);
    if (!file) throw IoError("Cannot write configuration file: " + path.string());
    file << to_yaml_string(tree);
}

// Parses one scalar (or flow list) the same way file values are parsed;
// used for `--set key.path=value` overrides.
inline Json parse_scalar_text(const std::string& text) {
    YAML::Node node;
    try {
        node = YAML::Load(text);
    } catch (const YAML::Exception&) {
        return Json(text);
    }
    return detail::yaml_to_json(node, "command-line override");
}

}  // namespace ptp::config
