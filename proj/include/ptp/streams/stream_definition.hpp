#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ptp/errors.hpp"
#include "ptp/streams/batch.hpp"
#include "ptp/streams/value.hpp"

namespace ptp::streams {

// One dimension of a shape pattern: the batch wildcard, the free wildcard,
// or a fixed extent.
struct Dim {
    enum class Kind { batch, any, fixed };
    Kind kind = Kind::fixed;
    std::size_t extent = 0;

    static Dim batch() { return {Kind::batch, 0}; }
    static Dim any() { return {Kind::any, 0}; }
    static Dim fixed(std::size_t n) {
        if (n == 0) throw StreamError("Fixed shape dims must be >= 1");
        return {Kind::fixed, n};
    }

    friend bool operator==(const Dim& a, const Dim& b) {
        return a.kind == b.kind && (a.kind != Kind::fixed || a.extent == b.extent);
    }

    std::string text() const {
        switch (kind) {
            case Kind::batch: return "BATCH";
            case Kind::any: return "ANY";
            case Kind::fixed: return std::to_string(extent);
        }
        return "?";
    }
};

// Element kind plus (for numeric arrays) a shape pattern whose first dim is
// always the batch wildcard. The handshake currency.
class StreamDefinition {
public:
    StreamDefinition() = default;

    static StreamDefinition numeric(std::vector<Dim> pattern, std::string description = "") {
        if (pattern.empty() || pattern.front().kind != Dim::Kind::batch)
            throw StreamError("Numeric array patterns must start with the BATCH dim");
        StreamDefinition def;
        def.kind_ = ValueKind::numeric_array;
        def.pattern_ = std::move(pattern);
        def.description_ = std::move(description);
        return def;
    }

    static StreamDefinition index_list(std::string description = "") {
        StreamDefinition def;
        def.kind_ = ValueKind::index_list;
        def.description_ = std::move(description);
        return def;
    }

    static StreamDefinition string_list(std::string description = "") {
        StreamDefinition def;
        def.kind_ = ValueKind::string_list;
        def.description_ = std::move(description);
        return def;
    }

    static StreamDefinition scalar(std::string description = "") {
        StreamDefinition def;
        def.kind_ = ValueKind::scalar;
        def.description_ = std::move(description);
        return def;
    }

    // Presence-only requirement: any kind satisfies it (viewers, exporters).
    static StreamDefinition any(std::string description = "") {
        StreamDefinition def;
        def.any_kind_ = true;
        def.description_ = std::move(description);
        return def;
    }

    ValueKind kind() const { return kind_; }
    bool any_kind() const { return any_kind_; }
    const std::vector<Dim>& pattern() const { return pattern_; }
    const std::string& description() const { return description_; }

    std::string text() const {
        if (any_kind_) return "any";
        std::ostringstream out;
        out << value_kind_name(kind_);
        if (kind_ == ValueKind::numeric_array) {
            out << " [";
            for (std::size_t i = 0; i < pattern_.size(); ++i) {
                if (i > 0) out << ", ";
                out << pattern_[i].text();
            }
            out << ']';
        }
        return out.str();
    }

private:
    ValueKind kind_ = ValueKind::numeric_array;
    bool any_kind_ = false;
    std::vector<Dim> pattern_;
    std::string description_;
};

// True iff a stream produced as `produced` is acceptable where `required` is
// demanded: kinds equal and, for numeric arrays, patterns of equal rank where
// each required dim is ANY, BATCH matched with BATCH, or an integer equal to
// the produced integer. A produced ANY satisfies only a required ANY.
inline bool definition_satisfies(const StreamDefinition& produced, const StreamDefinition& required) {
    if (required.any_kind()) return true;
    if (produced.any_kind()) return false;
    if (produced.kind() != required.kind()) return false;
    if (produced.kind() != ValueKind::numeric_array) return true;
    const auto& p = produced.pattern();
    const auto& r = required.pattern();
    if (p.size() != r.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        switch (r[i].kind) {
            case Dim::Kind::any:
                break;
            case Dim::Kind::batch:
                if (p[i].kind != Dim::Kind::batch) return false;
                break;
            case Dim::Kind::fixed:
                if (p[i].kind != Dim::Kind::fixed || p[i].extent != r[i].extent) return false;
                break;
        }
    }
    return true;
}

struct ShapeViolation {
    std::string stream;
    std::string message;
};

// Run-time counterpart of the handshake: checks every defined stream present
// in the batch against its definition. BATCH binds to the batch size; ANY
// binds per stream occurrence. Collects all violations, never aborts.
inline std::vector<ShapeViolation> validate_batch(
    const Batch& batch, const std::map<std::string, StreamDefinition>& definitions) {
    std::vector<ShapeViolation> violations;
    auto report = [&](const std::string& stream, std::string message) {
        violations.push_back({stream, std::move(message)});
    };

    for (const auto& [name, def] : definitions) {
        if (!batch.has(name)) continue;
        const Value& value = batch.get(name);
        if (def.any_kind()) continue;
        if (value.kind() != def.kind()) {
            report(name, std::string("kind mismatch: batch has ") + value_kind_name(value.kind()) +
                             ", definition requires " + value_kind_name(def.kind()));
            continue;
        }
        switch (def.kind()) {
            case ValueKind::numeric_array: {
                const auto& array = value.array();
                const auto& pattern = def.pattern();
                if (array.rank() != pattern.size()) {
                    report(name, "rank mismatch: array " + array.shape_text() + " vs pattern rank " +
                                     std::to_string(pattern.size()));
                    break;
                }
                for (std::size_t i = 0; i < pattern.size(); ++i) {
                    const std::size_t actual = array.dim(i);
                    if (pattern[i].kind == Dim::Kind::batch && actual != batch.batch_size()) {
                        report(name, "dim " + std::to_string(i) + " is " + std::to_string(actual) +
                                         ", expected batch size " +
                                         std::to_string(batch.batch_size()));
                    } else if (pattern[i].kind == Dim::Kind::fixed && actual != pattern[i].extent) {
                        report(name, "dim " + std::to_string(i) + " is " + std::to_string(actual) +
                                         ", expected " + std::to_string(pattern[i].extent));
                    }
                }
                break;
            }
            case ValueKind::index_list:
                if (value.indices().size() != batch.batch_size())
                    report(name, "index list length " + std::to_string(value.indices().size()) +
                                     " does not match batch size " +
                                     std::to_string(batch.batch_size()));
                break;
            case ValueKind::string_list:
                if (value.strings().size() != batch.batch_size())
                    report(name, "string list length " + std::to_string(value.strings().size()) +
                                     " does not match batch size " +
                                     std::to_string(batch.batch_size()));
                break;
            case ValueKind::scalar:
                break;
        }
    }
    return violations;
}

}  // namespace ptp::streams
