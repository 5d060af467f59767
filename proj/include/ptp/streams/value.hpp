#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ptp/errors.hpp"
#include "ptp/numeric/ndarray.hpp"

namespace ptp::streams {

using numeric::NDArray;
using IndexList = std::vector<std::int64_t>;
using StringList = std::vector<std::string>;

enum class ValueKind { numeric_array, index_list, string_list, scalar };

inline const char* value_kind_name(ValueKind kind) {
    switch (kind) {
        case ValueKind::numeric_array: return "numeric_array";
        case ValueKind::index_list: return "index_list";
        case ValueKind::string_list: return "string_list";
        case ValueKind::scalar: return "scalar";
    }
    return "?";
}

// One stream payload: numeric array, per-sample index list, per-sample string
// list, or a single scalar. Immutable once placed into a batch.
class Value {
public:
    explicit Value(NDArray array) : payload_(std::move(array)) {}
    explicit Value(IndexList indices) : payload_(std::move(indices)) {
        for (auto i : std::get<IndexList>(payload_))
            if (i < 0) throw StreamError("IndexList entries must be non-negative");
    }
    explicit Value(StringList strings) : payload_(std::move(strings)) {}
    explicit Value(double scalar) : payload_(scalar) {}

    ValueKind kind() const { return static_cast<ValueKind>(payload_.index()); }

    bool is_array() const { return kind() == ValueKind::numeric_array; }
    bool is_indices() const { return kind() == ValueKind::index_list; }
    bool is_strings() const { return kind() == ValueKind::string_list; }
    bool is_scalar() const { return kind() == ValueKind::scalar; }

    const NDArray& array() const { return get<NDArray>("numeric_array"); }
    const IndexList& indices() const { return get<IndexList>("index_list"); }
    const StringList& strings() const { return get<StringList>("string_list"); }
    double scalar() const { return get<double>("scalar"); }

    friend bool operator==(const Value& a, const Value& b) { return a.payload_ == b.payload_; }

private:
    template <typename T>
    const T& get(const char* wanted) const {
        if (!std::holds_alternative<T>(payload_))
            throw StreamError(std::string("Stream value is ") + value_kind_name(kind()) +
                              ", expected " + wanted);
        return std::get<T>(payload_);
    }

    std::variant<NDArray, IndexList, StringList, double> payload_;
};

}  // namespace ptp::streams
