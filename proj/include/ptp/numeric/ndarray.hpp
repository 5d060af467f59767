#pragma once

#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ptp/errors.hpp"

namespace ptp::numeric {

// Row-major array of 64-bit floats with an explicit shape.
class NDArray {
public:
    NDArray() = default;

    explicit NDArray(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), data_(checked_size(shape_), 0.0) {}

    NDArray(std::vector<std::size_t> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != checked_size(shape_))
            throw NumericError("NDArray: data length " + std::to_string(data_.size()) +
                               " does not match shape " + shape_text(shape_));
    }

    static NDArray zeros(std::vector<std::size_t> shape) { return NDArray(std::move(shape)); }

    static NDArray full(std::vector<std::size_t> shape, double value) {
        NDArray out(std::move(shape));
        std::fill(out.data_.begin(), out.data_.end(), value);
        return out;
    }

    static NDArray scalar(double value) { return NDArray({1}, {value}); }

    static NDArray row_matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
        return NDArray({rows, cols}, std::move(data));
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double operator[](std::size_t flat) const { return data_[flat]; }
    double& operator[](std::size_t flat) { return data_[flat]; }

    // Rank-2 accessors.
    double at(std::size_t row, std::size_t col) const { return data_[row * dim(1) + col]; }
    double& at(std::size_t row, std::size_t col) { return data_[row * dim(1) + col]; }

    std::size_t rows() const { return rank() >= 1 ? dim(0) : 0; }
    std::size_t cols() const { return rank() >= 2 ? dim(1) : 1; }

    void fill(double value) { std::fill(data_.begin(), data_.end(), value); }

    bool same_shape(const NDArray& other) const { return shape_ == other.shape_; }

    friend bool operator==(const NDArray& a, const NDArray& b) {
        return a.shape_ == b.shape_ && a.data_ == b.data_;
    }

    static std::string shape_text(const std::vector<std::size_t>& shape) {
        std::ostringstream out;
        out << '[';
        for (std::size_t i = 0; i < shape.size(); ++i) {
            if (i > 0) out << 'x';
            out << shape[i];
        }
        out << ']';
        return out.str();
    }

    std::string shape_text() const { return shape_text(shape_); }

private:
    static std::size_t checked_size(const std::vector<std::size_t>& shape) {
        if (shape.empty()) throw NumericError("NDArray: shape must have at least one dim");
        std::size_t n = 1;
        for (std::size_t d : shape) {
            if (d == 0) throw NumericError("NDArray: shape dims must be >= 1");
            n *= d;
        }
        return n;
    }

    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

}  // namespace ptp::numeric
