#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "ptp/errors.hpp"
#include "ptp/numeric/ndarray.hpp"
#include "ptp/numeric/rng.hpp"

namespace ptp::numeric {

inline void check_rank2(const NDArray& a, const char* who) {
    if (a.rank() != 2) throw NumericError(std::string(who) + ": expected a rank-2 array, got " + a.shape_text());
}

// C = A (m x k) * B (k x n)
inline NDArray matmul(const NDArray& a, const NDArray& b) {
    check_rank2(a, "matmul");
    check_rank2(b, "matmul");
    if (a.dim(1) != b.dim(0))
        throw NumericError("matmul: inner dimensions differ, " + a.shape_text() + " vs " + b.shape_text());
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    NDArray c({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a.at(i, p);
            if (aip == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c.at(i, j) += aip * b.at(p, j);
        }
    }
    return c;
}

// C = A (m x k) * B^T (n x k)
inline NDArray matmul_nt(const NDArray& a, const NDArray& b) {
    check_rank2(a, "matmul_nt");
    check_rank2(b, "matmul_nt");
    if (a.dim(1) != b.dim(1))
        throw NumericError("matmul_nt: inner dimensions differ, " + a.shape_text() + " vs " + b.shape_text());
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
    NDArray c({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += a.at(i, p) * b.at(j, p);
            c.at(i, j) = acc;
        }
    return c;
}

// C = A^T (k x m) * B (k x n)
inline NDArray matmul_tn(const NDArray& a, const NDArray& b) {
    check_rank2(a, "matmul_tn");
    check_rank2(b, "matmul_tn");
    if (a.dim(0) != b.dim(0))
        throw NumericError("matmul_tn: inner dimensions differ, " + a.shape_text() + " vs " + b.shape_text());
    const std::size_t k = a.dim(0), m = a.dim(1), n = b.dim(1);
    NDArray c({m, n});
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t i = 0; i < m; ++i) {
            const double api = a.at(p, i);
            if (api == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c.at(i, j) += api * b.at(p, j);
        }
    return c;
}

// Reverse rules for the matrix product: dA = G * B^T, dB = A^T * G.
inline NDArray matmul_grad_a(const NDArray& grad, const NDArray& b) { return matmul_nt(grad, b); }
inline NDArray matmul_grad_b(const NDArray& a, const NDArray& grad) { return matmul_tn(a, grad); }

inline void add_inplace(NDArray& target, const NDArray& delta) {
    if (!target.same_shape(delta))
        throw NumericError("add: shape mismatch, " + target.shape_text() + " vs " + delta.shape_text());
    for (std::size_t i = 0; i < target.size(); ++i) target[i] += delta[i];
}

enum class Activation { relu, sigmoid, tanh, log_softmax, identity };

inline Activation parse_activation(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "tanh") return Activation::tanh;
    if (name == "log_softmax") return Activation::log_softmax;
    if (name == "identity" || name == "none") return Activation::identity;
    throw ConfigError("Unknown activation: " + std::string(name));
}

inline const char* activation_name(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::tanh: return "tanh";
        case Activation::log_softmax: return "log_softmax";
        case Activation::identity: return "identity";
    }
    return "?";
}

// Elementwise (row-wise for log_softmax, which requires rank 2 and applies
// max-subtraction for stability).
inline NDArray activation(const NDArray& x, Activation kind) {
    NDArray y = x;
    switch (kind) {
        case Activation::identity:
            break;
        case Activation::relu:
            for (auto& v : y.values()) v = v > 0.0 ? v : 0.0;
            break;
        case Activation::sigmoid:
            for (auto& v : y.values()) v = 1.0 / (1.0 + std::exp(-v));
            break;
        case Activation::tanh:
            for (auto& v : y.values()) v = std::tanh(v);
            break;
        case Activation::log_softmax: {
            check_rank2(x, "log_softmax");
            const std::size_t rows = x.dim(0), cols = x.dim(1);
            for (std::size_t i = 0; i < rows; ++i) {
                double row_max = y.at(i, 0);
                for (std::size_t j = 1; j < cols; ++j) row_max = std::max(row_max, y.at(i, j));
                double sum = 0.0;
                for (std::size_t j = 0; j < cols; ++j) sum += std::exp(y.at(i, j) - row_max);
                const double log_norm = row_max + std::log(sum);
                for (std::size_t j = 0; j < cols; ++j) y.at(i, j) -= log_norm;
            }
            break;
        }
    }
    return y;
}

// Gradient w.r.t. the activation input given the forward input x, forward
// output y and the upstream gradient g.
inline NDArray activation_backward(Activation kind, const NDArray& x, const NDArray& y,
                                   const NDArray& g) {
    if (!x.same_shape(g))
        throw NumericError("activation_backward: gradient shape " + g.shape_text() +
                           " does not match input " + x.shape_text());
    NDArray dx = g;
    switch (kind) {
        case Activation::identity:
            break;
        case Activation::relu:
            for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = x[i] > 0.0 ? g[i] : 0.0;
            break;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = g[i] * y[i] * (1.0 - y[i]);
            break;
        case Activation::tanh:
            for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = g[i] * (1.0 - y[i] * y[i]);
            break;
        case Activation::log_softmax: {
            // dX = G - softmax(X) * rowsum(G)
            const std::size_t rows = y.dim(0), cols = y.dim(1);
            for (std::size_t i = 0; i < rows; ++i) {
                double row_sum = 0.0;
                for (std::size_t j = 0; j < cols; ++j) row_sum += g.at(i, j);
                for (std::size_t j = 0; j < cols; ++j)
                    dx.at(i, j) = g.at(i, j) - std::exp(y.at(i, j)) * row_sum;
            }
            break;
        }
    }
    return dx;
}

struct DropoutResult {
    NDArray output;
    std::vector<double> mask;  // survivor scale per element (0 or 1/(1-p))
};

// Inverted dropout: training mode zeroes each element with probability p and
// scales survivors by 1/(1-p); eval mode is the identity.
inline DropoutResult dropout(const NDArray& x, double p, bool training, Rng& rng) {
    if (p < 0.0 || p >= 1.0) throw NumericError("dropout: p must be in [0, 1)");
    DropoutResult result{x, {}};
    if (!training || p == 0.0) {
        result.mask.assign(x.size(), 1.0);
        return result;
    }
    const double scale = 1.0 / (1.0 - p);
    result.mask.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = rng.bernoulli(p) ? 0.0 : scale;
        result.mask[i] = keep;
        result.output[i] = x[i] * keep;
    }
    return result;
}

inline NDArray dropout_backward(const std::vector<double>& mask, const NDArray& g) {
    if (mask.size() != g.size()) throw NumericError("dropout_backward: mask/gradient size mismatch");
    NDArray dx = g;
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= mask[i];
    return dx;
}

}  // namespace ptp::numeric
