#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ptp/config/global_params.hpp"
#include "ptp/numeric/ndarray.hpp"
#include "ptp/streams/stream_definition.hpp"
#include "ptp/util/string.hpp"
#include "ptp/zoo/sampler.hpp"

namespace ptp::zoo {

// Synthetic classification clouds: one Gaussian blob per class, centers laid
// out on an integer lattice scaled by 4x the spread so classes stay separable.
class GaussianBlobsTask : public SampledTask {
public:
    using SampledTask::SampledTask;

    void initialize(config::GlobalParams& globals) override {
        num_classes_ = config_.params.get_or<std::size_t>("num_classes", 3);
        dim_ = config_.params.get_or<std::size_t>("dim", 2);
        samples_per_class_ = config_.params.get_or<std::size_t>("samples_per_class", 100);
        spread_ = config_.params.get_or<double>("spread", 0.1);
        if (num_classes_ < 2) throw ConfigError("Task '" + name() + "': num_classes must be >= 2");
        if (dim_ < 1) throw ConfigError("Task '" + name() + "': dim must be >= 1");
        if (samples_per_class_ < 1)
            throw ConfigError("Task '" + name() + "': samples_per_class must be >= 1");
        if (spread_ < 0.0) throw ConfigError("Task '" + name() + "': spread must be >= 0");

        const std::size_t total = num_classes_ * samples_per_class_;
        inputs_ = numeric::NDArray({total, dim_});
        targets_.resize(total);

        const auto centers = lattice_centers();
        numeric::Rng data_rng(dataset_seed());
        for (std::size_t c = 0; c < num_classes_; ++c) {
            for (std::size_t s = 0; s < samples_per_class_; ++s) {
                const std::size_t row = c * samples_per_class_ + s;
                targets_[row] = std::int64_t(c);
                for (std::size_t d = 0; d < dim_; ++d)
                    inputs_.at(row, d) = centers.at(c, d) + data_rng.normal(0.0, spread_);
            }
        }

        globals.publish(global("num_classes"), config::Json(num_classes_), name());
        globals.publish(global("input_size"), config::Json(dim_), name());
        setup_sampler(total);
    }

    std::map<std::string, streams::StreamDefinition> output_definitions() const override {
        return {{"inputs", streams::StreamDefinition::numeric(
                               {streams::Dim::batch(), streams::Dim::fixed(dim_)})},
                {"targets", streams::StreamDefinition::index_list()}};
    }

protected:
    void fill(streams::Batch& batch, const std::vector<std::size_t>& indices) override {
        numeric::NDArray x({indices.size(), dim_});
        streams::IndexList y(indices.size());
        for (std::size_t i = 0; i < indices.size(); ++i) {
            for (std::size_t d = 0; d < dim_; ++d) x.at(i, d) = inputs_.at(indices[i], d);
            y[i] = targets_[indices[i]];
        }
        batch.add(stream("inputs"), streams::Value{std::move(x)});
        batch.add(stream("targets"), streams::Value{std::move(y)});
    }

private:
    numeric::NDArray lattice_centers() const {
        std::size_t side = 1;
        while (std::pow(double(side), double(dim_)) < double(num_classes_)) ++side;
        // Degenerate spread still needs distinct centers, so fall back to unit
        // spacing.
        const double scale = spread_ > 0.0 ? 6.0 * spread_ : 1.0;
        numeric::NDArray centers({num_classes_, dim_});
        for (std::size_t c = 0; c < num_classes_; ++c) {
            std::size_t rest = c;
            for (std::size_t d = 0; d < dim_; ++d) {
                centers.at(c, d) = scale * double(rest % side);
                rest /= side;
            }
        }
        return centers;
    }

    std::size_t num_classes_ = 0, dim_ = 0, samples_per_class_ = 0;
    double spread_ = 0.0;
    numeric::NDArray inputs_;
    std::vector<std::int64_t> targets_;
};

// All bit vectors of the given width; target is the parity of set bits
// (XOR truth table at num_bits = 2).
class ParityTask : public SampledTask {
public:
    using SampledTask::SampledTask;

    void initialize(config::GlobalParams& globals) override {
        num_bits_ = config_.params.get_or<std::size_t>("num_bits", 2);
        if (num_bits_ < 2 || num_bits_ > 16)
            throw ConfigError("Task '" + name() + "': num_bits must lie in [2, 16]");
        globals.publish(global("num_classes"), config::Json(2), name());
        globals.publish(global("input_size"), config::Json(num_bits_), name());
        setup_sampler(std::size_t(1) << num_bits_);
    }

    std::map<std::string, streams::StreamDefinition> output_definitions() const override {
        return {{"inputs", streams::StreamDefinition::numeric(
                               {streams::Dim::batch(), streams::Dim::fixed(num_bits_)})},
                {"targets", streams::StreamDefinition::index_list()}};
    }

protected:
    void fill(streams::Batch& batch, const std::vector<std::size_t>& indices) override {
        numeric::NDArray x({indices.size(), num_bits_});
        streams::IndexList y(indices.size());
        for (std::size_t i = 0; i < indices.size(); ++i) {
            std::size_t bits = indices[i];
            std::size_t ones = 0;
            for (std::size_t b = 0; b < num_bits_; ++b) {
                const std::size_t bit = (bits >> b) & 1u;
                x.at(i, b) = double(bit);
                ones += bit;
            }
            y[i] = std::int64_t(ones % 2);
        }
        batch.add(stream("inputs"), streams::Value{std::move(x)});
        batch.add(stream("targets"), streams::Value{std::move(y)});
    }

private:
    std::size_t num_bits_ = 2;
};

// Reads a header-first CSV file: numeric feature columns become `inputs`,
// the label column becomes the `labels` string stream.
class CsvTask : public SampledTask {
public:
    using SampledTask::SampledTask;

    void initialize(config::GlobalParams& globals) override {
        const auto path = config_.params.get_or<std::string>("path", "");
        if (path.empty()) throw ConfigError("Task '" + name() + "': 'path' is required");

        std::vector<std::string> feature_columns;
        const config::Json* features = config_.params.find("feature_columns");
        if (features == nullptr || !features->is_array() || features->empty())
            throw ConfigError("Task '" + name() + "': 'feature_columns' list is required");
        for (const auto& col : *features) feature_columns.push_back(col.get<std::string>());
        const auto label_column = config_.params.get_or<std::string>("label_column", "");
        if (label_column.empty())
            throw ConfigError("Task '" + name() + "': 'label_column' is required");

        std::ifstream file(path);
        if (!file) throw IoError("Task '" + name() + "': cannot open " + path);

        std::string line;
        if (!std::getline(file, line))
            throw ConfigError("Task '" + name() + "': " + path + " is empty");
        const auto header = util::split_trimmed(line, ',');
        std::vector<std::size_t> feature_idx;
        for (const auto& col : feature_columns) {
            const auto it = std::find(header.begin(), header.end(), col);
            if (it == header.end())
                throw ConfigError("Task '" + name() + "': column '" + col + "' not found in " + path);
            feature_idx.push_back(std::size_t(it - header.begin()));
        }
        const auto label_it = std::find(header.begin(), header.end(), label_column);
        if (label_it == header.end())
            throw ConfigError("Task '" + name() + "': column '" + label_column + "' not found in " +
                              path);
        const std::size_t label_idx = std::size_t(label_it - header.begin());

        std::vector<std::vector<double>> rows;
        std::size_t line_number = 1;
        while (std::getline(file, line)) {
            ++line_number;
            if (util::trim(line).empty()) continue;
            const auto cells = util::split_trimmed(line, ',');
            if (cells.size() != header.size())
                throw ConfigError("Task '" + name() + "': row " + std::to_string(line_number) +
                                  " has " + std::to_string(cells.size()) + " cells, header has " +
                                  std::to_string(header.size()));
            std::vector<double> row;
            for (const std::size_t idx : feature_idx) {
                try {
                    std::size_t used = 0;
                    row.push_back(std::stod(cells[idx], &used));
                    if (used != cells[idx].size()) throw std::invalid_argument("trailing text");
                } catch (const std::exception&) {
                    throw ConfigError("Task '" + name() + "': non-numeric value '" + cells[idx] +
                                      "' at row " + std::to_string(line_number) + ", column '" +
                                      header[idx] + "'");
                }
            }
            rows.push_back(std::move(row));
            labels_.push_back(cells[label_idx]);
        }
        if (rows.empty()) throw ConfigError("Task '" + name() + "': " + path + " has no data rows");

        width_ = feature_idx.size();
        inputs_ = numeric::NDArray({rows.size(), width_});
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < width_; ++j) inputs_.at(i, j) = rows[i][j];

        globals.publish(global("input_size"), config::Json(width_), name());
        if (config_.params.get_or<bool>("publish_vocabulary", false)) {
            std::set<std::string> unique(labels_.begin(), labels_.end());
            config::Json tokens = config::Json::array();
            for (const auto& token : unique) tokens.push_back(token);
            globals.publish(global("label_tokens"), tokens, name());
        }
        setup_sampler(rows.size());
    }

    std::map<std::string, streams::StreamDefinition> output_definitions() const override {
        return {{"inputs", streams::StreamDefinition::numeric(
                               {streams::Dim::batch(), streams::Dim::fixed(width_)})},
                {"labels", streams::StreamDefinition::string_list()}};
    }

protected:
    void fill(streams::Batch& batch, const std::vector<std::size_t>& indices) override {
        numeric::NDArray x({indices.size(), width_});
        streams::StringList y(indices.size());
        for (std::size_t i = 0; i < indices.size(); ++i) {
            for (std::size_t j = 0; j < width_; ++j) x.at(i, j) = inputs_.at(indices[i], j);
            y[i] = labels_[indices[i]];
        }
        batch.add(stream("inputs"), streams::Value{std::move(x)});
        batch.add(stream("labels"), streams::Value{std::move(y)});
    }

private:
    std::size_t width_ = 0;
    numeric::NDArray inputs_;
    streams::StringList labels_;
};

}  // namespace ptp::zoo
