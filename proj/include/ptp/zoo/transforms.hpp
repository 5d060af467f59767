#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "ptp/config/global_params.hpp"
#include "ptp/numeric/ndarray.hpp"
#include "ptp/numeric/ops.hpp"
#include "ptp/pipeline/component.hpp"
#include "ptp/util/string.hpp"

namespace ptp::zoo {

// Maps label tokens to contiguous indices. The vocabulary comes either from
// the `label_tokens` global (published by a task over its own data) or from a
// whitespace-separated token file; it is immutable after initialization.
class LabelIndexer : public pipeline::Component {
public:
    static constexpr const char* kUnkToken = "<unk>";

    using Component::Component;

    void initialize(config::GlobalParams& globals) override {
        unk_policy_ = config_.params.get_or<std::string>("unk_policy", "error");
        if (unk_policy_ != "error" && unk_policy_ != "unk_token")
            throw ConfigError("Component '" + name() + "': unk_policy must be error or unk_token");

        std::vector<std::string> tokens;
        const config::Json* source = config_.params.find("vocab_source");
        if (source != nullptr && source->is_string() && source->get<std::string>() == "from_data") {
            const std::string& key = global("label_tokens");
            if (!globals.has(key))
                throw ConfigError("Component '" + name() + "': vocab_source is from_data but global '" +
                                  key + "' was never published (enable publish_vocabulary on a task)");
            tokens = globals.get_as<std::vector<std::string>>(key);
        } else if (source != nullptr && source->is_object() && source->contains("file")) {
            const auto path = (*source)["file"].get<std::string>();
            std::ifstream file(path);
            if (!file) throw IoError("Component '" + name() + "': cannot open vocabulary " + path);
            std::string token;
            while (file >> token) tokens.push_back(token);
        } else {
            throw ConfigError("Component '" + name() +
                              "': vocab_source must be \"from_data\" or {file: path}");
        }
        if (tokens.empty())
            throw ConfigError("Component '" + name() + "': vocabulary is empty");

        for (const auto& token : tokens) {
            if (vocab_.count(token) > 0)
                throw ConfigError("Component '" + name() + "': duplicate vocabulary token '" + token +
                                  "'");
            vocab_.emplace(token, std::int64_t(vocab_.size()));
        }
        if (unk_policy_ == "unk_token" && vocab_.count(kUnkToken) == 0)
            vocab_.emplace(kUnkToken, std::int64_t(vocab_.size()));

        globals.publish(global("num_classes"), config::Json(vocab_.size()), name());
    }

    std::map<std::string, streams::StreamDefinition> input_definitions() const override {
        return {{"labels", streams::StreamDefinition::string_list()}};
    }
    std::map<std::string, streams::StreamDefinition> output_definitions() const override {
        return {{"targets", streams::StreamDefinition::index_list()}};
    }

    void execute(streams::Batch& batch) override {
        const streams::StringList& labels = batch.get(stream("labels")).strings();
        streams::IndexList indices(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const auto it = vocab_.find(labels[i]);
            if (it != vocab_.end()) {
                indices[i] = it->second;
            } else if (unk_policy_ == "unk_token") {
                indices[i] = vocab_.at(kUnkToken);
            } else {
                throw StreamError("Component '" + name() + "': unknown label '" + labels[i] +
                                  "' at sample " + std::to_string(i));
            }
        }
        batch.add(stream("targets"), streams::Value{std::move(indices)});
    }

    const std::map<std::string, std::int64_t>& vocabulary() const { return vocab_; }

private:
    std::map<std::string, std::int64_t> vocab_;
    std::string unk_policy_ = "error";
};

// Index stream to one-hot rows; width comes from the num_classes global.
class OneHot : public pipeline::Component {
public:
    using Component::Component;

    void initialize(config::GlobalParams& globals) override {
        const std::string& key = global("num_classes");
        if (!globals.has(key))
            throw ConfigError("Component '" + name() + "': global '" + key +
                              "' must be published before one-hot encoding");
        num_classes_ = globals.get_as<std::size_t>(key);
    }

    std::map<std::string, streams::StreamDefinition> input_definitions() const override {
        return {{"targets", streams::StreamDefinition::index_list()}};
    }
    std::map<std::string, streams::StreamDefinition> output_definitions() const override {
        return {{"targets_one_hot", streams::StreamDefinition::numeric(
                                        {streams::Dim::batch(), streams::Dim::fixed(num_classes_)})}};
    }

    void execute(streams::Batch& batch) override {
        const streams::IndexList& indices = batch.get(stream("targets")).indices();
        numeric::NDArray rows({indices.size(), num_classes_});
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (std::size_t(indices[i]) >= num_classes_)
                throw StreamError("Component '" + name() + "': index " +
                                  std::to_string(indices[i]) + " out of range for " +
                                  std::to_string(num_classes_) + " classes");
            rows.at(i, std::size_t(indices[i])) = 1.0;
        }
        batch.add(stream("targets_one_hot"), streams::Value{std::move(rows)});
    }

private:
    std::size_t num_classes_ = 0;
};

// Concatenates rank-2 streams along the feature dim; backward splits the
// gradient at the recorded offsets.
class Concat : public pipeline::Component {
public:
    using Component::Component;

    bool differentiable() const override { return true; }

    void initialize(config::GlobalParams&) override {
        const config::Json* inputs = config_.params.find("input_streams");
        if (inputs == nullptr || !inputs->is_array() || inputs->empty())
            throw ConfigError("Component '" + name() + "': 'input_streams' list is required");
        for (const auto& s : *inputs) input_streams_.push_back(s.get<std::string>());
        output_stream_ = config_.params.get_or<std::string>("output_stream", "concatenated");
    }

    std::map<std::string, streams::StreamDefinition> input_definitions() const override {
        std::map<std::string, streams::StreamDefinition> defs;
        for (const auto& s : input_streams_)
            defs.emplace(s, streams::StreamDefinition::numeric(
                                {streams::Dim::batch(), streams::Dim::any()}));
        return defs;
    }
    std::map<std::string, streams::StreamDefinition> output_definitions() const override {
        return {{output_stream_, streams::StreamDefinition::numeric(
                                     {streams::Dim::batch(), streams::Dim::any()})}};
    }

    void execute(streams::Batch& batch) override {
        widths_.clear();
        std::size_t total = 0;
        const std::size_t rows = batch.batch_size();
        for (const auto& s : input_streams_) {
            const numeric::NDArray& part = batch.get(stream(s)).array();
            if (part.rank() != 2 || part.dim(0) != rows)
                throw StreamError("Component '" + name() + "': stream '" + stream(s) +
                                  "' must be [batch, width], got " + part.shape_text());
            widths_.push_back(part.dim(1));
            total += part.dim(1);
        }
        numeric::NDArray out({rows, total});
        std::size_t offset = 0;
        for (std::size_t k = 0; k < input_streams_.size(); ++k) {
            const numeric::NDArray& part = batch.get(stream(input_streams_[k])).array();
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < widths_[k]; ++j) out.at(i, offset + j) = part.at(i, j);
            offset += widths_[k];
        }
        batch.add(stream(output_stream_), streams::Value{std::move(out)});
    }

    void backward(streams::Batch&, pipeline::GradTable& grads) override {
        const numeric::NDArray* g = grads.find(stream(output_stream_));
        if (g == nullptr) return;
        std::size_t offset = 0;
        for (std::size_t k = 0; k < input_streams_.size(); ++k) {
            numeric::NDArray part({g->dim(0), widths_[k]});
            for (std::size_t i = 0; i < g->dim(0); ++i)
                for (std::size_t j = 0; j < widths_[k]; ++j) part.at(i, j) = g->at(i, offset + j);
            grads.accumulate(stream(input_streams_[k]), part);
            offset += widths_[k];
        }
    }

private:
    std::vector<std::string> input_streams_;
    std::string output_stream_ = "concatenated";
    std::vector<std::size_t> widths_;
};

}  // namespace ptp::zoo
