#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ptp/config/global_params.hpp"
#include "ptp/numeric/ndarray.hpp"
#include "ptp/pipeline/component.hpp"
#include "ptp/stats/collector.hpp"
#include "ptp/util/logger.hpp"

namespace ptp::zoo {

// Row-wise argmax with ties broken by the lowest index.
inline std::size_t argmax_row(const numeric::NDArray& array, std::size_t row) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < array.dim(1); ++j)
        if (array.at(row, j) > array.at(row, best)) best = j;
    return best;
}

// Fraction of rows whose prediction argmax matches the target index.
class AccuracyStat : public pipeline::Component {
public:
    using Component::Component;

    std::map<std::string, streams::StreamDefinition> input_definitions() const override {
        return {{"predictions", streams::StreamDefinition::numeric(
                                    {streams::Dim::batch(), streams::Dim::any()})},
                {"targets", streams::StreamDefinition::index_list()}};
    }
    std::map<std::string, streams::StreamDefinition> output_definitions() const override {
        return {};
    }

    void execute(streams::Batch&) override {}

    std::vector<std::string> statistic_keys() const override {
        return {config_.params.get_or<std::string>("statistics_key", "accuracy")};
    }

    void collect_statistics(stats::StatisticsCollector& collector,
                            const streams::Batch& batch) override {
        const numeric::NDArray& preds = batch.get(stream("predictions")).array();
        const streams::IndexList& targets = batch.get(stream("targets")).indices();
        if (targets.size() != preds.dim(0))
            throw StreamError("Component '" + name() + "': " + std::to_string(targets.size()) +
                              " targets for " + std::to_string(preds.dim(0)) + " predictions");
        std::size_t correct = 0;
        for (std::size_t i = 0; i < targets.size(); ++i)
            if (argmax_row(preds, i) == std::size_t(targets[i])) ++correct;
        collector.collect(statistic_keys()[0], double(correct) / double(targets.size()),
                          batch.batch_size());
    }
};

// Logs the first few samples of the named streams; the batch passes through
// untouched.
class StreamViewer : public pipeline::Component {
public:
    using Component::Component;

    void initialize(config::GlobalParams&) override {
        const config::Json* list = config_.params.find("input_streams");
        if (list == nullptr || !list->is_array() || list->empty())
            throw ConfigError("Component '" + name() + "': 'input_streams' list is required");
        for (const auto& s : *list) streams_.push_back(s.get<std::string>());
        sample_count_ = config_.params.get_or<std::size_t>("sample_count", 3);
    }

    std::map<std::string, streams::StreamDefinition> input_definitions() const override {
        std::map<std::string, streams::StreamDefinition> defs;
        for (const auto& s : streams_) defs.emplace(s, streams::StreamDefinition::any());
        return defs;
    }
    std::map<std::string, streams::StreamDefinition> output_definitions() const override {
        return {};
    }

    void execute(streams::Batch& batch) override {
        const std::size_t count = std::min(sample_count_, batch.batch_size());
        for (const auto& s : streams_) {
            const streams::Value& value = batch.get(stream(s));
            for (std::size_t i = 0; i < count; ++i)
                util::logger().info(name() + ": " + stream(s) + "[" + std::to_string(i) +
                                    "] = " + sample_text(value, i));
        }
    }

private:
    static std::string sample_text(const streams::Value& value, std::size_t i) {
        std::ostringstream out;
        switch (value.kind()) {
            case streams::ValueKind::numeric_array: {
                const numeric::NDArray& a = value.array();
                out << '[';
                for (std::size_t j = 0; j < a.cols(); ++j) {
                    if (j > 0) out << ", ";
                    out << (a.rank() >= 2 ? a.at(i, j) : a[i]);
                    if (a.rank() < 2) break;
                }
                out << ']';
                break;
            }
            case streams::ValueKind::index_list: out << value.indices()[i]; break;
            case streams::ValueKind::string_list: out << value.strings()[i]; break;
            case streams::ValueKind::scalar: out << value.scalar(); break;
        }
        return out.str();
    }

    std::vector<std::string> streams_;
    std::size_t sample_count_ = 3;
};

// Writes one CSV row per sample: the sample index followed by each named
// stream rendered per sample (argmax for rank-2 arrays, token for string
// lists). Relative paths land in the experiment directory when one exists.
class CsvExporter : public pipeline::Component {
public:
    using Component::Component;

    void initialize(config::GlobalParams& globals) override {
        const config::Json* list = config_.params.find("input_streams");
        if (list == nullptr || !list->is_array() || list->empty())
            throw ConfigError("Component '" + name() + "': 'input_streams' list is required");
        for (const auto& s : *list) streams_.push_back(s.get<std::string>());

        const config::Json* path = config_.params.find("path");
        if (path == nullptr || !path->is_string())
            throw ConfigError("Component '" + name() + "': 'path' is required");
        std::filesystem::path resolved{path->get<std::string>()};
        if (resolved.is_relative() && globals.has("experiment_dir"))
            resolved = std::filesystem::path(globals.get_as<std::string>("experiment_dir")) /
                       resolved;
        path_ = resolved.string();

        mode_ = config_.params.get_or<std::string>("mode", "overwrite");
        if (mode_ != "overwrite" && mode_ != "append")
            throw ConfigError("Component '" + name() + "': mode must be overwrite or append");
    }

    std::map<std::string, streams::StreamDefinition> input_definitions() const override {
        std::map<std::string, streams::StreamDefinition> defs;
        for (const auto& s : streams_) defs.emplace(s, streams::StreamDefinition::any());
        return defs;
    }
    std::map<std::string, streams::StreamDefinition> output_definitions() const override {
        return {};
    }

    void execute(streams::Batch& batch) override {
        if (!out_.is_open()) open_file();
        for (std::size_t i = 0; i < batch.batch_size(); ++i) {
            out_ << batch.sample_indices()[i];
            for (const auto& s : streams_) out_ << ',' << cell_text(batch.get(stream(s)), i);
            out_ << '\n';
        }
        out_.flush();
        if (!out_) throw IoError("Component '" + name() + "': write failed for " + path_);
    }

    const std::string& path() const { return path_; }

private:
    void open_file() {
        if (auto parent = std::filesystem::path(path_).parent_path(); !parent.empty())
            std::filesystem::create_directories(parent);
        const bool append = mode_ == "append";
        const bool existing =
            append && std::filesystem::exists(path_) && std::filesystem::file_size(path_) > 0;
        out_.open(path_, append ? std::ios::out | std::ios::app : std::ios::out | std::ios::trunc);
        if (!out_) throw IoError("Component '" + name() + "': cannot open " + path_);
        if (!existing) {
            out_ << "sample_index";
            for (const auto& s : streams_) out_ << ',' << stream(s);
            out_ << '\n';
        }
    }

    std::string cell_text(const streams::Value& value, std::size_t i) const {
        std::ostringstream out;
        switch (value.kind()) {
            case streams::ValueKind::numeric_array: {
                const numeric::NDArray& a = value.array();
                if (a.rank() == 2) out << argmax_row(a, i);
                else out << a[i];
                break;
            }
            case streams::ValueKind::index_list: out << value.indices()[i]; break;
            case streams::ValueKind::string_list: out << value.strings()[i]; break;
            case streams::ValueKind::scalar: out << value.scalar(); break;
        }
        return out.str();
    }

    std::vector<std::string> streams_;
    std::string path_;
    std::string mode_ = "overwrite";
    std::ofstream out_;
};

}  // namespace ptp::zoo
