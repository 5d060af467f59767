#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "ptp/errors.hpp"

namespace ptp::stats {

// Gathers per-batch statistic values for one phase. Keys are claimed once
// (duplicate claims are configuration errors); values must be finite.
class StatisticsCollector {
public:
    void register_key(const std::string& key) {
        if (series_.count(key) > 0)
            throw ConfigError("Statistic key '" + key + "' is already registered");
        series_[key];
    }

    bool registered(const std::string& key) const { return series_.count(key) > 0; }

    void collect(const std::string& key, double value, std::size_t batch_size) {
        auto it = series_.find(key);
        if (it == series_.end())
            throw ConfigError("Statistic key '" + key + "' was never registered");
        if (!std::isfinite(value))
            throw NumericError("Non-finite value collected for statistic '" + key + "'");
        if (batch_size == 0)
            throw NumericError("Statistic '" + key + "' collected with zero batch size");
        it->second.push_back({batch_size, value});
    }

    bool empty() const {
        for (const auto& [key, samples] : series_)
            if (!samples.empty()) return false;
        return true;
    }

    std::vector<std::string> keys() const {
        std::vector<std::string> out;
        for (const auto& [key, samples] : series_) out.push_back(key);
        return out;
    }

    struct Sample {
        std::size_t batch_size;
        double value;
    };

    const std::vector<Sample>& samples(const std::string& key) const {
        auto it = series_.find(key);
        if (it == series_.end())
            throw ConfigError("Statistic key '" + key + "' was never registered");
        return it->second;
    }

    // Drops collected values; registered keys survive for the next phase.
    void reset_values() {
        for (auto& [key, samples] : series_) samples.clear();
    }

private:
    std::map<std::string, std::vector<Sample>> series_;
};

struct StatisticsAggregation {
    struct Entry {
        double mean = 0.0;  // batch-size weighted
        double min = 0.0;   // unweighted over per-batch values
        double max = 0.0;
        double std = 0.0;   // population std of per-batch values
        std::size_t batches = 0;
    };

    std::map<std::string, Entry> entries;
    std::int64_t episode = 0;
    std::int64_t epoch = 0;

    bool has(const std::string& key) const { return entries.count(key) > 0; }

    double mean(const std::string& key) const {
        auto it = entries.find(key);
        if (it == entries.end()) throw ConfigError("No aggregated statistic named '" + key + "'");
        return it->second.mean;
    }
};

// Reduces the collector's series and resets the collected values.
inline StatisticsAggregation aggregate(StatisticsCollector& collector) {
    if (collector.empty()) throw ConfigError("Cannot aggregate: no statistics were collected");
    StatisticsAggregation agg;
    for (const auto& key : collector.keys()) {
        const auto& samples = collector.samples(key);
        if (samples.empty()) continue;
        StatisticsAggregation::Entry entry;
        entry.batches = samples.size();
        entry.min = samples.front().value;
        entry.max = samples.front().value;
        double weighted_sum = 0.0, weight = 0.0, sum = 0.0, sum_sq = 0.0;
        for (const auto& s : samples) {
            weighted_sum += s.value * double(s.batch_size);
            weight += double(s.batch_size);
            sum += s.value;
            sum_sq += s.value * s.value;
            entry.min = std::min(entry.min, s.value);
            entry.max = std::max(entry.max, s.value);
        }
        entry.mean = weighted_sum / weight;
        const double n = double(samples.size());
        const double variance = std::max(0.0, sum_sq / n - (sum / n) * (sum / n));
        entry.std = std::sqrt(variance);
        agg.entries.emplace(key, entry);
    }
    collector.reset_values();
    return agg;
}

namespace detail {

inline std::string format_stat(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

}  // namespace detail

// Appends one row per call; writes the header on first use of the file.
// The column set is frozen by the first row.
inline void export_csv(const StatisticsAggregation& agg, const std::filesystem::path& path) {
    std::string header = "episode,epoch";
    for (const auto& [key, entry] : agg.entries) header += "," + key + "_mean";

    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;

    if (!fresh) {
        std::ifstream existing(path);
        std::string first_line;
        std::getline(existing, first_line);
        if (first_line != header)
            throw IoError("Statistics column set changed for " + path.string() + ": had '" +
                          first_line + "', got '" + header + "'");
    }

    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("Cannot open statistics file " + path.string());
    if (fresh) out << header << "\n";
    out << agg.episode << "," << agg.epoch;
    for (const auto& [key, entry] : agg.entries) out << "," << detail::format_stat(entry.mean);
    out << "\n";
    if (!out) throw IoError("Write failed for statistics file " + path.string());
}

}  // namespace ptp::stats
