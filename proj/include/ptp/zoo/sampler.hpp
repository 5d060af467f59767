#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "ptp/errors.hpp"
#include "ptp/numeric/rng.hpp"
#include "ptp/pipeline/component.hpp"
#include "ptp/streams/batch.hpp"

namespace ptp::zoo {

enum class SamplerKind { sequential, shuffled, weighted };

inline SamplerKind parse_sampler(const std::string& name) {
    if (name == "sequential") return SamplerKind::sequential;
    if (name == "shuffled") return SamplerKind::shuffled;
    if (name == "weighted") return SamplerKind::weighted;
    throw ConfigError("Unknown sampler '" + name + "'");
}

// Base for tasks with a fixed-length dataset: handles batch sizing, epoch
// boundaries (the last batch of an epoch may be short) and the three sampling
// strategies. Subclasses generate data at initialization and fill batches on
// demand.
class SampledTask : public pipeline::TaskComponent {
public:
    using TaskComponent::TaskComponent;

    std::size_t dataset_size() const override { return size_; }
    std::size_t batch_size() const override { return batch_size_; }

    streams::Batch next_batch() final {
        if (size_ == 0) throw ConfigError("Task '" + name() + "' was not initialized");
        if (cursor_ == 0 && sampler_ == SamplerKind::shuffled)
            shuffle(order_, sampler_rng_);

        const std::size_t n = std::min(batch_size_, size_ - cursor_);
        std::vector<std::size_t> indices(n);
        for (std::size_t i = 0; i < n; ++i) {
            indices[i] = sampler_ == SamplerKind::weighted ? weighted_draw() : order_[cursor_ + i];
        }
        cursor_ = (cursor_ + n) % size_;

        streams::Batch batch(n, indices);
        fill(batch, indices);
        return batch;
    }

protected:
    // Call from initialize once the dataset length is known.
    void setup_sampler(std::size_t dataset_size) {
        if (dataset_size == 0) throw ConfigError("Task '" + name() + "': dataset is empty");
        size_ = dataset_size;
        batch_size_ = config_.params.get_or<std::size_t>("batch_size", size_);
        if (batch_size_ == 0) throw ConfigError("Task '" + name() + "': batch_size must be positive");
        batch_size_ = std::min(batch_size_, size_);
        sampler_ = parse_sampler(config_.params.get_or<std::string>("sampler", "sequential"));
        sampler_rng_ = numeric::Rng(numeric::splitmix64(dataset_seed() ^ 0x9e3779b97f4a7c15ULL));

        order_.resize(size_);
        std::iota(order_.begin(), order_.end(), 0);

        if (sampler_ == SamplerKind::weighted) {
            const config::Json* weights = config_.params.find("weights");
            if (weights == nullptr || !weights->is_array() || weights->size() != size_)
                throw ConfigError("Task '" + name() +
                                  "': weighted sampler needs a 'weights' list of dataset length");
            cumulative_.clear();
            double total = 0.0;
            for (const auto& w : *weights) {
                const double value = w.get<double>();
                if (value < 0.0) throw ConfigError("Task '" + name() + "': weights must be >= 0");
                total += value;
                cumulative_.push_back(total);
            }
            if (total <= 0.0) throw ConfigError("Task '" + name() + "': weights sum to zero");
        }
        cursor_ = 0;
    }

    // Seed controlling dataset content; explicit `seed` param pins it across
    // differently named tasks, otherwise the component's derived seed is used.
    std::uint64_t dataset_seed() const {
        const config::Json* seed = config_.params.find("seed");
        if (seed != nullptr && seed->is_number())
            return seed->get<std::uint64_t>();
        return config_.seed;
    }

    virtual void fill(streams::Batch& batch, const std::vector<std::size_t>& indices) = 0;

private:
    static void shuffle(std::vector<std::size_t>& order, numeric::Rng& rng) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.index(i)]);
    }

    std::size_t weighted_draw() {
        const double u = sampler_rng_.uniform(0.0, cumulative_.back());
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return std::min<std::size_t>(it - cumulative_.begin(), size_ - 1);
    }

    std::size_t size_ = 0;
    std::size_t batch_size_ = 0;
    std::size_t cursor_ = 0;
    SamplerKind sampler_ = SamplerKind::sequential;
    std::vector<std::size_t> order_;
    std::vector<double> cumulative_;
    numeric::Rng sampler_rng_;
};

}  // namespace ptp::zoo
