#pragma once

#include <memory>

#include "ptp/pipeline/factory.hpp"
#include "ptp/zoo/feed_forward.hpp"
#include "ptp/zoo/losses.hpp"
#include "ptp/zoo/stats_viewers.hpp"
#include "ptp/zoo/tasks.hpp"
#include "ptp/zoo/transforms.hpp"

namespace ptp::zoo {

namespace detail {

template <typename T>
pipeline::ComponentFactory::Builder builder() {
    return [](config::ComponentConfig config) -> std::unique_ptr<pipeline::Component> {
        return std::make_unique<T>(std::move(config));
    };
}

inline config::ConfigTree defaults(config::Json params) {
    return config::ConfigTree(std::move(params));
}

inline config::Json sampler_defaults() {
    return {{"sampler", "sequential"},
            {"batch_size", nullptr},
            {"seed", nullptr},
            {"weights", nullptr}};
}

}  // namespace detail

// Registers every built-in component type with its default parameters. Every
// parameter a type accepts appears here, so unknown experiment keys can be
// flagged.
inline void register_zoo(pipeline::ComponentFactory& factory) {
    using detail::builder;
    using detail::defaults;
    using config::Json;

    Json blobs = detail::sampler_defaults();
    blobs.update(Json{{"num_classes", 3}, {"dim", 2}, {"samples_per_class", 100}, {"spread", 0.1}});
    factory.register_type("gaussian_blobs", defaults(blobs), builder<GaussianBlobsTask>());

    Json parity = detail::sampler_defaults();
    parity.update(Json{{"num_bits", 2}});
    factory.register_type("parity", defaults(parity), builder<ParityTask>());

    Json csv = detail::sampler_defaults();
    csv.update(Json{{"path", nullptr},
                    {"feature_columns", nullptr},
                    {"label_column", nullptr},
                    {"publish_vocabulary", true}});
    factory.register_type("csv_task", defaults(csv), builder<CsvTask>());

    factory.register_type("feed_forward",
                          defaults({{"hidden_sizes", Json::array()},
                                    {"activation", "relu"},
                                    {"final_activation", "log_softmax"},
                                    {"dropout", 0.0},
                                    {"input_size", nullptr},
                                    {"prediction_size", nullptr}}),
                          builder<FeedForwardNetwork>());
    factory.register_type("label_indexer",
                          defaults({{"vocab_source", "from_data"}, {"unk_policy", "error"}}),
                          builder<LabelIndexer>());
    factory.register_type("one_hot", defaults(Json::object()), builder<OneHot>());
    factory.register_type("concat",
                          defaults({{"input_streams", nullptr}, {"output_stream", "concatenated"}}),
                          builder<Concat>());
    factory.register_type("nll_loss",
                          defaults({{"loss_weight", 1.0}, {"statistics_key", "loss"}}),
                          builder<NllLoss>());
    factory.register_type("mse_loss",
                          defaults({{"loss_weight", 1.0}, {"statistics_key", "loss"}}),
                          builder<MseLoss>());
    factory.register_type("accuracy",
                          defaults({{"statistics_key", "accuracy"}}),
                          builder<AccuracyStat>());
    factory.register_type("stream_viewer",
                          defaults({{"input_streams", nullptr}, {"sample_count", 3}}),
                          builder<StreamViewer>());
    factory.register_type("csv_exporter",
                          defaults({{"input_streams", nullptr},
                                    {"path", nullptr},
                                    {"mode", "overwrite"}}),
                          builder<CsvExporter>());
}

}  // namespace ptp::zoo
