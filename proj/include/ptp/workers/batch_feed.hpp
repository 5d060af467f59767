#pragma once

#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "ptp/pipeline/component.hpp"
#include "ptp/streams/batch.hpp"

namespace ptp::workers {

// Hands out a fixed number of batches from a task. With capacity 0 the task
// is polled synchronously; otherwise a producer thread keeps up to `capacity`
// batches prepared ahead of the consumer. The producer is the only code
// touching the task while the feed is alive.
class BatchFeed {
public:
    BatchFeed(pipeline::TaskComponent& task, std::size_t count, std::size_t capacity)
        : task_(task), count_(count), capacity_(capacity) {
        if (capacity_ > 0 && count_ > 0) producer_ = std::thread([this] { produce(); });
    }

    BatchFeed(const BatchFeed&) = delete;
    BatchFeed& operator=(const BatchFeed&) = delete;

    ~BatchFeed() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            cancelled_ = true;
        }
        space_.notify_all();
        if (producer_.joinable()) producer_.join();
    }

    // Next batch, or nullopt once `count` batches have been handed out.
    // Rethrows any exception the producer hit while preparing a batch.
    std::optional<streams::Batch> next() {
        if (capacity_ == 0) {
            if (handed_out_ == count_) return std::nullopt;
            ++handed_out_;
            return task_.next_batch();
        }
        std::unique_lock<std::mutex> lock(mutex_);
        ready_.wait(lock, [&] { return !queue_.empty() || done_; });
        if (queue_.empty()) {
            if (error_) std::rethrow_exception(error_);
            return std::nullopt;
        }
        std::optional<streams::Batch> batch(std::move(queue_.front()));
        queue_.pop_front();
        lock.unlock();
        space_.notify_one();
        return batch;
    }

private:
    void produce() {
        try {
            for (std::size_t i = 0; i < count_; ++i) {
                streams::Batch batch = task_.next_batch();
                std::unique_lock<std::mutex> lock(mutex_);
                space_.wait(lock, [&] { return queue_.size() < capacity_ || cancelled_; });
                if (cancelled_) return;
                queue_.push_back(std::move(batch));
                lock.unlock();
                ready_.notify_one();
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(mutex_);
            error_ = std::current_exception();
        }
        {
            std::lock_guard<std::mutex> lock(mutex_);
            done_ = true;
        }
        ready_.notify_all();
    }

    pipeline::TaskComponent& task_;
    const std::size_t count_;
    const std::size_t capacity_;
    std::size_t handed_out_ = 0;

    std::thread producer_;
    std::mutex mutex_;
    std::condition_variable ready_;
    std::condition_variable space_;
    std::deque<streams::Batch> queue_;
    bool done_ = false;
    bool cancelled_ = false;
    std::exception_ptr error_;
};

}  // namespace ptp::workers
