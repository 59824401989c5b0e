#pragma once

#include <cstddef>
#include <unordered_set>
#include <vector>

#include "hbmes/errors.hpp"
#include "hbmes/rng.hpp"

namespace hbmes {

// One stored experience: normalized joint observation, concatenated one-hot
// joint action, per-agent rewards, normalized next joint observation.
struct Transition {
  std::vector<double> obs;
  std::vector<double> actions;
  std::vector<double> rewards;
  std::vector<double> next_obs;
};

// FIFO ring buffer with uniform sampling without replacement within a batch.
template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay capacity must be positive");
    storage_.reserve(capacity);
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return storage_.size(); }

  void push(T item) {
    if (storage_.size() < capacity_) {
      storage_.push_back(std::move(item));
    } else {
      storage_[next_] = std::move(item);  // overwrite oldest
      next_ = (next_ + 1) % capacity_;
    }
  }

  const T& at(std::size_t i) const { return storage_[i]; }

  // K distinct uniform indices (Floyd's sampling).
  std::vector<std::size_t> sample_indices(std::size_t k, Rng& rng) const {
    if (k == 0 || k > size()) {
      throw StateError("replay not ready: requested " + std::to_string(k) +
                       " of " + std::to_string(size()) + " transitions");
    }
    std::vector<std::size_t> picked;
    picked.reserve(k);
    std::unordered_set<std::size_t> seen;
    for (std::size_t j = size() - k; j < size(); ++j) {
      const std::size_t t = static_cast<std::size_t>(rng.below(j + 1));
      if (seen.insert(t).second) {
        picked.push_back(t);
      } else {
        seen.insert(j);
        picked.push_back(j);
      }
    }
    return picked;
  }

  std::vector<const T*> sample(std::size_t k, Rng& rng) const {
    std::vector<const T*> batch;
    batch.reserve(k);
    for (std::size_t i : sample_indices(k, rng)) batch.push_back(&storage_[i]);
    return batch;
  }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;  // oldest element once full
  std::vector<T> storage_;
};

}  // namespace hbmes
