#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "fasisac/errors.hpp"
#include "fasisac/rng.hpp"

namespace fasisac {

struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_state;
};

// Fixed-capacity ring: when full, pushing evicts the oldest transition.
// Logical index 0 is always the oldest stored item.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 10000) : capacity_(capacity) {
    if (capacity_ == 0) throw ConfigError("ReplayBuffer: capacity must be >= 1");
    storage_.reserve(capacity_);
  }

  void push(Transition t) {
    if (storage_.size() < capacity_) {
      storage_.push_back(std::move(t));
    } else {
      storage_[next_slot_] = std::move(t);
    }
    next_slot_ = (next_slot_ + 1) % capacity_;
  }

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return storage_.size() == capacity_; }

  // i-th oldest transition, i in [0, size).
  const Transition& at(std::size_t i) const {
    if (i >= storage_.size()) throw ConfigError("ReplayBuffer::at: index out of range");
    if (!full()) return storage_[i];
    return storage_[(next_slot_ + i) % capacity_];
  }

  // One uniformly random stored transition.
  const Transition& sample_one(Rng& rng) const {
    if (storage_.empty()) throw ConfigError("ReplayBuffer::sample_one: buffer empty");
    auto idx = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(storage_.size()));
    if (idx >= storage_.size()) idx = storage_.size() - 1;  // uniform01 can return values -> 1
    return storage_[idx];
  }

 private:
  std::size_t capacity_;
  std::size_t next_slot_ = 0;
  std::vector<Transition> storage_;
};

}  // namespace fasisac
