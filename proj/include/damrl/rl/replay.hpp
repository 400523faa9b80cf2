#pragma once

#include <cstddef>
#include <vector>

#include "damrl/common/rng.hpp"

namespace damrl::rl {

/// One environment step in normalized coordinates.
struct Transition {
    std::vector<double> state;
    double action = 0.0; // in [-1, 1]
    double reward = 0.0;
    std::vector<double> next_state;
    bool done = false;
};

/// Fixed-capacity ring buffer with seeded uniform sampling (with
/// replacement).
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return storage_.size(); }
    const Transition& at(std::size_t i) const;

    /// Throws std::logic_error when batch > size.
    std::vector<const Transition*> sample(std::size_t batch, RngStream& rng) const;

  private:
    std::vector<Transition> storage_;
    std::size_t size_ = 0;
    std::size_t next_ = 0;
};

} // namespace damrl::rl
