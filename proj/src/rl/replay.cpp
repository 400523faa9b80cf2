#include "damrl/rl/replay.hpp"

#include <stdexcept>

namespace damrl::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : storage_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay buffer: zero capacity");
}

void ReplayBuffer::push(Transition t) {
    storage_[next_] = std::move(t);
    next_ = (next_ + 1) % storage_.size();
    if (size_ < storage_.size()) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= size_) throw std::out_of_range("replay buffer: index past size");
    return storage_[i];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch, RngStream& rng) const {
    if (batch > size_) {
        throw std::logic_error("replay buffer: sampling " + std::to_string(batch) +
                               " from only " + std::to_string(size_) + " stored transitions");
    }
    std::vector<const Transition*> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) {
        out.push_back(&storage_[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(size_)))]);
    }
    return out;
}

} // namespace damrl::rl
