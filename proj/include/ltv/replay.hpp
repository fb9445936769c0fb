#pragma once

#include <stdexcept>
#include <vector>

#include "ltv/rng.hpp"

namespace ltv {

// Bounded tuple store with oldest-first eviction and uniform-with-replacement
// sampling over current contents.
template <class Tuple>
class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("invalid-config: zero capacity");
        data_.reserve(capacity < 4096 ? capacity : 4096);
    }

    void push(Tuple t) {
        if (data_.size() < capacity_) {
            data_.push_back(std::move(t));
        } else {
            data_[next_] = std::move(t);
            next_ = (next_ + 1) % capacity_;
        }
    }

    size_t size() const { return data_.size(); }
    size_t capacity() const { return capacity_; }
    bool empty() const { return data_.empty(); }
    const Tuple& at(size_t i) const { return data_[i]; }

    const Tuple& sample(rng::Stream& st) const {
        if (data_.empty()) throw std::runtime_error("empty-buffer");
        return data_[st.next_below(data_.size())];
    }

private:
    size_t capacity_;
    size_t next_ = 0;  // eviction cursor once full
    std::vector<Tuple> data_;
};

}  // namespace ltv
