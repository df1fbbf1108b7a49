#pragma once

#include <cstddef>
#include <functional>

#include "carp/rng.hpp"

namespace carp::detail {

// Keeps a uniformly random element among those tied for the best key.
template <class Key, class Better>
class TieBreaker {
 public:
  TieBreaker(Rng& rng, Better better) : rng_(rng), better_(better) {}

  void offer(std::size_t index, Key key) {
    if (count_ == 0 || better_(key, best_key_)) {
      best_ = index;
      best_key_ = key;
      count_ = 1;
    } else if (!better_(best_key_, key)) {
      ++count_;
      if (rng_.index(count_) == 0) best_ = index;
    }
  }

  bool empty() const { return count_ == 0; }
  std::size_t best() const { return best_; }
  Key key() const { return best_key_; }

 private:
  Rng& rng_;
  Better better_;
  std::size_t best_ = 0;
  Key best_key_{};
  std::size_t count_ = 0;
};

template <class Key>
auto min_picker(Rng& rng) {
  return TieBreaker<Key, std::less<Key>>(rng, std::less<Key>());
}

template <class Key>
auto max_picker(Rng& rng) {
  return TieBreaker<Key, std::greater<Key>>(rng, std::greater<Key>());
}

}  // namespace carp::detail
