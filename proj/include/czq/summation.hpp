#ifndef CZQ_SUMMATION_HPP
#define CZQ_SUMMATION_HPP

#include <complex>
#include <cstddef>
#include <span>

namespace czq {

// Deterministic pairwise reduction; the result depends only on the order of x.
template <class T>
T pairwise_sum(std::span<const T> x) {
  if (x.size() <= 16) {
    T s{};
    for (const T& v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

}  // namespace czq

#endif
