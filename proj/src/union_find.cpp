#include "percolab/union_find.hpp"

#include <numeric>
#include <utility>

namespace percolab {

UnionFind::UnionFind(std::int32_t count) : parent_(count), size_(count, 1) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

std::int32_t UnionFind::find(std::int32_t x) noexcept {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

std::int32_t UnionFind::unite(std::int32_t a, std::int32_t b) noexcept {
  a = find(a);
  b = find(b);
  if (a == b) return a;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return a;
}

}  // namespace percolab
