#pragma once

#include <cstdint>
#include <vector>

namespace percolab {

// Disjoint sets with union by size and path halving.
class UnionFind {
 public:
  explicit UnionFind(std::int32_t count);

  std::int32_t find(std::int32_t x) noexcept;
  // Returns the surviving root.
  std::int32_t unite(std::int32_t a, std::int32_t b) noexcept;
  std::int32_t size_of_root(std::int32_t root) const noexcept { return size_[root]; }
  std::int32_t count() const noexcept { return static_cast<std::int32_t>(parent_.size()); }

 private:
  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> size_;
};

}  // namespace percolab
