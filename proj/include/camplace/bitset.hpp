#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace camplace {

// Fixed-universe bitset over free-voxel ids.
class VoxelBits {
 public:
  VoxelBits() = default;
  explicit VoxelBits(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

  template <typename Ids>
  static VoxelBits from_ids(std::size_t universe, const Ids& ids) {
    VoxelBits b(universe);
    for (auto v : ids) b.set(v);
    return b;
  }

  std::size_t universe() const { return universe_; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  // |other \ this|
  std::size_t count_new(const VoxelBits& other) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) c += std::popcount(other.words_[i] & ~words_[i]);
    return c;
  }

  std::size_t count_and(const VoxelBits& other) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) c += std::popcount(other.words_[i] & words_[i]);
    return c;
  }

  VoxelBits& operator|=(const VoxelBits& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }

  std::vector<std::uint32_t> ids() const {
    std::vector<std::uint32_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      for (std::uint64_t bits = words_[w]; bits; bits &= bits - 1) {
        out.push_back(static_cast<std::uint32_t>(w * 64 + std::countr_zero(bits)));
      }
    }
    return out;
  }

  bool operator==(const VoxelBits&) const = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace camplace
