#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace hsr {

/// Number of bits needed to store every value in [0, max_value].
inline unsigned bits_for(std::uint64_t max_value) {
  return max_value == 0 ? 1u : static_cast<unsigned>(std::bit_width(max_value));
}

/// Fixed-width unsigned integers packed back to back into 64-bit words.
/// Values never straddle more than two words; width is between 1 and 64.
class PackedIntVector {
 public:
  PackedIntVector() = default;
  PackedIntVector(std::size_t size, unsigned width) : size_(size), width_(width) {
    if (width_ == 0 || width_ > 64) throw std::invalid_argument("PackedIntVector: width out of range");
    words_.assign((size_ * width_ + 63) / 64, 0);
    words_.shrink_to_fit();
  }

  template <class It>
  static PackedIntVector from_range(It first, It last, unsigned width) {
    PackedIntVector v(static_cast<std::size_t>(std::distance(first, last)), width);
    std::size_t i = 0;
    for (; first != last; ++first) v.set(i++, static_cast<std::uint64_t>(*first));
    return v;
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  unsigned width() const { return width_; }

  std::uint64_t get(std::size_t i) const {
    const std::size_t bit = i * width_;
    const std::size_t w = bit >> 6;
    const unsigned off = bit & 63;
    std::uint64_t v = words_[w] >> off;
    if (off + width_ > 64) v |= words_[w + 1] << (64 - off);
    return v & mask();
  }
  std::uint64_t operator[](std::size_t i) const { return get(i); }

  void set(std::size_t i, std::uint64_t value) {
    const std::uint64_t m = mask();
    value &= m;
    const std::size_t bit = i * width_;
    const std::size_t w = bit >> 6;
    const unsigned off = bit & 63;
    words_[w] = (words_[w] & ~(m << off)) | (value << off);
    if (off + width_ > 64) {
      const unsigned spill = 64 - off;
      words_[w + 1] = (words_[w + 1] & ~(m >> spill)) | (value >> spill);
    }
  }

  /// Allocated capacity in bits, as counted by the space instrumentation.
  std::size_t capacity_bits() const { return words_.capacity() * 64; }

 private:
  std::uint64_t mask() const { return width_ == 64 ? ~0ull : ((1ull << width_) - 1); }

  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
  unsigned width_ = 1;
};

}  // namespace hsr
