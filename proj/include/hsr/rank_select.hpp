#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace hsr {

/// Plain mutable bit sequence; freeze it into a RankSelectBitVector for queries.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size, bool value = false);

  /// Parses a string of '0'/'1' characters; other characters are ignored.
  static BitVector from_string(std::string_view bits);

  std::size_t size() const { return size_; }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool value = true) {
    const std::uint64_t bit = 1ull << (i & 63);
    if (value)
      words_[i >> 6] |= bit;
    else
      words_[i >> 6] &= ~bit;
  }
  void push_back(bool value);

  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>&& release_words() { return std::move(words_); }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

/// Static bit vector with constant-time rank and select.
///
/// Layout: 512-bit superblocks with absolute 64-bit counts, 64-bit blocks with
/// 16-bit counts relative to their superblock, and a select sample every 4096
/// set bits. Vectors of at most 512 bits carry no directory at all: a rank is
/// then at most eight popcounts.
///
/// Positions are 0-based. rank(j) counts the set bits in [0, j), so it equals
/// the 1-based prefix sum b_1 + ... + b_j. select(k) returns the 0-based index of
/// the k-th set bit (k >= 1).
class RankSelectBitVector {
 public:
  static constexpr std::size_t kSuperblockBits = 512;
  static constexpr std::size_t kBlockBits = 64;
  static constexpr std::size_t kSelectSample = 4096;

  RankSelectBitVector() = default;
  explicit RankSelectBitVector(BitVector bits);

  std::size_t size() const { return size_; }
  std::size_t count_ones() const { return ones_; }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

  /// Number of set bits in [0, j); throws std::out_of_range unless j <= size().
  std::size_t rank(std::size_t j) const;
  /// Index of the k-th set bit; throws std::out_of_range unless 1 <= k <= count_ones().
  std::size_t select(std::size_t k) const;
  /// Set bits in the inclusive range [lo, hi].
  std::size_t count_range(std::size_t lo, std::size_t hi) const { return rank(hi + 1) - rank(lo); }

  /// First set bit strictly after `from`, scanning [lo, hi] cyclically. Returns
  /// `from` itself only when it is the unique set bit of the block. Throws
  /// EmptyBlock when the block has no set bit.
  std::size_t next_one_cyclic(std::size_t lo, std::size_t hi, std::size_t from) const;

  BitVector to_bits() const;

  std::size_t payload_bits() const { return size_; }
  /// Bits held by the rank/select directories (allocated capacity).
  std::size_t aux_bits() const;
  /// Payload words plus directories, as allocated.
  std::size_t capacity_bits() const { return words_.capacity() * 64 + aux_bits(); }

 private:
  bool has_directory() const { return size_ > kSuperblockBits; }
  std::size_t rank_words(std::size_t j) const;

  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> superblocks_;
  std::vector<std::uint16_t> blocks_;
  std::vector<std::uint32_t> select_samples_;
  std::size_t size_ = 0;
  std::size_t ones_ = 0;
};

}  // namespace hsr
