#include "hsr/rank_select.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "hsr/errors.hpp"

namespace hsr {

namespace {

// Index of the k-th (0-based) set bit inside a word; the word must have more than k ones.
unsigned select_in_word(std::uint64_t word, unsigned k) {
  for (unsigned byte = 0; byte < 8; ++byte) {
    const unsigned c = std::popcount((word >> (byte * 8)) & 0xffu);
    if (k < c) {
      std::uint64_t b = (word >> (byte * 8)) & 0xffu;
      for (unsigned i = 0; i < k; ++i) b &= b - 1;
      return byte * 8 + static_cast<unsigned>(std::countr_zero(b));
    }
    k -= c;
  }
  return 64;
}

}  // namespace

BitVector::BitVector(std::size_t size, bool value)
    : words_((size + 63) / 64, value ? ~0ull : 0ull), size_(size) {
  if (value && (size_ & 63)) words_.back() &= (1ull << (size_ & 63)) - 1;
}

BitVector BitVector::from_string(std::string_view bits) {
  BitVector v;
  for (char c : bits) {
    if (c == '0' || c == '1') v.push_back(c == '1');
  }
  return v;
}

void BitVector::push_back(bool value) {
  if ((size_ & 63) == 0) words_.push_back(0);
  ++size_;
  set(size_ - 1, value);
}

RankSelectBitVector::RankSelectBitVector(BitVector bits) : size_(bits.size()) {
  words_ = bits.release_words();
  words_.resize((size_ + 63) / 64);
  words_.shrink_to_fit();
  for (auto w : words_) ones_ += static_cast<std::size_t>(std::popcount(w));
  if (!has_directory()) return;

  const std::size_t n_super = (size_ + kSuperblockBits - 1) / kSuperblockBits;
  superblocks_.assign(n_super + 1, 0);
  blocks_.assign(words_.size(), 0);
  std::size_t total = 0;
  std::size_t next_sample = 1;
  for (std::size_t s = 0; s < n_super; ++s) {
    superblocks_[s] = total;
    std::size_t rel = 0;
    const std::size_t w_end = std::min(words_.size(), (s + 1) * (kSuperblockBits / 64));
    for (std::size_t w = s * (kSuperblockBits / 64); w < w_end; ++w) {
      blocks_[w] = static_cast<std::uint16_t>(rel);
      rel += static_cast<std::size_t>(std::popcount(words_[w]));
    }
    // Record the superblock holding every kSelectSample-th one.
    while (next_sample <= total + rel) {
      select_samples_.push_back(static_cast<std::uint32_t>(s));
      next_sample += kSelectSample;
    }
    total += rel;
  }
  superblocks_[n_super] = total;
  select_samples_.shrink_to_fit();
}

std::size_t RankSelectBitVector::rank_words(std::size_t j) const {
  const std::size_t w = j >> 6;
  std::size_t r;
  if (has_directory()) {
    r = superblocks_[j / kSuperblockBits] + blocks_[w];
  } else {
    r = 0;
    for (std::size_t i = 0; i < w; ++i) r += static_cast<std::size_t>(std::popcount(words_[i]));
  }
  if (j & 63) r += static_cast<std::size_t>(std::popcount(words_[w] & ((1ull << (j & 63)) - 1)));
  return r;
}

std::size_t RankSelectBitVector::rank(std::size_t j) const {
  if (j > size_) throw std::out_of_range("rank: position beyond end");
  if (j == size_) return ones_;
  return rank_words(j);
}

std::size_t RankSelectBitVector::select(std::size_t k) const {
  if (k == 0 || k > ones_) throw std::out_of_range("select: rank out of range");
  std::size_t w = 0;
  std::size_t before = 0;
  if (has_directory()) {
    const std::size_t sample = (k - 1) / kSelectSample;
    std::size_t lo = select_samples_[sample];
    std::size_t hi = sample + 1 < select_samples_.size() ? select_samples_[sample + 1]
                                                         : superblocks_.size() - 2;
    // Last superblock in [lo, hi] whose starting count is below k.
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      if (superblocks_[mid] < k)
        lo = mid;
      else
        hi = mid - 1;
    }
    w = lo * (kSuperblockBits / 64);
    const std::size_t w_end = std::min(words_.size(), w + kSuperblockBits / 64);
    while (w + 1 < w_end && superblocks_[lo] + blocks_[w + 1] < k) ++w;
    before = superblocks_[lo] + blocks_[w];
  } else {
    for (;; ++w) {
      const std::size_t c = static_cast<std::size_t>(std::popcount(words_[w]));
      if (before + c >= k) break;
      before += c;
    }
  }
  return w * 64 + select_in_word(words_[w], static_cast<unsigned>(k - before - 1));
}

std::size_t RankSelectBitVector::next_one_cyclic(std::size_t lo, std::size_t hi,
                                                 std::size_t from) const {
  if (lo > hi || hi >= size_ || from < lo || from > hi)
    throw std::out_of_range("next_one_cyclic: bad block");
  const std::size_t upto_from = rank(from + 1);
  const std::size_t upto_hi = rank(hi + 1);
  if (upto_from < upto_hi) return select(upto_from + 1);
  const std::size_t before_lo = rank(lo);
  if (before_lo == upto_hi) throw EmptyBlock();
  return select(before_lo + 1);
}

BitVector RankSelectBitVector::to_bits() const {
  BitVector b(size_);
  for (std::size_t i = 0; i < size_; ++i)
    if (get(i)) b.set(i);
  return b;
}

std::size_t RankSelectBitVector::aux_bits() const {
  return superblocks_.capacity() * 64 + blocks_.capacity() * 16 + select_samples_.capacity() * 32;
}

}  // namespace hsr
