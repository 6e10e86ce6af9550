#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace tailcross {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Counter-based pseudorandom stream (Philox4x32-10).
///
/// A stream is identified by a 64-bit seed plus a (purpose, round, split)
/// stream id.  Identical (seed, id) reproduces the identical sequence
/// regardless of how many other streams were drawn from in between, so
/// parallel experiments replay exactly.  fork() derives a statistically
/// independent child stream from a tag.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t purpose = 0,
                     std::uint64_t round = 0, std::uint64_t split = 0) {
    std::uint64_t k = detail::splitmix64(seed);
    k = detail::splitmix64(k ^ purpose);
    k = detail::splitmix64(k ^ round);
    k = detail::splitmix64(k ^ split);
    key_ = k;
    reset_counter();
  }

  RngStream fork(std::uint64_t tag) const {
    RngStream child(*this);
    child.key_ = detail::splitmix64(key_ ^ detail::splitmix64(tag));
    child.reset_counter();
    return child;
  }

  std::uint64_t next_u64() {
    if (buffer_pos_ >= 2) refill();
    return buffer_[buffer_pos_++];
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal variate (Box-Muller, second value cached).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], log is finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    cached_ = r * std::sin(t);
    have_cached_ = true;
    return r * std::cos(t);
  }

  /// Integer uniform on [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    // Multiply-shift; bias is negligible for bound << 2^64 and the result
    // is deterministic, which is what the reproducibility contract needs.
    unsigned __int128 m =
        static_cast<unsigned __int128>(next_u64()) * bound;
    return static_cast<std::uint64_t>(m >> 64);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  void reset_counter() {
    counter_ = {0, 0, 0, 0};
    buffer_pos_ = 2;
    have_cached_ = false;
    cached_ = 0.0;
  }

  static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
  }

  void refill() {
    std::array<std::uint32_t, 4> c = counter_;
    std::uint32_t k0 = static_cast<std::uint32_t>(key_);
    std::uint32_t k1 = static_cast<std::uint32_t>(key_ >> 32);
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0, lo0, hi1, lo1;
      mulhilo(0xD2511F53u, c[0], hi0, lo0);
      mulhilo(0xCD9E8D57u, c[2], hi1, lo1);
      c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    buffer_[0] = (static_cast<std::uint64_t>(c[0]) << 32) | c[1];
    buffer_[1] = (static_cast<std::uint64_t>(c[2]) << 32) | c[3];
    buffer_pos_ = 0;
    // 128-bit counter increment
    if (++counter_[0] == 0 && ++counter_[1] == 0 && ++counter_[2] == 0)
      ++counter_[3];
  }

  std::uint64_t key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint64_t, 2> buffer_;
  int buffer_pos_;
  bool have_cached_;
  double cached_;
};

}  // namespace tailcross
