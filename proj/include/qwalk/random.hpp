#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace qwalk {

/// Philox4x64-10 counter-based generator.
///
/// A stream is identified by its 128-bit key; draws walk a 256-bit counter.
/// split(id) derives an independent child key, so ensembles can hand every
/// trajectory its own stream from (master seed, trajectory index) and get
/// the same numbers regardless of how the work is scheduled.
///
/// Satisfies std::uniform_random_bit_generator.
class Philox4x64 {
 public:
  using result_type = std::uint64_t;
  using counter_type = std::array<std::uint64_t, 4>;
  using key_type = std::array<std::uint64_t, 2>;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  explicit Philox4x64(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept
      : key_{seed, stream} {}

  Philox4x64(key_type key, counter_type counter) noexcept : key_(key), counter_(counter) {}

  /// The raw bijection: ten Philox rounds of `counter` under `key`.
  static constexpr counter_type block(counter_type ctr, key_type key) noexcept {
    constexpr std::uint64_t m0 = 0xD2E7470EE14C6C93ULL;
    constexpr std::uint64_t m1 = 0xCA5A826395121157ULL;
    constexpr std::uint64_t w0 = 0x9E3779B97F4A7C15ULL;
    constexpr std::uint64_t w1 = 0xBB67AE8584CAA73BULL;
    for (int round = 0; round < 10; ++round) {
      const unsigned __int128 p0 = static_cast<unsigned __int128>(m0) * ctr[0];
      const unsigned __int128 p1 = static_cast<unsigned __int128>(m1) * ctr[2];
      const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
      const auto lo0 = static_cast<std::uint64_t>(p0);
      const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
      const auto lo1 = static_cast<std::uint64_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += w0;
      key[1] += w1;
    }
    return ctr;
  }

  result_type operator()() noexcept {
    if (index_ == 4) refill();
    return buffer_[index_++];
  }

  /// 32-bit draw; consumes half of a 64-bit output.
  std::uint32_t next_u32() noexcept {
    if (has_half_) {
      has_half_ = false;
      return half_;
    }
    const std::uint64_t x = (*this)();
    half_ = static_cast<std::uint32_t>(x >> 32);
    has_half_ = true;
    return static_cast<std::uint32_t>(x);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Bernoulli(probability) on a 32-bit grid; exact at 0 and 1.
  bool bernoulli(std::uint64_t threshold32) noexcept { return next_u32() < threshold32; }

  static std::uint64_t bernoulli_threshold(double probability) {
    if (!(probability >= 0.0 && probability <= 1.0)) {
      throw std::invalid_argument("probability must lie in [0, 1]");
    }
    if (probability == 1.0) return std::uint64_t{1} << 32;
    return static_cast<std::uint64_t>(probability * 0x1.0p32);
  }

  /// Independent child stream. Children of distinct ids never share a key
  /// with each other or with the parent (up to Philox's bijectivity).
  [[nodiscard]] Philox4x64 split(std::uint64_t id) const noexcept {
    const counter_type derived = block({id, split_tag, key_[0], key_[1]}, key_);
    return Philox4x64(key_type{derived[0], derived[1]}, counter_type{});
  }

  [[nodiscard]] const key_type& key() const noexcept { return key_; }
  [[nodiscard]] const counter_type& counter() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t split_tag = 0x5175616e74756d57ULL;

  void refill() noexcept {
    buffer_ = block(counter_, key_);
    for (auto& word : counter_) {
      if (++word != 0) break;
    }
    index_ = 0;
  }

  key_type key_{};
  counter_type counter_{};
  counter_type buffer_{};
  unsigned index_ = 4;
  std::uint32_t half_ = 0;
  bool has_half_ = false;
};

}  // namespace qwalk
