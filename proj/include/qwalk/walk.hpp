#pragma once

#include <cstddef>
#include <utility>

#include "qwalk/links.hpp"
#include "qwalk/spinor.hpp"

namespace qwalk {

namespace detail {

/// Coin outputs at one site: the left-moving and right-moving parts.
inline Amplitude coin_left(Amplitude a, Amplitude b, const CoinParams& coin) noexcept {
  return a * coin.cos() + b * coin.sin();
}
inline Amplitude coin_right(Amplitude a, Amplitude b, const CoinParams& coin) noexcept {
  return a * coin.sin() - b * coin.cos();
}

}  // namespace detail

/// One unitary step:
///   a_k(t+1) = a_{k+1} cos + b_{k+1} sin
///   b_k(t+1) = a_{k-1} sin - b_{k-1} cos
/// `out` is reshaped to the input window widened by one site per side.
inline void step_unitary(const SpinorField& in, const CoinParams& coin, SpinorField& out) {
  const std::size_t n = in.width();
  out.reshape(in.lo() - 1, n + 2, in.time() + 1);
  const auto a = in.upper();
  const auto b = in.lower();
  auto na = out.upper();
  auto nb = out.lower();
  // Output index j is site lo-1+j: a'[j] reads input j, b'[j] reads input j-2.
  for (std::size_t j = 0; j < n; ++j) na[j] = detail::coin_left(a[j], b[j], coin);
  na[n] = na[n + 1] = Amplitude{};
  nb[0] = nb[1] = Amplitude{};
  for (std::size_t j = 0; j < n; ++j) nb[j + 2] = detail::coin_right(a[j], b[j], coin);
}

inline SpinorField step_unitary(const SpinorField& in, const CoinParams& coin) {
  SpinorField out;
  step_unitary(in, coin, out);
  return out;
}

/// One step with broken links. Sites with both links intact follow the
/// unitary map. A broken link blocks flux in both directions; the blocked
/// coin output is diverted into the other chirality at the same site:
///   left-broken   b_k(t+1) = a_k cos + b_k sin
///   right-broken  a_k(t+1) = a_k sin - b_k cos
///   isolated      a_k(t+1) = a_k cos - b_k sin,  b_k(t+1) = a_k sin + b_k cos
/// At theta = pi/4 these are the textbook broken-link maps; for other theta
/// this is the unique flux-conserving (unitary) form.
///
/// Only links touching the input window matter; the rest of `mask` is ignored.
inline void step_with_links(const SpinorField& in, const CoinParams& coin, const LinkMask& mask,
                            SpinorField& out) {
  step_unitary(in, coin, out);
  if (mask.empty()) return;
  const LinkWindow window = links_touching(in.lo(), in.hi());
  const long out_lo = out.lo();
  auto na = out.upper();
  auto nb = out.lower();
  for (long link = window.first; link <= window.last; ++link) {
    if (!mask.is_broken(link)) continue;
    {
      // Site `link` sees its right link broken.
      const long k = link;
      const Amplitude a = in.a(k);
      const Amplitude b = in.b(k);
      na[static_cast<std::size_t>(k - out_lo)] = mask.is_broken(k - 1)
                                                     ? a * coin.cos() - b * coin.sin()
                                                     : detail::coin_right(a, b, coin);
    }
    {
      // Site `link + 1` sees its left link broken.
      const long k = link + 1;
      const Amplitude a = in.a(k);
      const Amplitude b = in.b(k);
      nb[static_cast<std::size_t>(k - out_lo)] = mask.is_broken(k)
                                                     ? a * coin.sin() + b * coin.cos()
                                                     : detail::coin_left(a, b, coin);
    }
  }
}

inline SpinorField step_with_links(const SpinorField& in, const CoinParams& coin,
                                   const LinkMask& mask) {
  SpinorField out;
  step_with_links(in, coin, mask, out);
  return out;
}

/// Double-buffered walker for hot loops: no allocation once the window has
/// reached its final size.
class Walker {
 public:
  explicit Walker(SpinorField initial) : state_(std::move(initial)) {}

  [[nodiscard]] const SpinorField& state() const noexcept { return state_; }

  void step(const CoinParams& coin) {
    step_unitary(state_, coin, scratch_);
    std::swap(state_, scratch_);
  }

  void step(const CoinParams& coin, const LinkMask& mask) {
    step_with_links(state_, coin, mask, scratch_);
    std::swap(state_, scratch_);
  }

 private:
  SpinorField state_;
  SpinorField scratch_;
};

}  // namespace qwalk
