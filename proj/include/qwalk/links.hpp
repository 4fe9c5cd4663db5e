#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qwalk/random.hpp"

namespace qwalk {

/// Which links may break. right_half_line restricts breakage to links with
/// identifier >= the configured boundary (default 0).
enum class LinkRegion { none, full_line, right_half_line };

/// Default first breakable link in right_half_line mode: link (0, 1).
/// Link (-1, 0) stays intact.
inline constexpr long default_half_line_boundary = 0;

/// The four neighbourhoods a site can have.
enum class SiteLinkState { both_intact, left_broken, right_broken, isolated };

/// Inclusive range of link identifiers.
struct LinkWindow {
  long first = 0;
  long last = -1;

  [[nodiscard]] std::size_t size() const noexcept {
    return last < first ? 0 : static_cast<std::size_t>(last - first + 1);
  }
};

/// Set of broken links for one time step. Link k joins sites k and k+1.
class LinkMask {
 public:
  LinkMask() = default;
  explicit LinkMask(LinkRegion region, long boundary = default_half_line_boundary)
      : region_(region), boundary_(boundary) {}

  [[nodiscard]] LinkRegion region() const noexcept { return region_; }
  [[nodiscard]] long boundary() const noexcept { return boundary_; }

  [[nodiscard]] bool is_broken(long link) const noexcept {
    const long i = link - first_;
    return i >= 0 && i < static_cast<long>(flags_.size()) && flags_[static_cast<std::size_t>(i)];
  }

  [[nodiscard]] bool eligible(long link) const noexcept {
    switch (region_) {
      case LinkRegion::none: return false;
      case LinkRegion::full_line: return true;
      case LinkRegion::right_half_line: return link >= boundary_;
    }
    return false;
  }

  /// Marks `link` broken. Inserting twice is a no-op.
  void insert(long link) {
    if (!eligible(link)) throw std::invalid_argument("link is not breakable in this region");
    if (flags_.empty()) {
      first_ = link;
      flags_.assign(1, 0);
    } else if (link < first_) {
      flags_.insert(flags_.begin(), static_cast<std::size_t>(first_ - link), 0);
      first_ = link;
    } else if (link - first_ >= static_cast<long>(flags_.size())) {
      flags_.resize(static_cast<std::size_t>(link - first_ + 1), 0);
    }
    auto& flag = flags_[static_cast<std::size_t>(link - first_)];
    if (!flag) {
      flag = 1;
      ++count_;
    }
  }

  [[nodiscard]] std::size_t count() const noexcept { return count_; }
  [[nodiscard]] bool empty() const noexcept { return count_ == 0; }

  [[nodiscard]] std::vector<long> broken_links() const {
    std::vector<long> out;
    out.reserve(count_);
    for (std::size_t i = 0; i < flags_.size(); ++i) {
      if (flags_[i]) out.push_back(first_ + static_cast<long>(i));
    }
    return out;
  }

  /// Replaces the contents with fresh independent Bernoulli(r) draws over
  /// the eligible links of `window`.
  void resample(Philox4x64& rng, std::uint64_t threshold32, LinkWindow window) {
    first_ = window.first;
    flags_.assign(window.size(), 0);
    count_ = 0;
    if (region_ == LinkRegion::none) return;
    for (std::size_t i = 0; i < flags_.size(); ++i) {
      const long link = first_ + static_cast<long>(i);
      if (!eligible(link)) continue;
      if (rng.bernoulli(threshold32)) {
        flags_[i] = 1;
        ++count_;
      }
    }
  }

 private:
  LinkRegion region_ = LinkRegion::none;
  long boundary_ = default_half_line_boundary;
  long first_ = 0;
  std::vector<std::uint8_t> flags_;
  std::size_t count_ = 0;
};

inline SiteLinkState classify_site(const LinkMask& mask, long k) noexcept {
  const bool left = mask.is_broken(k - 1);
  const bool right = mask.is_broken(k);
  if (left && right) return SiteLinkState::isolated;
  if (left) return SiteLinkState::left_broken;
  if (right) return SiteLinkState::right_broken;
  return SiteLinkState::both_intact;
}

/// Each eligible link in `window` breaks independently with probability r.
inline LinkMask sample_link_mask(Philox4x64& rng, double r, LinkRegion region, LinkWindow window,
                                 long boundary = default_half_line_boundary) {
  LinkMask mask(region, boundary);
  mask.resample(rng, Philox4x64::bernoulli_threshold(r), window);
  return mask;
}

/// Links that touch a site of [lo, hi]: (lo-1, lo) through (hi, hi+1).
inline LinkWindow links_touching(long lo, long hi) noexcept { return {lo - 1, hi}; }

}  // namespace qwalk
