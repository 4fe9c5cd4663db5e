#pragma once

#include <cmath>
#include <complex>

#include <boost/math/distributions/chi_squared.hpp>

#include "qwalk/links.hpp"
#include "qwalk/random.hpp"
#include "qwalk/spinor.hpp"

namespace qwalk::testing {

/// Normalized random state on [lo, lo + width).
inline SpinorField random_state(Philox4x64& rng, long lo, std::size_t width) {
  SpinorField s = SpinorField::zeros(lo, width);
  auto a = s.upper();
  auto b = s.lower();
  for (std::size_t i = 0; i < width; ++i) {
    a[i] = {rng.uniform() - 0.5, rng.uniform() - 0.5};
    b[i] = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  }
  const double scale = 1.0 / std::sqrt(s.norm());
  for (std::size_t i = 0; i < width; ++i) {
    a[i] *= scale;
    b[i] *= scale;
  }
  return s;
}

/// Random mask over links touching [lo, hi] with break probability r.
inline LinkMask random_mask(Philox4x64& rng, long lo, long hi, double r) {
  return sample_link_mask(rng, r, LinkRegion::full_line, links_touching(lo, hi));
}

/// Three-sigma binomial half-width for `n` trials at probability p.
inline double three_sigma(double p, std::size_t n) {
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

inline double chi_square_p_value(double statistic, double dof) {
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
}

}  // namespace qwalk::testing
