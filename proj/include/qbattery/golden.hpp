#pragma once

#include <cmath>
#include <utility>

namespace qbattery {

struct ScalarMaximum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for a maximum of `f` on [lo, hi]. Stops once the
/// bracket is narrower than `tolerance`. Assumes f is unimodal on the bracket;
/// otherwise a local maximum is returned.
template <typename F>
ScalarMaximum golden_section_maximize(F&& f, double lo, double hi, double tolerance,
                                      int max_iterations = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iterations && (hi - lo) > tolerance; ++it) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc >= fd ? ScalarMaximum{c, fc} : ScalarMaximum{d, fd};
}

}  // namespace qbattery
