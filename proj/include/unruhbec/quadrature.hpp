#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace unruhbec {

using cplx = std::complex<double>;

/// Thrown when adaptive refinement hits its panel budget before meeting the
/// tolerance. Carries the best estimate so callers can decide what to do with it.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, cplx best, double err)
      : std::runtime_error(what), best_estimate(best), error_estimate(err) {}
  cplx best_estimate;
  double error_estimate;
};

struct QuadratureResult {
  cplx value;
  double error;      // sum of |Kronrod - Gauss| over final panels
  int panels;
  int evaluations;
};

struct QuadratureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-14;
  int max_panels = 200000;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of a complex integrand.
///
/// The interval is first cut at every breakpoint and then into panels no
/// wider than max_step(t) evaluated at the panel start, so an oscillatory
/// integrand never advances more than a fixed phase per initial panel. The
/// panel with the largest error is bisected until the total error estimate
/// meets max(rel_tol |I|, abs_tol).
QuadratureResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                    const std::function<double(double)>& max_step,
                                    const std::vector<double>& breakpoints = {},
                                    const QuadratureOptions& opts = {});

}  // namespace unruhbec
