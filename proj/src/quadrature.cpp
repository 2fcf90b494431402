#include "unruhbec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace unruhbec {

namespace {

// Nodes on [-1, 1]; xgk[1], xgk[3], xgk[5] are the 7-point Gauss nodes.
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  cplx value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<cplx(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const cplx fc = f(c);
  cplx kron = fc * wgk[7];
  cplx gauss = fc * wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * xgk[j];
    const cplx s = f(c - dx) + f(c + dx);
    kron += wgk[j] * s;
    if (j % 2 == 1) gauss += wg[j / 2] * s;
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, std::abs(kron - gauss)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                    const std::function<double(double)>& max_step,
                                    const std::vector<double>& breakpoints,
                                    const QuadratureOptions& opts) {
  if (!(b > a)) throw std::domain_error("integrate_adaptive: need a < b");

  std::vector<double> cuts{a};
  for (double p : breakpoints)
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> heap;
  cplx total = 0.0;
  double err = 0.0;
  int evaluations = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double t = cuts[i];
    const double end = cuts[i + 1];
    while (t < end) {
      const double h = std::max(max_step(t), (end - a) * 1e-12);
      double next = std::min(end, t + h);
      if (end - next < 1e-3 * h) next = end;
      Panel p = gk15(f, t, next);
      evaluations += 15;
      total += p.value;
      err += p.error;
      heap.push(p);
      t = next;
      if (static_cast<int>(heap.size()) > opts.max_panels)
        throw AccuracyError("integrate_adaptive: initial panelization exceeds panel budget", total, err);
    }
  }

  while (err > std::max(opts.rel_tol * std::abs(total), opts.abs_tol)) {
    if (!std::isfinite(err) || !std::isfinite(std::abs(total)))
      throw AccuracyError("integrate_adaptive: non-finite integrand", total, err);
    if (static_cast<int>(heap.size()) >= opts.max_panels)
      throw AccuracyError("integrate_adaptive: tolerance not met within panel budget", total, err);
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      throw AccuracyError("integrate_adaptive: panel width underflow", total, err);
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  if (!std::isfinite(err) || !std::isfinite(std::abs(total)))
    throw AccuracyError("integrate_adaptive: non-finite integrand", total, err);
  // Re-sum from the panels to shed accumulated rounding in the running totals.
  cplx sum = 0.0;
  double esum = 0.0;
  const int panels = static_cast<int>(heap.size());
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  return {sum, esum, panels, evaluations};
}

}  // namespace unruhbec
