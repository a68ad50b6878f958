#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on finite intervals,
// plus half-line integration by doubling the cutoff.

#include <cmath>
#include <complex>
#include <queue>
#include <string>
#include <vector>

#include "cubic/errors.hpp"

namespace cubic {

namespace gk {
inline constexpr double xk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {0.129484966168869693270611432679082,
                                 0.279705391489276667901467771423780,
                                 0.381830050505118944950369775488975,
                                 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(std::complex<double> v) { return std::abs(v); }

template <class T>
struct Panel {
  double a, b;
  T value;
  double err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

template <class T, class F>
Panel<T> rule(F& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  T fc = f(c);
  T kron = fc * wk[7];
  T gauss = fc * wg[3];
  for (int j = 0; j < 7; ++j) {
    double dx = h * xk[j];
    T s = f(c - dx) + f(c + dx);
    kron += s * wk[j];
    if (j % 2 == 1) gauss += s * wg[j / 2];
  }
  return {a, b, kron * h, magnitude((kron - gauss) * h)};
}
}  // namespace gk

struct QuadResult {
  double err;
  int panels;
};

// Integrates f over [a,b] until the estimated error is below
// max(abs_tol, rel_tol*|I|). Throws QuadratureNonconvergence otherwise.
template <class T, class F>
T integrate(F f, double a, double b, double abs_tol, double rel_tol = 0.0,
            int max_panels = 20000, QuadResult* info = nullptr) {
  if (a == b) return T{};
  std::priority_queue<gk::Panel<T>> heap;
  auto first = gk::rule<T>(f, a, b);
  heap.push(first);
  T total = first.value;
  double err = first.err;
  int panels = 1;
  while (err > std::max(abs_tol, rel_tol * gk::magnitude(total))) {
    if (panels >= max_panels)
      throw Error(Err::QuadratureNonconvergence,
                  "adaptive quadrature stalled at error " + std::to_string(err));
    auto top = heap.top();
    heap.pop();
    double m = 0.5 * (top.a + top.b);
    auto l = gk::rule<T>(f, top.a, m);
    auto r = gk::rule<T>(f, m, top.b);
    total += l.value + r.value - top.value;
    err += l.err + r.err - top.err;
    heap.push(l);
    heap.push(r);
    ++panels;
  }
  // Re-sum to shed accumulated rounding from the running updates.
  T sum{};
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().err;
    heap.pop();
  }
  if (info) *info = {esum, panels};
  return sum;
}

// Integral of f over [a, inf): integrate [a, a+len], doubling len until the
// added piece changes the total by less than tol.
template <class T, class F>
T integrate_to_infinity(F f, double a, double len0, double tol, int max_doublings = 40) {
  T total = integrate<T>(f, a, a + len0, 0.1 * tol);
  double lo = a + len0, len = len0;
  for (int i = 0; i < max_doublings; ++i) {
    T piece = integrate<T>(f, lo, lo + len, 0.1 * tol);
    total += piece;
    lo += len;
    len *= 2.0;
    if (gk::magnitude(piece) < tol) return total;
  }
  throw Error(Err::QuadratureNonconvergence, "half-line integral did not settle");
}

}  // namespace cubic
