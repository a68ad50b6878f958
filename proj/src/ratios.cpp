#include "cubic/ratios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>

#include "cubic/asym.hpp"
#include "cubic/primes.hpp"
#include "cubic/quadrature.hpp"

namespace cubic {

namespace {

// x_p[1/p^2 + sum_e u^e (f(e,0) + w f(e,1) + w^2 f(e,2))], u = p^{-(1/2+alpha)}, w = p^{-(1/2+gamma)}
struct R1MLocal {
  template <class R>
  auto operator()(const R& r) const {
    const auto p1 = r.atom(6), p2 = r.atom(12);
    const auto u = r.atom(3, 1, 0), w = r.atom(3, 0, 1);
    const auto sq = 1.0 / ((1.0 - u) * (1.0 - u)), ev = 1.0 / (1.0 - u * u), tau = 1.0 / (1.0 + u + u * u);
    const auto geo = p1 / (1.0 - u);
    const auto s0 = sq / 6.0 + ev / 2.0 + tau / 3.0 + geo;
    const auto s1 = -sq / 3.0 + tau / 3.0 - geo;
    const auto s2 = sq / 6.0 - ev / 2.0 + tau / 3.0;
    return (p2 + s0 + w * s1 + w * w * s2) / (1.0 + p1 + p2);
  }
};

// Same with the g(e,s,p) coefficients and y_p, v = p^{-1/3}.
struct R1SLocal {
  template <class R>
  auto operator()(const R& r) const {
    const auto p1 = r.atom(6), p2 = r.atom(12), v = r.atom(2);
    const auto u = r.atom(3, 1, 0), w = r.atom(3, 0, 1);
    const auto v1 = 1.0 + v;
    const auto a = v1 * v1 * v1, b = v1 * (1.0 + v * v), c = 1.0 + p1, d = v1 * v1 * p1;
    const auto sq = 1.0 / ((1.0 - u) * (1.0 - u)), ev = 1.0 / (1.0 - u * u), tau = 1.0 / (1.0 + u + u * u);
    const auto t0 = a * sq / 6.0 + b * ev / 2.0 + c * tau / 3.0 + d / (1.0 - u);
    const auto t1 = -a * sq / 3.0 + c * tau / 3.0 - d / (1.0 - u);
    const auto t2 = a * sq / 6.0 - b * ev / 2.0 + c * tau / 3.0;
    const auto v5 = v * v * v * v * v;
    const auto y = (1.0 - v) / ((1.0 - v5) * (1.0 + p1));
    return y * (v1 * p2 + t0 + w * t1 + w * w * t2);
  }
};

struct A3Local {
  template <class R>
  auto operator()(const R& r) const {
    return R1MLocal{}(r) * (1.0 - r.atom(6, 2, 0)) / (1.0 - r.atom(6, 1, 1));
  }
};

struct A4Local {
  template <class R>
  auto operator()(const R& r) const {
    return R1SLocal{}(r) * (1.0 - r.atom(6, 2, 0)) * (1.0 - r.atom(5, 1, 0)) /
           ((1.0 - r.atom(6, 1, 1)) * (1.0 - r.atom(5, 0, 1)));
  }
};

// Diagonal factors: atoms p^{-(a6/6 + k s)} written as r.atom(a6, 0, k).
struct A3DiagLocal {
  template <class R>
  auto operator()(const R& r) const {
    return 1.0 - r.atom(9, 0, 1) + r.atom(15, 0, -1) - r.atom(15, 0, -3) - r.atom(18, 0, -4) + r.atom(27, 0, -5);
  }
};

struct A4DiagBracket {
  template <class R>
  auto operator()(const R& r) const {
    const auto p1 = r.atom(6), p2 = r.atom(12), v = r.atom(2);
    const auto a = r.atom(3, 0, 1), b = r.atom(3, 0, -1), a2 = r.atom(6, 0, 2), b2 = r.atom(6, 0, -2);
    const auto cp = r.atom(5, 0, 1), cm = r.atom(5, 0, -1);
    const auto v1 = 1.0 + v;
    const auto inner = v1 * v1 * v1 * (1.0 - a) * (1.0 - a) / (6.0 * (1.0 - b) * (1.0 - b)) +
                       v1 * (1.0 + v * v) * (1.0 - a2) / (2.0 * (1.0 - b2)) +
                       (1.0 + p1) * (1.0 + a + a2) / (3.0 * (1.0 + b + b2)) + v1 * v1 * (1.0 - a) * p1 / (1.0 - b) +
                       v1 * p2;
    return (1.0 - b2) * (1.0 - cm) * (1.0 - v) / (1.0 - cp) * inner;
  }
};

struct A4DiagSplit {
  template <class R>
  auto operator()(const R& r) const {
    const auto p1 = r.atom(6), p2 = r.atom(12), v = r.atom(2), p43 = r.atom(8);
    const auto a = r.atom(3, 0, 1), b = r.atom(3, 0, -1), a2 = r.atom(6, 0, 2), b2 = r.atom(6, 0, -2);
    const auto cp = r.atom(5, 0, 1), cm = r.atom(5, 0, -1);
    const auto ratio = (1.0 - cm) / (1.0 - cp);
    const auto first = (1.0 - a) * (1.0 - a) * (1.0 + b) / (1.0 - b);
    const auto third = (1.0 + a + a2) * (1.0 - b2) / (1.0 + b + b2);
    const auto a43 = -r.atom(9, 0, -1) + r.atom(15, 0, -1) - p43 + r.atom(11, 0, 1) - r.atom(11, 0, -1) + r.atom(14) -
                     r.atom(14, 0, -2);
    const auto d42 = (1.0 - p1 - cp + cm + r.atom(8, 0, -2) + a43) / (1.0 - r.atom(9, 0, -3));
    const auto a42 = ratio * p1 * (-first / 3.0 + third / 3.0 + 1.0) - p1;
    const auto d41 = ratio * d42 + p1 + a42;
    const auto a41 = ratio * (-first * p43 / 6.0 - (1.0 - a2) * p43 / 2.0 - third * p43 / 3.0 +
                              ((1.0 + v - v * v - p1) * (1.0 - a) * (1.0 + b) - 1.0) * p1 + p2 * (1.0 - v * v) * (1.0 - b2));
    return d41 + a41;
  }
};

// (1-p^{-2/3})^2 (1-1/p)(1+2p^{-2/3}+1/p+p^{-4/3})
struct A4LimitLocal {
  template <class R>
  auto operator()(const R& r) const {
    const auto v2 = r.atom(4), p1 = r.atom(6);
    return (1.0 - v2) * (1.0 - v2) * (1.0 - p1) * (1.0 + 2.0 * v2 + p1 + v2 * v2);
  }
};

void check_shifts(cplx alpha, cplx gamma, double lo, const char* what) {
  if (alpha.real() <= lo || gamma.real() <= lo)
    throw Error(Err::DomainViolation, std::string(what) + " needs Re alpha, Re gamma > " + std::to_string(lo));
}

void check_diag(cplx s, double pole_gap) {
  if (std::abs(s.real()) >= 0.5 - 1e-3) throw Error(Err::DomainViolation, "diagonal continuation needs |Re s| < 1/2");
  if (std::abs(s - 1.0 / 6.0) < pole_gap) throw Error(Err::PoleProximity, "s too close to 1/6");
}

constexpr double kSixth = 1.0 / 6.0;

}  // namespace

cplx R1M(cplx alpha, cplx gamma, const RatiosOptions& o) {
  check_shifts(alpha, gamma, 0.5, "R1M");
  return euler_product(R1MLocal{}, EulerPoint::pair(alpha, gamma), o.euler).value;
}

cplx R1S(cplx alpha, cplx gamma, const RatiosOptions& o) {
  check_shifts(alpha, gamma, 0.5, "R1S");
  return euler_product(R1SLocal{}, EulerPoint::pair(alpha, gamma), o.euler).value;
}

cplx A3(cplx alpha, cplx gamma, const RatiosOptions& o) {
  check_shifts(alpha, gamma, -kSixth + 1e-3, "A3");
  return euler_product(A3Local{}, EulerPoint::pair(alpha, gamma), o.euler).value;
}

cplx A4(cplx alpha, cplx gamma, const RatiosOptions& o) {
  check_shifts(alpha, gamma, -kSixth + 1e-3, "A4");
  return euler_product(A4Local{}, EulerPoint::pair(alpha, gamma), o.euler).value;
}

cplx A3_diag(cplx s, const RatiosOptions& o) {
  check_diag(s, 1e-8);
  return zeta(3.0) * zeta(1.5 - 3.0 * s) * euler_product(A3DiagLocal{}, EulerPoint::diag(s), o.euler).value;
}

cplx A4_diag(cplx s, const RatiosOptions& o) {
  check_diag(s, 1e-6);
  return zeta(2.0) * zeta(5.0 / 3.0) * euler_product(A4DiagSplit{}, EulerPoint::diag(s), o.euler).value;
}

cplx R1M_local(double p, cplx alpha, cplx gamma) { return R1MLocal{}(ComplexRing(p, EulerPoint::pair(alpha, gamma))); }

cplx R1S_local(double p, cplx alpha, cplx gamma) { return R1SLocal{}(ComplexRing(p, EulerPoint::pair(alpha, gamma))); }

cplx A4_diag_local_bracket(double p, cplx s) { return A4DiagBracket{}(ComplexRing(p, EulerPoint::diag(s))); }

cplx A4_diag_local_split(double p, cplx s) { return A4DiagSplit{}(ComplexRing(p, EulerPoint::diag(s))); }

std::vector<ZetaFactor> A3_diag_structure(double re_s, const RatiosOptions& o) {
  PSeries::Ctx ctx{-re_s, re_s, -1, o.euler.cutoff};
  return zeta_factor_structure(A3DiagLocal{}(SeriesRing{&ctx}));
}

std::vector<ZetaFactor> A4_diag_structure(double re_s, const RatiosOptions& o) {
  PSeries::Ctx ctx{-re_s, re_s, -1, o.euler.cutoff};
  return zeta_factor_structure(A4DiagSplit{}(SeriesRing{&ctx}));
}

double A3_residue_closed_form() { return -zeta(3.0).real() / (3 * zeta(5.0 / 3.0).real() * zeta(2.0).real()); }

namespace {

// lim_{s -> 1/6} (s - 1/6)^k F(s) from symmetric samples s = 1/6 +- h,
// Richardson-extrapolated in h^2 over h = 1e-2, 1e-3.
double pole_limit(int k, const std::function<cplx(cplx)>& F) {
  auto sym = [&](double h) {
    const double hp = std::pow(h, k), hm = std::pow(-h, k);
    return 0.5 * (hp * F(kSixth + h).real() + hm * F(kSixth - h).real());
  };
  const double a = sym(1e-2), b = sym(1e-3);
  return (100 * b - a) / 99;
}

}  // namespace

double A3_residue_numeric() {
  return pole_limit(1, [](cplx s) { return A3_diag(s); });
}

double A4_double_pole_limit(const RatiosOptions& o) {
  const double prod = euler_product(A4LimitLocal{}, EulerPoint::diag(0.0), o.euler).value.real();
  return zeta(2.0).real() * zeta(5.0 / 3.0).real() / (6 * zeta(4.0 / 3.0).real()) * prod;
}

double A4_double_pole_limit_truncated(uint64_t P) {
  const EulerPoint pt = EulerPoint::diag(0.0);
  double prod = 1;
  for (uint32_t p : *prime_table(P)) {
    if (p > P) break;
    prod *= A4LimitLocal{}(ComplexRing(static_cast<double>(p), pt)).real();
  }
  return zeta(2.0).real() * zeta(5.0 / 3.0).real() / (6 * zeta(4.0 / 3.0).real()) * prod;
}

double A4_double_pole_limit_numeric() {
  return pole_limit(2, [](cplx s) { return A4_diag(s); });
}

double C_pm(Sign sign) {
  const auto k = constants(sign);
  const double q = k.c2 / k.c1;
  const double gr = gamma_pm_ratio(sign, kSixth).real();
  const double z23 = zeta(2.0 / 3.0).real();
  return 2.5 * q * gr * z23 * z23 * A4_double_pole_limit();
}

double J_asymptotic(double X, Sign sign, const TestFunction& phi) {
  if (!(phi.sigma() < 1)) throw Error(Err::BadSigma, "asymptotic J needs sigma < 1");
  const double L = L_of(X);
  // int phi_hat(xi) e^{L xi / 6} d xi = phi(L / (12 pi i))
  const double moment = phi.phi(cplx(0, -L / (12 * kPi))).real();
  return C_pm(sign) * std::pow(X, -1.0 / 3.0) * moment;
}

double prime_sum_five_sixths(double X, Sign sign, const TestFunction& phi) {
  const auto k = constants(sign);
  const double q = k.c2 / k.c1, x6 = std::pow(X, -1.0 / 6.0), L = L_of(X);
  const double cut = phi.sigma() * L;
  double s = 0;
  if (cut > 0) {
    for (uint32_t p : *prime_table(static_cast<uint64_t>(std::exp(cut)) + 1)) {
      const double lp = std::log(static_cast<double>(p));
      if (lp >= cut) break;
      for (int e = 1; e * lp < cut; ++e) s += lp * std::exp(-5.0 * e * lp / 6) * phi.phi_hat(e * lp / L);
    }
  }
  return 2 * q / L * x6 * (1 - q * x6) * s;
}

namespace {

// Memoised A-values on fixed quadrature nodes, shared across X, sign and phi.
struct NodeValue {
  cplx value;
  double tol;
};

cplx memo_diag(int which, cplx s, double tol) {
  static std::mutex mutex;
  static std::map<std::tuple<int, double, double>, NodeValue> memo;
  const auto key = std::make_tuple(which, s.real(), s.imag());
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = memo.find(key);
    if (it != memo.end() && it->second.tol <= tol) return it->second.value;
  }
  RatiosOptions o;
  o.euler = euler_options_for(tol);
  const cplx v = which == 3 ? A3_diag(s, o) : A4_diag(s, o);
  std::lock_guard<std::mutex> lock(mutex);
  memo[key] = {v, tol};
  return v;
}

struct LineSetup {
  double L, X, q, x6;
  Sign sign;
  const TestFunction* phi;
};

cplx phi_at(const LineSetup& g, cplx s) { return g.phi->phi(g.L * s / cplx(0, 2 * kPi)); }

// Common prefactor phi(Ls/2 pi i) G(s) zeta(1-2s) X^{-s}.
cplx line_prefactor(const LineSetup& g, cplx s) {
  return phi_at(g, s) * gamma_pm_ratio(g.sign, s) * zeta(1.0 - 2.0 * s) * std::exp(-s * std::log(g.X));
}

// Integrand pieces; `a_tol` is the relative accuracy asked of the Euler products.
cplx line1_integrand(const LineSetup& g, cplx s, double abs_tol) {
  const cplx pre = line_prefactor(g, s) * (1 - g.q * g.x6) / (1.0 - s);
  const double tol = std::clamp(abs_tol / (std::abs(pre) + 1e-300), 1e-11, 1e-3);
  return pre * memo_diag(3, s, tol);
}

cplx line2_integrand(const LineSetup& g, cplx s, double abs_tol) {
  const cplx pre = line_prefactor(g, s) * g.q * g.x6;
  const cplx z = zeta(5.0 / 6.0 - s) / zeta(5.0 / 6.0 + s);
  const cplx w4 = pre * (1 - g.q * g.x6) * z / (1.0 - 1.2 * s);
  const cplx w3 = pre * g.q * g.x6 / (1.0 - s);
  const double t4 = std::clamp(abs_tol / (std::abs(w4) + 1e-300), 1e-11, 1e-3);
  const double t3 = std::clamp(abs_tol / (std::abs(w3) + 1e-300), 1e-11, 1e-3);
  return w4 * memo_diag(4, s, t4) + w3 * memo_diag(3, s, t3);
}

// Scale used for the quadrature tolerance: |C X^{-1/3} phi(L / 12 pi i)|.
double j_scale(double X, Sign sign, const TestFunction& phi) {
  const double L = L_of(X);
  return std::abs(C_pm(sign)) * std::pow(X, -1.0 / 3.0) * std::abs(phi.phi(cplx(0, -L / (12 * kPi))));
}

struct LineIntegral {
  double value, t_end, err;
};

// -(2/pi) Re int_0^inf f(c + i t) dt over fixed Gauss-Kronrod panels; stops
// once the envelope of |f| over the last stretch, extrapolated with t^{-2}
// tail decay, is below the budget.
template <class F>
LineIntegral integrate_line(double c, F&& f, double abs_tol, const JContourOptions& o) {
  double total = 0, err = 0, env = 0;
  const int stretch = std::max(1, static_cast<int>(std::lround(4.0 / o.panel)));
  int k = 0;
  for (;; ++k) {
    const double a = k * o.panel, b = a + o.panel;
    if (b > o.t_max) throw Error(Err::QuadratureNonconvergence, "line integral did not decay by Im s = " + std::to_string(o.t_max));
    double panel_max = 0;
    auto g = [&](double t) {
      const double v = f(cplx(c, t), abs_tol).real();
      panel_max = std::max(panel_max, std::abs(v));
      return v;
    };
    const auto p = gk::rule<double>(g, a, b);
    total += p.value;
    err += p.err;
    if (k % stretch == 0) env = 0;
    env = std::max(env, panel_max);
    // |f| <= env (b/t)^3 beyond b gives a tail of at most env b / 2
    if (k % stretch == stretch - 1 && b >= 8 && env * b / 2 < 0.25 * abs_tol) break;
  }
  const double t_end = (k + 1) * o.panel;
  return {-2 / kPi * total, t_end, 2 / kPi * (err + 0.25 * abs_tol)};
}

LineSetup setup(double X, Sign sign, const TestFunction& phi) {
  const auto k = constants(sign);
  return {L_of(X), X, k.c2 / k.c1, std::pow(X, -1.0 / 6.0), sign, &phi};
}

}  // namespace

JContourResult J_contour_detail(double X, Sign sign, const TestFunction& phi, const JContourOptions& o) {
  const LineSetup g = setup(X, sign, phi);
  const double budget = o.rel_tol * j_scale(X, sign, phi);
  const auto l1 = integrate_line(o.c1, [&](cplx s, double tol) { return line1_integrand(g, s, tol); }, 0.5 * budget, o);
  const auto l2 = integrate_line(o.c2, [&](cplx s, double tol) { return line2_integrand(g, s, tol); }, 0.5 * budget, o);
  return {l1.value + l2.value, l1.value, l2.value, std::max(l1.t_end, l2.t_end), l1.err + l2.err};
}

double J_contour(double X, Sign sign, const TestFunction& phi, const JContourOptions& o) {
  return J_contour_detail(X, sign, phi, o).value;
}

double J_second_line(double X, Sign sign, const TestFunction& phi, double c, const JContourOptions& o) {
  if (!(c > 0 && c < 0.5 - 1e-3) || std::abs(c - kSixth) < 1e-3)
    throw Error(Err::DomainViolation, "second line needs 0 < c < 1/2 away from 1/6");
  const LineSetup g = setup(X, sign, phi);
  const double budget = o.rel_tol * j_scale(X, sign, phi);
  return integrate_line(c, [&](cplx s, double tol) { return line2_integrand(g, s, tol); }, 0.5 * budget, o).value;
}

double J_residue(double X, Sign sign, const TestFunction& phi) {
  const auto k = constants(sign);
  const double q = k.c2 / k.c1, x6 = std::pow(X, -1.0 / 6.0), L = L_of(X);
  const double moment = phi.phi(cplx(0, -L / (12 * kPi))).real();
  return std::pow(X, -1.0 / 3.0) * moment * (C_pm(sign) * (1 - q * x6) - 2 * q * q * q * x6);
}

namespace {

// sum_e (theta_e + 1/p) z^e x_p with z = p^{-(1/2 + r)}; r sits in gamma.
struct MainLogTerm {
  template <class R>
  auto operator()(const R& r) const {
    const auto p1 = r.atom(6), z = r.atom(3, 0, 1);
    const auto z2 = z * z, z3 = z2 * z;
    const auto theta = z2 / (1.0 - z2) + z3 / (1.0 - z3);
    return (theta + p1 * z / (1.0 - z)) / (1.0 + p1 + p1 * p1);
  }
};

// sum_e (beta_e - p^{-e/3}) z^e
struct SecondaryLogTerm {
  template <class R>
  auto operator()(const R& r) const {
    const auto p1 = r.atom(6), v = r.atom(2), z = r.atom(3, 0, 1);
    const auto z2 = z * z, z3 = z2 * z;
    const auto theta = z2 / (1.0 - z2) + z3 / (1.0 - z3);
    const auto geo = z / (1.0 - z);
    const auto not3 = geo - z3 / (1.0 - z3);
    const auto v2 = v * v, v5 = v2 * v2 * v;
    const auto x = 1.0 / (1.0 + p1 + p1 * p1);
    const auto y = (1.0 - v) / ((1.0 - v5) * (1.0 + p1));
    const auto beta = y * (1.0 + v) * ((1.0 + v2) * theta + v * not3 + (p1 + v * p1) * geo) - x * (theta + p1 * geo);
    return beta - v * z / (1.0 - v * z);
  }
};

}  // namespace

cplx conjecture_log_derivative_avg(cplx r, double X, Sign sign, const RatiosOptions& o) {
  if (!(r.real() > 0 && r.real() < kSixth - 1e-3))
    throw Error(Err::DomainViolation, "conjectured average needs 0 < Re r < 1/6");
  const auto k = constants(sign);
  const double q = k.c2 / k.c1, x6 = std::pow(X, -1.0 / 6.0), k6 = q * x6 * (1 - q * x6);
  const EulerPoint pt = EulerPoint::pair(0.0, r);
  const cplx s_main = log_weighted_prime_sum(MainLogTerm{}, pt, o.euler);
  const cplx s_sec = log_weighted_prime_sum(SecondaryLogTerm{}, pt, o.euler);
  const cplx G = gamma_pm_ratio(sign, r), z12 = zeta(1.0 - 2.0 * r);
  const cplx a3 = A3_diag(r, o), a4 = A4_diag(r, o);
  const cplx Xr = std::exp(-r * std::log(X));
  return -s_main - k6 * s_sec + k6 * zeta_log_derivative(5.0 / 6.0 + r) - Xr * G * z12 * a3 / (1.0 - r) -
         k6 * Xr * G * z12 * (zeta(5.0 / 6.0 - r) / zeta(5.0 / 6.0 + r) * a4 / (1.0 - 1.2 * r) - a3 / (1.0 - r));
}

PredictionReport ratios_prediction(double X, Sign sign, const TestFunction& phi, JMode mode, double theta,
                                   double omega) {
  PredictionReport r = theorem_main_prediction(X, sign, phi, theta, omega);
  const double P = prime_sum_five_sixths(X, sign, phi);
  const double J = mode == JMode::Asymptotic ? J_asymptotic(X, sign, phi) : J_contour(X, sign, phi);
  r.prime_sum_secondary += P;
  r.total += P;
  r.add_j_term(J - P);
  return r;
}

std::vector<RatiosRow> ratios_rows(double X, Sign sign, const TestFunction& phi, JMode mode) {
  std::vector<RatiosRow> rows;
  const double sigma = phi.sigma();
  const auto base = theorem_main_prediction(X, sign, phi);
  const double jc = J_contour(X, sign, phi);
  const double P = prime_sum_five_sixths(X, sign, phi);
  PredictionReport r = base;
  r.prime_sum_secondary += P;
  r.total += P;
  const bool asym = sigma < 1;
  const double ja = asym ? J_asymptotic(X, sign, phi) : 0.0;
  r.add_j_term((mode == JMode::Asymptotic && asym ? ja : jc) - P);
  for (const auto& [name, value] : r.components()) rows.push_back({X, sign, sigma, name, value});
  rows.push_back({X, sign, sigma, "j_contour", jc});
  if (asym) rows.push_back({X, sign, sigma, "j_asymptotic", ja});
  rows.push_back({X, sign, sigma, "discrepancy", r.total - base.total});
  return rows;
}

void write_ratios_csv(const std::string& path, const std::vector<RatiosRow>& rows) {
  std::ofstream os(path);
  if (!os) throw Error(Err::Validation, "cannot write " + path);
  os << "X,sign,sigma,term,value\n" << std::setprecision(17);
  for (const auto& row : rows)
    os << row.X << ',' << sign_char(row.sign) << ',' << row.sigma << ',' << row.term << ',' << row.value << '\n';
}

}  // namespace cubic
