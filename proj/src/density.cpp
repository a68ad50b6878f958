#include "cubic/density.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>

#include "cubic/asym.hpp"
#include "cubic/errors.hpp"
#include "cubic/primes.hpp"
#include "cubic/quadrature.hpp"

namespace cubic {

namespace {

// Neumaier compensated sum
struct Sum {
  double s = 0, c = 0;
  void add(double v) {
    const double t = s + v;
    c += std::fabs(s) >= std::fabs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

cplx sinc(cplx w) {
  const cplx x = kPi * w;
  if (std::abs(x) < 1e-3) {
    const cplx x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0;
  }
  return std::sin(x) / x;
}

// sinc(w) / (1 - w^2), with the removable singularities at w = +-1
cplx sinc_over_1mw2(cplx w) {
  if (w.real() < 0) w = -w;
  const cplx eps = w - 1.0;
  if (std::abs(eps) < 1e-4) {
    const cplx y = kPi * eps, y2 = y * y;
    return (1.0 - y2 / 6.0 + y2 * y2 / 120.0) / ((1.0 + eps) * (2.0 + eps));
  }
  return sinc(w) / (1.0 - w * w);
}

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// int_0^T t^n e^{k t} dt, k >= 0
double P_int(int n, double k, double T) {
  if (k == 0) return std::pow(T, n + 1) / (n + 1);
  double s = 0;
  const double ekT = std::exp(k * T);
  for (int j = 0; j <= n; ++j)
    s += (j % 2 ? -1.0 : 1.0) * factorial(n) / factorial(n - j) * std::pow(T, n - j) * ekT / std::pow(k, j + 1);
  return s - (n % 2 ? -1.0 : 1.0) * factorial(n) / std::pow(k, n + 1);
}

// int_U^inf (log u)^n u^{-g} du, g > 1
double Q_int(int n, double g, double U) {
  if (n < 0) return 0;
  const double r = g - 1, T = std::log(U);
  double s = 0;
  for (int j = 0; j <= n; ++j) s += factorial(n) / factorial(n - j) * std::pow(T, n - j) / std::pow(r, j + 1);
  return std::exp(-r * T) * s;
}

double x_real(double p) { return 1.0 / (1.0 + 1.0 / p + 1.0 / (p * p)); }

constexpr int kTailMaxE = 8;

// Summands of the nu sums divided by log p, as functions of a real u.
double g_nu1(double u, int n) {
  const double T = std::log(u), x = x_real(u);
  double s = 0;
  for (int e = 1; e <= kTailMaxE; ++e)
    if (e != 2) s += x * std::pow(e, n) * std::pow(u, -0.5 * e) * (theta_e(e) + 1.0 / u);
  // x_p (1 + 1/p) - 1 = -x_p / p^2
  s += std::pow(2.0, n) / u * (-x / (u * u));
  return std::pow(T, n) * s;
}

double g_nu2(double u, int n) {
  const double T = std::log(u);
  double s = 0;
  for (int e = 2; e <= kTailMaxE; ++e) s += std::pow(e, n) * beta_e_real(u, e) * std::pow(u, -0.5 * e);
  s += beta1_excess(u) / std::sqrt(u);
  return std::pow(T, n) * s;
}

// |theta(u) - u + sqrt(u) + u^{1/3}| under RH, generously rounded up
double theta_error_bound(double u) {
  const double l = std::log(u);
  return std::sqrt(u) * (l * l / (8 * kPi) + 1.0);
}

struct TailEstimate {
  double value, bound;
};

// sum_{p > U} g(p) log p ~ int_U^inf g(u) du; the bound covers the
// difference int g d(theta - u) under RH
template <class G>
TailEstimate prime_tail(G g, double U) {
  const double T0 = std::log(U);
  auto in_t = [&](double t) { return t > 700 ? 0.0 : g(std::exp(t)) * std::exp(t); };
  const double value = integrate_to_infinity<double>(in_t, T0, 8.0, 1e-13);
  auto dg = [&](double t) {
    if (t > 700) return 0.0;
    const double h = 1e-4 * std::max(1.0, t);
    return std::fabs(g(std::exp(t + h)) - g(std::exp(t - h))) / (2 * h) * theta_error_bound(std::exp(t));
  };
  const double bound = std::fabs(g(U)) * theta_error_bound(U) + integrate_to_infinity<double>(dg, T0, 8.0, 1e-9);
  return {value, bound};
}

// int_1^inf w(u) R(u) du for w = -c d/du[(log u)^n u^{-a}], exact to U from
// M = sum_{p <= U} (log p)^{n+1} p^{-a} and theta(U), modelled beyond U
TailEstimate R_integral(double c, double a, int n, double M, double theta_U, double U) {
  const double T = std::log(U);
  const double head = c * (M - P_int(n, 1 - a, T) - (n == 0 ? 1.0 : 0.0)) + c * std::pow(T, n) * std::pow(U, -a) * (U - theta_U);
  double tail = 0;
  for (double beta : {0.5, 1.0 / 3.0})
    tail -= c * std::pow(T, n) * std::pow(U, beta - a) + c * beta * Q_int(n, a + 1 - beta, U);
  const double g = a + 0.5;
  const double bound =
      c * (a / (8 * kPi) * Q_int(n + 2, g, U) + n / (8 * kPi) * Q_int(n + 1, g, U) + a * Q_int(n, g, U) + n * Q_int(n - 1, g, U));
  return {head + tail, bound};
}

NuValues compute_nu(uint64_t U) {
  Sum S1[4], S2[4], M1[4], M2[4], theta;
  for_each_prime(U, [&](uint64_t p) {
    const double pd = static_cast<double>(p), lp = std::log(pd);
    const double x = x_real(pd);
    double lpow[5] = {1, lp, lp * lp, lp * lp * lp, lp * lp * lp * lp};
    for (int e = 1;; ++e) {
      const double pe = std::exp(-0.5 * e * lp);
      if (pe < 1e-40) break;
      const double b1 = e == 2 ? 0.0 : x * lp * pe * (theta_e(e) + 1.0 / pd);
      const double b2 = e == 1 ? lp * beta1_excess(pd) / std::sqrt(pd) : lp * pe * beta_e_real(pd, e);
      double en = 1;
      for (int n = 0; n < 4; ++n) {
        S1[n].add(b1 * en * lpow[n]);
        S2[n].add(b2 * (e == 1 ? 1.0 : en) * lpow[n]);
        en *= e;
      }
    }
    const double second = lp / pd * (-x / (pd * pd));
    const double p56 = std::pow(pd, -5.0 / 6.0);
    for (int n = 0; n < 4; ++n) {
      S1[n].add(std::pow(2.0, n) * lpow[n] * second);
      M1[n].add(lpow[n + 1] / pd);
      M2[n].add(lpow[n + 1] * p56);
    }
    theta.add(lp);
  });
  NuValues out{};
  out.cutoff = U;
  const double Ud = static_cast<double>(U);
  for (int n = 0; n < 4; ++n) {
    const auto t1 = prime_tail([n](double u) { return g_nu1(u, n); }, Ud);
    const auto t2 = prime_tail([n](double u) { return g_nu2(u, n); }, Ud);
    const auto r1 = R_integral(std::pow(2.0, n), 1.0, n, M1[n].value(), theta.value(), Ud);
    const auto r2 = R_integral(1.0, 5.0 / 6.0, n, M2[n].value(), theta.value(), Ud);
    const double delta = n == 0 ? 1.0 : 0.0;
    out.nu1[n] = delta + S1[n].value() + t1.value + r1.value;
    out.nu2[n] = delta + S2[n].value() + t2.value + r2.value;
    out.tail_bound1[n] = t1.bound + r1.bound;
    out.tail_bound2[n] = t2.bound + r2.bound;
  }
  return out;
}

// Calls visit(p, e, log p) for every prime power with e log p < L sigma.
template <class V>
void for_each_prime_power(double L, double sigma, V visit) {
  const double cap = L * sigma;
  if (cap <= std::log(2.0)) return;
  if (cap > std::log(1e11)) throw Error(Err::Validation, "prime sum support beyond 1e11");
  const auto n = static_cast<uint64_t>(std::floor(std::exp(cap)));
  for_each_prime(n, [&](uint64_t p) {
    const double lp = std::log(static_cast<double>(p));
    for (int e = 1; e * lp < cap; ++e) visit(p, e, lp);
  });
}

}  // namespace

const char* test_kind_name(TestKind k) { return k == TestKind::Fejer ? "fejer" : "raised-cosine"; }

TestKind parse_test_kind(const std::string& s) {
  if (s == "fejer" || s == "Fejer") return TestKind::Fejer;
  if (s == "raised-cosine" || s == "raisedcosine" || s == "RaisedCosine" || s == "cosine") return TestKind::RaisedCosine;
  throw Error(Err::Validation, "unknown test function '" + s + "'");
}

TestFunction::TestFunction(TestKind kind, double sigma) : kind_(kind), sigma_(sigma) {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw Error(Err::BadSigma, "sigma must be positive and finite");
}

TestFunction make_test_function(TestKind kind, double sigma) { return TestFunction(kind, sigma); }

double TestFunction::phi_hat(double xi) const {
  const double a = std::fabs(xi);
  if (a >= sigma_) return 0.0;
  if (kind_ == TestKind::Fejer) return 1.0 - a / sigma_;
  const double c = std::cos(kPi * xi / (2 * sigma_));
  return c * c;
}

double TestFunction::phi_hat_derivative_at_zero(int n) const {
  if (n < 0) throw Error(Err::Validation, "derivative order must be >= 0");
  if (kind_ == TestKind::Fejer) return n == 0 ? 1.0 : n == 1 ? -1.0 / sigma_ : 0.0;
  // (1 + cos(pi xi / sigma)) / 2
  if (n == 0) return 1.0;
  if (n % 2) return 0.0;
  const double k = kPi / sigma_;
  return (n % 4 == 0 ? 0.5 : -0.5) * std::pow(k, n);
}

cplx TestFunction::phi(cplx z) const {
  if (kind_ == TestKind::Fejer) {
    const cplx s = sinc(sigma_ * z);
    return sigma_ * s * s;
  }
  return sigma_ * sinc_over_1mw2(2.0 * sigma_ * z);
}

double TestFunction::phi(double x) const { return phi(cplx(x, 0)).real(); }

double L_of(double X) {
  const double t = 2 * kPi * std::exp(1.0);
  return std::log(X / (t * t));
}

double gamma_integral_term(Sign sign, double L, const TestFunction& phi) {
  // Gauss: psi(z) = int_0^inf (e^{-t}/t - e^{-z t}/(1 - e^{-t})) dt. With
  // z = a + i r/2, int phi(L r/2pi) e^{-i r t/2} dr = (2 pi/L) phi_hat(t/(2L)),
  // so each psi-integral becomes a real integral over t.
  if (!(L > 0)) throw Error(Err::Validation, "L must be positive");
  const double h0 = phi.phi_hat(0.0);
  const double T0 = 2 * L * phi.sigma();
  auto psi_part = [&](double a) {
    auto f = [&](double t) { return std::exp(-t) * h0 / t + std::exp(-a * t) * phi.phi_hat(t / (2 * L)) / std::expm1(-t); };
    // beyond T0 phi_hat vanishes and the rest is h0 E_1(T0)
    return integrate<double>(f, 0.0, T0, 1e-14, 1e-14) - h0 * std::expint(-T0);
  };
  double bracket = -std::log(kPi) * h0;
  if (sign == Sign::Plus)
    bracket += psi_part(0.25);
  else
    bracket += 0.5 * psi_part(0.25) + 0.5 * psi_part(0.75);
  return 2.0 / L * bracket;
}

double explicit_formula_rhs(const FieldRecord& k, double X, const TestFunction& phi) {
  const double L = L_of(X);
  const double logd = std::log(std::fabs(static_cast<double>(k.disc)));
  Sum primes;
  for_each_prime_power(L, phi.sigma(), [&](uint64_t p, int e, double lp) {
    const int a = a_coeff(splitting_type(k, p), e);
    if (a) primes.add(lp * std::exp(-0.5 * e * lp) * phi.phi_hat(e * lp / L) * a);
  });
  return phi.phi_hat(0) / L * logd + gamma_integral_term(k.sign, L, phi) - 2.0 / L * primes.value();
}

double average_density_empirical(const FamilySlice& f, double X, const TestFunction& phi) {
  const size_t n = f.count(X);
  if (n == 0) throw Error(Err::EmptyFamily, "no field below X");
  const double L = L_of(X);
  const double nd = static_cast<double>(n);
  Sum logs;
  for (size_t i = 0; i < n; ++i) logs.add(std::log(std::fabs(static_cast<double>(f.records()[i].disc))));
  // sum over K of a_K(p^e) from the type counts; exact integers
  std::map<uint64_t, std::array<size_t, 5>> counts;
  Sum primes;
  for_each_prime_power(L, phi.sigma(), [&](uint64_t p, int e, double lp) {
    auto it = counts.find(p);
    if (it == counts.end()) {
      std::array<size_t, 5> c{};
      for (auto t : kAllTypes) c[type_index(t)] = f.count_local(X, p, t);
      it = counts.emplace(p, c).first;
    }
    double total_a = 0;
    for (auto t : kAllTypes) total_a += a_coeff(t, e) * static_cast<double>(it->second[type_index(t)]);
    primes.add(lp * std::exp(-0.5 * e * lp) * phi.phi_hat(e * lp / L) * (total_a / nd));
  });
  return phi.phi_hat(0) / L * (logs.value() / nd) + gamma_integral_term(f.sign(), L, phi) - 2.0 / L * primes.value();
}

double prime_sum_main(double L, const TestFunction& phi) {
  Sum s;
  for_each_prime_power(L, phi.sigma(), [&](uint64_t p, int e, double lp) {
    const double pd = static_cast<double>(p);
    s.add(x_real(pd) * lp * std::exp(-0.5 * e * lp) * phi.phi_hat(e * lp / L) * (theta_e(e) + 1.0 / pd));
  });
  return s.value();
}

double prime_sum_secondary(double L, const TestFunction& phi) {
  Sum s;
  for_each_prime_power(L, phi.sigma(), [&](uint64_t p, int e, double lp) {
    s.add(lp * std::exp(-0.5 * e * lp) * phi.phi_hat(e * lp / L) * beta_e(p, e));
  });
  return s.value();
}

const NuValues& nu_values(uint64_t U) {
  if (U < kMinSieveCutoff)
    throw Error(Err::SieveTooSmall, "sieve cutoff " + std::to_string(U) + " below " + std::to_string(kMinSieveCutoff));
  static std::mutex mutex;
  static std::map<uint64_t, std::unique_ptr<NuValues>> memo;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = memo[U];
  if (!slot) slot = std::make_unique<NuValues>(compute_nu(U));
  return *slot;
}

double nu1(int n, uint64_t U) {
  if (n < 0 || n > 3) throw Error(Err::Validation, "nu_1(n) needs 0 <= n <= 3");
  return nu_values(U).nu1[n];
}

double nu2(int n, uint64_t U) {
  if (n < 0 || n > 3) throw Error(Err::Validation, "nu_2(n) needs 0 <= n <= 3");
  return nu_values(U).nu2[n];
}

double I1_direct(double X, const TestFunction& phi) { return prime_sum_main(L_of(X), phi); }
double I2_direct(double X, const TestFunction& phi) { return prime_sum_secondary(L_of(X), phi); }

double I1_expansion(double X, const TestFunction& phi, int ell, uint64_t U) {
  if (ell < 0 || ell > 3) throw Error(Err::Validation, "expansion order must be in 0..3");
  const double L = L_of(X);
  double s = phi.phi(0.0) * L / 4;
  for (int n = 0; n <= ell; ++n) s += phi.phi_hat_derivative_at_zero(n) * nu1(n, U) / (factorial(n) * std::pow(L, n));
  return s;
}

double I2_leading(double X, const TestFunction& phi) {
  const double L = L_of(X);
  auto f = [&](double u) { return phi.phi_hat(u) * std::exp(L * u / 6); };
  return L * integrate<double>(f, 0.0, phi.sigma(), 0.0, 1e-14);
}

double I2_expansion(double X, const TestFunction& phi, int ell, uint64_t U) {
  if (ell < 0 || ell > 3) throw Error(Err::Validation, "expansion order must be in 0..3");
  const double L = L_of(X);
  double s = I2_leading(X, phi);
  for (int n = 0; n <= ell; ++n) s += phi.phi_hat_derivative_at_zero(n) * nu2(n, U) / (factorial(n) * std::pow(L, n));
  return s;
}

void PredictionReport::add_j_term(double j) {
  j_term = j;
  total += j;
}

std::vector<std::pair<std::string, double>> PredictionReport::components() const {
  std::vector<std::pair<std::string, double>> v{{"main_hat_term", main_hat_term},
                                                {"gamma_integral", gamma_integral},
                                                {"prime_sum_main", prime_sum_main},
                                                {"prime_sum_secondary", prime_sum_secondary}};
  if (j_term) v.emplace_back("j_term", *j_term);
  v.emplace_back("total", total);
  return v;
}

double sigma_threshold(double theta, double omega) { return (1 - theta) / (omega + 0.5); }

PredictionReport theorem_main_prediction(double X, Sign sign, const TestFunction& phi, double theta, double omega) {
  PredictionReport r;
  r.X = X;
  r.sign = sign;
  r.sigma = phi.sigma();
  r.L = L_of(X);
  r.sigma_in_range = phi.sigma() < sigma_threshold(theta, omega);
  const auto k = constants(sign);
  const double L = r.L, q = k.c2 / k.c1, x6 = std::pow(X, -1.0 / 6.0);
  r.main_hat_term =
      phi.phi_hat(0) * (1 + std::log(4 * kPi * kPi * std::exp(1.0)) / L - q / 5 * x6 / L + q * q / 5 * x6 * x6 / L);
  r.gamma_integral = gamma_integral_term(sign, L, phi);
  r.prime_sum_main = -2.0 / L * prime_sum_main(L, phi);
  r.prime_sum_secondary = -2.0 * q * x6 / L * (1 - q * x6) * prime_sum_secondary(L, phi);
  r.total = r.main_hat_term + r.gamma_integral + r.prime_sum_main + r.prime_sum_secondary;
  return r;
}

void write_density_csv(const std::string& path, const std::vector<PredictionReport>& reports,
                       const std::vector<std::optional<double>>& empirical) {
  if (empirical.size() != reports.size() && !empirical.empty())
    throw Error(Err::Validation, "empirical values do not match the reports");
  std::ofstream os(path);
  if (!os) throw Error(Err::Validation, "cannot open " + path);
  os << "X,sign,sigma,term,value\n" << std::setprecision(15);
  for (size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    for (const auto& [name, value] : r.components())
      os << r.X << ',' << sign_char(r.sign) << ',' << r.sigma << ',' << name << ',' << value << '\n';
    if (!empirical.empty() && empirical[i])
      os << r.X << ',' << sign_char(r.sign) << ',' << r.sigma << ",empirical," << *empirical[i] << '\n';
  }
}

}  // namespace cubic
