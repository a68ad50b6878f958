#include "cubic/asym.hpp"

#include <cmath>
#include <initializer_list>
#include <map>

#include "cubic/errors.hpp"

namespace cubic {

SplittingType parse_type(const std::string& s) {
  std::string t = s;
  if (!t.empty() && (t[0] == 'T' || t[0] == 't')) t = t.substr(1);
  if (t.size() == 1 && t[0] >= '1' && t[0] <= '5') return static_cast<SplittingType>(t[0] - '0');
  throw Error(Err::Validation, "unknown splitting type '" + s + "'");
}

SecondaryConstants constants(Sign sign) {
  static const double c1p = 1.0 / (12.0 * zeta(3.0).real());
  static const double c2p = [] {
    const double g = cubic::gamma(2.0 / 3.0).real();
    return 4.0 * zeta(1.0 / 3.0).real() / (5.0 * g * g * g * zeta(5.0 / 3.0).real());
  }();
  if (sign == Sign::Plus) return {c1p, c2p, sign};
  return {3.0 * c1p, std::sqrt(3.0) * c2p, sign};
}

LocalWeights local_weights(uint64_t p) {
  const double pd = static_cast<double>(p);
  const double u = std::cbrt(1.0 / pd);  // p^{-1/3}
  LocalWeights w;
  w.p = p;
  w.x = 1.0 / (1.0 + 1.0 / pd + 1.0 / (pd * pd));
  w.y = (1.0 - u) / ((1.0 - u * u * u * u * u) * (1.0 + 1.0 / pd));
  w.c = {1.0 / 6.0, 0.5, 1.0 / 3.0, 1.0 / pd, 1.0 / (pd * pd)};
  const double u1 = 1.0 + u;
  w.d = {u1 * u1 * u1 / 6.0, u1 * (1.0 + u * u) / 2.0, (1.0 + 1.0 / pd) / 3.0, u1 * u1 / pd, u1 / (pd * pd)};
  return w;
}

Rational c_exact(uint64_t p, SplittingType t) {
  const int64_t q = static_cast<int64_t>(p);
  switch (t) {
    case SplittingType::T1: return {1, 6};
    case SplittingType::T2: return {1, 2};
    case SplittingType::T3: return {1, 3};
    case SplittingType::T4: return {1, q};
    case SplittingType::T5: return {1, q * q};
  }
  return 0;
}

Rational x_exact(uint64_t p) {
  const int64_t q = static_cast<int64_t>(p);
  return {q * q, q * q + q + 1};
}

ABTerms A_B_constants(uint64_t p, SplittingType t, Sign sign) {
  return A_B_constants(std::vector<uint64_t>{p}, std::vector<SplittingType>{t}, sign);
}

ABTerms A_B_constants(const std::vector<uint64_t>& primes, const std::vector<SplittingType>& types, Sign sign) {
  if (primes.size() != types.size()) throw Error(Err::Validation, "primes and types differ in length");
  const auto k = constants(sign);
  double a = k.c1, b = k.c2;
  for (size_t j = 0; j < primes.size(); ++j) {
    const auto w = local_weights(primes[j]);
    a *= w.x * w.c[type_index(types[j])];
    b *= w.y * w.d[type_index(types[j])];
  }
  return {a, b};
}

int theta_e(int e) { return (e % 2 == 0) + (e % 3 == 0); }

int tau_e(int e) {
  const int r = ((e % 3) + 3) % 3;
  return r == 0 ? 1 : r == 1 ? -1 : 0;
}

int eta_e(int e) { return e % 3 == 0 ? 2 : -1; }

double kappa_e(uint64_t p, int e) {
  const double u = std::cbrt(1.0 / static_cast<double>(p));
  return theta_e(e) * (1.0 + u * u) + (e % 3 != 0 ? u : 0.0);
}

namespace {

double horner(std::initializer_list<double> c, double v) {  // c[0] + c[1] v + ...
  double r = 0;
  for (auto it = c.end(); it != c.begin();) r = r * v + *--it;
  return r;
}

// (v^2 - v + 1)(v^6 + v^3 + 1), the common denominator
double beta_den(double v) { return (v * v - v + 1) * (v * v * v * (v * v * v + 1) + 1); }
double beta_den5(double v) { return beta_den(v) * horner({1, 1, 1, 1, 1}, v); }

}  // namespace

double beta_e_real(double p, int e) {
  if (e < 1) throw Error(Err::Validation, "beta_e needs e >= 1");
  const double v = std::cbrt(1.0 / p);
  const double v3 = v * v * v;
  switch (e % 6) {
    case 0: return v3 * v * horner({-1, 1, 0, 0, 2, 0, 1}, v) / beta_den5(v);
    case 1: return v + beta1_excess(p);
    case 2:
    case 4: return v * horner({1, -1, 0, 1, -1, 1}, v) / beta_den(v);
    case 3: return v3 * v3 * v * v * (v * v + 1) / beta_den5(v);
    default: return v * horner({1, 0, 0, 2, -1, 0, 1, 0, 0, 1}, v) / beta_den5(v);
  }
}

double beta1_excess(double p) {
  const double v = std::cbrt(1.0 / p);
  return -v * v * v * horner({1, 0, 2, 1, 2, 1, 1, 1, 1, 0, 1}, v) / beta_den5(v);
}

double beta_e(uint64_t p, int e) { return beta_e_real(static_cast<double>(p), e); }

Rational f_table(int e, int s, uint64_t p) {
  if (e < 0 || s < 0 || s > 2) throw Error(Err::BadS, "f(e, s, p) needs e >= 0 and s in {0,1,2}");
  const int64_t q = static_cast<int64_t>(p);
  const Rational even(e % 2 == 0 ? 2 : 0, 4);  // (1 + (-1)^e) / 4
  const Rational tau(tau_e(e), 3);
  switch (s) {
    case 0: return Rational(e + 1, 6) + even + tau + Rational(1, q);
    case 1: return -Rational(e + 1, 3) + tau - Rational(1, q);
    default: return Rational(e + 1, 6) - even + tau;
  }
}

double g_table(int e, int s, uint64_t p) {
  if (e < 0 || s < 0 || s > 2) throw Error(Err::BadS, "g(e, s, p) needs e >= 0 and s in {0,1,2}");
  const double pd = static_cast<double>(p);
  const double u = std::cbrt(1.0 / pd);
  const double u1 = 1.0 + u;
  const double t1 = (e + 1) * u1 * u1 * u1;
  const double t2 = (e % 2 == 0 ? 2.0 : 0.0) * u1 * (1.0 + u * u) / 4.0;
  const double t3 = tau_e(e) * (1.0 + 1.0 / pd) / 3.0;
  const double t4 = u1 * u1 / pd;
  switch (s) {
    case 0: return t1 / 6.0 + t2 + t3 + t4;
    case 1: return -t1 / 3.0 + t3 - t4;
    default: return t1 / 6.0 - t2 + t3;
  }
}

namespace {

std::map<uint64_t, int> factorize(uint64_t n) {
  std::map<uint64_t, int> f;
  for (uint64_t p = 2; p * p <= n; ++p)
    while (n % p == 0) {
      ++f[p];
      n /= p;
    }
  if (n > 1) ++f[n];
  return f;
}

}  // namespace

double predicted_mean_lambda_mu(uint64_t m, uint64_t h, double X, Sign sign) {
  if (m == 0 || h == 0) throw Error(Err::Validation, "m and h must be positive");
  auto fm = factorize(m);
  auto fh = factorize(h);
  for (auto [p, s] : fh)
    if (s >= 3) throw Error(Err::HNotCubefree, "h = " + std::to_string(h) + " is not cubefree");
  std::map<uint64_t, std::pair<int, int>> es;
  for (auto [p, e] : fm) es[p].first = e;
  for (auto [p, s] : fh) es[p].second = s;
  if (es.size() > 8) throw Error(Err::Validation, "m h involves more than 8 primes");
  double pf = 1.0, pg = 1.0;
  for (auto [p, e_s] : es) {
    const auto w = local_weights(p);
    pf *= boost::rational_cast<double>(f_table(e_s.first, e_s.second, p)) * w.x;
    pg *= g_table(e_s.first, e_s.second, p) * w.y;
  }
  const auto k = constants(sign);
  const double r = k.c2 / k.c1 * std::pow(X, -1.0 / 6.0);
  return pf + (pg - pf) * r * (1.0 - r);
}

double predicted_sum_a(uint64_t p, int e, double X, Sign sign) {
  const auto k = constants(sign);
  const auto w = local_weights(p);
  const double pd = static_cast<double>(p);
  const double u = std::cbrt(1.0 / pd);
  return k.c1 * X * (theta_e(e) + 1.0 / pd) * w.x +
         k.c2 * std::pow(X, 5.0 / 6.0) * (1.0 + u) * (kappa_e(p, e) + 1.0 / pd + u / pd) * w.y;
}

double predicted_average_log_disc(double X, Sign sign) {
  const auto k = constants(sign);
  const double r = k.c2 / k.c1;
  return std::log(X) - 1.0 - r / 5.0 * std::pow(X, -1.0 / 6.0) + r * r / 5.0 * std::pow(X, -1.0 / 3.0);
}

}  // namespace cubic
