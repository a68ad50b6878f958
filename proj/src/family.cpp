#include "cubic/family.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "cubic/asym.hpp"
#include "cubic/errors.hpp"

namespace cubic {

namespace {

using u128 = unsigned __int128;

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t p) { return static_cast<uint64_t>(static_cast<u128>(a) * b % p); }

uint64_t powmod(uint64_t a, uint64_t e, uint64_t p) {
  uint64_t r = 1 % p;
  a %= p;
  for (; e; e >>= 1) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
  }
  return r;
}

uint64_t reduce(int64_t v, uint64_t p) {
  const int64_t q = static_cast<int64_t>(p);
  return static_cast<uint64_t>(((v % q) + q) % q);
}

// Polynomials over F_p, low degree first, no trailing zeros.
using Poly = std::vector<uint64_t>;

void trim(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

Poly poly_rem(Poly a, const Poly& m, uint64_t p) {
  const uint64_t inv = powmod(m.back(), p - 2, p);
  while (a.size() >= m.size()) {
    const uint64_t q = mulmod(a.back(), inv, p);
    const size_t shift = a.size() - m.size();
    for (size_t i = 0; i < m.size(); ++i) a[shift + i] = (a[shift + i] + p - mulmod(q, m[i], p)) % p;
    trim(a);
  }
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + mulmod(a[i], b[j], p)) % p;
  trim(c);
  return poly_rem(c, m, p);
}

// Number of distinct roots in F_p of g (deg >= 1): deg gcd(g, x^p - x).
size_t distinct_roots(const Poly& g, uint64_t p) {
  if (g.size() <= 1) return 0;
  Poly xp{1}, base{0, 1};
  base = poly_rem(base, g, p);
  for (uint64_t e = p; e; e >>= 1) {
    if (e & 1) xp = poly_mulmod(xp, base, g, p);
    base = poly_mulmod(base, base, g, p);
  }
  xp.resize(std::max<size_t>(xp.size(), 2), 0);
  xp[1] = (xp[1] + p - 1) % p;
  trim(xp);
  Poly a = g, b = xp;
  while (!b.empty()) {
    Poly r = poly_rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a.size() - 1;
}

}  // namespace

SplittingType splitting_type(const BinaryCubicForm& f, uint64_t p) {
  const uint64_t a = reduce(f.a, p), b = reduce(f.b, p), c = reduce(f.c, p), d = reduce(f.d, p);
  if (a == 0 && b == 0 && c == 0 && d == 0) throw Error(Err::DomainViolation, "form vanishes mod p");
  // a root at infinity when a = 0 mod p
  const bool at_infinity = a == 0;
  Poly g{d, c, b, a};
  trim(g);
  const size_t distinct = distinct_roots(g, p) + (at_infinity ? 1 : 0);
  const i128 disc = discriminant(f);
  const bool ramified = disc % static_cast<i128>(p) == 0;
  if (!ramified) return distinct == 3 ? SplittingType::T1 : distinct == 1 ? SplittingType::T2 : SplittingType::T3;
  return distinct >= 2 ? SplittingType::T4 : SplittingType::T5;
}

int lambda_coeff(SplittingType t, int e) {
  if (e < 0) throw Error(Err::Validation, "exponent must be >= 0");
  if (e == 0) return 1;
  switch (t) {
    case SplittingType::T1: return e + 1;
    case SplittingType::T2: return e % 2 == 0 ? 1 : 0;
    case SplittingType::T3: return tau_e(e);
    case SplittingType::T4: return 1;
    case SplittingType::T5: return 0;
  }
  return 0;
}

int a_coeff(SplittingType t, int e) {
  if (e < 1) throw Error(Err::Validation, "exponent must be >= 1");
  switch (t) {
    case SplittingType::T1: return 2;
    case SplittingType::T2: return e % 2 == 0 ? 2 : 0;
    case SplittingType::T3: return eta_e(e);
    case SplittingType::T4: return 1;
    case SplittingType::T5: return 0;
  }
  return 0;
}

int kronecker(int64_t d, uint64_t p) {
  if (p == 2) {
    if (d % 2 == 0) return 0;
    const uint64_t r = reduce(d, 8);
    return (r == 1 || r == 7) ? 1 : -1;
  }
  const uint64_t r = reduce(d, p);
  if (r == 0) return 0;
  return powmod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

int mu_coeff(const FieldRecord& k, uint64_t p, int e) {
  if (e < 0) throw Error(Err::Validation, "exponent must be >= 0");
  if (e == 0) return 1;
  if (e == 1) return -lambda_coeff(splitting_type(k, p), 1);
  if (e == 2) return kronecker(k.disc, p);
  return 0;
}

FamilySlice::FamilySlice(Sign sign, uint64_t x_max, std::vector<FieldRecord> records)
    : sign_(sign), x_max_(x_max), records_(std::move(records)) {}

FamilySlice FamilySlice::enumerate(uint64_t x_max, Sign sign, const EnumerateOptions& opts) {
  return FamilySlice(sign, x_max, enumerate_fields(x_max, sign, opts));
}

FamilySlice FamilySlice::from_cache(const std::string& path, uint64_t x_max) {
  auto recs = read_cache(path);
  Sign sign = recs.empty() ? Sign::Plus : recs.front().sign;
  for (const auto& r : recs)
    if (static_cast<uint64_t>(r.disc < 0 ? -r.disc : r.disc) >= x_max)
      throw Error(Err::CacheCorruption, path + ": record beyond the stated x_max");
  return FamilySlice(sign, x_max, std::move(recs));
}

void FamilySlice::check_x(double x) const {
  if (!(x <= static_cast<double>(x_max_)))
    throw Error(Err::SliceTooSmall, "x = " + std::to_string(x) + " beyond slice bound " + std::to_string(x_max_));
}

size_t FamilySlice::prefix(double x) const {
  check_x(x);
  auto it = std::partition_point(records_.begin(), records_.end(), [x](const FieldRecord& r) {
    return static_cast<double>(r.disc < 0 ? -r.disc : r.disc) < x;
  });
  return static_cast<size_t>(it - records_.begin());
}

size_t FamilySlice::count(double x) const { return prefix(x); }

std::shared_ptr<const std::vector<uint8_t>> FamilySlice::types_at(uint64_t p) const {
  {
    std::lock_guard<std::mutex> lock(memo_->mutex);
    auto it = memo_->by_prime.find(p);
    if (it != memo_->by_prime.end()) return it->second;
  }
  auto v = std::make_shared<std::vector<uint8_t>>(records_.size());
  for (size_t i = 0; i < records_.size(); ++i)
    (*v)[i] = static_cast<uint8_t>(splitting_type(records_[i].form, p));
  std::lock_guard<std::mutex> lock(memo_->mutex);
  return memo_->by_prime.emplace(p, std::move(v)).first->second;
}

size_t FamilySlice::count_local(double x, uint64_t p, SplittingType t) const {
  const size_t n = prefix(x);
  auto types = types_at(p);
  return static_cast<size_t>(std::count(types->begin(), types->begin() + n, static_cast<uint8_t>(t)));
}

size_t FamilySlice::count_local_vector(double x, const std::vector<uint64_t>& primes,
                                       const std::vector<SplittingType>& types) const {
  if (primes.size() != types.size()) throw Error(Err::Validation, "primes and types differ in length");
  for (size_t i = 0; i < primes.size(); ++i)
    for (size_t j = i + 1; j < primes.size(); ++j)
      if (primes[i] == primes[j]) throw Error(Err::Validation, "primes must be distinct");
  const size_t n = prefix(x);
  std::vector<std::shared_ptr<const std::vector<uint8_t>>> tabs;
  for (uint64_t p : primes) tabs.push_back(types_at(p));
  size_t c = 0;
  for (size_t i = 0; i < n; ++i) {
    bool ok = true;
    for (size_t j = 0; j < tabs.size() && ok; ++j) ok = (*tabs[j])[i] == static_cast<uint8_t>(types[j]);
    c += ok;
  }
  return c;
}

double FamilySlice::mean_lambda_mu(double x, uint64_t m, uint64_t h) const {
  const size_t n = prefix(x);
  if (n == 0) throw Error(Err::EmptyFamily, "no field below x");
  std::map<uint64_t, std::pair<int, int>> es;
  for (uint64_t q = 2, r = m; r > 1; ++q) {
    if (q * q > r) q = r;
    while (r % q == 0) {
      ++es[q].first;
      r /= q;
    }
  }
  for (uint64_t q = 2, r = h; r > 1; ++q) {
    if (q * q > r) q = r;
    while (r % q == 0) {
      ++es[q].second;
      r /= q;
    }
  }
  std::vector<std::pair<std::shared_ptr<const std::vector<uint8_t>>, std::pair<int, int>>> parts;
  std::vector<uint64_t> ps;
  for (auto& [p, e_s] : es) {
    parts.push_back({types_at(p), e_s});
    ps.push_back(p);
  }
  double total = 0;
  for (size_t i = 0; i < n; ++i) {
    double v = 1;
    for (size_t j = 0; j < parts.size() && v != 0; ++j) {
      const auto t = static_cast<SplittingType>((*parts[j].first)[i]);
      const int e = parts[j].second.first, s = parts[j].second.second;
      int mu = 1;
      if (s == 1) mu = -lambda_coeff(t, 1);
      if (s == 2) mu = kronecker(records_[i].disc, ps[j]);
      if (s > 2) mu = 0;
      v *= lambda_coeff(t, e) * mu;
    }
    total += v;
  }
  return total / static_cast<double>(n);
}

double FamilySlice::sum_a(double x, uint64_t p, int e) const {
  const size_t n = prefix(x);
  auto types = types_at(p);
  double s = 0;
  for (size_t i = 0; i < n; ++i) s += a_coeff(static_cast<SplittingType>((*types)[i]), e);
  return s;
}

double FamilySlice::average_log_disc(double x) const {
  const size_t n = prefix(x);
  if (n == 0) throw Error(Err::EmptyFamily, "no field below x");
  double s = 0;
  for (size_t i = 0; i < n; ++i) s += std::log(std::fabs(static_cast<double>(records_[i].disc)));
  return s / static_cast<double>(n);
}

double error_stat(const FamilySlice& f, double x, uint64_t p, SplittingType t) {
  const auto ab = A_B_constants(p, t, f.sign());
  return static_cast<double>(f.count_local(x, p, t)) - ab.A * x - ab.B * std::pow(x, 5.0 / 6.0);
}

namespace {

// Critical points in x of h(x) = (n - A x - B x^{5/6}) / sqrt(x). With t = x^{1/6}
// they solve A/2 t^6 + B/3 t^5 + n/2 = 0; the left side has a single minimum at
// t = -5B/(9A), so there are at most two, and only when that minimum is negative.
std::vector<double> critical_points(double A, double B, double n) {
  if (!(A > 0) || !(B < 0)) return {};
  auto g = [&](double t) { return A / 2 * std::pow(t, 6) + B / 3 * std::pow(t, 5) + n / 2; };
  const double tm = -5.0 * B / (9.0 * A);
  if (g(tm) >= 0) return {};
  auto bisect = [&](double lo, double hi) {
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      ((g(lo) < 0) == (g(mid) < 0) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  double hi = 2 * tm + 1;
  while (g(hi) < 0) hi *= 2;
  std::vector<double> out;
  if (n > 0) out.push_back(std::pow(bisect(0, tm), 6));
  out.push_back(std::pow(bisect(tm, hi), 6));
  return out;
}

}  // namespace

double f_stat(const FamilySlice& f, double X, uint64_t p, SplittingType t) {
  if (X < 1) throw Error(Err::Validation, "f_stat needs X >= 1");
  const size_t n_all = f.count(X);
  const auto ab = A_B_constants(p, t, f.sign());
  auto types = f.types_at(p);
  auto norm_err = [&](double x, size_t n) {
    return std::fabs(static_cast<double>(n) - ab.A * x - ab.B * std::pow(x, 5.0 / 6.0)) / std::sqrt(x);
  };
  double best = 0;
  // N is constant (= n) on [lo, hi]; the max of |h| there is at an end or a critical point
  auto interval = [&](double lo, double hi, size_t n) {
    best = std::max({best, norm_err(lo, n), norm_err(hi, n)});
    for (double c : critical_points(ab.A, ab.B, static_cast<double>(n)))
      if (c > lo && c < hi) best = std::max(best, norm_err(c, n));
  };
  double lo = 1.0;
  size_t n = 0;
  const auto& recs = f.records();
  for (size_t i = 0; i < n_all;) {
    // group records sharing |D|; N jumps once by the group's size
    const int64_t ad = recs[i].disc < 0 ? -recs[i].disc : recs[i].disc;
    size_t k = 0, j = i;
    for (; j < n_all && (recs[j].disc < 0 ? -recs[j].disc : recs[j].disc) == ad; ++j)
      k += (*types)[j] == static_cast<uint8_t>(t);
    if (k > 0) {
      const double x = static_cast<double>(ad);
      // N(x) counts |D| < x, so the jump happens just after x
      interval(lo, x, n);
      n += k;
      lo = x;
    }
    i = j;
  }
  interval(lo, X, n);
  return best;
}

double global_error(const FamilySlice& all, double X) {
  const auto k = constants(all.sign());
  const double n = static_cast<double>(all.count(X));
  return (n - k.c1 * X - k.c2 * std::pow(X, 5.0 / 6.0)) / std::sqrt(X);
}

void write_errors_csv(const std::string& path, const FamilySlice& f, const std::vector<double>& xs,
                      const std::vector<uint64_t>& primes, const std::vector<SplittingType>& types) {
  std::ofstream os(path);
  if (!os) throw Error(Err::Validation, "cannot open " + path);
  os << "X,p,type,count,A_term,B_term,E,E_normalized\n" << std::setprecision(12);
  for (double x : xs)
    for (uint64_t p : primes)
      for (SplittingType t : types) {
        const auto ab = A_B_constants(p, t, f.sign());
        const size_t n = f.count_local(x, p, t);
        const double a_term = ab.A * x, b_term = ab.B * std::pow(x, 5.0 / 6.0);
        const double e = static_cast<double>(n) - a_term - b_term;
        os << x << ',' << p << ',' << type_name(t) << ',' << n << ',' << a_term << ',' << b_term << ',' << e << ','
           << e / std::sqrt(x) << '\n';
      }
}

void write_fstat_csv(const std::string& path, const FamilySlice& f, const std::vector<double>& xs,
                     const std::vector<uint64_t>& primes, const std::vector<SplittingType>& types) {
  std::ofstream os(path);
  if (!os) throw Error(Err::Validation, "cannot open " + path);
  os << "p,type,X,f_value\n" << std::setprecision(12);
  for (uint64_t p : primes)
    for (SplittingType t : types)
      for (double x : xs) os << p << ',' << type_name(t) << ',' << x << ',' << f_stat(f, x, p, t) << '\n';
}

}  // namespace cubic
