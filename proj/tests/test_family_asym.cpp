#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "cubic/asym.hpp"
#include "cubic/errors.hpp"
#include "cubic/family.hpp"
#include "field_oracle.hpp"

using namespace cubic;
using doctest::Approx;

namespace {

const std::vector<uint64_t> kSmallPrimes{2, 3, 5, 7, 11, 13};

bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t q = 2; q * q <= n; ++q)
    if (n % q == 0) return false;
  return true;
}

std::vector<uint64_t> primes_upto(uint64_t n) {
  std::vector<uint64_t> v;
  for (uint64_t q = 2; q <= n; ++q)
    if (is_prime(q)) v.push_back(q);
  return v;
}

// one slice per sign, shared by every test case
const FamilySlice& slice(Sign s) {
  static const FamilySlice plus = FamilySlice::enumerate(100000, Sign::Plus);
  static const FamilySlice minus = FamilySlice::enumerate(100000, Sign::Minus);
  return s == Sign::Plus ? plus : minus;
}

// Brute-force count of roots of f(x, y) on P^1(F_p).
int projective_roots(const BinaryCubicForm& f, int64_t p, int* max_mult) {
  auto md = [p](int64_t v) { return ((v % p) + p) % p; };
  int roots = 0;
  *max_mult = 0;
  auto mult_at = [&](int64_t x0) {
    // multiplicity of x0 as a root of g(x) = f(x, 1) mod p via repeated synthetic division
    std::vector<int64_t> g{md(f.a), md(f.b), md(f.c), md(f.d)};
    int m = 0;
    while (g.size() > 1) {
      std::vector<int64_t> q(g.size() - 1);
      int64_t acc = 0;
      for (size_t i = 0; i + 1 < g.size(); ++i) {
        acc = md(acc * x0 + g[i]);
        q[i] = acc;
      }
      if (md(acc * x0 + g.back()) != 0) break;
      ++m;
      g = q;
    }
    return m;
  };
  for (int64_t x0 = 0; x0 < p; ++x0) {
    int m = mult_at(x0);
    if (m > 0) {
      ++roots;
      *max_mult = std::max(*max_mult, m);
    }
  }
  if (md(f.a) == 0) {
    // root at infinity, multiplicity = 3 - deg g
    int m = md(f.b) != 0 ? 1 : md(f.c) != 0 ? 2 : 3;
    ++roots;
    *max_mult = std::max(*max_mult, m);
  }
  return roots;
}

}  // namespace

TEST_CASE("secondary constants") {
  // 30-digit mpmath values of 1/(12 zeta(3)) and 4 zeta(1/3) / (5 Gamma(2/3)^3 zeta(5/3))
  const double c1 = 0.0693256143817256223902605232351;
  const double c2 = -0.147685261030334860476410210397;
  auto p = constants(Sign::Plus), m = constants(Sign::Minus);
  CHECK(p.c1 == Approx(c1).epsilon(1e-13));
  CHECK(p.c2 == Approx(c2).epsilon(1e-12));
  CHECK(m.c1 / p.c1 == Approx(3.0).epsilon(1e-15));
  CHECK(m.c2 / p.c2 == Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(p.c1 > 0);
  CHECK(p.c2 < 0);
}

TEST_CASE("local weights") {
  auto w = local_weights(2);
  CHECK(w.x == Approx(4.0 / 7.0).epsilon(1e-15));
  CHECK(x_exact(2) == Rational(4, 7));
  CHECK(w.c[type_index(SplittingType::T1)] == Approx(1.0 / 6.0));
  CHECK(c_exact(2, SplittingType::T1) == Rational(1, 6));
  CHECK(w.d[type_index(SplittingType::T3)] == Approx(0.5).epsilon(1e-15));
  // y_2 from 30-digit mpmath
  CHECK(w.y == Approx(0.200772291866977340689879240728).epsilon(1e-14));
  for (uint64_t p : {2, 3, 5, 7, 11, 101}) {
    auto lw = local_weights(p);
    double sx = 0, sy = 0;
    Rational ex = 0;
    for (auto t : kAllTypes) {
      sx += lw.x * lw.c[type_index(t)];
      sy += lw.y * lw.d[type_index(t)];
      ex += x_exact(p) * c_exact(p, t);
      CHECK(lw.c[type_index(t)] > 0);
      CHECK(lw.d[type_index(t)] > 0);
    }
    CHECK(std::fabs(sx - 1) <= 1e-12);
    CHECK(std::fabs(sy - 1) <= 1e-12);
    CHECK(ex == Rational(1));
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      double sa = 0, sb = 0;
      for (auto t : kAllTypes) {
        auto ab = A_B_constants(p, t, s);
        sa += ab.A;
        sb += ab.B;
      }
      CHECK(sa == Approx(constants(s).c1).epsilon(1e-13));
      CHECK(sb == Approx(constants(s).c2).epsilon(1e-13));
    }
  }
  auto v = A_B_constants(std::vector<uint64_t>{2, 3}, {SplittingType::T1, SplittingType::T4}, Sign::Minus);
  auto a2 = A_B_constants(2, SplittingType::T1, Sign::Plus), a3 = A_B_constants(3, SplittingType::T4, Sign::Plus);
  auto k = constants(Sign::Minus), kp = constants(Sign::Plus);
  CHECK(v.A == Approx(k.c1 * (a2.A / kp.c1) * (a3.A / kp.c1)));
  CHECK(v.B == Approx(k.c2 * (a2.B / kp.c2) * (a3.B / kp.c2)));
  CHECK_THROWS_AS(A_B_constants(std::vector<uint64_t>{2}, {}, Sign::Plus), Error);
}

TEST_CASE("theta, kappa, beta") {
  CHECK(theta_e(1) == 0);
  CHECK(theta_e(2) == 1);
  CHECK(theta_e(3) == 1);
  CHECK(theta_e(6) == 2);
  for (uint64_t p : {2, 7, 101}) {
    const double u = std::cbrt(1.0 / p);
    CHECK(kappa_e(p, 2) == Approx(1 + u + u * u).epsilon(1e-15));
    CHECK(kappa_e(p, 1) == Approx(u).epsilon(1e-15));
    CHECK(kappa_e(p, 6) == Approx(2 * (1 + u * u)).epsilon(1e-15));
  }
  // mpmath substitution of y_2, kappa_1(2), x_2
  CHECK(beta_e(2, 1) == Approx(0.323095935104040663215171671133).epsilon(1e-14));
  for (uint64_t p : primes_upto(5000))
    if (p >= 100) CHECK(std::fabs(beta_e(p, 1) - std::cbrt(1.0 / p)) <= 5 * std::pow(p, -2.0 / 3.0));
  // 50-digit mpmath values at p = 10^12, where the defining combination cancels
  CHECK(beta1_excess(1e12) == Approx(-1.000000009999e-12).epsilon(1e-12));
  CHECK(beta_e_real(1e12, 2) == Approx(0.000099999998999900000002).epsilon(1e-13));
  CHECK(beta_e_real(1e12, 3) == Approx(9.9999999999799989985e-33).epsilon(1e-12));
  CHECK(beta_e_real(1e12, 6) == Approx(-9.9989998999900000003e-17).epsilon(1e-12));
  CHECK(beta_e(7, 5) == Approx(0.36705836937943403185).epsilon(1e-14));
  CHECK(beta_e(2, 6) == Approx(0.06838735988510393119).epsilon(1e-13));
  // against the defining combination where it is well conditioned
  for (uint64_t p : {2, 3, 5, 11, 97})
    for (int e = 1; e <= 12; ++e) {
      const auto w = local_weights(p);
      const double u = std::cbrt(1.0 / p), pd = static_cast<double>(p);
      const double direct = w.y * (1 + u) * (kappa_e(p, e) + 1 / pd + u / pd) - w.x * (theta_e(e) + 1 / pd);
      CHECK(beta_e(p, e) == Approx(direct).epsilon(1e-12).scale(1));
    }
}

TEST_CASE("f and g identities") {
  for (uint64_t p : kSmallPrimes) {
    const Rational ip(1, static_cast<int64_t>(p));
    const double pd = static_cast<double>(p), u = std::cbrt(1.0 / pd);
    CHECK(f_table(1, 0, p) + f_table(0, 1, p) == Rational(0));
    CHECK(std::fabs(g_table(1, 0, p) + g_table(0, 1, p)) < 1e-13);
    for (int e = 2; e <= 12; ++e) {
      CHECK(f_table(e, 0, p) + f_table(e - 1, 1, p) + f_table(e - 2, 2, p) == Rational(0));
      CHECK(f_table(e, 0, p) - f_table(e - 2, 2, p) == Rational(theta_e(e)) + ip);
      CHECK(std::fabs(g_table(e, 0, p) + g_table(e - 1, 1, p) + g_table(e - 2, 2, p)) < 1e-12);
      CHECK(g_table(e, 0, p) - g_table(e - 2, 2, p) ==
            Approx((1 + u) * (kappa_e(p, e) + 1 / pd + u / pd)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(f_table(1, 3, 2), Error);
  CHECK_THROWS_AS(g_table(-1, 0, 2), Error);
  try {
    f_table(0, -1, 3);
    FAIL("bad s accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Err::BadS);
  }
}

TEST_CASE("predicted sums agree with the splitting tables") {
  // sum_t a(t, e) A_p(t) is the main coefficient of the predicted sum of a_K(p^e)
  for (uint64_t p : {2, 3, 5, 7}) {
    for (int e = 1; e <= 6; ++e) {
      for (Sign s : {Sign::Plus, Sign::Minus}) {
        double sa = 0, sb = 0;
        for (auto t : kAllTypes) {
          auto ab = A_B_constants(p, t, s);
          sa += a_coeff(t, e) * ab.A;
          sb += a_coeff(t, e) * ab.B;
        }
        const double X = 1e6;
        CHECK(predicted_sum_a(p, e, X, s) == Approx(sa * X + sb * std::pow(X, 5.0 / 6.0)).epsilon(1e-12));
      }
    }
  }
  // per-field main term x_p (theta_e + 1/p)
  const auto k = constants(Sign::Plus);
  const double big = 1e60;
  CHECK(predicted_sum_a(5, 2, big, Sign::Plus) / (k.c1 * big) ==
        Approx(local_weights(5).x * (1 + 0.2)).epsilon(1e-9));
}

TEST_CASE("predicted family means") {
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    CHECK(predicted_mean_lambda_mu(1, 1, 1e6, s) == 1.0);
    // m = p: F and G are the lambda(p)-weighted type densities
    for (uint64_t p : {2, 3, 5}) {
      const double X = 1e6;
      const auto k = constants(s);
      const auto w = local_weights(p);
      double F = 0, G = 0;
      for (auto t : kAllTypes) {
        F += lambda_coeff(t, 1) * w.x * w.c[type_index(t)];
        G += lambda_coeff(t, 1) * w.y * w.d[type_index(t)];
      }
      const double r = k.c2 / k.c1 * std::pow(X, -1.0 / 6.0);
      const double pred = predicted_mean_lambda_mu(p, 1, X, s);
      CHECK(pred == Approx(F + (G - F) * r * (1 - r)).epsilon(1e-12));
      CHECK(F == Approx(w.x / p).epsilon(1e-14));
      // the exact ratio (F + G r)/(1 + r) differs only at order r^3
      const double ratio = (F + G * r) / (1 + r);
      CHECK(std::fabs(pred - ratio) <= std::fabs((G - F) * r * r * r / (1 + r)) * (1 + 1e-9));
    }
  }
  CHECK_THROWS_AS(predicted_mean_lambda_mu(2, 8, 1e6, Sign::Plus), Error);
  try {
    predicted_mean_lambda_mu(1, 27, 1e6, Sign::Plus);
    FAIL("cube accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Err::HNotCubefree);
  }
  // 9 distinct primes
  CHECK_THROWS_AS(predicted_mean_lambda_mu(2ULL * 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23, 1, 1e6, Sign::Plus), Error);
  const auto k = constants(Sign::Plus);
  const double X = 1e7, r = k.c2 / k.c1;
  CHECK(predicted_average_log_disc(X, Sign::Plus) ==
        Approx(std::log(X) - 1 - r / 5 * std::pow(X, -1.0 / 6) + r * r / 5 * std::pow(X, -1.0 / 3)));
}

TEST_CASE("splitting types and coefficient tables") {
  FieldRecord k{-23, {1, 0, -1, -1}, Sign::Minus};
  CHECK(splitting_type(k, 2) == SplittingType::T3);
  CHECK(splitting_type(k, 5) == SplittingType::T2);
  CHECK(splitting_type(k, 23) == SplittingType::T4);
  CHECK(lambda_coeff(SplittingType::T1, 2) == 3);
  CHECK(a_coeff(SplittingType::T3, 3) == 2);
  CHECK(mu_coeff(k, 2, 2) == 1);
  CHECK(mu_coeff(k, 23, 2) == 0);
  CHECK(mu_coeff(k, 5, 3) == 0);
  CHECK(kronecker(-23, 2) == 1);
  CHECK(kronecker(5, 2) == -1);
  CHECK(kronecker(-23, 3) == 1);  // -23 = 1 mod 3
  CHECK(kronecker(-23, 5) == -1);
  CHECK(parse_type("T4") == SplittingType::T4);
  CHECK(parse_type("2") == SplittingType::T2);
  CHECK_THROWS_AS(parse_type("T6"), Error);
  CHECK(type_name(SplittingType::T5) == std::string("T5"));
}

TEST_CASE("splitting types match root counts on P^1(F_p)") {
  const auto& f = slice(Sign::Minus);
  for (size_t i = 0; i < f.records().size(); i += 53) {
    const auto& r = f.records()[i];
    for (uint64_t p : {2, 3, 5, 7, 31}) {
      int mm = 0;
      const int roots = projective_roots(r.form, static_cast<int64_t>(p), &mm);
      const bool ram = r.disc % static_cast<int64_t>(p) == 0;
      SplittingType want = ram ? (mm == 3 ? SplittingType::T5 : SplittingType::T4)
                               : (roots == 3 ? SplittingType::T1 : roots == 1 ? SplittingType::T2 : SplittingType::T3);
      CHECK(splitting_type(r, p) == want);
    }
  }
}

TEST_CASE("Dirichlet inverse of lambda against 1 - lambda(p) u + (D/p) u^2") {
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    const auto& f = slice(s);
    for (size_t i = 0; i < f.records().size(); i += 101) {
      const auto& k = f.records()[i];
      for (uint64_t p : {2, 3, 5, 7, 11}) {
        if (k.disc % static_cast<int64_t>(p) == 0) continue;
        const auto t = splitting_type(k, p);
        const int l1 = lambda_coeff(t, 1), chi = kronecker(k.disc, p);
        // coefficients of (sum lambda(p^e) u^e)(1 - l1 u + chi u^2) up to u^5
        for (int n = 0; n <= 5; ++n) {
          int c = lambda_coeff(t, n);
          if (n >= 1) c -= l1 * lambda_coeff(t, n - 1);
          if (n >= 2) c += chi * lambda_coeff(t, n - 2);
          CHECK(c == (n == 0 ? 1 : 0));
        }
        CHECK(mu_coeff(k, p, 1) == -l1);
        CHECK(mu_coeff(k, p, 2) == chi);
      }
    }
  }
}

TEST_CASE("a_K(p) equals lambda_K(p)") {
  for (auto t : kAllTypes) CHECK(a_coeff(t, 1) == lambda_coeff(t, 1));
  const auto& f = slice(Sign::Plus);
  for (uint64_t p : primes_upto(100)) {
    auto types = f.types_at(p);
    for (size_t i = 0; i < f.records().size(); i += 17) {
      auto t = static_cast<SplittingType>((*types)[i]);
      CHECK(a_coeff(t, 1) == lambda_coeff(t, 1));
    }
  }
}

TEST_CASE("local counts partition the family") {
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    const auto& f = slice(s);
    for (uint64_t p : primes_upto(100)) {
      for (double x : {30.0, 1000.0, 33333.0, 100000.0}) {
        size_t total = 0;
        for (auto t : kAllTypes) total += f.count_local(x, p, t);
        CHECK(total == f.count(x));
        if (static_cast<double>(p) > x) CHECK(f.count_local(x, p, SplittingType::T4) == 0);
      }
      auto types = f.types_at(p);
      for (size_t i = 0; i < f.records().size(); ++i) {
        const auto t = static_cast<SplittingType>((*types)[i]);
        const int64_t d = f.records()[i].disc;
        const int64_t q = static_cast<int64_t>(p);
        if (p > 2) CHECK((t == SplittingType::T5) == (d % (q * q) == 0));
        if (t == SplittingType::T4 || t == SplittingType::T5) CHECK(d % q == 0);
      }
    }
  }
  const auto& f = slice(Sign::Minus);
  std::vector<uint64_t> ps{2, 3};
  std::vector<SplittingType> ts{SplittingType::T1, SplittingType::T3};
  size_t direct = 0;
  auto t2 = f.types_at(2), t3 = f.types_at(3);
  for (size_t i = 0; i < f.count(50000); ++i) direct += (*t2)[i] == 1 && (*t3)[i] == 3;
  CHECK(f.count_local_vector(50000, ps, ts) == direct);
  CHECK_THROWS_AS(f.count_local_vector(100, {2, 2}, ts), Error);
}

TEST_CASE("family counts") {
  CHECK(slice(Sign::Minus).count(25) == 1);
  CHECK(slice(Sign::Minus).count(23) == 0);
  // independent oracle count at 10^4
  size_t plus = 0, minus = 0;
  for (auto& o : oracle::cubic_fields(9999)) (o.disc > 0 ? plus : minus)++;
  CHECK(slice(Sign::Plus).count(10000) == plus);
  CHECK(slice(Sign::Minus).count(10000) == minus);
  auto all = FamilySlice::enumerate(82, Sign::Plus, {true, 1});
  CHECK(all.count(82) - slice(Sign::Plus).count(82) == 2);
  try {
    slice(Sign::Plus).count(100001);
    FAIL("oversized x accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Err::SliceTooSmall);
  }
}

TEST_CASE("family means") {
  const auto& f = slice(Sign::Minus);
  CHECK(f.mean_lambda_mu(1e5, 1, 1) == 1.0);
  // mean of lambda(2) from the type counts
  double s = 0;
  for (auto t : kAllTypes) s += lambda_coeff(t, 1) * static_cast<double>(f.count_local(1e5, 2, t));
  CHECK(f.mean_lambda_mu(1e5, 2, 1) == Approx(s / f.count(1e5)).epsilon(1e-14));
  // mean of lambda(2) mu(2) = -lambda(2)^2
  double s2 = 0;
  for (auto t : kAllTypes)
    s2 -= lambda_coeff(t, 1) * lambda_coeff(t, 1) * static_cast<double>(f.count_local(1e5, 2, t));
  CHECK(f.mean_lambda_mu(1e5, 2, 2) == Approx(s2 / f.count(1e5)).epsilon(1e-14));
  double sa = 0;
  for (auto t : kAllTypes) sa += a_coeff(t, 2) * static_cast<double>(f.count_local(1e5, 3, t));
  CHECK(f.sum_a(1e5, 3, 2) == sa);
  double lg = 0;
  for (size_t i = 0; i < f.count(5000); ++i) lg += std::log(std::fabs(static_cast<double>(f.records()[i].disc)));
  CHECK(f.average_log_disc(5000) == Approx(lg / f.count(5000)));
  CHECK_THROWS_AS(f.average_log_disc(20), Error);
  CHECK_THROWS_AS(f.mean_lambda_mu(20, 2, 1), Error);
  FamilySlice empty(Sign::Plus, 10, {});
  try {
    empty.average_log_disc(10);
    FAIL("empty family accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Err::EmptyFamily);
  }
}

TEST_CASE("error statistics") {
  const auto& f = slice(Sign::Minus);
  for (double x : {5.0, 22.0}) {
    auto ab = A_B_constants(3, SplittingType::T2, Sign::Minus);
    CHECK(error_stat(f, x, 3, SplittingType::T2) == Approx(-ab.A * x - ab.B * std::pow(x, 5.0 / 6.0)));
  }
  const auto& g = slice(Sign::Plus);
  for (uint64_t p : {2, 5})
    for (auto t : kAllTypes) {
      double prev = 0;
      for (double X : {10.0, 100.0, 1000.0, 5000.0, 20000.0, 100000.0}) {
        const double v = f_stat(g, X, p, t);
        CHECK(v >= prev);
        CHECK(v >= std::fabs(error_stat(g, X, p, t)) / std::sqrt(X) - 1e-12);
        prev = v;
      }
    }
  // f_stat is a max over all x <= X; a dense scan can never exceed it
  double scan = 0;
  for (double x = 1; x <= 20000; x += 0.5)
    scan = std::max(scan, std::fabs(error_stat(g, x, 5, SplittingType::T1)) / std::sqrt(x));
  CHECK(scan <= f_stat(g, 20000, 5, SplittingType::T1) + 1e-12);
  // frozen regression value from the enumerated family
  CHECK(f_stat(g, 1e4, 5, SplittingType::T1) == Approx(0.100886893144135).epsilon(1e-9));
}

TEST_CASE("global error") {
  auto all = FamilySlice::enumerate(100000, Sign::Plus, {true, 1});
  const auto k = constants(Sign::Plus);
  const double x = 48.5;
  CHECK(global_error(all, x) == Approx(-(k.c1 * x + k.c2 * std::pow(x, 5.0 / 6.0)) / std::sqrt(x)));
  for (double X : {1e3, 1e4, 5e4, 1e5}) CHECK(global_error(all, X) > 0);
}

TEST_CASE("csv outputs") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cubic_family_test";
  fs::create_directories(dir);
  const auto& f = slice(Sign::Plus);
  const std::string e = (dir / "errors.csv").string(), s = (dir / "fstat.csv").string();
  write_errors_csv(e, f, {1000, 10000}, {2, 3}, {SplittingType::T1, SplittingType::T3});
  write_fstat_csv(s, f, {1000, 10000}, {2}, {SplittingType::T2});
  std::ifstream ie(e), is(s);
  std::string line;
  std::getline(ie, line);
  CHECK(line == "X,p,type,count,A_term,B_term,E,E_normalized");
  int rows = 0;
  while (std::getline(ie, line)) ++rows;
  CHECK(rows == 8);
  std::getline(is, line);
  CHECK(line == "p,type,X,f_value");
  rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 2);
  fs::remove_all(dir);
}
