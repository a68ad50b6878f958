#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "cubic/cubic_form.hpp"
#include "cubic/enumerate.hpp"
#include "cubic/errors.hpp"
#include "field_oracle.hpp"

using namespace cubic;

namespace {

Mat2 random_unimodular(std::mt19937_64& rng, int steps) {
  Mat2 m{1, 0, 0, 1};
  std::uniform_int_distribution<int> pick(0, 3), shift(-2, 2);
  for (int i = 0; i < steps; ++i) {
    Mat2 e{1, 0, 0, 1};
    switch (pick(rng)) {
      case 0: e = {1, shift(rng), 0, 1}; break;
      case 1: e = {1, 0, shift(rng), 1}; break;
      case 2: e = {0, 1, 1, 0}; break;
      default: e = {-1, 0, 0, 1}; break;
    }
    m = {m.p * e.p + m.q * e.r, m.p * e.q + m.q * e.s, m.r * e.p + m.s * e.r, m.r * e.q + m.s * e.s};
  }
  return m;
}

std::vector<int64_t> discs_of(const std::vector<FieldRecord>& v) {
  std::vector<int64_t> out;
  for (auto& r : v) out.push_back(r.disc);
  return out;
}

}  // namespace

TEST_CASE("discriminant examples") {
  CHECK(discriminant({1, 0, -1, -1}) == -23);
  CHECK(discriminant({1, 0, 0, 0}) == 0);
  CHECK(discriminant({1, 0, -3, 1}) == 81);
  CHECK_THROWS_AS(discriminant({INT64_MAX, 0, 0, INT64_MAX}), Error);
}

TEST_CASE("irreducibility") {
  CHECK(is_irreducible({1, 0, -1, -1}));
  CHECK_FALSE(is_irreducible({1, 0, 0, 0}));
  CHECK_FALSE(is_irreducible({1, 0, -1, 0}));
  CHECK_FALSE(is_irreducible({6, -5, -2, 1}));  // (2x - y)(3x - y)(x + y)
  CHECK_FALSE(is_irreducible({4, 0, -3, 1}));   // (2x - y)^2 (x + y)
  CHECK(is_irreducible({2, 0, 0, 1}));
}

TEST_CASE("discriminant and Hessian are covariant") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coef(-9, 9);
  for (int i = 0; i < 300; ++i) {
    BinaryCubicForm f{coef(rng), coef(rng), coef(rng), coef(rng)};
    Mat2 g = random_unimodular(rng, 6);
    BinaryCubicForm h = transform(f, g);
    CHECK(discriminant(h) == discriminant(f));
    // H_{f o g} = H_f o g
    Hessian hf = hessian(f), hh = hessian(h);
    i128 P = hf.P * g.p * g.p + hf.Q * g.p * g.r + hf.R * g.r * g.r;
    i128 R = hf.P * g.q * g.q + hf.Q * g.q * g.s + hf.R * g.s * g.s;
    CHECK(hh.P == P);
    CHECK(hh.R == R);
  }
}

TEST_CASE("canonical_key is a class invariant") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coef(-12, 12);
  int tested = 0;
  while (tested < 400) {
    BinaryCubicForm f{coef(rng), coef(rng), coef(rng), coef(rng)};
    if (discriminant(f) == 0 || !is_irreducible(f)) continue;
    ++tested;
    BinaryCubicForm k = canonical_key(f);
    CHECK(discriminant(k) == discriminant(f));
    CHECK(is_reduced(k));
    CHECK(canonical_key(k) == k);
    CHECK(canonical_key(transform(f, {0, 1, 1, 0})) == k);
    CHECK(canonical_key(transform(f, {1, 1, 0, 1})) == k);
    CHECK(canonical_key({-f.a, -f.b, -f.c, -f.d}) == k);
    CHECK(canonical_key(transform(f, random_unimodular(rng, 8))) == k);
  }
  CHECK(canonical_key({1, 0, -1, -1}) != canonical_key({1, 0, 1, 1}));  // -23 vs -31
  // (1, 1, 0, -1) also has discriminant -23 and lies in the same class
  CHECK(discriminant({1, 1, 0, -1}) == -23);
  CHECK(canonical_key({1, 0, -1, -1}) == canonical_key({1, 1, 0, -1}));
}

TEST_CASE("canonical_key separates inequivalent forms of equal discriminant") {
  // several discriminants below 5000 carry more than one field
  auto all = enumerate_fields(5000, Sign::Minus);
  std::map<int64_t, int> per_disc;
  for (auto& r : all) ++per_disc[r.disc];
  auto oracle_fields = oracle::cubic_fields(4999);
  std::map<int64_t, int> oracle_per_disc;
  for (auto& o : oracle_fields)
    if (o.disc < 0) ++oracle_per_disc[o.disc];
  CHECK(per_disc == oracle_per_disc);
  int multi = 0;
  for (auto& [d, n] : per_disc) multi += n > 1;
  CHECK(multi > 0);
}

TEST_CASE("maximality") {
  CHECK(is_maximal_at({1, 0, -1, -1}, 23));
  CHECK(is_maximal_at({1, 0, -1, -1}, 2));
  // f(2x, y) is an index-2 suborder of the -23 ring
  BinaryCubicForm f{1, 0, -1, -1};
  BinaryCubicForm g = {f.a * 8, f.b * 4, f.c * 2, f.d};  // f(2x, y)
  CHECK(discriminant(g) == -23 * 64);
  CHECK_FALSE(is_maximal_at(g, 2));
  CHECK_FALSE(is_maximal({2, 0, 0, 2}, discriminant({2, 0, 0, 2})));  // content 2
  // maximality is a class property: (x, y) -> (y, x)
  CHECK((is_maximal_at({4, 2, 0, 1}, 2) == is_maximal_at({1, 0, 2, 4}, 2)));
  // x^3 - 2 is maximal (disc -108 = -4 * 27)
  CHECK(is_maximal({1, 0, 0, -2}, -108));
  // x^3 - 10: Z[cuberoot 10] is not 3-maximal (10 = 1 mod 9)
  CHECK_FALSE(is_maximal_at({1, 0, 0, -10}, 3));
  CHECK(is_maximal_at({1, 0, 0, -10}, 2));
  CHECK(is_maximal_at({1, 0, 0, -10}, 5));
}

TEST_CASE("maximality agrees with the index oracle on monic forms") {
  for (int64_t s2 = -15; s2 <= 15; ++s2)
    for (int64_t s3 = -40; s3 <= 40; ++s3) {
      for (int64_t t = 0; t <= 1; ++t) {
        BinaryCubicForm f{1, -t, s2, -s3};
        if (!is_irreducible(f)) continue;
        const i128 d = discriminant(f);
        const bool maximal = oracle::field_discriminant(t, s2, s3) == static_cast<int64_t>(d);
        CHECK(is_maximal(f, d) == maximal);
      }
    }
}

TEST_CASE("enumerate examples") {
  CHECK(discs_of(enumerate_fields(25, Sign::Minus)) == std::vector<int64_t>{-23});
  CHECK(enumerate_fields(100, Sign::Plus).empty());
  CHECK(discs_of(enumerate_fields(149, Sign::Plus)) == std::vector<int64_t>{148});
  CHECK(enumerate_fields(148, Sign::Plus).empty());
  EnumerateOptions galois;
  galois.include_galois = true;
  auto with = enumerate_fields(82, Sign::Plus, galois);
  CHECK(discs_of(with) == std::vector<int64_t>{49, 81});
  CHECK_THROWS_AS(enumerate_fields(kMaxEnumerationX + 1, Sign::Plus), Error);
}

TEST_CASE("records satisfy the field invariants") {
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    auto v = enumerate_fields(100000, s);
    for (size_t i = 0; i < v.size(); ++i) {
      const auto& r = v[i];
      REQUIRE(discriminant(r.form) == r.disc);
      CHECK(r.sign == s);
      CHECK((s == Sign::Plus ? r.disc > 0 : r.disc < 0));
      CHECK((((r.disc % 4) + 4) % 4 == 0 || ((r.disc % 4) + 4) % 4 == 1));
      CHECK((r.disc >= 23 || r.disc <= -23));
      CHECK_FALSE(is_perfect_square(r.disc));
      if (i % 37 == 0) {
        CHECK(is_irreducible(r.form));
        CHECK(is_maximal(r.form, r.disc));
        CHECK(canonical_key(r.form) == r.form);
      }
      if (i > 0) CHECK(record_less(v[i - 1], r));
    }
  }
}

TEST_CASE("enumeration is deterministic across thread counts") {
  EnumerateOptions one, three;
  three.threads = 3;
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    auto a = enumerate_fields(30000, s, one);
    auto b = enumerate_fields(30000, s, three);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].disc == b[i].disc);
      CHECK(a[i].form == b[i].form);
    }
  }
}

TEST_CASE("counts are monotone in X") {
  size_t prev = 0;
  for (uint64_t x : {10ULL, 100ULL, 500ULL, 1000ULL, 5000ULL, 20000ULL}) {
    size_t n = enumerate_fields(x, Sign::Minus).size();
    CHECK(n >= prev);
    prev = n;
  }
}

TEST_CASE("oracle equivalence for |D| <= 10^4") {
  auto oracle_fields = oracle::cubic_fields(10000);
  std::vector<int64_t> expected;
  for (auto& o : oracle_fields) expected.push_back(o.disc);
  std::vector<int64_t> got;
  auto plus = enumerate_fields(10001, Sign::Plus);
  auto minus = enumerate_fields(10001, Sign::Minus);
  for (auto& r : plus) got.push_back(r.disc);
  for (auto& r : minus) got.push_back(r.disc);
  std::sort(got.begin(), got.end());
  std::sort(expected.begin(), expected.end());
  CHECK(got.size() == expected.size());
  CHECK(got == expected);
  // Galois-inclusive variant against the oracle as well
  EnumerateOptions galois;
  galois.include_galois = true;
  auto oracle_all = oracle::cubic_fields(10000, true);
  size_t cyclic = 0;
  for (auto& o : oracle_all) cyclic += o.disc > 0 && is_perfect_square(o.disc);
  CHECK(enumerate_fields(10001, Sign::Plus, galois).size() - plus.size() == cyclic);
}

TEST_CASE("cache round trip and corruption") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cubic_cache_test";
  fs::create_directories(dir);
  const std::string path = (dir / "minus.csv").string();
  auto v = enumerate_fields(3000, Sign::Minus);
  write_cache(path, v);
  auto back = read_cache(path);
  REQUIRE(back.size() == v.size());
  for (size_t i = 0; i < v.size(); ++i) CHECK((back[i].disc == v[i].disc && back[i].form == v[i].form));
  {
    std::ifstream is(path);
    std::string header;
    std::getline(is, header);
    CHECK(header == "disc,a,b,c,d");
  }
  // a row whose disc disagrees with its form
  {
    std::ofstream os(path, std::ios::app);
    os << "-99999,1,0,-1,-1\n";
  }
  CHECK_THROWS_AS(read_cache(path), Error);
  {
    std::ofstream os(path, std::ios::trunc);
    os << "disc,a,b,c\n";
  }
  CHECK_THROWS_AS(read_cache(path), Error);
  {
    std::ofstream os(path, std::ios::trunc);
    os << "disc,a,b,c,d\n-31,1,0,1,1\n-23,1,-1,2,-1\n";
  }
  try {
    read_cache(path);
    FAIL("out-of-order rows accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Err::CacheCorruption);
  }
  fs::remove_all(dir);
}
