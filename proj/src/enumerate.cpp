#include "cubic/enumerate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>
#include <unistd.h>

#include "cubic/errors.hpp"

namespace cubic {

namespace {

struct Box {
  int64_t b_lo, b_hi;
};

// Integer d with lo < disc(a, b, c, d) < hi. disc is a concave quadratic in d,
// so the admissible set is at most two intervals; each is widened by one and
// the caller checks the exact value.
template <class Visit>
void for_each_d_band(int64_t a, int64_t b, int64_t c, long double lo, long double hi, Visit&& visit) {
  const long double A2 = 27.0L * a * a;
  const long double B1 = 18.0L * a * b * c - 4.0L * b * b * b;
  const long double C0 = static_cast<long double>(b) * b * c * c - 4.0L * a * c * c * c;
  const long double d0 = B1 / (2 * A2);
  const long double M = C0 + B1 * B1 / (4 * A2);
  const long double th = (M - lo) / A2;
  if (th < -1) return;
  const long double tl = std::max(0.0L, (M - hi) / A2);
  const long double rh = std::sqrt(std::max(0.0L, th));
  const long double rl = std::sqrt(tl);
  int64_t l1 = static_cast<int64_t>(std::floor(d0 - rh)) - 1;
  int64_t h1 = static_cast<int64_t>(std::ceil(d0 - rl)) + 1;
  int64_t l2 = static_cast<int64_t>(std::floor(d0 + rl)) - 1;
  int64_t h2 = static_cast<int64_t>(std::ceil(d0 + rh)) + 1;
  if (h1 >= l2) {
    for (int64_t d = l1; d <= h2; ++d) visit(d);
  } else {
    for (int64_t d = l1; d <= h1; ++d) visit(d);
    for (int64_t d = l2; d <= h2; ++d) visit(d);
  }
}

struct Worker {
  uint64_t x_max;
  Sign sign;
  bool include_galois;
  std::vector<FieldRecord> out;

  void consider(const BinaryCubicForm& f) {
    const i128 disc = discriminant(f);
    const i128 X = static_cast<i128>(x_max);
    if (sign == Sign::Plus ? !(disc > 0 && disc < X) : !(disc < 0 && -disc < X)) return;
    if (!include_galois && is_perfect_square(disc)) return;
    if (!is_reduced(f)) return;
    if (!is_irreducible(f)) return;
    if (canonical_key(f) != f) return;
    if (!is_maximal(f, disc)) return;
    out.push_back({static_cast<int64_t>(disc), f, sign});
  }

  // Totally real: the Hessian is definite and reduced, P <= sqrt(D) and
  // |b| < 3a/2 + sqrt(P); a^4 <= 16 D / 729.
  void run_positive(int64_t a, int64_t b) {
    const int64_t p_max = static_cast<int64_t>(std::sqrt(static_cast<long double>(x_max)));
    const int64_t bb = b * b;
    int64_t c_lo = static_cast<int64_t>(std::ceil(static_cast<long double>(bb - p_max) / (3 * a)));
    int64_t c_hi = static_cast<int64_t>(std::floor(static_cast<long double>(bb - 1) / (3 * a)));
    for (int64_t c = c_lo; c <= c_hi; ++c) {
      const int64_t P = bb - 3 * a * c;
      if (P < 1 || P > p_max) continue;
      // |Q| <= P with Q = bc - 9ad
      const int64_t bc = b * c;
      int64_t d_lo = static_cast<int64_t>(std::ceil(static_cast<long double>(bc - P) / (9 * a)));
      int64_t d_hi = static_cast<int64_t>(std::floor(static_cast<long double>(bc + P) / (9 * a)));
      for (int64_t d = d_lo; d <= d_hi; ++d) consider({a, b, c, d});
    }
  }

  // Complex: the non-real root beta of f(x,1) satisfies 0 < Re beta < 1/2,
  // |beta| > 1. With alpha the real root and v = Im beta,
  // |D| = 4 a^4 |alpha - beta|^4 v^2 bounds a, alpha and |beta|.
  void run_negative(int64_t a, int64_t b) {
    const long double X = static_cast<long double>(x_max);
    const long double a4 = static_cast<long double>(a) * a * a * a;
    const long double r = std::pow(X / (3 * a4), 0.25L);
    const long double w = std::cbrt(X / (4 * a4));
    int64_t c_lo = static_cast<int64_t>(std::floor(a * (1 - r))) - 1;
    int64_t c_hi = static_cast<int64_t>(std::ceil(a * (0.75L + r + w))) + 1;
    for (int64_t c = c_lo; c <= c_hi; ++c)
      for_each_d_band(a, b, c, -X, 0.0L, [&](int64_t d) { consider({a, b, c, d}); });
  }
};

int64_t max_leading(uint64_t x_max, Sign sign) {
  // positive: 729 a^4 <= 16 X; negative: 27 a^4 <= 16 X
  const i128 k = sign == Sign::Plus ? 729 : 27;
  int64_t a = 0;
  while (k * static_cast<i128>(a + 1) * (a + 1) * (a + 1) * (a + 1) <= 16 * static_cast<i128>(x_max)) ++a;
  return a;
}

Box b_range(uint64_t x_max, Sign sign, int64_t a) {
  const long double X = static_cast<long double>(x_max);
  if (sign == Sign::Plus) {
    const long double bound = 1.5L * a + std::pow(X, 0.25L);
    const int64_t m = static_cast<int64_t>(std::ceil(bound)) + 1;
    return {-m, m};
  }
  const long double a4 = static_cast<long double>(a) * a * a * a;
  const long double r = std::pow(X / (3 * a4), 0.25L);
  return {static_cast<int64_t>(std::floor(-a * (1.5L + r))) - 1, static_cast<int64_t>(std::ceil(a * r)) + 1};
}

}  // namespace

bool record_less(const FieldRecord& x, const FieldRecord& y) {
  const int64_t ax = x.disc < 0 ? -x.disc : x.disc;
  const int64_t ay = y.disc < 0 ? -y.disc : y.disc;
  if (ax != ay) return ax < ay;
  if (x.disc != y.disc) return x.disc < y.disc;
  return x.form < y.form;
}

std::vector<FieldRecord> enumerate_fields(uint64_t x_max, Sign sign, const EnumerateOptions& opts) {
  if (x_max > kMaxEnumerationX) throw Error(Err::Overflow, "x_max above the supported 1e10");
  std::vector<std::pair<int64_t, int64_t>> tasks;
  const int64_t a_max = max_leading(x_max, sign);
  for (int64_t a = 1; a <= a_max; ++a) {
    Box box = b_range(x_max, sign, a);
    for (int64_t b = box.b_lo; b <= box.b_hi; ++b) tasks.emplace_back(a, b);
  }
  const unsigned n = std::max(1u, opts.threads);
  std::vector<Worker> workers(n, Worker{x_max, sign, opts.include_galois, {}});
  auto job = [&](unsigned w) {
    for (size_t i = w; i < tasks.size(); i += n) {
      auto [a, b] = tasks[i];
      if (sign == Sign::Plus)
        workers[w].run_positive(a, b);
      else
        workers[w].run_negative(a, b);
    }
  };
  if (n == 1) {
    job(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n; ++w) pool.emplace_back(job, w);
    for (auto& t : pool) t.join();
  }
  std::vector<FieldRecord> all;
  for (auto& w : workers) all.insert(all.end(), w.out.begin(), w.out.end());
  std::sort(all.begin(), all.end(), record_less);
  return all;
}

void write_cache(const std::string& path, const std::vector<FieldRecord>& records) {
  namespace fs = std::filesystem;
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw Error(Err::Validation, "cannot open " + tmp);
    os << "disc,a,b,c,d\n";
    for (const auto& r : records)
      os << r.disc << ',' << r.form.a << ',' << r.form.b << ',' << r.form.c << ',' << r.form.d << '\n';
    os.flush();
    if (!os) throw Error(Err::Validation, "write failed for " + tmp);
  }
  fs::rename(tmp, path);
}

std::vector<FieldRecord> read_cache(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(Err::CacheCorruption, "cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line != "disc,a,b,c,d") throw Error(Err::CacheCorruption, path + ": bad header");
  std::vector<FieldRecord> out;
  size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    int64_t v[5];
    const char* p = line.data();
    const char* end = p + line.size();
    for (int i = 0; i < 5; ++i) {
      auto [q, ec] = std::from_chars(p, end, v[i]);
      if (ec != std::errc() || (i < 4 ? (q == end || *q != ',') : q != end))
        throw Error(Err::CacheCorruption, path + ":" + std::to_string(lineno) + ": malformed row");
      p = q + 1;
    }
    FieldRecord r{v[0], {v[1], v[2], v[3], v[4]}, v[0] > 0 ? Sign::Plus : Sign::Minus};
    if (r.disc == 0 || discriminant(r.form) != r.disc)
      throw Error(Err::CacheCorruption, path + ":" + std::to_string(lineno) + ": disc does not match form");
    if (!out.empty() && (out.front().sign != r.sign || !record_less(out.back(), r)))
      throw Error(Err::CacheCorruption, path + ":" + std::to_string(lineno) + ": rows out of order or mixed sign");
    out.push_back(r);
  }
  return out;
}

}  // namespace cubic
