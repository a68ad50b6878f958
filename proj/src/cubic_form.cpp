#include "cubic/cubic_form.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "cubic/errors.hpp"
#include "cubic/primes.hpp"

namespace cubic {

namespace {

i128 mul(i128 x, i128 y) {
  i128 r;
  if (__builtin_mul_overflow(x, y, &r)) throw Error(Err::Overflow, "128-bit product");
  return r;
}

i128 add(i128 x, i128 y) {
  i128 r;
  if (__builtin_add_overflow(x, y, &r)) throw Error(Err::Overflow, "128-bit sum");
  return r;
}

int64_t narrow(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw Error(Err::Overflow, "form coefficient exceeds 64 bits");
  return static_cast<int64_t>(v);
}

i128 iabs(i128 v) { return v < 0 ? -v : v; }

// Coefficients of a degree-3 form, index = power of y.
using Poly3 = std::array<i128, 4>;

Poly3 cube_of_linear_product(i128 p1, i128 q1, int n1, i128 p2, i128 q2, int n2) {
  // (p1 x + q1 y)^n1 (p2 x + q2 y)^n2 with n1 + n2 = 3
  std::array<i128, 4> acc{1, 0, 0, 0};
  int deg = 0;
  auto times = [&](i128 p, i128 q) {
    std::array<i128, 4> next{0, 0, 0, 0};
    for (int i = 0; i <= deg; ++i) {
      next[i] = add(next[i], mul(acc[i], p));
      next[i + 1] = add(next[i + 1], mul(acc[i], q));
    }
    acc = next;
    ++deg;
  };
  for (int i = 0; i < n1; ++i) times(p1, q1);
  for (int i = 0; i < n2; ++i) times(p2, q2);
  return acc;
}

BinaryCubicForm normalize_sign(BinaryCubicForm f) {
  int64_t lead = f.a != 0 ? f.a : f.b != 0 ? f.b : f.c != 0 ? f.c : f.d;
  if (lead < 0) f = {-f.a, -f.b, -f.c, -f.d};
  return f;
}

const std::vector<Mat2>& small_unimodular() {
  static const std::vector<Mat2> mats = [] {
    std::vector<Mat2> out;
    for (int p = -1; p <= 1; ++p)
      for (int q = -1; q <= 1; ++q)
        for (int r = -1; r <= 1; ++r)
          for (int s = -1; s <= 1; ++s)
            if (std::abs(p * s - q * r) == 1) out.push_back({p, q, r, s});
    return out;
  }();
  return mats;
}

constexpr Mat2 kInvert{0, -1, 1, 0};
constexpr Mat2 kReflect{-1, 0, 0, 1};
Mat2 shift(int64_t k) { return {1, k, 0, 1}; }

i128 floor_div(i128 x, i128 y) {
  i128 q = x / y;
  if ((x % y != 0) && ((x < 0) != (y < 0))) --q;
  return q;
}

// Positive discriminant: reduce the (definite) Hessian.
BinaryCubicForm reduce_positive(BinaryCubicForm f) {
  for (int iter = 0; iter < 10000; ++iter) {
    Hessian h = hessian(f);
    if (h.P <= 0) throw Error(Err::DomainViolation, "Hessian not positive definite");
    if (h.Q > h.P || h.Q < -h.P) {
      i128 k = floor_div(h.P - h.Q, 2 * h.P);
      f = transform(f, shift(narrow(k)));
    } else if (h.P > h.R) {
      f = transform(f, kInvert);
    } else {
      if (h.Q < 0) f = transform(f, kReflect);
      h = hessian(f);
      bool boundary = h.Q == 0 || h.Q == h.P || h.P == h.R;
      BinaryCubicForm best = normalize_sign(f);
      if (boundary) {
        for (const Mat2& g : small_unimodular()) {
          BinaryCubicForm t = transform(f, g);
          if (hessian(t) == h) best = std::min(best, normalize_sign(t));
        }
      }
      return best;
    }
  }
  throw Error(Err::DomainViolation, "Hessian reduction did not terminate");
}

// Negative discriminant: reduce the complex root beta of f(x, 1) into
// 0 < Re beta < 1/2, |beta| > 1. The boundary is never hit for irreducible f,
// so every test below is a strict sign of f at a rational point.
BinaryCubicForm reduce_negative(BinaryCubicForm f) {
  f = normalize_sign(f);
  for (int iter = 0; iter < 10000; ++iter) {
    const i128 a = f.a, b = f.b, d = f.d;
    bool gt_half = eval(f, -(a + b), a) > 0;
    bool lt_mhalf = eval(f, a - b, a) < 0;
    if (gt_half || lt_mhalf) {
      auto roots = real_roots(f);
      long double alpha = roots.empty() ? 0.0L : roots.front();
      long double re = (-static_cast<long double>(f.b) / f.a - alpha) / 2;
      int64_t k = std::isfinite(re) ? std::llround(re) : 0;
      if (gt_half && k < 1) k = 1;
      if (lt_mhalf && k > -1) k = -1;
      f = normalize_sign(transform(f, shift(k)));
      continue;
    }
    i128 at = eval(f, -d, a);
    bool abs_lt1 = d < 0 ? at < 0 : at > 0;
    if (abs_lt1) {
      f = normalize_sign(transform(f, kInvert));
      continue;
    }
    if (eval(f, -b, a) < 0) f = normalize_sign(transform(f, kReflect));
    return f;
  }
  throw Error(Err::DomainViolation, "root reduction did not terminate");
}

}  // namespace

i128 discriminant(const BinaryCubicForm& f) {
  const i128 a = f.a, b = f.b, c = f.c, d = f.d;
  i128 t1 = mul(mul(mul(18, a), mul(b, c)), d);
  i128 t2 = mul(mul(b, b), mul(c, c));
  i128 t3 = mul(mul(4, a), mul(mul(c, c), c));
  i128 t4 = mul(mul(4, mul(b, b)), mul(b, d));
  i128 t5 = mul(mul(27, mul(a, a)), mul(d, d));
  return add(add(add(t1, t2), -t3), add(-t4, -t5));
}

Hessian hessian(const BinaryCubicForm& f) {
  const i128 a = f.a, b = f.b, c = f.c, d = f.d;
  return {add(mul(b, b), -mul(3, mul(a, c))), add(mul(b, c), -mul(9, mul(a, d))),
          add(mul(c, c), -mul(3, mul(b, d)))};
}

i128 eval(const BinaryCubicForm& f, i128 x, i128 y) {
  // Horner in x with y powers folded in
  i128 y2 = mul(y, y);
  i128 v = f.a;
  v = add(mul(v, x), mul(f.b, y));
  v = add(mul(v, x), mul(f.c, y2));
  v = add(mul(v, x), mul(f.d, mul(y2, y)));
  return v;
}

BinaryCubicForm transform(const BinaryCubicForm& f, const Mat2& g) {
  const i128 coef[4] = {f.a, f.b, f.c, f.d};
  Poly3 out{0, 0, 0, 0};
  for (int k = 0; k < 4; ++k) {
    if (coef[k] == 0) continue;
    Poly3 term = cube_of_linear_product(g.p, g.q, 3 - k, g.r, g.s, k);
    for (int i = 0; i < 4; ++i) out[i] = add(out[i], mul(coef[k], term[i]));
  }
  return {narrow(out[0]), narrow(out[1]), narrow(out[2]), narrow(out[3])};
}

int64_t content(const BinaryCubicForm& f) {
  return std::gcd(std::gcd(f.a, f.b), std::gcd(f.c, f.d));
}

std::vector<long double> real_roots(const BinaryCubicForm& f) {
  if (f.a == 0) throw Error(Err::DomainViolation, "real_roots needs a != 0");
  const long double A = f.a;
  const long double B = f.b / A, C = f.c / A, D = f.d / A;
  // depressed t^3 + p t + q, x = t - B/3
  const long double p = C - B * B / 3;
  const long double q = 2 * B * B * B / 27 - B * C / 3 + D;
  const long double shift_b = B / 3;
  std::vector<long double> roots;
  const long double disc = -(4 * p * p * p + 27 * q * q);
  if (disc > 0) {
    const long double m = 2 * std::sqrt(-p / 3);
    long double arg = 3 * q / (p * m);
    arg = std::clamp(arg, -1.0L, 1.0L);
    const long double th = std::acos(arg) / 3;
    for (int k = 0; k < 3; ++k) roots.push_back(m * std::cos(th - 2 * k * 3.14159265358979323846264L / 3) - shift_b);
  } else {
    const long double s = std::sqrt(std::max(0.0L, q * q / 4 + p * p * p / 27));
    roots.push_back(std::cbrt(-q / 2 + s) + std::cbrt(-q / 2 - s) - shift_b);
  }
  for (auto& x : roots) {
    for (int it = 0; it < 6; ++it) {
      long double fx = ((x + B) * x + C) * x + D;
      long double dfx = (3 * x + 2 * B) * x + C;
      if (dfx == 0) break;
      long double nx = x - fx / dfx;
      if (!std::isfinite(nx)) break;
      x = nx;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

bool is_irreducible(const BinaryCubicForm& f) {
  if (f.a == 0 || f.d == 0) return false;
  const int64_t g = content(f);
  const BinaryCubicForm h{f.a / g, f.b / g, f.c / g, f.d / g};
  std::vector<int64_t> divisors;
  const int64_t aa = h.a < 0 ? -h.a : h.a;
  for (int64_t q = 1; q * q <= aa; ++q) {
    if (aa % q) continue;
    divisors.push_back(q);
    if (q * q != aa) divisors.push_back(aa / q);
  }
  for (long double r : real_roots(h)) {
    for (int64_t q : divisors) {
      long double guess = r * q;
      if (!std::isfinite(guess) || std::fabs(guess) > 9e18L) continue;
      int64_t p0 = std::llround(guess);
      for (int64_t p = p0 - 1; p <= p0 + 1; ++p)
        if (eval(h, p, q) == 0) return false;
    }
  }
  return true;
}

bool is_maximal_at(const BinaryCubicForm& f, int64_t p) {
  if (content(f) % p == 0) return false;
  const i128 pp = static_cast<i128>(p) * p;
  const i128 disc = discriminant(f);
  if (disc % pp != 0) return true;
  auto mod = [p](i128 v) { return static_cast<int64_t>(((v % p) + p) % p); };
  // multiple root at infinity
  if (mod(f.a) == 0 && mod(f.b) == 0) return f.a % pp != 0;
  const int64_t a = mod(f.a), b = mod(f.b), c = mod(f.c), d = mod(f.d);
  for (int64_t x = 0; x < p; ++x) {
    i128 gx = ((static_cast<i128>(a) * x + b) % p * x + c) % p * x + d;
    if (gx % p != 0) continue;
    i128 dg = ((static_cast<i128>(3 * a) * x + 2 * b) % p * x + c) % p;
    if (dg % p != 0) continue;
    return eval(f, x, 1) % pp != 0;
  }
  return true;
}

bool is_maximal(const BinaryCubicForm& f, i128 disc) {
  i128 m = iabs(disc);
  if (m == 0) throw Error(Err::DomainViolation, "zero discriminant");
  // strip primes up to the cube root; the cofactor then has at most two
  // prime factors, so a square prime divisor means the cofactor is a square
  uint64_t limit = static_cast<uint64_t>(std::cbrt(static_cast<long double>(m))) + 2;
  auto table = prime_table(limit);
  for (uint32_t p : *table) {
    if (p > limit) break;
    if (m % p != 0) continue;
    int v = 0;
    while (m % p == 0) {
      m /= p;
      ++v;
    }
    if (v >= 2 && !is_maximal_at(f, p)) return false;
  }
  if (m > 1 && is_perfect_square(m)) {
    i128 r = static_cast<i128>(std::sqrt(static_cast<long double>(m)));
    while (r * r > m) --r;
    while ((r + 1) * (r + 1) <= m) ++r;
    if (!is_maximal_at(f, narrow(r))) return false;
  }
  return true;
}

bool is_perfect_square(i128 n) {
  if (n < 0) return false;
  i128 r = static_cast<i128>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r * r == n;
}

bool is_reduced(const BinaryCubicForm& f) {
  if (f.a <= 0) return false;
  const i128 disc = discriminant(f);
  if (disc > 0) {
    Hessian h = hessian(f);
    return 0 <= h.Q && h.Q <= h.P && h.P <= h.R;
  }
  if (disc == 0) return false;
  const i128 a = f.a, b = f.b, d = f.d;
  if (d == 0) return false;
  if (eval(f, -(a + b), a) >= 0) return false;  // Re beta >= 1/2
  if (eval(f, -b, a) <= 0) return false;        // Re beta <= 0
  i128 at = eval(f, -d, a);
  return d < 0 ? at > 0 : at < 0;  // |beta| > 1
}

BinaryCubicForm canonical_key(const BinaryCubicForm& f) {
  const i128 disc = discriminant(f);
  if (disc == 0) throw Error(Err::DomainViolation, "canonical_key of a degenerate form");
  return disc > 0 ? reduce_positive(f) : reduce_negative(f);
}

}  // namespace cubic
