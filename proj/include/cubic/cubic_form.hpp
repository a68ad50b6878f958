#pragma once

// Integral binary cubic forms a x^3 + b x^2 y + c x y^2 + d y^3.

#include <array>
#include <compare>
#include <cstdint>
#include <vector>

namespace cubic {

using i128 = __int128;

struct BinaryCubicForm {
  int64_t a = 0, b = 0, c = 0, d = 0;
  auto operator<=>(const BinaryCubicForm&) const = default;
};

// 2x2 integer matrix [[p, q], [r, s]] acting by f(x, y) -> f(p x + q y, r x + s y).
struct Mat2 {
  int64_t p, q, r, s;
};

struct Hessian {
  i128 P, Q, R;  // P x^2 + Q x y + R y^2
  bool operator==(const Hessian&) const = default;
};

// Throws Overflow if the value leaves the 128-bit range.
i128 discriminant(const BinaryCubicForm& f);
Hessian hessian(const BinaryCubicForm& f);

// f(x, y) evaluated exactly; throws Overflow.
i128 eval(const BinaryCubicForm& f, i128 x, i128 y);

// Throws Overflow when a coefficient of the result does not fit in 64 bits.
BinaryCubicForm transform(const BinaryCubicForm& f, const Mat2& g);

int64_t content(const BinaryCubicForm& f);

// True iff f has no linear factor over Q. f need not be primitive.
bool is_irreducible(const BinaryCubicForm& f);

// p-maximality of the cubic ring attached to f.
bool is_maximal_at(const BinaryCubicForm& f, int64_t p);

// Maximal at every p with p^2 | disc(f). disc must be disc(f) and nonzero.
bool is_maximal(const BinaryCubicForm& f, i128 disc);

// Canonical GL2(Z)-representative of an irreducible form, up to f ~ -f.
// Equal keys iff the forms are equivalent.
BinaryCubicForm canonical_key(const BinaryCubicForm& f);

// Cheap necessary condition for canonical_key(f) == f: a > 0 and f already
// sits in the reduction domain (boundary ties not resolved).
bool is_reduced(const BinaryCubicForm& f);

// Real roots of f(x, 1), a != 0, in increasing order.
std::vector<long double> real_roots(const BinaryCubicForm& f);

bool is_perfect_square(i128 n);

}  // namespace cubic
