#pragma once

// Brute-force cubic field census used as a test oracle. Fields are found as
// minimal polynomials of small elements (Hunter's bound), their maximal
// orders are built by searching for integral elements in (1/p)L, and
// duplicates are merged on (disc, splitting pattern at 25 large primes).

#include <cstdint>
#include <vector>

namespace oracle {

struct OracleField {
  int64_t disc;
  std::vector<int> fingerprint;
  int64_t t, s2, s3;  // one generating polynomial x^3 - t x^2 + s2 x - s3
};

// Non-Galois cubic fields with 0 < |disc| <= d_max, sorted by (|disc|, disc).
std::vector<OracleField> cubic_fields(int64_t d_max, bool include_galois = false);

// Field discriminant of Q[x]/(x^3 - t x^2 + s2 x - s3), irreducible.
int64_t field_discriminant(int64_t t, int64_t s2, int64_t s3);

}  // namespace oracle
