#pragma once

// Cubic fields of bounded discriminant, one reduced maximal form per
// isomorphism class.

#include <cstdint>
#include <string>
#include <vector>

#include "cubic/cubic_form.hpp"
#include "cubic/numkernel.hpp"

namespace cubic {

struct FieldRecord {
  int64_t disc = 0;
  BinaryCubicForm form;
  Sign sign = Sign::Plus;
};

struct EnumerateOptions {
  bool include_galois = false;  // keep square discriminants (cyclic fields)
  unsigned threads = 1;
};

constexpr uint64_t kMaxEnumerationX = 10'000'000'000ULL;

// Fields with 0 < sign * disc < x_max, sorted by |disc| then form.
std::vector<FieldRecord> enumerate_fields(uint64_t x_max, Sign sign, const EnumerateOptions& opts = {});

// Order used for output and cache files.
bool record_less(const FieldRecord& x, const FieldRecord& y);

// CSV cache with header disc,a,b,c,d. Writing goes through a temp file and a
// rename. Reading checks every row (disc matches the form, order, sign) and
// throws CacheCorruption on any mismatch.
void write_cache(const std::string& path, const std::vector<FieldRecord>& records);
std::vector<FieldRecord> read_cache(const std::string& path);

}  // namespace cubic
