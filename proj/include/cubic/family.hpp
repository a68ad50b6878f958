#pragma once

// Queries over an enumerated family F(X): splitting types, Dirichlet
// coefficients, local counts and error statistics.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "cubic/enumerate.hpp"
#include "cubic/splitting.hpp"

namespace cubic {

SplittingType splitting_type(const BinaryCubicForm& f, uint64_t p);
inline SplittingType splitting_type(const FieldRecord& k, uint64_t p) { return splitting_type(k.form, p); }

int lambda_coeff(SplittingType t, int e);
int a_coeff(SplittingType t, int e);
int kronecker(int64_t d, uint64_t p);  // (d / p), p prime, Kronecker at p = 2
int mu_coeff(const FieldRecord& k, uint64_t p, int e);

class FamilySlice {
 public:
  // Fields with 0 < +-D < x_max. include_galois keeps cyclic fields.
  static FamilySlice enumerate(uint64_t x_max, Sign sign, const EnumerateOptions& opts = {});
  // Records from a cache file; x_max is the bound the cache was built with.
  static FamilySlice from_cache(const std::string& path, uint64_t x_max);
  FamilySlice(Sign sign, uint64_t x_max, std::vector<FieldRecord> records);

  Sign sign() const { return sign_; }
  uint64_t x_max() const { return x_max_; }
  const std::vector<FieldRecord>& records() const { return records_; }

  // Number of records with |D| < x. SliceTooSmall if x > x_max.
  size_t count(double x) const;
  size_t count_local(double x, uint64_t p, SplittingType t) const;
  size_t count_local_vector(double x, const std::vector<uint64_t>& primes,
                            const std::vector<SplittingType>& types) const;

  // Splitting type of every record at p, computed once per p.
  std::shared_ptr<const std::vector<uint8_t>> types_at(uint64_t p) const;

  // Family means over |D| < x.
  double mean_lambda_mu(double x, uint64_t m, uint64_t h) const;
  double sum_a(double x, uint64_t p, int e) const;
  double average_log_disc(double x) const;  // EmptyFamily if no record

 private:
  struct Memo {
    std::mutex mutex;
    std::map<uint64_t, std::shared_ptr<const std::vector<uint8_t>>> by_prime;
  };
  void check_x(double x) const;
  // Index one past the last record with |D| < x.
  size_t prefix(double x) const;
  Sign sign_;
  uint64_t x_max_;
  std::vector<FieldRecord> records_;
  std::unique_ptr<Memo> memo_ = std::make_unique<Memo>();
};

// E_p(x, T) = N_p(x, T) - A x - B x^{5/6}.
double error_stat(const FamilySlice& f, double x, uint64_t p, SplittingType t);
// max over 1 <= x <= X of x^{-1/2} |E_p(x, T)|: both one-sided limits at every
// jump of N_p, the ends, and the interior critical points between jumps.
double f_stat(const FamilySlice& f, double X, uint64_t p, SplittingType t);
// X^{-1/2} (N_all(X) - C1 X - C2 X^{5/6}) from a Galois-inclusive slice.
double global_error(const FamilySlice& all, double X);

// errors.csv: X,p,type,count,A_term,B_term,E,E_normalized
void write_errors_csv(const std::string& path, const FamilySlice& f, const std::vector<double>& xs,
                      const std::vector<uint64_t>& primes, const std::vector<SplittingType>& types);
// fstat.csv: p,type,X,f_value
void write_fstat_csv(const std::string& path, const FamilySlice& f, const std::vector<double>& xs,
                     const std::vector<uint64_t>& primes, const std::vector<SplittingType>& types);

}  // namespace cubic
