#pragma once

// Closed-form constants of the cubic field counts and the predicted family
// averages built from them.

#include <array>
#include <cstdint>
#include <vector>

#include <boost/rational.hpp>

#include "cubic/numkernel.hpp"
#include "cubic/splitting.hpp"

namespace cubic {

using Rational = boost::rational<int64_t>;

struct SecondaryConstants {
  double c1, c2;
  Sign sign;
};

// C1+ = 1/(12 zeta(3)), C2+ = 4 zeta(1/3) / (5 Gamma(2/3)^3 zeta(5/3)),
// C1- = 3 C1+, C2- = sqrt(3) C2+.
SecondaryConstants constants(Sign sign);

struct LocalWeights {
  uint64_t p;
  double x, y;
  std::array<double, 5> c, d;  // indexed by type_index
};

LocalWeights local_weights(uint64_t p);

// Exact c_k(p); d_k involves p^{-1/3} and has no rational form.
Rational c_exact(uint64_t p, SplittingType t);
Rational x_exact(uint64_t p);

struct ABTerms {
  double A, B;
};
// N_p(X, T) ~ A X + B X^{5/6}.
ABTerms A_B_constants(uint64_t p, SplittingType t, Sign sign);
// Vector form over distinct primes.
ABTerms A_B_constants(const std::vector<uint64_t>& primes, const std::vector<SplittingType>& types, Sign sign);

int theta_e(int e);                // delta_{2|e} + delta_{3|e}
int tau_e(int e);                  // 1, -1, 0 for e = 0, 1, 2 mod 3
int eta_e(int e);                  // 2 if 3 | e, else -1
double kappa_e(uint64_t p, int e);
double beta_e(uint64_t p, int e);
// beta_e at real p >= 2, and beta_1(p) - p^{-1/3}, as rational functions of
// p^{-1/3} with the cancelling leading terms removed (accurate for huge p).
double beta_e_real(double p, int e);
double beta1_excess(double p);

// Local densities f(e, s, p) (exact) and g(e, s, p), s in {0, 1, 2}, e >= 0.
// BadS otherwise.
Rational f_table(int e, int s, uint64_t p);
double g_table(int e, int s, uint64_t p);

// Predicted family mean of lambda_K(m) mu_K(h): main plus
// secondary term, no error term. h must be cubefree (HNotCubefree), and m h
// may involve at most 8 primes (Validation).
double predicted_mean_lambda_mu(uint64_t m, uint64_t h, double X, Sign sign);

// Predicted sum over F(X) of a_K(p^e): main + secondary term.
double predicted_sum_a(uint64_t p, int e, double X, Sign sign);

// Predicted mean of log|D_K| over F(X).
double predicted_average_log_disc(double X, Sign sign);

}  // namespace cubic
