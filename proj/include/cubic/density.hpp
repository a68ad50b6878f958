#pragma once

// Averaged 1-level density of the cubic families: test functions, the
// explicit formula, the averaged prime sums and their expansions in 1/L.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cubic/enumerate.hpp"
#include "cubic/family.hpp"
#include "cubic/numkernel.hpp"

namespace cubic {

enum class TestKind { Fejer, RaisedCosine };

const char* test_kind_name(TestKind k);
TestKind parse_test_kind(const std::string& s);  // "fejer" | "raised-cosine"

// Fourier pair with phi_hat supported in [-sigma, sigma] and
// phi_hat(xi) = int phi(t) e^{-2 pi i xi t} dt.
//   Fejer:        phi_hat = max(0, 1 - |xi|/sigma), phi(x) = sigma sinc(sigma x)^2
//   RaisedCosine: phi_hat = cos^2(pi xi / (2 sigma)), phi(x) = sigma sinc(2 sigma x) / (1 - 4 sigma^2 x^2)
// with sinc(w) = sin(pi w)/(pi w). phi extends to an entire function.
class TestFunction {
 public:
  TestFunction(TestKind kind, double sigma);  // BadSigma unless 0 < sigma < inf

  TestKind kind() const { return kind_; }
  double sigma() const { return sigma_; }

  double phi_hat(double xi) const;
  // n-th derivative of phi_hat at 0 from the right (the Fejer kink at 0 is
  // irrelevant: every prime sum samples xi > 0).
  double phi_hat_derivative_at_zero(int n) const;
  double phi(double x) const;
  cplx phi(cplx z) const;

 private:
  TestKind kind_;
  double sigma_;
};

TestFunction make_test_function(TestKind kind, double sigma);

// L = log(X / (2 pi e)^2), shared by every module.
double L_of(double X);

// (1/pi) int phi(L r / 2pi) Re Gamma_pm'/Gamma_pm(1/2 + i r) dr.
double gamma_integral_term(Sign sign, double L, const TestFunction& phi);

// Explicit-formula value of D_phi(K) at scale X (the sign is K's).
double explicit_formula_rhs(const FieldRecord& k, double X, const TestFunction& phi);

// Family mean of explicit_formula_rhs over |D| < X. EmptyFamily if none.
double average_density_empirical(const FamilySlice& f, double X, const TestFunction& phi);

// I_1 = sum_{p,e} x_p log p p^{-e/2} phi_hat(e log p / L) (theta_e + 1/p)
// I_2 = the same with weight beta_e(p) in place of x_p (theta_e + 1/p).
double prime_sum_main(double L, const TestFunction& phi);
double prime_sum_secondary(double L, const TestFunction& phi);

constexpr uint64_t kDefaultSieveCutoff = 10'000'000;
constexpr uint64_t kMinSieveCutoff = 10'000;

// nu_1(n), nu_2(n) for n = 0..3. Prime sums and R(u) integrals run exactly to
// U; the remainder beyond U is estimated from the prime number theorem with
// R(u) ~ -(u^{1/2} + u^{1/3}). tail_bound is the RH bound on what that
// estimate can miss, from |psi(u) - u| <= sqrt(u) log^2 u / (8 pi).
struct NuValues {
  uint64_t cutoff;
  double nu1[4], nu2[4];
  double tail_bound1[4], tail_bound2[4];
};
const NuValues& nu_values(uint64_t U = kDefaultSieveCutoff);  // SieveTooSmall if U < kMinSieveCutoff
double nu1(int n, uint64_t U = kDefaultSieveCutoff);
double nu2(int n, uint64_t U = kDefaultSieveCutoff);

double I1_direct(double X, const TestFunction& phi);
double I2_direct(double X, const TestFunction& phi);
// phi(0) L / 4 + sum_{n <= ell} phi_hat^(n)(0) nu_1(n) / (n! L^n), ell <= 3
double I1_expansion(double X, const TestFunction& phi, int ell, uint64_t U = kDefaultSieveCutoff);
// L int_0^sigma phi_hat(u) e^{L u / 6} du
double I2_leading(double X, const TestFunction& phi);
double I2_expansion(double X, const TestFunction& phi, int ell, uint64_t U = kDefaultSieveCutoff);

struct PredictionReport {
  double X = 0, L = 0, sigma = 0;
  Sign sign = Sign::Plus;
  double main_hat_term = 0, gamma_integral = 0, prime_sum_main = 0, prime_sum_secondary = 0;
  std::optional<double> j_term;
  double total = 0;
  bool sigma_in_range = true;  // sigma < (1 - theta)/(omega + 1/2)

  void add_j_term(double j);
  // (name, value) pairs in CSV order, total last
  std::vector<std::pair<std::string, double>> components() const;
};

double sigma_threshold(double theta, double omega);

// The main-theorem expansion of the family average, without the error term.
PredictionReport theorem_main_prediction(double X, Sign sign, const TestFunction& phi, double theta = 2.0 / 3.0,
                                         double omega = 2.0 / 3.0);

// density.csv: X,sign,sigma,term,value. One row per report component, plus
// an "empirical" row when the family average is given.
void write_density_csv(const std::string& path, const std::vector<PredictionReport>& reports,
                       const std::vector<std::optional<double>>& empirical);

}  // namespace cubic
