#pragma once

// Ratios-conjecture side of the 1-level density: the Euler products R1M,
// R1S, A3, A4 and their diagonal continuations, the pole data at s = 1/6,
// the constant C_pm and the transition term J_pm(X).

#include <string>
#include <vector>

#include "cubic/density.hpp"
#include "cubic/euler.hpp"
#include "cubic/numkernel.hpp"

namespace cubic {

struct RatiosOptions {
  EulerOptions euler{};
};

// Direct products, Re alpha, Re gamma > 1/2 (DomainViolation otherwise).
cplx R1M(cplx alpha, cplx gamma, const RatiosOptions& o = {});
cplx R1S(cplx alpha, cplx gamma, const RatiosOptions& o = {});

// Local factors of R1M and R1S at one prime, from the closed geometric forms.
cplx R1M_local(double p, cplx alpha, cplx gamma);
cplx R1S_local(double p, cplx alpha, cplx gamma);

// zeta(1+a+g)/zeta(1+2a) R1M and zeta(5/6+g) zeta(1+a+g)/(zeta(5/6+a) zeta(1+2a)) R1S,
// continued to Re alpha, Re gamma > -1/6 + 1e-3.
cplx A3(cplx alpha, cplx gamma, const RatiosOptions& o = {});
cplx A4(cplx alpha, cplx gamma, const RatiosOptions& o = {});

// Continuations of A3(-s,s), A4(-s,s) to |Re s| < 1/2 with poles at s = 1/6.
cplx A3_diag(cplx s, const RatiosOptions& o = {});
cplx A4_diag(cplx s, const RatiosOptions& o = {});

// Local factor of A4(-s,s) / (zeta(2) zeta(5/3)) at one prime, in the two
// algebraically equal forms: the bracket before the divergent terms are
// isolated, and D_{4,p,1} + A_{4,p,1}.
cplx A4_diag_local_bracket(double p, cplx s);
cplx A4_diag_local_split(double p, cplx s);

// zeta factors pulled out of the tails of A3_diag / A4_diag on the line Re s = re_s.
std::vector<ZetaFactor> A3_diag_structure(double re_s, const RatiosOptions& o = {});
std::vector<ZetaFactor> A4_diag_structure(double re_s, const RatiosOptions& o = {});

// -zeta(3) / (3 zeta(5/3) zeta(2))
double A3_residue_closed_form();
// lim (s - 1/6) A3_diag(s), extrapolated from samples at s = 1/6 +- h.
double A3_residue_numeric();
// (1/6) zeta(2) zeta(5/3)/zeta(4/3) prod_p (1-p^{-2/3})^2 (1-1/p)(1+2p^{-2/3}+1/p+p^{-4/3})
double A4_double_pole_limit(const RatiosOptions& o = {});
// The same product truncated at p <= P without tail correction, for tail checks.
double A4_double_pole_limit_truncated(uint64_t P);
// lim (s - 1/6)^2 A4_diag(s), extrapolated from samples at s = 1/6 +- h.
double A4_double_pole_limit_numeric();

double C_pm(Sign sign);

// C_pm X^{-1/3} int phi_hat(xi) (X/(2 pi e)^2)^{xi/6} d xi; BadSigma unless sigma < 1.
double J_asymptotic(double X, Sign sign, const TestFunction& phi);

struct JContourOptions {
  double c1 = 0.2;          // line carrying the A3 term
  double c2 = 0.05;         // line carrying the A4 term
  double rel_tol = 1e-3;    // relative to the size of J_asymptotic at sigma = min(sigma, 1/2)
  double panel = 0.25;      // Gauss-Legendre panel width in Im s
  double t_max = 20000;     // QuadratureNonconvergence beyond this
};

struct JContourResult {
  double value;
  double line1, line2;  // the two line integrals
  double t_end;         // truncation height reached
  double error_estimate;
};

JContourResult J_contour_detail(double X, Sign sign, const TestFunction& phi, const JContourOptions& o = {});
double J_contour(double X, Sign sign, const TestFunction& phi, const JContourOptions& o = {});
// Second line alone at abscissa c in (0, 1/2); for c > 1/6 the pole at 1/6
// is not included.
double J_second_line(double X, Sign sign, const TestFunction& phi, double c, const JContourOptions& o = {});
// Twice the residue at s = 1/6 of the second-line integrand:
//   X^{-1/3} phi(L / 12 pi i) [C_pm (1 - q X^{-1/6}) - 2 q^3 X^{-1/6}],  q = C2/C1.
// The first part is the double pole of A4(-s,s) against the zero of
// 1/zeta(5/6+s), the second the simple pole of A3(-s,s).
double J_residue(double X, Sign sign, const TestFunction& phi);

// (2q/L) X^{-1/6} (1 - q X^{-1/6}) sum_{p,e} log p p^{-5e/6} phi_hat(e log p / L)
double prime_sum_five_sixths(double X, Sign sign, const TestFunction& phi);

// Right-hand side of the conjectured average of L'/L(1/2 + r, f_K).
// DomainViolation unless 0 < Re r < 1/6 - 1e-3.
cplx conjecture_log_derivative_avg(cplx r, double X, Sign sign, const RatiosOptions& o = {});

enum class JMode { Contour, Asymptotic };

// Theorem-style components, with the secondary prime sum weighted by
// beta_e(p) - p^{-e/3}; j_term = J - prime_sum_five_sixths, so that
// total - theorem_main_prediction(...).total = J.
PredictionReport ratios_prediction(double X, Sign sign, const TestFunction& phi, JMode mode = JMode::Contour,
                                   double theta = 2.0 / 3.0, double omega = 2.0 / 3.0);

struct RatiosRow {
  double X;
  Sign sign;
  double sigma;
  std::string term;
  double value;
};

// Rows for ratios.csv: the report components plus j_contour, j_asymptotic
// (when sigma < 1) and discrepancy.
std::vector<RatiosRow> ratios_rows(double X, Sign sign, const TestFunction& phi, JMode mode = JMode::Contour);
void write_ratios_csv(const std::string& path, const std::vector<RatiosRow>& rows);

}  // namespace cubic
