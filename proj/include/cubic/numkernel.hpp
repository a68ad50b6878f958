#pragma once

// Complex special functions in double precision: zeta, zeta'/zeta,
// gamma, digamma and the archimedean factors of the cubic family.

#include <complex>

namespace cubic {

using cplx = std::complex<double>;

enum class Sign { Plus, Minus };

inline int sign_value(Sign s) { return s == Sign::Plus ? 1 : -1; }
inline char sign_char(Sign s) { return s == Sign::Plus ? '+' : '-'; }

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;

// Euler-Maclaurin zeta. n_terms = 0 picks max(20, 2|Im s|); order is the
// number of Bernoulli corrections (B_2 .. B_{2*order}), at most 12.
cplx zeta(cplx s);
cplx zeta_em(cplx s, int n_terms, int order);
cplx zeta_derivative(cplx s);

// zeta'/zeta. Only evaluated for Re s >= 0.55 (no zeros there up to the
// heights we use); anything left of that line is a GuardViolation.
cplx zeta_log_derivative(cplx s);
constexpr double kZetaLogDerivGuard = 0.55;

cplx gamma(cplx s);
cplx log_gamma(cplx s);  // continuous branch, not principal
cplx digamma(cplx s);

// Gamma_+(s) = pi^{-s} Gamma(s/2)^2, Gamma_-(s) = pi^{-s} Gamma(s/2) Gamma((s+1)/2).
cplx log_gamma_pm(Sign sign, cplx s);
cplx gamma_pm_ratio(Sign sign, cplx s);        // Gamma_pm(1/2 - s) / Gamma_pm(1/2 + s)
double gamma_pm_logderiv_re(Sign sign, double r);  // Re Gamma_pm'/Gamma_pm (1/2 + i r)
cplx gamma_pm_logderiv(Sign sign, cplx s);

}  // namespace cubic
