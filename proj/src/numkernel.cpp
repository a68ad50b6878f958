#include "cubic/numkernel.hpp"

#include <cmath>
#include <string>

#include "cubic/errors.hpp"

namespace cubic {

const char* err_name(Err e) {
  switch (e) {
    case Err::PoleAtOne: return "PoleAtOne";
    case Err::OutOfDomain: return "OutOfDomain";
    case Err::GuardViolation: return "GuardViolation";
    case Err::PoleAtNonpositiveInteger: return "PoleAtNonpositiveInteger";
    case Err::PoleProximity: return "PoleProximity";
    case Err::Overflow: return "Overflow";
    case Err::CacheCorruption: return "CacheCorruption";
    case Err::SliceTooSmall: return "SliceTooSmall";
    case Err::EmptyFamily: return "EmptyFamily";
    case Err::HNotCubefree: return "HNotCubefree";
    case Err::BadS: return "BadS";
    case Err::BadSigma: return "BadSigma";
    case Err::QuadratureNonconvergence: return "QuadratureNonconvergence";
    case Err::SieveTooSmall: return "SieveTooSmall";
    case Err::DomainViolation: return "DomainViolation";
    case Err::SlowConvergence: return "SlowConvergence";
    case Err::Validation: return "Validation";
  }
  return "Unknown";
}

namespace {

// B_2, B_4, ..., B_24
constexpr double kBernoulli[12] = {
    1.0 / 6.0,          -1.0 / 30.0,         1.0 / 42.0,           -1.0 / 30.0,
    5.0 / 66.0,         -691.0 / 2730.0,     7.0 / 6.0,            -3617.0 / 510.0,
    43867.0 / 798.0,    -174611.0 / 330.0,   854513.0 / 138.0,     -236364091.0 / 2730.0,
};

std::string fmt(cplx s) {
  return "(" + std::to_string(s.real()) + "," + std::to_string(s.imag()) + ")";
}

void check_zeta_domain(cplx s) {
  if (std::abs(s - 1.0) < 1e-14) throw Error(Err::PoleAtOne, "zeta at " + fmt(s));
  if (s.real() <= -2.0) throw Error(Err::OutOfDomain, "zeta needs Re s > -2, got " + fmt(s));
}

int default_terms(cplx s) {
  return std::max(20, static_cast<int>(std::ceil(2.0 * std::abs(s.imag()))));
}

// Sum of n^{-s} (and optionally its derivative) plus the Euler-Maclaurin tail.
// Long double throughout: for Re s < 0 the partial sum and the tail are far
// larger than zeta itself and cancel.
void em_sum(cplx s_in, int n_terms, int order, cplx* value, cplx* deriv) {
  using ld = long double;
  using lc = std::complex<long double>;
  const lc s(s_in.real(), s_in.imag());
  const int N = n_terms;
  lc v = 0.0L, d = 0.0L;
  for (int n = 1; n < N; ++n) {
    ld ln = std::log(static_cast<ld>(n));
    lc t = std::exp(-s * ln);
    v += t;
    d -= ln * t;
  }
  const ld Nl = static_cast<ld>(N);
  const ld lnN = std::log(Nl);
  lc Ns = std::exp(-s * lnN);  // N^{-s}
  lc sm1 = s - 1.0L;
  lc head = Nl * Ns / sm1;
  v += head + 0.5L * Ns;
  d += -lnN * head - head / sm1 - 0.5L * lnN * Ns;

  // correction k: B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
  lc poch = s;        // s(s+1)...(s+2k-2)
  lc poch_d = 1.0L;   // derivative of poch
  ld fact = 2.0L;     // (2k)!
  lc Npow = Ns / Nl;  // N^{-s-1}
  const int kmax = order / 2;
  for (int k = 1; k <= kmax; ++k) {
    lc c = static_cast<ld>(kBernoulli[k - 1]) / fact;
    v += c * poch * Npow;
    d += c * (poch_d - lnN * poch) * Npow;
    lc f1 = s + static_cast<ld>(2 * k - 1);
    lc f2 = s + static_cast<ld>(2 * k);
    poch_d = poch_d * f1 * f2 + poch * (f1 + f2);
    poch = poch * f1 * f2;
    fact *= static_cast<ld>((2 * k + 1) * (2 * k + 2));
    Npow /= Nl * Nl;
  }
  if (value) *value = cplx(static_cast<double>(v.real()), static_cast<double>(v.imag()));
  if (deriv) *deriv = cplx(static_cast<double>(d.real()), static_cast<double>(d.imag()));
}

}  // namespace

cplx zeta_em(cplx s, int n_terms, int order) {
  check_zeta_domain(s);
  if (n_terms <= 0) n_terms = default_terms(s);
  if (order < 2 || order > 24) throw Error(Err::OutOfDomain, "Bernoulli order must be in [2,24]");
  cplx v;
  em_sum(s, n_terms, order, &v, nullptr);
  return v;
}

cplx zeta(cplx s) { return zeta_em(s, 0, 12); }

cplx zeta_derivative(cplx s) {
  check_zeta_domain(s);
  cplx d;
  em_sum(s, default_terms(s), 12, nullptr, &d);
  return d;
}

cplx zeta_log_derivative(cplx s) {
  check_zeta_domain(s);
  if (s.real() < kZetaLogDerivGuard)
    throw Error(Err::GuardViolation, "zeta'/zeta requires Re s >= 0.55, got " + fmt(s));
  cplx v, d;
  em_sum(s, default_terms(s), 12, &v, &d);
  return d / v;
}

namespace {

void check_gamma_pole(cplx s) {
  double re = s.real();
  if (re <= 0.5) {
    double nearest = std::round(re);
    if (nearest <= 0.0 && std::abs(s - cplx(nearest, 0.0)) < 1e-12)
      throw Error(Err::PoleAtNonpositiveInteger, "gamma/digamma at " + fmt(s));
  }
}

// Stirling series for log Gamma, valid for Re z >= 10.
cplx stirling_log_gamma(cplx z) {
  cplx r = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi);
  cplx zinv = 1.0 / z;
  cplx z2 = zinv * zinv;
  cplx zp = zinv;
  for (int k = 1; k <= 10; ++k) {
    r += kBernoulli[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * zp;
    zp *= z2;
  }
  return r;
}

cplx asymptotic_digamma(cplx z) {
  cplx r = std::log(z) - 0.5 / z;
  cplx zinv2 = 1.0 / (z * z);
  cplx zp = zinv2;
  for (int k = 1; k <= 10; ++k) {
    r -= kBernoulli[k - 1] / (2.0 * k) * zp;
    zp *= zinv2;
  }
  return r;
}

constexpr double kShiftTarget = 10.0;

}  // namespace

cplx log_gamma(cplx s) {
  check_gamma_pole(s);
  cplx z = s;
  cplx acc = 0.0;
  while (z.real() < kShiftTarget) {
    acc += std::log(z);
    z += 1.0;
  }
  return stirling_log_gamma(z) - acc;
}

cplx gamma(cplx s) {
  check_gamma_pole(s);
  cplx z = s;
  cplx prod = 1.0;
  while (z.real() < kShiftTarget) {
    prod *= z;
    z += 1.0;
  }
  return std::exp(stirling_log_gamma(z)) / prod;
}

cplx digamma(cplx s) {
  check_gamma_pole(s);
  cplx z = s;
  cplx acc = 0.0;
  while (z.real() < kShiftTarget) {
    acc += 1.0 / z;
    z += 1.0;
  }
  return asymptotic_digamma(z) - acc;
}

namespace {

bool near_gamma_pm_pole(Sign sign, cplx s) {
  // Gamma_+ has poles at s = 0,-2,-4,...; Gamma_- at every nonpositive integer.
  double re = s.real();
  if (re > 0.5) return false;
  double nearest = std::round(re);
  if (nearest > 0.0) return false;
  if (sign == Sign::Plus && static_cast<long long>(nearest) % 2 != 0) return false;
  return std::abs(s - cplx(nearest, 0.0)) < 1e-6;
}

}  // namespace

cplx log_gamma_pm(Sign sign, cplx s) {
  if (near_gamma_pm_pole(sign, s)) throw Error(Err::PoleProximity, "Gamma_pm at " + fmt(s));
  cplx r = -s * std::log(kPi);
  if (sign == Sign::Plus)
    r += 2.0 * log_gamma(0.5 * s);
  else
    r += log_gamma(0.5 * s) + log_gamma(0.5 * (s + 1.0));
  return r;
}

cplx gamma_pm_ratio(Sign sign, cplx s) {
  cplx a = 0.5 - s, b = 0.5 + s;
  if (near_gamma_pm_pole(sign, a) || near_gamma_pm_pole(sign, b))
    throw Error(Err::PoleProximity, "gamma_pm_ratio at " + fmt(s));
  return std::exp(log_gamma_pm(sign, a) - log_gamma_pm(sign, b));
}

cplx gamma_pm_logderiv(Sign sign, cplx s) {
  if (near_gamma_pm_pole(sign, s)) throw Error(Err::PoleProximity, "Gamma_pm'/Gamma_pm at " + fmt(s));
  cplx r = -std::log(kPi);
  if (sign == Sign::Plus)
    r += digamma(0.5 * s);
  else
    r += 0.5 * digamma(0.5 * s) + 0.5 * digamma(0.5 * (s + 1.0));
  return r;
}

double gamma_pm_logderiv_re(Sign sign, double r) {
  return gamma_pm_logderiv(sign, cplx(0.5, r)).real();
}

}  // namespace cubic
