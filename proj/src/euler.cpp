#include "cubic/euler.hpp"

#include <algorithm>
#include <cmath>

namespace cubic {

namespace {

constexpr double kDropCoeff = 1e-15;
// Re w of any non-constant monomial must stay above this for the truncated
// geometric and log series to terminate.
constexpr double kMinPositiveRe = 0.02;

bool is_constant(PExp e) { return e.a6 == 0 && e.ka == 0 && e.kg == 0; }

PExp scale(PExp e, int m) { return {e.a6 * m, e.ka * m, e.kg * m}; }

double min_re(const PSeries& s) {
  double lo = INFINITY;
  for (const auto& [e, c] : s.terms())
    if (!is_constant(e)) lo = std::min(lo, s.ctx()->re(e));
  return lo;
}

// Power series sum_k coeff[k] a^k for a without constant term; stops when
// a^k vanishes under the cutoff.
PSeries series_in(const PSeries& a, const std::function<double(int)>& coeff) {
  if (min_re(a) < kMinPositiveRe)
    throw Error(Err::DomainViolation, "local factor expansion needs Re w > 0 for every monomial");
  PSeries out(a.ctx(), coeff(0));
  PSeries pw(a.ctx(), 1.0);
  for (int k = 1;; ++k) {
    pw = pw * a;
    if (pw.terms().empty()) break;
    out += pw * coeff(k);
  }
  return out;
}

}  // namespace

EulerOptions euler_options_for(double tol) {
  EulerOptions o;
  o.head = 10000;
  // sum_{p > P} p^{-c} ~ P^{1-c} / ((c - 1) log P), with a margin of 10
  const double lp = std::log(static_cast<double>(o.head));
  double c = 1.5;
  while (c < 5.0 && 10.0 * std::exp((1 - c) * lp) / ((c - 1) * lp) > tol) c += 0.25;
  o.cutoff = c;
  return o;
}

double euler_tail_bound(const EulerOptions& opt) {
  const double lp = std::log(static_cast<double>(opt.head));
  return std::exp((1 - opt.cutoff) * lp) / ((opt.cutoff - 1) * lp);
}

PSeries::PSeries(const Ctx* ctx, double c) : ctx_(ctx) {
  if (c != 0) terms_[PExp{}] = c;
}

PSeries PSeries::atom(const Ctx* ctx, PExp e, double c) {
  PSeries s(ctx, 0.0);
  s.add(e, c);
  return s;
}

void PSeries::add(PExp e, double c) {
  if (ctx_->fold) e.kg += ctx_->fold * e.ka, e.ka = 0;
  if (!is_constant(e) && ctx_->re(e) >= ctx_->cutoff) return;
  terms_[e] += c;
}

void PSeries::prune() {
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) < kDropCoeff; });
}

double PSeries::constant() const {
  auto it = terms_.find(PExp{});
  return it == terms_.end() ? 0.0 : it->second;
}

PSeries& PSeries::operator+=(const PSeries& o) {
  for (const auto& [e, c] : o.terms_) add(e, c);
  prune();
  return *this;
}

PSeries& PSeries::operator-=(const PSeries& o) {
  for (const auto& [e, c] : o.terms_) add(e, -c);
  prune();
  return *this;
}

PSeries& PSeries::operator*=(double c) {
  for (auto& kv : terms_) kv.second *= c;
  prune();
  return *this;
}

PSeries operator*(const PSeries& a, const PSeries& b) {
  PSeries out(a.ctx_, 0.0);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) out.add({ea.a6 + eb.a6, ea.ka + eb.ka, ea.kg + eb.kg}, ca * cb);
  out.prune();
  return out;
}

PSeries PSeries::inverse() const {
  const double c0 = constant();
  if (c0 == 0) throw Error(Err::DomainViolation, "inverse of a local factor without constant term");
  const PSeries a = *this / c0 - 1.0;
  return series_in(a, [](int k) { return k % 2 ? -1.0 : 1.0; }) / c0;
}

PSeries PSeries::log() const {
  if (std::abs(constant() - 1.0) > 1e-12)
    throw Error(Err::DomainViolation, "local factor does not tend to 1");
  const PSeries a = *this - 1.0;
  return series_in(a, [](int k) { return k == 0 ? 0.0 : (k % 2 ? 1.0 : -1.0) / k; });
}

std::vector<ZetaFactor> zeta_factor_structure(const PSeries& factor) {
  PSeries rest = factor.log();
  const auto* ctx = factor.ctx();
  std::vector<ZetaFactor> out;
  while (!rest.terms().empty()) {
    auto it = std::min_element(rest.terms().begin(), rest.terms().end(), [&](const auto& x, const auto& y) {
      return ctx->re(x.first) < ctx->re(y.first);
    });
    const PExp w = it->first;
    double c = it->second;
    if (is_constant(w)) throw Error(Err::DomainViolation, "constant term in log of a local factor");
    if (ctx->re(w) <= 1.02) {
      const double r = std::round(c);
      if (std::abs(c - r) > 1e-9)
        throw Error(Err::SlowConvergence, "non-integer zeta power at Re w = " + std::to_string(ctx->re(w)));
      c = r;
    }
    // log zeta_P(w)^c = c sum_m p^{-m w} / m
    for (int m = 1; ctx->re(scale(w, m)) < ctx->cutoff; ++m) rest -= PSeries::atom(ctx, scale(w, m), c / m);
    // the leading term can survive pruning only through rounding
    rest -= PSeries::atom(ctx, w, rest.terms().count(w) ? rest.terms().at(w) : 0.0);
    out.push_back({w, c});
  }
  return out;
}

HeadTable::HeadTable(const EulerPoint& pt, uint64_t head) {
  for (uint32_t p : *prime_table(head)) {
    if (p > head) break;
    const double l = std::log(static_cast<double>(p));
    lp.push_back(l);
    p6.push_back(std::exp(-l / 6));
    pa.push_back(std::exp(-pt.alpha * l));
    pg.push_back(std::exp(-pt.gamma * l));
  }
}

cplx zeta_tail_product(const std::vector<ZetaFactor>& fs, const EulerPoint& pt, const HeadTable& head) {
  cplx out = 1;
  for (const auto& f : fs) {
    const cplx w = pt.w(f.w);
    if (std::abs(w - 1.0) < 1e-10) throw Error(Err::PoleProximity, "zeta factor at w = 1");
    cplx zp = zeta(w);
    for (size_t i = 0; i < head.size(); ++i) zp *= 1.0 - ComplexRing(head, i).atom(f.w.a6, f.w.ka, f.w.kg);
    if (f.power == std::round(f.power))
      out *= ipow(zp, static_cast<int>(f.power));
    else
      out *= std::exp(f.power * std::log(zp));
  }
  return out;
}

cplx log_weighted_tail(const PSeries& s, const EulerPoint& pt, const HeadTable& head) {
  if (std::abs(s.constant()) > 1e-12) throw Error(Err::DomainViolation, "prime sum with constant local term");
  const auto* ctx = s.ctx();
  // Lambda_P(w) = sum_{p > P, m >= 1} log p p^{-m w}
  auto lambda_tail = [&](PExp e) {
    cplx v = -zeta_log_derivative(pt.w(e));
    for (size_t i = 0; i < head.size(); ++i) {
      const cplx x = ComplexRing(head, i).atom(e.a6, e.ka, e.kg);
      v -= head.lp[i] * x / (1.0 - x);
    }
    return v;
  };
  static const int mu[] = {0, 1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0, -1, 1, 1, 0, -1, 0, -1, 0};
  cplx out = 0;
  for (const auto& [e, c] : s.terms()) {
    if (ctx->re(e) < kMinPositiveRe) throw Error(Err::DomainViolation, "prime sum monomial with Re w <= 0");
    for (int k = 1; ctx->re(scale(e, k)) < ctx->cutoff; ++k) {
      if (k > 20) throw Error(Err::SlowConvergence, "prime sum monomial too close to Re w = 0");
      if (mu[k]) out += c * static_cast<double>(mu[k]) * lambda_tail(scale(e, k));
    }
  }
  return out;
}

}  // namespace cubic
