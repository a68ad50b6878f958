#pragma once

// Euler products and prime sums continued past their abscissa of convergence.
//
// A local factor is written once, as a template over a ring whose atoms are
// p^{-w} with w = a6/6 + ka*alpha + kg*gamma. Primes up to `head` are
// evaluated exactly. For larger p the factor is expanded as a finite sum of
// such monomials (terms with Re w >= cutoff are dropped), its logarithm is
// taken, and each surviving monomial is cancelled by a power of
//   zeta_P(w) = zeta(w) prod_{p <= P} (1 - p^{-w}) = prod_{p > P} (1 - p^{-w})^{-1}.
// A monomial with Re w <= 1 must carry an integer power; its zeta_P factor
// then supplies the meromorphic continuation.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cubic/errors.hpp"
#include "cubic/numkernel.hpp"
#include "cubic/primes.hpp"

namespace cubic {

// Exponent w = a6/6 + ka alpha + kg gamma of the atom p^{-w}.
struct PExp {
  int a6 = 0, ka = 0, kg = 0;
  auto operator<=>(const PExp&) const = default;
};

struct EulerPoint {
  cplx alpha{0, 0}, gamma{0, 0};
  // -1 when alpha = -gamma, +1 when alpha = gamma: atoms are then folded
  // onto gamma so coinciding exponents merge
  int fold = 0;

  static EulerPoint diag(cplx s) { return {-s, s, -1}; }
  static EulerPoint pair(cplx a, cplx g) { return {a, g, a == -g ? -1 : a == g ? 1 : 0}; }
  cplx w(PExp e) const { return e.a6 / 6.0 + static_cast<double>(e.ka) * alpha + static_cast<double>(e.kg) * gamma; }
};

struct EulerOptions {
  uint64_t head = 10000;  // primes <= head are multiplied exactly
  double cutoff = 3.25;   // monomials with Re w >= cutoff are dropped for p > head
};

// (head, cutoff) so that the dropped terms are below tol in absolute size.
EulerOptions euler_options_for(double tol);

struct ZetaFactor {
  PExp w;
  double power;
};

// Truncated sum of monomials p^{-w}, exponents folded and filtered at the
// real parts fixed by the context.
class PSeries {
 public:
  struct Ctx {
    double re_alpha = 0, re_gamma = 0;
    int fold = 0;
    double cutoff = 3;
    double re(PExp e) const { return e.a6 / 6.0 + e.ka * re_alpha + e.kg * re_gamma; }
  };

  PSeries(const Ctx* ctx, double c);
  static PSeries atom(const Ctx* ctx, PExp e, double c = 1.0);

  double constant() const;
  const std::map<PExp, double>& terms() const { return terms_; }
  const Ctx* ctx() const { return ctx_; }

  PSeries& operator+=(const PSeries& o);
  PSeries& operator-=(const PSeries& o);
  PSeries& operator*=(double c);
  PSeries inverse() const;  // constant term must be nonzero
  PSeries log() const;      // constant term must be 1

  friend PSeries operator+(PSeries a, const PSeries& b) { return a += b; }
  friend PSeries operator-(PSeries a, const PSeries& b) { return a -= b; }
  friend PSeries operator-(PSeries a) { return a *= -1.0; }
  friend PSeries operator*(const PSeries& a, const PSeries& b);
  friend PSeries operator*(PSeries a, double c) { return a *= c; }
  friend PSeries operator*(double c, PSeries a) { return a *= c; }
  friend PSeries operator/(const PSeries& a, const PSeries& b) { return a * b.inverse(); }
  friend PSeries operator+(PSeries a, double c) { return a += PSeries(a.ctx_, c); }
  friend PSeries operator+(double c, PSeries a) { return a += PSeries(a.ctx_, c); }
  friend PSeries operator-(PSeries a, double c) { return a -= PSeries(a.ctx_, c); }
  friend PSeries operator-(double c, const PSeries& a) { return PSeries(a.ctx_, c) - a; }
  friend PSeries operator/(const PSeries& a, double c) { return a * (1.0 / c); }
  friend PSeries operator/(double c, const PSeries& a) { return c * a.inverse(); }

 private:
  void add(PExp e, double c);
  void prune();
  const Ctx* ctx_;
  std::map<PExp, double> terms_;
};

// Per-point powers for the primes <= head: p^{-1/6}, p^{-alpha}, p^{-gamma}.
struct HeadTable {
  std::vector<double> lp, p6;
  std::vector<cplx> pa, pg;
  HeadTable(const EulerPoint& pt, uint64_t head);
  size_t size() const { return lp.size(); }
};

inline cplx ipow(cplx z, int k) {
  if (k < 0) return 1.0 / ipow(z, -k);
  cplx r = 1;
  for (; k; k >>= 1, z *= z)
    if (k & 1) r *= z;
  return r;
}

// Rings handed to local factors: r.atom(a6, ka, kg) is p^{-w}, r.c(x) a constant.
struct ComplexRing {
  double p6;
  cplx pa, pg;
  ComplexRing(const HeadTable& h, size_t i) : p6(h.p6[i]), pa(h.pa[i]), pg(h.pg[i]) {}
  ComplexRing(double p, const EulerPoint& pt)
      : p6(std::pow(p, -1.0 / 6)), pa(std::exp(-pt.alpha * std::log(p))), pg(std::exp(-pt.gamma * std::log(p))) {}
  cplx atom(int a6, int ka = 0, int kg = 0) const {
    cplx r = std::pow(p6, a6);
    if (ka) r *= ipow(pa, ka);
    if (kg) r *= ipow(pg, kg);
    return r;
  }
  cplx c(double x) const { return {x, 0}; }
};

struct SeriesRing {
  const PSeries::Ctx* ctx;
  PSeries atom(int a6, int ka = 0, int kg = 0) const { return PSeries::atom(ctx, {a6, ka, kg}); }
  PSeries c(double x) const { return PSeries(ctx, x); }
};

// zeta_P factors cancelling log(factor) for p > head.
std::vector<ZetaFactor> zeta_factor_structure(const PSeries& factor);
// prod zeta_P(w_j)^{power_j}; PoleProximity at w = 1.
cplx zeta_tail_product(const std::vector<ZetaFactor>& fs, const EulerPoint& pt, const HeadTable& head);
// sum_{p > head} log p p^{-w} summed against the monomials of a series with
// no constant term (each Re w must exceed 1).
cplx log_weighted_tail(const PSeries& s, const EulerPoint& pt, const HeadTable& head);

// Dropped-term estimate for p > head at the given cutoff.
double euler_tail_bound(const EulerOptions& opt);

struct EulerProduct {
  cplx value;
  std::vector<ZetaFactor> factors;
  double tail_bound;
};

namespace detail {
struct StructureKey {
  double re_alpha, re_gamma, cutoff;
  int fold;
  auto operator<=>(const StructureKey&) const = default;
};
}  // namespace detail

// Local factors are stateless functors F with
//   template <class R> auto operator()(const R& r) const
// so the tail structure is cached per F and per vertical line.
template <class F>
EulerProduct euler_product(const F& f, const EulerPoint& pt, const EulerOptions& opt = {}) {
  static std::mutex mutex;
  static std::map<detail::StructureKey, std::vector<ZetaFactor>> cache;
  const detail::StructureKey key{pt.alpha.real(), pt.gamma.real(), opt.cutoff, pt.fold};
  std::vector<ZetaFactor> fs;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it == cache.end()) {
      PSeries::Ctx ctx{pt.alpha.real(), pt.gamma.real(), pt.fold, opt.cutoff};
      it = cache.emplace(key, zeta_factor_structure(f(SeriesRing{&ctx}))).first;
    }
    fs = it->second;
  }
  const HeadTable table(pt, opt.head);
  cplx head = 1;
  for (size_t i = 0; i < table.size(); ++i) head *= f(ComplexRing(table, i));
  return {head * zeta_tail_product(fs, pt, table), fs, euler_tail_bound(opt)};
}

// sum_p log p F(p) for a local term F whose series has no constant term.
template <class F>
cplx log_weighted_prime_sum(const F& f, const EulerPoint& pt, const EulerOptions& opt = {}) {
  const HeadTable table(pt, opt.head);
  cplx head = 0;
  for (size_t i = 0; i < table.size(); ++i) head += table.lp[i] * f(ComplexRing(table, i));
  PSeries::Ctx ctx{pt.alpha.real(), pt.gamma.real(), pt.fold, opt.cutoff};
  return head + log_weighted_tail(f(SeriesRing{&ctx}), pt, table);
}

}  // namespace cubic
