// cubicdens: batch front-end over the enumeration, family statistics,
// density and ratios predictions. Outputs are CSV (JSON for selftest).

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "cubic/asym.hpp"
#include "cubic/cubic_form.hpp"
#include "cubic/density.hpp"
#include "cubic/enumerate.hpp"
#include "cubic/errors.hpp"
#include "cubic/family.hpp"
#include "cubic/primes.hpp"
#include "cubic/ratios.hpp"

namespace fs = std::filesystem;
using namespace cubic;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

struct RunConfig {
  uint64_t x_max = 1'000'000;
  std::string sign = "+";
  std::vector<uint64_t> primes;
  std::vector<std::string> types;
  std::vector<double> sigmas{0.3};
  std::string phi = "fejer";
  double theta = 2.0 / 3.0;
  double omega = 2.0 / 3.0;
  std::string j_mode = "contour";
  std::string cache = "cache";
  std::string out = "out";
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool no_timestamp = false;
};

std::vector<Sign> signs_of(const std::string& s) {
  if (s == "+" || s == "plus") return {Sign::Plus};
  if (s == "-" || s == "minus") return {Sign::Minus};
  if (s == "both" || s == "+-") return {Sign::Plus, Sign::Minus};
  throw Error(Err::Validation, "sign must be +, -, plus, minus or both, got '" + s + "'");
}

const char* sign_word(Sign s) { return s == Sign::Plus ? "plus" : "minus"; }

void validate(const RunConfig& c) {
  if (c.x_max < 2 || c.x_max > kMaxEnumerationX)
    throw Error(Err::Validation, "x-max must lie in [2, " + std::to_string(kMaxEnumerationX) + "]");
  signs_of(c.sign);
  for (double s : c.sigmas)
    if (!(s > 0)) throw Error(Err::Validation, "sigma must be positive");
  if (!(c.theta >= 0.5 && c.theta < 5.0 / 6.0)) throw Error(Err::Validation, "theta must lie in [1/2, 5/6)");
  if (!(c.omega > 0)) throw Error(Err::Validation, "omega must be positive");
  for (uint64_t p : c.primes)
    if (!is_prime(p)) throw Error(Err::Validation, std::to_string(p) + " is not prime");
  for (const auto& t : c.types) parse_type(t);
  parse_test_kind(c.phi);
  if (c.j_mode != "contour" && c.j_mode != "asymptotic") throw Error(Err::Validation, "j-mode must be contour or asymptotic");
  if (c.threads == 0) throw Error(Err::Validation, "threads must be positive");
}

std::vector<uint64_t> primes_or_default(const RunConfig& c) {
  if (!c.primes.empty()) return c.primes;
  std::vector<uint64_t> out;
  for (uint32_t p : *prime_table(100))
    if (p <= 100) out.push_back(p);
  return out;
}

std::vector<SplittingType> types_or_default(const RunConfig& c) {
  if (c.types.empty()) return {std::begin(kAllTypes), std::end(kAllTypes)};
  std::vector<SplittingType> out;
  for (const auto& t : c.types) out.push_back(parse_type(t));
  return out;
}

// 10^(k/per_decade) for 10 <= X < x_max, then x_max itself.
std::vector<double> log_grid(uint64_t x_max, int per_decade) {
  std::vector<double> xs;
  for (int k = per_decade;; ++k) {
    const double x = std::round(std::pow(10.0, static_cast<double>(k) / per_decade));
    if (x >= static_cast<double>(x_max)) break;
    if (xs.empty() || x > xs.back()) xs.push_back(x);
  }
  xs.push_back(static_cast<double>(x_max));
  return xs;
}

std::string timestamp() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// Prepends "# generated <time> by cubicdens <command>" unless suppressed.
void stamp(const RunConfig& c, const fs::path& path, const std::string& command) {
  if (c.no_timestamp) return;
  std::ifstream is(path);
  std::stringstream body;
  body << is.rdbuf();
  is.close();
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp);
    os << "# generated " << timestamp() << " by cubicdens " << command << '\n' << body.str();
  }
  fs::rename(tmp, path);
}

fs::path out_path(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.out);
  return fs::path(c.out) / name;
}

// errors.csv for one sign, errors_plus.csv / errors_minus.csv for both.
std::string per_sign(const std::string& stem, Sign s, size_t n_signs) {
  return n_signs == 1 ? stem + ".csv" : stem + "_" + sign_word(s) + ".csv";
}

fs::path cache_file(const RunConfig& c, Sign s, uint64_t x_max, bool galois) {
  return fs::path(c.cache) / ("fields_" + std::string(sign_word(s)) + "_" + std::to_string(x_max) +
                              (galois ? "_galois" : "") + ".csv");
}

// The cache built for x_max, or the smallest one built for a larger bound.
FamilySlice load_family(const RunConfig& c, Sign s, bool galois) {
  std::optional<uint64_t> best;
  if (fs::is_directory(c.cache)) {
    const std::string prefix = "fields_" + std::string(sign_word(s)) + "_";
    const std::string suffix = galois ? "_galois.csv" : ".csv";
    for (const auto& entry : fs::directory_iterator(c.cache)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind(prefix, 0) != 0 || name.size() <= prefix.size() + suffix.size()) continue;
      if (name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
      const std::string mid = name.substr(prefix.size(), name.size() - prefix.size() - suffix.size());
      if (mid.empty() || !std::all_of(mid.begin(), mid.end(), ::isdigit)) continue;
      const uint64_t x = std::stoull(mid);
      if (x >= c.x_max && (!best || x < *best)) best = x;
    }
  }
  if (!best)
    throw Error(Err::Validation, std::string("no ") + (galois ? "Galois-inclusive " : "") + "cache for sign " +
                                     sign_word(s) + " with x-max >= " + std::to_string(c.x_max) + " in " + c.cache +
                                     "; run `cubicdens enumerate` first");
  return FamilySlice::from_cache(cache_file(c, s, *best, galois).string(), *best);
}

int cmd_enumerate(const RunConfig& c) {
  fs::create_directories(c.cache);
  for (Sign s : signs_of(c.sign)) {
    EnumerateOptions opts;
    opts.include_galois = true;
    opts.threads = c.threads;
    const auto all = enumerate_fields(c.x_max, s, opts);
    std::vector<FieldRecord> non_galois;
    for (const auto& r : all)
      if (!is_perfect_square(r.disc)) non_galois.push_back(r);
    write_cache(cache_file(c, s, c.x_max, false).string(), non_galois);
    write_cache(cache_file(c, s, c.x_max, true).string(), all);
    std::cout << "sign " << sign_char(s) << ": " << non_galois.size() << " non-Galois fields, " << all.size()
              << " including cyclic, |D| < " << c.x_max << '\n';
  }
  return 0;
}

int cmd_counts(const RunConfig& c) {
  const auto signs = signs_of(c.sign);
  const auto primes = primes_or_default(c);
  const auto types = types_or_default(c);
  for (Sign s : signs) {
    const FamilySlice f = load_family(c, s, false);
    const auto errors = out_path(c, per_sign("errors", s, signs.size()));
    write_errors_csv(errors.string(), f, log_grid(c.x_max, 20), primes, types);
    stamp(c, errors, "counts");
    const auto fstat = out_path(c, per_sign("fstat", s, signs.size()));
    write_fstat_csv(fstat.string(), f, log_grid(c.x_max, 1), primes, types);
    stamp(c, fstat, "counts");
    std::cout << "wrote " << errors.string() << " and " << fstat.string() << '\n';
  }
  return 0;
}

// global_errors.csv: X,sign,count_all,E_normalized, Galois fields included.
int cmd_errors(const RunConfig& c) {
  const auto signs = signs_of(c.sign);
  const auto path = out_path(c, "global_errors.csv");
  {
    std::ofstream os(path);
    os << "X,sign,count_all,E_normalized\n" << std::setprecision(17);
    for (Sign s : signs) {
      const FamilySlice all = load_family(c, s, true);
      for (double x : log_grid(c.x_max, 20))
        os << x << ',' << sign_char(s) << ',' << all.count(x) << ',' << global_error(all, x) << '\n';
    }
  }
  stamp(c, path, "errors");
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

int cmd_density(const RunConfig& c) {
  std::vector<PredictionReport> reports;
  std::vector<std::optional<double>> empirical;
  const auto kind = parse_test_kind(c.phi);
  const double X = static_cast<double>(c.x_max);
  for (Sign s : signs_of(c.sign)) {
    std::optional<FamilySlice> f;
    try {
      f = load_family(c, s, false);
    } catch (const Error&) {
      std::cerr << "no cache for sign " << sign_char(s) << ": empirical rows omitted\n";
    }
    for (double sigma : c.sigmas) {
      const TestFunction phi(kind, sigma);
      reports.push_back(theorem_main_prediction(X, s, phi, c.theta, c.omega));
      empirical.push_back(f ? std::optional<double>(average_density_empirical(*f, X, phi)) : std::nullopt);
    }
  }
  const auto path = out_path(c, "density.csv");
  write_density_csv(path.string(), reports, empirical);
  stamp(c, path, "density");
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

JMode j_mode(const RunConfig& c) { return c.j_mode == "asymptotic" ? JMode::Asymptotic : JMode::Contour; }

int cmd_ratios(const RunConfig& c) {
  std::vector<RatiosRow> rows;
  const auto kind = parse_test_kind(c.phi);
  for (Sign s : signs_of(c.sign))
    for (double sigma : c.sigmas) {
      const auto r = ratios_rows(static_cast<double>(c.x_max), s, TestFunction(kind, sigma), j_mode(c));
      rows.insert(rows.end(), r.begin(), r.end());
    }
  const auto path = out_path(c, "ratios.csv");
  write_ratios_csv(path.string(), rows);
  stamp(c, path, "ratios");
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

// compare.csv: one row per prediction component; the empirical average and
// the absolute gaps sit on the total row.
int cmd_compare(const RunConfig& c) {
  const auto kind = parse_test_kind(c.phi);
  const double X = static_cast<double>(c.x_max);
  const auto path = out_path(c, "compare.csv");
  std::ofstream os(path);
  os << "X,sign,sigma,term,empirical,theorem,ratios,abs_empirical_minus_theorem,abs_empirical_minus_ratios\n"
     << std::setprecision(17);
  for (Sign s : signs_of(c.sign)) {
    const FamilySlice f = load_family(c, s, false);
    for (double sigma : c.sigmas) {
      const TestFunction phi(kind, sigma);
      const double emp = average_density_empirical(f, X, phi);
      const auto th = theorem_main_prediction(X, s, phi, c.theta, c.omega);
      const auto ra = ratios_prediction(X, s, phi, j_mode(c), c.theta, c.omega);
      const auto tc = th.components(), rc = ra.components();
      auto value_in = [](const auto& comps, const std::string& name) -> std::optional<double> {
        for (const auto& [n, v] : comps)
          if (n == name) return v;
        return std::nullopt;
      };
      std::vector<std::string> names;
      for (const auto& [n, v] : rc) names.push_back(n);
      for (const auto& name : names) {
        os << X << ',' << sign_char(s) << ',' << sigma << ',' << name << ',';
        const bool total = name == "total";
        if (total) os << emp;
        os << ',';
        if (auto v = value_in(tc, name)) os << *v;
        os << ',' << *value_in(rc, name) << ',';
        if (total) os << std::abs(emp - th.total) << ',' << std::abs(emp - ra.total);
        else os << ',';
        os << '\n';
      }
    }
  }
  os.close();
  stamp(c, path, "compare");
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

struct CheckList {
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  bool all_pass = true;
  void add(const std::string& name, double error, double tol) {
    const bool ok = std::isfinite(error) && error <= tol;
    all_pass = all_pass && ok;
    items.push_back({{"name", name}, {"error", error}, {"tolerance", tol}, {"status", ok ? "PASS" : "FAIL"}});
  }
};

int cmd_selftest(const RunConfig& c) {
  nlohmann::ordered_json out;
  if (!c.no_timestamp) out["generated"] = timestamp();
  nlohmann::ordered_json k;
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    const auto sc = constants(s);
    const std::string tag(1, sign_char(s));
    k["C1" + tag] = sc.c1;
    k["C2" + tag] = sc.c2;
    k["q" + tag] = sc.c2 / sc.c1;
    k["C" + tag] = C_pm(s);
  }
  k["A3_residue"] = A3_residue_closed_form();
  k["A4_double_pole_limit"] = A4_double_pole_limit();
  out["constants"] = k;

  CheckList ck;
  ck.add("zeta(2) = pi^2/6", std::abs(zeta(2.0) - kPi * kPi / 6), 1e-12);
  ck.add("Gamma(1/3) Gamma(2/3) = 2 pi / sqrt 3", std::abs(cubic::gamma(1.0 / 3) * cubic::gamma(2.0 / 3) - 2 * kPi / std::sqrt(3.0)),
         1e-12);

  double exact = 0, sums = 0;
  for (uint64_t p : {2, 3, 5, 7, 11, 13}) {
    const Rational ip(1, static_cast<int64_t>(p));
    exact = std::max(exact, f_table(1, 0, p) + f_table(0, 1, p) == Rational(0) ? 0.0 : 1.0);
    for (int e = 2; e <= 12; ++e) {
      exact = std::max(exact, f_table(e, 0, p) + f_table(e - 1, 1, p) + f_table(e - 2, 2, p) == Rational(0) ? 0.0 : 1.0);
      exact = std::max(exact, f_table(e, 0, p) - f_table(e - 2, 2, p) == Rational(theta_e(e)) + ip ? 0.0 : 1.0);
    }
    const auto w = local_weights(p);
    double sc = 0, sd = 0;
    for (int i = 0; i < 5; ++i) sc += w.c[i], sd += w.d[i];
    sums = std::max({sums, std::abs(w.x * sc - 1), std::abs(w.y * sd - 1)});
  }
  ck.add("f(e,s,p) identity block, e <= 12", exact, 0);
  ck.add("sum x_p c_k(p) = sum y_p d_k(p) = 1", sums, 1e-12);

  double d3 = 0, d4 = 0;
  for (double r : {0.05, 0.1, 0.2}) {
    d3 = std::max(d3, std::abs(A3(r, r) - 1.0));
    d4 = std::max(d4, std::abs(A4(r, r) - 1.0));
  }
  ck.add("A3(r,r) = 1", d3, 1e-8);
  ck.add("A4(r,r) = 1", d4, 1e-8);
  double r3 = 0, r4 = 0;
  for (double s : {0.05, 0.1}) {
    r3 = std::max(r3, std::abs(A3_diag(s) - A3(-s, s)));
    r4 = std::max(r4, std::abs(A4_diag(s) - A4(-s, s)));
  }
  ck.add("A3_diag(s) = A3(-s,s)", r3, 1e-7);
  ck.add("A4_diag(s) = A4(-s,s)", r4, 1e-7);
  ck.add("residue of A3_diag at 1/6", std::abs(A3_residue_numeric() - A3_residue_closed_form()), 1e-6);
  ck.add("double-pole limit of A4_diag at 1/6", std::abs(A4_double_pole_limit_numeric() - A4_double_pole_limit()), 1e-5);
  out["checks"] = ck.items;
  out["all_pass"] = ck.all_pass;

  const auto path = out_path(c, "selftest.json");
  std::ofstream(path) << out.dump(2) << '\n';
  std::cout << out.dump(2) << '\n';
  return ck.all_pass ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cubic field counts and one-level densities"};
  app.set_config("--config", "", "flat key=value file; keys are the long flag names");
  app.require_subcommand(1);
  RunConfig c;
  app.add_option("--x-max", c.x_max, "discriminant bound X")->capture_default_str();
  app.add_option("--sign", c.sign, "+, -, or both")->capture_default_str();
  app.add_option("--prime", c.primes, "primes for counts (default: all p <= 100)");
  app.add_option("--type", c.types, "splitting types T1..T5 (default: all)");
  app.add_option("--sigma", c.sigmas, "support radii of phi_hat")->capture_default_str();
  app.add_option("--phi", c.phi, "fejer or raised-cosine")->capture_default_str();
  app.add_option("--theta", c.theta, "local count error exponent")->capture_default_str();
  app.add_option("--omega", c.omega, "local count error exponent in p")->capture_default_str();
  app.add_option("--j-mode", c.j_mode, "contour or asymptotic J term")->capture_default_str();
  app.add_option("--cache", c.cache, "directory of field caches")->capture_default_str();
  app.add_option("--out", c.out, "output directory")->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads for enumeration")->capture_default_str();
  app.add_flag("--no-timestamp", c.no_timestamp, "omit the generated-at header line");

  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const Cmd cmds[] = {
      {"enumerate", "enumerate fields and write the caches", cmd_enumerate},
      {"counts", "errors.csv and fstat.csv from the cache", cmd_counts},
      {"errors", "global_errors.csv (Galois fields included)", cmd_errors},
      {"density", "density.csv: main-theorem prediction and empirical average", cmd_density},
      {"ratios", "ratios.csv: ratios prediction and J terms", cmd_ratios},
      {"compare", "compare.csv: empirical vs theorem vs ratios", cmd_compare},
      {"selftest", "constants and identity checks as JSON", cmd_selftest},
  };
  for (const auto& cmd : cmds) app.add_subcommand(cmd.name, cmd.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    validate(c);
    for (const auto& cmd : cmds)
      if (app.got_subcommand(cmd.name)) return cmd.run(c);
  } catch (const Error& e) {
    std::cerr << "cubicdens: " << e.what() << '\n';
    return is_nonconvergence(e.code()) ? kExitNumeric : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "cubicdens: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
