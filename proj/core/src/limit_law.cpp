#include "addlab/limit_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

#include "addlab/companions.hpp"
#include "addlab/csv.hpp"
#include "addlab/errors.hpp"
#include "addlab/primes.hpp"
#include "addlab/tail_models.hpp"

namespace addlab {

namespace {

constexpr double kPi = std::numbers::pi;

inline std::complex<double> cis(double x) { return {std::cos(x), std::sin(x)}; }

}  // namespace

double sine_integral(double x) {
  if (x < 0) return -sine_integral(-x);
  if (x == 0) return 0.0;
  if (x <= 20.0) {
    // alternating Taylor series, cancellation stays below ~1e-10 here
    double sum = 0.0;
    double t = x;  // x^(2k+1)/(2k+1)!
    for (int k = 0; k < 60; ++k) {
      const double add = t / (2 * k + 1);
      sum += add;
      t *= -x * x / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
      if (std::abs(t) < 1e-20 * std::abs(sum)) break;
    }
    return sum;
  }
  // asymptotic auxiliary expansion, truncated before terms grow
  const double x2 = x * x;
  double f = 0.0, g = 0.0;
  double num = 1.0;  // (2k)! / x^(2k)
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 12; ++k) {
    const double term_f = num;
    if (std::abs(term_f) > prev) break;
    prev = std::abs(term_f);
    f += (k % 2 == 0 ? term_f : -term_f);
    const double term_g = num * (2 * k + 1);
    g += (k % 2 == 0 ? term_g : -term_g);
    num *= (2.0 * k + 1.0) * (2.0 * k + 2.0) / x2;
  }
  f /= x;
  g /= x2;
  return kPi / 2 - f * std::cos(x) - g * std::sin(x);
}

// ---------------------------------------------------------------------------
// LimitLaw evaluation
// ---------------------------------------------------------------------------

void LimitLaw::finalize_atoms() {
  std::sort(atoms_.begin(), atoms_.end());
  cum_.resize(atoms_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    acc += atoms_[i].second;
    cum_[i] = acc;
  }
}

double LimitLaw::operator()(double y) const {
  if (mode_ == Mode::Atomic) {
    // last atom with value <= y
    std::size_t lo = 0, hi = atoms_.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (atoms_[mid].first <= y) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo == 0 ? 0.0 : cum_[lo - 1];
  }
  if (grid_F_.empty()) return 0.0;
  if (y <= grid_lo_) return grid_F_.front();
  if (y >= grid_hi_) return grid_F_.back();
  const double step = (grid_hi_ - grid_lo_) / static_cast<double>(grid_F_.size() - 1);
  const double pos = (y - grid_lo_) / step;
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= grid_F_.size()) return grid_F_.back();
  return grid_F_[i] * (1.0 - frac) + grid_F_[i + 1] * frac;
}

double LimitLaw::left(double y) const {
  if (mode_ == Mode::Inversion) return (*this)(y);
  std::size_t lo = 0, hi = atoms_.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (atoms_[mid].first < y) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo == 0 ? 0.0 : cum_[lo - 1];
}

void LimitLaw::export_law_csv(std::ostream& out) const {
  CsvWriter csv(out);
  csv.header({"y", "F", "err"});
  if (mode_ == Mode::Atomic) {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      csv.row(atoms_[i].first, cum_[i], pointwise_error_);
    }
  } else {
    const double step = grid_F_.size() > 1
                            ? (grid_hi_ - grid_lo_) / static_cast<double>(grid_F_.size() - 1)
                            : 0.0;
    for (std::size_t i = 0; i < grid_F_.size(); ++i) {
      csv.row(grid_lo_ + step * static_cast<double>(i), grid_F_[i], pointwise_error_);
    }
  }
}

void LimitLaw::export_atoms_csv(std::ostream& out) const {
  CsvWriter csv(out);
  csv.header({"fm", "weight"});
  for (const auto& [value, mass] : atoms_) csv.row(value, mass);
}

// ---------------------------------------------------------------------------
// Atomic law by complete enumeration
// ---------------------------------------------------------------------------

namespace {

struct AllowedPrime {
  std::uint64_t p = 0;
  double w = 0.0;       // w_p
  double h = 0.0;       // (1 - 1/p)/(1 - w_p)
  std::vector<std::pair<std::uint64_t, double>> options;  // (p^nu, f(p^nu)) usable
};

struct Enumerator {
  const std::vector<AllowedPrime>& allowed;
  std::uint64_t m_cut;
  std::map<double, double>& atom_mass;
  double total_weight = 0.0;

  void dfs(std::size_t idx, std::uint64_t m, double weight, double fsum) {
    atom_mass[fsum] += weight;
    total_weight += weight;
    for (std::size_t i = idx; i < allowed.size(); ++i) {
      const auto& ap = allowed[i];
      if (ap.p > m_cut / m) break;
      for (const auto& [q, fv] : ap.options) {
        if (q > m_cut / m) break;
        dfs(i + 1, m * q, weight * ap.h / static_cast<double>(q), fsum + fv);
      }
    }
  }
};

}  // namespace

LimitLaw atomic_law(const AdditiveFunctionSpec& spec, double mass_budget,
                    std::uint32_t p_cut, std::uint64_t m_cut) {
  if (p_cut < 2 || m_cut < 1) throw input_error("atomic_law: cutoffs too small");
  const auto verdict = classify(spec, std::max<std::uint32_t>(1000, std::min(p_cut, 100000u)));
  if (verdict.support_divergence == SeriesVerdict::Divergent) {
    throw refusal_error("atomic_law: support series diverges, the limit law is continuous");
  }

  // Allowed primes and their usable exponents.
  std::vector<AllowedPrime> allowed;
  double front_log = 0.0;  // sum log(1 - w_p) over p <= p_cut with w_p > 0
  const std::uint64_t enum_limit = std::min<std::uint64_t>(p_cut, m_cut);
  const auto& primes = cached_primes(p_cut);
  for (std::uint32_t p : primes) {
    if (p > p_cut) break;
    const Companions c = companions(spec, p);
    if (c.w <= 0.0) continue;
    front_log += std::log1p(-c.w);
    if (p > enum_limit) continue;
    AllowedPrime ap;
    ap.p = p;
    ap.w = c.w;
    ap.h = (1.0 - 1.0 / static_cast<double>(p)) / (1.0 - c.w);
    std::uint64_t q = p;
    std::uint32_t nu = 1;
    while (q <= m_cut) {
      const double fv = spec.eval_prime_power_unchecked(p, nu);
      if (fv != 0.0) ap.options.emplace_back(q, fv);
      if (q > m_cut / p) break;
      q *= p;
      ++nu;
    }
    if (!ap.options.empty()) allowed.push_back(std::move(ap));
  }

  std::map<double, double> atom_mass;
  Enumerator en{allowed, m_cut, atom_mass};
  en.dfs(0, 1, 1.0, 0.0);

  const double front = std::exp(front_log);
  const double enumerated_mass = front * en.total_weight;

  // Unenumerated mass bound: split m > M_cut by largest prime factor at T,
  //   front * M^-sigma * prod_{p<=T}(1 + h_p S_p(sigma))  +  sum_{T<p} w_p/(1-w_p),
  // minimised over a (T, sigma) grid.
  double deficit_bound = std::numeric_limits<double>::infinity();
  {
    std::vector<double> suffix(allowed.size() + 1, 0.0);
    for (std::size_t i = allowed.size(); i-- > 0;) {
      suffix[i] = suffix[i + 1] + allowed[i].w / (1.0 - allowed[i].w);
    }
    for (double sigma = 0.04; sigma <= 0.61; sigma += 0.04) {
      double log_prod = 0.0;
      std::size_t i = 0;
      for (std::uint64_t T = 8; T <= 4 * enum_limit; T *= 2) {
        for (; i < allowed.size() && allowed[i].p <= T; ++i) {
          // S_p(sigma) over usable exponents
          double S = 0.0;
          const double t = std::pow(static_cast<double>(allowed[i].p), sigma - 1.0);
          double tk = t;
          for (std::uint32_t nu = 1; nu <= 64; ++nu) {
            if (spec.nonzero_at(allowed[i].p, nu)) S += tk;
            tk *= t;
            if (tk < 1e-16) break;
          }
          log_prod += std::log1p(allowed[i].h * S);
        }
        const double smooth = front * std::exp(log_prod - sigma * std::log(static_cast<double>(m_cut)));
        const double cand = smooth + suffix[i];
        deficit_bound = std::min(deficit_bound, cand);
      }
    }
    deficit_bound = std::min(deficit_bound, 1.0);
  }

  // Product tail beyond p_cut (modelled): the law weights are rescaled by
  // exp(-t_w - second_order) so each atom undercounts its true mass.
  const TailModels tails(spec);
  const TailEstimate tw = tails.support_reciprocal(p_cut);
  if (!std::isfinite(tw.value)) {
    throw refusal_error("atomic_law: support tail model diverges");
  }
  const double pc = static_cast<double>(p_cut);
  const double second_order = tw.value / pc + 2.0 / (pc * std::log(pc));
  const double rescale = std::exp(-tw.value - second_order);

  LimitLaw law;
  law.mode_ = LimitLaw::Mode::Atomic;
  law.atoms_.reserve(atom_mass.size());
  for (const auto& [value, mass] : atom_mass) {
    law.atoms_.emplace_back(value, front * mass * rescale);
  }
  law.finalize_atoms();
  law.enumerated_mass_ = enumerated_mass;
  law.deficit_bound_ = deficit_bound;
  law.product_tail_ = tw.value;
  law.meets_budget_ = enumerated_mass >= mass_budget;
  // atoms undercount pointwise; the mass not placed bounds the sup error
  law.pointwise_error_ = deficit_bound + (1.0 - rescale) + tw.error + second_order;
  return law;
}

// ---------------------------------------------------------------------------
// Atomic law for unit-valued strongly additive specs (Poisson binomial)
// ---------------------------------------------------------------------------

LimitLaw atomic_law_indicator(const AdditiveFunctionSpec& spec, std::uint32_t p_cut) {
  if (spec.family() != Family::DyadicLog && spec.family() != Family::DyadicPow) {
    throw input_error("atomic_law_indicator: requires a dyadic (unit-valued) family");
  }
  if (!spec.overrides().empty()) {
    throw input_error("atomic_law_indicator: overrides are not supported on this route");
  }
  const auto verdict = classify(spec, 1000);
  if (verdict.support_divergence == SeriesVerdict::Divergent) {
    throw refusal_error("atomic_law_indicator: support series diverges");
  }

  constexpr int kMax = 96;
  std::vector<double> pmf(kMax + 1, 0.0);
  pmf[0] = 1.0;
  int used = 0;
  const auto& primes = cached_primes(p_cut);
  for (std::uint32_t p : primes) {
    if (p > p_cut) break;
    if (spec.eval_prime_power_unchecked(p, 1) == 0.0) continue;
    const double w = 1.0 / static_cast<double>(p);
    used = std::min(used + 1, kMax);
    for (int j = used; j >= 1; --j) pmf[j] = pmf[j] * (1.0 - w) + pmf[j - 1] * w;
    pmf[0] *= (1.0 - w);
  }

  // Independent tail primes fold in as a Poisson(t1) count up to O(t2).
  const TailModels tails(spec);
  const TailEstimate t1 = tails.support_reciprocal(p_cut);
  if (!std::isfinite(t1.value)) {
    throw refusal_error("atomic_law_indicator: support tail model diverges");
  }
  const double pc = static_cast<double>(p_cut);
  const double t2_bound = 2.0 / (pc * std::log(pc));

  std::vector<double> pois(kMax + 1, 0.0);
  {
    double term = std::exp(-t1.value);
    for (int j = 0; j <= kMax; ++j) {
      pois[j] = term;
      term *= t1.value / (j + 1);
    }
  }
  std::vector<double> out(kMax + 1, 0.0);
  for (int a = 0; a <= kMax; ++a) {
    if (pmf[a] == 0.0) continue;
    for (int b = 0; a + b <= kMax; ++b) out[a + b] += pmf[a] * pois[b];
  }
  double mass = 0.0;
  LimitLaw law;
  law.mode_ = LimitLaw::Mode::Atomic;
  for (int j = 0; j <= kMax; ++j) {
    if (out[j] > 0.0) law.atoms_.emplace_back(static_cast<double>(j), out[j]);
    mass += out[j];
  }
  law.finalize_atoms();
  law.enumerated_mass_ = mass;
  law.deficit_bound_ = 1.0 - mass + t1.error + 2.0 * t2_bound;
  law.product_tail_ = t1.value;
  law.pointwise_error_ = (1.0 - mass) + t1.error + 2.0 * t2_bound;
  return law;
}

// ---------------------------------------------------------------------------
// Gil-Pelaez inversion with shared Filon panels
// ---------------------------------------------------------------------------

namespace {

// Moments M_m = h * int_0^1 s^m e^{-i theta s} ds for m = 0,1,2.
struct FilonMoments {
  std::complex<double> m0, m1, m2;
};

FilonMoments filon_moments(double theta, double h) {
  FilonMoments M;
  if (std::abs(theta) < 0.8) {
    // series sum_j a^j / (j! (m+j+1)), a = -i theta
    const std::complex<double> a(0.0, -theta);
    std::complex<double> m0 = 0.0, m1 = 0.0, m2 = 0.0;
    std::complex<double> aj{1.0, 0.0};  // a^j / j!
    for (int j = 0; j < 24; ++j) {
      m0 += aj / static_cast<double>(j + 1);
      m1 += aj / static_cast<double>(j + 2);
      m2 += aj / static_cast<double>(j + 3);
      aj *= a / static_cast<double>(j + 1);
      if (std::abs(aj) < 1e-20) break;
    }
    M.m0 = h * m0;
    M.m1 = h * m1;
    M.m2 = h * m2;
    return M;
  }
  const std::complex<double> a(0.0, -theta);
  const std::complex<double> ea = std::exp(a);
  M.m0 = h * (ea - 1.0) / a;
  M.m1 = h * (ea * (a - 1.0) + 1.0) / (a * a);
  M.m2 = h * (ea * (a * a - 2.0 * a + 2.0) - 2.0) / (a * a * a);
  return M;
}

struct FilonGrid {
  double h = 0.0;          // panel width
  double T = 0.0;          // upper limit (= panels * h)
  std::size_t panels = 0;
  // per panel quadratic coefficients of psi-tilde = (phi - 1)/tau
  std::vector<std::complex<double>> c0, c1, c2;
  double model_error = 0.0;  // (1/pi) int |d phi| / tau from tail models

  // F(y) = 1/2 - (1/pi) (-Si(yT) + Im S(y))
  double evaluate(double y) const {
    const std::complex<double> rot_step = cis(-y * h);
    std::complex<double> rot{1.0, 0.0};
    const FilonMoments M = filon_moments(y * h, h);
    std::complex<double> S{0.0, 0.0};
    for (std::size_t k = 0; k < panels; ++k) {
      S += rot * (c0[k] * M.m0 + c1[k] * M.m1 + c2[k] * M.m2);
      rot *= rot_step;
      if ((k & 4095u) == 4095u) {
        rot = cis(-y * h * static_cast<double>(k + 1));  // resync rotor
      }
    }
    return 0.5 - (-sine_integral(y * T) + S.imag()) / kPi;
  }
};

// Samples psi-tilde at spacing h/2 over [0, T_panels*h] and builds panel
// coefficients. Sample reuse across refinements happens in the caller.
FilonGrid build_filon_grid(const CharacteristicFunction& cf, double T, double h,
                           std::vector<std::complex<double>>* samples_io,
                           double* model_err_io) {
  FilonGrid g;
  g.panels = static_cast<std::size_t>(std::ceil(T / h - 1e-12));
  g.h = h;
  g.T = static_cast<double>(g.panels) * h;
  const std::size_t n_samples = 2 * g.panels + 1;

  std::vector<std::complex<double>>& samples = *samples_io;
  const std::size_t old = samples.size();
  samples.resize(n_samples);
  // newly needed nodes
  for (std::size_t j = (old == 0 ? 0 : old); j < n_samples; ++j) {
    const double tau = std::max(0.5 * h * static_cast<double>(j), 1e-9);
    const CfValue v = cf(tau);
    if (!std::isfinite(v.tail_error)) {
      throw refusal_error("inversion: characteristic function tail model diverges");
    }
    samples[j] = (v.value - 1.0) / tau;
    *model_err_io += v.tail_error / tau * (0.5 * h) / kPi;
  }

  g.c0.resize(g.panels);
  g.c1.resize(g.panels);
  g.c2.resize(g.panels);
  for (std::size_t k = 0; k < g.panels; ++k) {
    const std::complex<double> p0 = samples[2 * k];
    const std::complex<double> p1 = samples[2 * k + 1];
    const std::complex<double> p2 = samples[2 * k + 2];
    g.c0[k] = p0;
    g.c1[k] = -3.0 * p0 + 4.0 * p1 - p2;
    g.c2[k] = 2.0 * (p0 - 2.0 * p1 + p2);
  }
  g.model_error = *model_err_io;
  return g;
}

// Halves the sample spacing: old index j moves to 2j.
void refine_samples(const CharacteristicFunction& cf, double h_new,
                    std::vector<std::complex<double>>* samples_io, double* model_err_io) {
  const auto& old = *samples_io;
  std::vector<std::complex<double>> next(2 * old.size() - 1);
  for (std::size_t j = 0; j < old.size(); ++j) next[2 * j] = old[j];
  for (std::size_t j = 1; j < next.size(); j += 2) {
    const double tau = std::max(0.5 * h_new * static_cast<double>(j), 1e-9);
    const CfValue v = cf(tau);
    next[j] = (v.value - 1.0) / tau;
    *model_err_io += v.tail_error / tau * (0.5 * h_new) / kPi;
  }
  *samples_io = std::move(next);
}

struct DecayProbe {
  double T = 0.0;
  double trunc_error = 0.0;
  double phi_at_T = 0.0;
};

DecayProbe choose_T(const CharacteristicFunction& cf, double target, double T_cap,
                    double refuse_level) {
  DecayProbe d;
  double prev_mag = 1.0;
  double T = 16.0;
  while (true) {
    const double mag = std::abs(cf.value(T));
    const double s = std::max(0.25, std::log2(std::max(prev_mag, 1e-300) / std::max(mag, 1e-300)));
    d.T = T;
    d.phi_at_T = mag;
    d.trunc_error = mag / (kPi * s);
    if (d.trunc_error <= 0.5 * target || 2.0 * T > T_cap) break;
    prev_mag = mag;
    T *= 2.0;
  }
  if (d.phi_at_T > refuse_level) {
    throw refusal_error("inversion: insufficient characteristic function decay");
  }
  return d;
}

}  // namespace

double invert_cf(const CharacteristicFunction& cf, double y, double T_int,
                 double* error_out, const InversionOptions& options) {
  if (T_int <= 1.0) throw input_error("invert_cf: T_int must exceed 1");
  const double mag_T = std::abs(cf.value(T_int));
  const double mag_T2 = std::abs(cf.value(0.85 * T_int));
  if (std::max(mag_T, mag_T2) > options.refuse_level) {
    throw refusal_error("invert_cf: insufficient decay by T_int");
  }
  const double s = std::max(0.25, std::log2(std::max(std::abs(cf.value(0.5 * T_int)), 1e-300) /
                                            std::max(mag_T, 1e-300)));
  const double trunc = mag_T / (kPi * s);

  double model_err = 0.0;
  std::vector<std::complex<double>> samples;
  double h = options.panel_h;
  FilonGrid grid = build_filon_grid(cf, T_int, h, &samples, &model_err);
  double value = grid.evaluate(y);
  double quad_err = 0.0;
  for (int r = 0; r < options.max_refinements; ++r) {
    h *= 0.5;
    refine_samples(cf, h, &samples, &model_err);
    FilonGrid finer = build_filon_grid(cf, grid.T, h, &samples, &model_err);
    const double v2 = finer.evaluate(y);
    quad_err = std::abs(v2 - value);
    value = v2;
    grid = std::move(finer);
    if (quad_err <= 0.25 * options.target_error) break;
  }
  if (error_out) *error_out = quad_err + trunc + model_err;
  return value;
}

LimitLaw inversion_law(const CharacteristicFunction& cf, double y_lo, double y_hi,
                       std::uint32_t n_points, const InversionOptions& options) {
  if (!(y_hi > y_lo) || n_points < 16) throw input_error("inversion_law: bad grid");
  const DecayProbe probe = choose_T(cf, options.target_error, options.T_cap,
                                    options.refuse_level);

  double model_err = 0.0;
  std::vector<std::complex<double>> samples;
  double h = options.panel_h;
  FilonGrid grid = build_filon_grid(cf, probe.T, h, &samples, &model_err);

  // Probe refinement: halve panels until probe values stabilise.
  std::vector<double> probe_y(options.probe_points);
  for (std::uint32_t i = 0; i < options.probe_points; ++i) {
    probe_y[i] = y_lo + (y_hi - y_lo) * (i + 0.5) / options.probe_points;
  }
  std::vector<double> probe_F(probe_y.size());
  for (std::size_t i = 0; i < probe_y.size(); ++i) probe_F[i] = grid.evaluate(probe_y[i]);
  double quad_err = options.target_error;
  for (int r = 0; r < options.max_refinements; ++r) {
    h *= 0.5;
    refine_samples(cf, h, &samples, &model_err);
    FilonGrid finer = build_filon_grid(cf, grid.T, h, &samples, &model_err);
    double diff = 0.0;
    for (std::size_t i = 0; i < probe_y.size(); ++i) {
      const double v = finer.evaluate(probe_y[i]);
      diff = std::max(diff, std::abs(v - probe_F[i]));
      probe_F[i] = v;
    }
    grid = std::move(finer);
    quad_err = diff;
    if (diff <= 0.25 * options.target_error) break;
  }

  LimitLaw law;
  law.mode_ = LimitLaw::Mode::Inversion;
  law.grid_lo_ = y_lo;
  law.grid_hi_ = y_hi;
  law.grid_F_.resize(n_points);
  const double step = (y_hi - y_lo) / static_cast<double>(n_points - 1);
  for (std::uint32_t i = 0; i < n_points; ++i) {
    law.grid_F_[i] = grid.evaluate(y_lo + step * static_cast<double>(i));
  }
  // monotonise and clamp; the adjustment size feeds the error report
  double monotone_adj = 0.0;
  double run = 0.0;
  for (auto& v : law.grid_F_) {
    const double raw = std::clamp(v, 0.0, 1.0);
    if (raw < run) {
      monotone_adj = std::max(monotone_adj, run - raw);
      v = run;
    } else {
      v = raw;
      run = raw;
    }
  }
  law.pointwise_error_ = quad_err + probe.trunc_error + grid.model_error + monotone_adj;
  return law;
}

}  // namespace addlab
