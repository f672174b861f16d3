#include "addlab/sieve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <thread>

#include "addlab/csv.hpp"
#include "addlab/errors.hpp"
#include "addlab/primes.hpp"

namespace addlab {

namespace {

inline void kahan_add(double& sum, double& comp, double v) {
  const double y = v - comp;
  const double t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}

inline std::complex<double> cis(double x) { return {std::cos(x), std::sin(x)}; }

// Values f(p^nu) for every base prime p <= sqrt(x), nu up to p^nu <= x.
struct BasePrimes {
  std::vector<std::uint32_t> primes;
  std::vector<std::vector<double>> powers;

  BasePrimes(const AdditiveFunctionSpec& spec, std::uint64_t x) {
    const auto root = static_cast<std::uint32_t>(std::sqrt(static_cast<double>(x)));
    primes = primes_up_to(root);
    powers.resize(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) {
      const std::uint64_t p = primes[i];
      std::uint64_t q = p;
      std::uint32_t nu = 1;
      while (q <= x) {
        powers[i].push_back(spec.eval_prime_power_unchecked(p, nu));
        if (q > x / p) break;
        q *= p;
        ++nu;
      }
    }
  }
};

struct SegmentView {
  std::uint64_t lo = 0;
  std::size_t len = 0;
  const double* f = nullptr;
  const std::uint8_t* omega = nullptr;
  const std::uint64_t* rem = nullptr;  // rem[i] == n  <=>  n is prime (n > 1)
};

struct SegmentScratch {
  std::vector<std::uint64_t> rem;
  std::vector<double> comp;
  std::vector<double> f;
  std::vector<std::uint8_t> omega;
};

// Computes f(n), omega(n) for n in [lo, hi]. Prime factors p <= sqrt(x) are
// divided out exactly (prime-power walk); any leftover rem > 1 is a single
// prime > sqrt(hi). Additions happen in ascending prime order, which makes
// the result independent of segmentation.
void process_segment(const AdditiveFunctionSpec& spec, const BasePrimes& base,
                     std::uint64_t lo, std::uint64_t hi, SegmentScratch& s) {
  const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
  s.rem.resize(len);
  s.comp.resize(len);
  s.f.resize(len);
  s.omega.resize(len);
  for (std::size_t i = 0; i < len; ++i) s.rem[i] = lo + i;
  std::fill(s.comp.begin(), s.comp.end(), 0.0);
  std::fill(s.f.begin(), s.f.end(), 0.0);
  std::fill(s.omega.begin(), s.omega.end(), std::uint8_t{0});

  for (std::size_t pi = 0; pi < base.primes.size(); ++pi) {
    const std::uint64_t p = base.primes[pi];
    if (p * p > hi) break;
    const double* fp = base.powers[pi].data();
    std::uint64_t n = std::max<std::uint64_t>(p, ((lo + p - 1) / p) * p);
    for (; n <= hi; n += p) {
      const std::size_t i = static_cast<std::size_t>(n - lo);
      std::uint64_t r = s.rem[i];
      std::uint32_t nu = 0;
      do {
        r /= p;
        ++nu;
      } while (r % p == 0);
      s.rem[i] = r;
      kahan_add(s.f[i], s.comp[i], fp[nu - 1]);
      ++s.omega[i];
    }
  }
  for (std::size_t i = 0; i < len; ++i) {
    const std::uint64_t r = s.rem[i];
    if (r > 1) {  // a single leftover prime > sqrt(hi)
      kahan_add(s.f[i], s.comp[i], spec.eval_prime_power_unchecked(r, 1));
      ++s.omega[i];
    }
  }
}

// Walks all segments of [1, x] in order and hands each to sink.
template <typename Sink>
void walk_segments(const AdditiveFunctionSpec& spec, std::uint64_t x,
                   std::uint64_t segment_size, Sink&& sink) {
  const BasePrimes base(spec, x);
  SegmentScratch scratch;
  for (std::uint64_t lo = 1; lo <= x; lo += segment_size) {
    const std::uint64_t hi = std::min(x, lo + segment_size - 1);
    process_segment(spec, base, lo, hi, scratch);
    SegmentView view{lo, static_cast<std::size_t>(hi - lo + 1), scratch.f.data(),
                     scratch.omega.data(), scratch.rem.data()};
    sink(view);
  }
}

void validate_twist(const SieveTable& table, const MeanValueKind& kind) {
  if (kind.tau == 0.0) return;
  if (kind.kind != MeanValueKind::CfTwist && kind.kind != MeanValueKind::LevelsetTwist) {
    return;
  }
  const auto trunc = table.spec().truncation();
  if (kind.R && (!trunc || *trunc != *kind.R)) {
    throw input_error(
        "twisted mean value: table was not sieved with the requested truncation R");
  }
  if (!kind.R && trunc) {
    throw input_error("twisted mean value: table is truncated but kind carries no R");
  }
}

constexpr char kMagic[8] = {'A', 'D', 'L', 'B', 'S', 'V', '0', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

MeanValueKind MeanValueKind::omega_power(std::complex<double> z) {
  MeanValueKind k;
  k.kind = OmegaPower;
  k.z = z;
  return k;
}

MeanValueKind MeanValueKind::cf_twist(double tau, std::optional<double> R) {
  MeanValueKind k;
  k.kind = CfTwist;
  k.tau = tau;
  k.R = R;
  return k;
}

MeanValueKind MeanValueKind::levelset_twist(std::complex<double> z, double tau,
                                            std::optional<double> R) {
  MeanValueKind k;
  k.kind = LevelsetTwist;
  k.z = z;
  k.tau = tau;
  k.R = R;
  return k;
}

SieveTable build_sieve(const AdditiveFunctionSpec& spec, std::uint64_t x,
                       const BuildOptions& options) {
  if (x == 0) throw input_error("build_sieve: empty table (x = 0)");
  if (options.segment_size < 2) throw input_error("build_sieve: segment_size must be >= 2");

  SieveTable t;
  t.spec_ = spec;
  t.x_ = x;
  t.segment_size_ = options.segment_size;
  t.mode_ = options.mode;
  if (x > (std::uint64_t{1} << 32) && t.mode_ == SieveMode::Exact) {
    t.mode_ = SieveMode::Histogram;  // exact per-n storage is capped at 2^32
  }

  if (t.mode_ == SieveMode::Exact) {
    t.f_.assign(x + 1, 0.0);
    t.omega_.assign(x + 1, 0);

    unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    const std::uint64_t n_segments = (x + options.segment_size - 1) / options.segment_size;
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n_segments));

    if (threads <= 1) {
      walk_segments(spec, x, options.segment_size, [&](const SegmentView& v) {
        std::memcpy(t.f_.data() + v.lo, v.f, v.len * sizeof(double));
        std::memcpy(t.omega_.data() + v.lo, v.omega, v.len);
      });
    } else {
      // Segments are claimed atomically; each writes a disjoint range, so the
      // result is schedule independent.
      std::atomic<std::uint64_t> next{0};
      const BasePrimes base(spec, x);
      auto worker = [&]() {
        SegmentScratch scratch;
        for (;;) {
          const std::uint64_t seg = next.fetch_add(1);
          if (seg >= n_segments) break;
          const std::uint64_t lo = 1 + seg * options.segment_size;
          const std::uint64_t hi = std::min(x, lo + options.segment_size - 1);
          process_segment(spec, base, lo, hi, scratch);
          std::memcpy(t.f_.data() + lo, scratch.f.data(),
                      (hi - lo + 1) * sizeof(double));
          std::memcpy(t.omega_.data() + lo, scratch.omega.data(), hi - lo + 1);
        }
      };
      std::vector<std::thread> pool;
      for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    t.finalize_queries();
    return t;
  }

  // Histogram mode: two streaming passes (range scan, then quantile fill).
  double vmin = 0.0, vmax = 0.0;
  bool first_value = true;
  std::vector<std::uint64_t> omega_counts;
  walk_segments(spec, x, options.segment_size, [&](const SegmentView& v) {
    for (std::size_t i = 0; i < v.len; ++i) {
      const double val = v.f[i];
      if (first_value) {
        vmin = vmax = val;
        first_value = false;
      } else {
        vmin = std::min(vmin, val);
        vmax = std::max(vmax, val);
      }
      if (v.omega[i] >= omega_counts.size()) omega_counts.resize(v.omega[i] + 1, 0);
      ++omega_counts[v.omega[i]];
    }
  });
  t.omega_counts_ = omega_counts;

  const std::uint32_t pre_bins =
      std::min<std::uint32_t>(std::uint32_t{1} << 20, options.histogram_bins * 16);
  const double span = (vmax > vmin) ? (vmax - vmin) : 1.0;
  std::vector<std::vector<std::uint64_t>> pre(omega_counts.size(),
                                              std::vector<std::uint64_t>(pre_bins, 0));
  walk_segments(spec, x, options.segment_size, [&](const SegmentView& v) {
    for (std::size_t i = 0; i < v.len; ++i) {
      auto bin = static_cast<std::uint32_t>((v.f[i] - vmin) / span * (pre_bins - 1));
      ++pre[v.omega[i]][std::min(bin, pre_bins - 1)];
    }
  });

  // Merge pre-bins into ~equal-mass quantile bins.
  std::vector<std::uint64_t> pre_total(pre_bins, 0);
  for (const auto& row : pre)
    for (std::uint32_t b = 0; b < pre_bins; ++b) pre_total[b] += row[b];
  const std::uint64_t target = std::max<std::uint64_t>(1, x / options.histogram_bins);
  std::vector<std::uint32_t> cut_points;  // pre-bin index one past each merged bin
  std::uint64_t acc = 0;
  for (std::uint32_t b = 0; b < pre_bins; ++b) {
    acc += pre_total[b];
    if (acc >= target) {
      cut_points.push_back(b + 1);
      acc = 0;
    }
  }
  if (cut_points.empty() || cut_points.back() != pre_bins) cut_points.push_back(pre_bins);

  t.hist_edges_.resize(cut_points.size() + 1);
  t.hist_edges_[0] = vmin;
  for (std::size_t j = 0; j < cut_points.size(); ++j) {
    t.hist_edges_[j + 1] = vmin + span * cut_points[j] / (pre_bins - 1);
  }
  t.hist_counts_.assign(omega_counts.size(),
                        std::vector<std::uint64_t>(cut_points.size(), 0));
  t.hist_total_.assign(cut_points.size(), 0);
  for (std::size_t k = 0; k < omega_counts.size(); ++k) {
    std::uint32_t b = 0;
    for (std::size_t j = 0; j < cut_points.size(); ++j) {
      for (; b < cut_points[j]; ++b) t.hist_counts_[k][j] += pre[k][b];
      t.hist_total_[j] += t.hist_counts_[k][j];
    }
  }
  std::uint64_t max_bin = 0;
  for (auto c : t.hist_total_) max_bin = std::max(max_bin, c);
  t.resolution_error_ = static_cast<double>(max_bin) / static_cast<double>(x);
  return t;
}

void SieveTable::finalize_queries() {
  omega_counts_.clear();
  std::uint8_t max_om = 0;
  for (std::uint64_t n = 1; n <= x_; ++n) max_om = std::max(max_om, omega_[n]);
  omega_counts_.assign(max_om + 1, 0);
  for (std::uint64_t n = 1; n <= x_; ++n) ++omega_counts_[omega_[n]];

  sorted_.assign(f_.begin() + 1, f_.begin() + static_cast<std::ptrdiff_t>(x_) + 1);
  std::sort(sorted_.begin(), sorted_.end());

  level_sorted_.assign(max_om + 1, {});
  for (std::uint32_t k = 0; k <= max_om; ++k) level_sorted_[k].reserve(omega_counts_[k]);
  for (std::uint64_t n = 1; n <= x_; ++n) level_sorted_[omega_[n]].push_back(f_[n]);
  for (auto& bucket : level_sorted_) std::sort(bucket.begin(), bucket.end());
}

std::uint8_t SieveTable::max_omega() const {
  return static_cast<std::uint8_t>(omega_counts_.empty() ? 0 : omega_counts_.size() - 1);
}

std::uint64_t SieveTable::pi_k(std::uint32_t k) const {
  return k < omega_counts_.size() ? omega_counts_[k] : 0;
}

double SieveTable::empirical_cdf(double y) const {
  if (mode_ == SieveMode::Exact) {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), y);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(x_);
  }
  // histogram: cumulative bins, linear within the covering bin
  double cum = 0.0;
  for (std::size_t j = 0; j + 1 < hist_edges_.size(); ++j) {
    if (y >= hist_edges_[j + 1]) {
      cum += static_cast<double>(hist_total_[j]);
    } else if (y > hist_edges_[j]) {
      const double frac = (y - hist_edges_[j]) / (hist_edges_[j + 1] - hist_edges_[j]);
      cum += frac * static_cast<double>(hist_total_[j]);
      break;
    } else {
      break;
    }
  }
  return cum / static_cast<double>(x_);
}

double SieveTable::levelset_cdf(std::uint32_t k, double y) const {
  const std::uint64_t pik = pi_k(k);
  if (pik == 0) {
    throw refusal_error("levelset_cdf: empty level set k=" + std::to_string(k));
  }
  if (mode_ == SieveMode::Exact) {
    const auto& bucket = level_sorted_[k];
    const auto it = std::upper_bound(bucket.begin(), bucket.end(), y);
    return static_cast<double>(it - bucket.begin()) / static_cast<double>(pik);
  }
  double cum = 0.0;
  for (std::size_t j = 0; j + 1 < hist_edges_.size(); ++j) {
    if (y >= hist_edges_[j + 1]) {
      cum += static_cast<double>(hist_counts_[k][j]);
    } else if (y > hist_edges_[j]) {
      const double frac = (y - hist_edges_[j]) / (hist_edges_[j + 1] - hist_edges_[j]);
      cum += frac * static_cast<double>(hist_counts_[k][j]);
      break;
    } else {
      break;
    }
  }
  return cum / static_cast<double>(pik);
}

const std::vector<double>& SieveTable::sorted_values() const {
  if (mode_ != SieveMode::Exact) {
    throw refusal_error("sorted values unavailable in histogram mode");
  }
  return sorted_;
}

const std::vector<double>& SieveTable::levelset_sorted(std::uint32_t k) const {
  if (mode_ != SieveMode::Exact) {
    throw refusal_error("sorted values unavailable in histogram mode");
  }
  if (k >= level_sorted_.size() || level_sorted_[k].empty()) {
    throw refusal_error("levelset_sorted: empty level set k=" + std::to_string(k));
  }
  return level_sorted_[k];
}

void SieveTable::export_histogram_csv(std::ostream& out) const {
  CsvWriter csv(out);
  csv.header({"y", "count", "cdf"});
  if (mode_ == SieveMode::Exact) {
    std::uint64_t cum = 0;
    std::size_t i = 0;
    while (i < sorted_.size()) {
      std::size_t j = i;
      while (j < sorted_.size() && sorted_[j] == sorted_[i]) ++j;
      cum += (j - i);
      csv.row(sorted_[i], static_cast<std::uint64_t>(j - i),
              static_cast<double>(cum) / static_cast<double>(x_));
      i = j;
    }
  } else {
    std::uint64_t cum = 0;
    for (std::size_t j = 0; j + 1 < hist_edges_.size(); ++j) {
      cum += hist_total_[j];
      csv.row(hist_edges_[j + 1], hist_total_[j],
              static_cast<double>(cum) / static_cast<double>(x_));
    }
  }
}

void SieveTable::dump(std::ostream& out) const {
  if (mode_ != SieveMode::Exact) {
    throw refusal_error("binary dump supports exact mode only");
  }
  out.write(kMagic, sizeof(kMagic));
  const std::uint32_t version = 1;
  write_pod(out, version);
  write_pod(out, x_);
  const std::uint64_t hash = spec_.hash();
  write_pod(out, hash);
  write_pod(out, segment_size_);
  const std::string text = spec_.serialize();
  const std::uint32_t text_len = static_cast<std::uint32_t>(text.size());
  write_pod(out, text_len);
  out.write(text.data(), text_len);
  out.write(reinterpret_cast<const char*>(omega_.data() + 1), static_cast<std::streamsize>(x_));
  out.write(reinterpret_cast<const char*>(f_.data() + 1),
            static_cast<std::streamsize>(x_ * sizeof(double)));
}

SieveTable SieveTable::load(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw input_error("sieve load: bad magic");
  }
  std::uint32_t version = 0;
  read_pod(in, version);
  if (version != 1) throw input_error("sieve load: unsupported version");
  SieveTable t;
  read_pod(in, t.x_);
  std::uint64_t hash = 0;
  read_pod(in, hash);
  read_pod(in, t.segment_size_);
  std::uint32_t text_len = 0;
  read_pod(in, text_len);
  std::string text(text_len, '\0');
  in.read(text.data(), text_len);
  t.spec_ = AdditiveFunctionSpec::parse(text);
  if (t.spec_.hash() != hash) throw input_error("sieve load: spec hash mismatch");
  t.omega_.assign(t.x_ + 1, 0);
  t.f_.assign(t.x_ + 1, 0.0);
  in.read(reinterpret_cast<char*>(t.omega_.data() + 1), static_cast<std::streamsize>(t.x_));
  in.read(reinterpret_cast<char*>(t.f_.data() + 1),
          static_cast<std::streamsize>(t.x_ * sizeof(double)));
  if (!in) throw input_error("sieve load: truncated stream");
  t.finalize_queries();
  return t;
}

EmpiricalCdf empirical_view(const SieveTable& table) {
  return EmpiricalCdf{&table.sorted_values(), table.x(), std::nullopt};
}

EmpiricalCdf levelset_view(const SieveTable& table, std::uint32_t k) {
  return EmpiricalCdf{&table.levelset_sorted(k), table.pi_k(k), k};
}

double EmpiricalCdf::operator()(double y) const {
  const auto it = std::upper_bound(values->begin(), values->end(), y);
  return static_cast<double>(it - values->begin()) / static_cast<double>(sample_size);
}

double EmpiricalCdf::left(double y) const {
  const auto it = std::lower_bound(values->begin(), values->end(), y);
  return static_cast<double>(it - values->begin()) / static_cast<double>(sample_size);
}

MeanValueSums direct_mean_value(const SieveTable& table, const MeanValueKind& kind) {
  if (table.mode() != SieveMode::Exact) {
    throw refusal_error("direct_mean_value requires an exact table");
  }
  validate_twist(table, kind);
  MeanValueSums sums;
  const std::uint64_t x = table.x();

  switch (kind.kind) {
    case MeanValueKind::Unit:
      sums.M = static_cast<double>(x);
      break;
    case MeanValueKind::OmegaPower: {
      std::complex<double> zk = 1.0;
      for (std::uint32_t k = 0; k <= table.max_omega(); ++k) {
        sums.M += zk * static_cast<double>(table.pi_k(k));
        zk *= kind.z;
      }
      break;
    }
    case MeanValueKind::CfTwist: {
      if (kind.tau == 0.0) {
        sums.M = static_cast<double>(x);
        break;
      }
      double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;
      for (std::uint64_t n = 1; n <= x; ++n) {
        const std::complex<double> e = cis(kind.tau * table.f_at(n));
        kahan_add(re, cre, e.real());
        kahan_add(im, cim, e.imag());
      }
      sums.M = {re, im};
      break;
    }
    case MeanValueKind::LevelsetTwist: {
      const auto c = levelset_char_sums(table, kind.tau);
      std::complex<double> zk = 1.0;
      for (std::size_t k = 0; k < c.size(); ++k) {
        sums.M += zk * c[k];
        zk *= kind.z;
      }
      break;
    }
  }

  // Z(x; g) = sum over primes p <= x of g(p)/p.
  for_each_prime(1, x, [&](std::uint64_t p) {
    const double inv_p = 1.0 / static_cast<double>(p);
    switch (kind.kind) {
      case MeanValueKind::Unit:
        sums.Z += inv_p;
        break;
      case MeanValueKind::OmegaPower:
        sums.Z += kind.z * inv_p;
        break;
      case MeanValueKind::CfTwist:
        sums.Z += cis(kind.tau * table.f_at(p)) * inv_p;
        break;
      case MeanValueKind::LevelsetTwist:
        sums.Z += kind.z * cis(kind.tau * table.f_at(p)) * inv_p;
        break;
    }
  });
  return sums;
}

MeanValueSums streamed_mean_value(const AdditiveFunctionSpec& spec, std::uint64_t x,
                                  const MeanValueKind& kind, const BuildOptions& options) {
  if (x == 0) throw input_error("streamed_mean_value: x = 0");
  MeanValueSums sums;
  double mre = 0.0, mim = 0.0, cre = 0.0, cim = 0.0;
  std::vector<std::complex<double>> zpow{1.0};
  walk_segments(spec, x, options.segment_size, [&](const SegmentView& v) {
    for (std::size_t i = 0; i < v.len; ++i) {
      const std::uint64_t n = v.lo + i;
      std::complex<double> g;
      switch (kind.kind) {
        case MeanValueKind::Unit:
          g = 1.0;
          break;
        case MeanValueKind::OmegaPower:
        case MeanValueKind::LevelsetTwist: {
          while (v.omega[i] >= zpow.size()) zpow.push_back(zpow.back() * kind.z);
          g = zpow[v.omega[i]];
          if (kind.kind == MeanValueKind::LevelsetTwist && kind.tau != 0.0) {
            g *= cis(kind.tau * v.f[i]);
          }
          break;
        }
        case MeanValueKind::CfTwist:
          g = (kind.tau == 0.0) ? 1.0 : cis(kind.tau * v.f[i]);
          break;
      }
      kahan_add(mre, cre, g.real());
      kahan_add(mim, cim, g.imag());
      if (n > 1 && v.rem[i] == n) {  // n is prime
        sums.Z += g / static_cast<double>(n);
      }
    }
  });
  sums.M = {mre, mim};
  return sums;
}

std::vector<std::complex<double>> levelset_char_sums(const SieveTable& table, double tau) {
  if (table.mode() != SieveMode::Exact) {
    throw refusal_error("levelset_char_sums requires an exact table");
  }
  const std::uint32_t kmax = table.max_omega();
  std::vector<double> re(kmax + 1, 0.0), im(kmax + 1, 0.0);
  std::vector<double> cre(kmax + 1, 0.0), cim(kmax + 1, 0.0);
  const std::uint64_t x = table.x();
  for (std::uint64_t n = 1; n <= x; ++n) {
    const std::uint8_t k = table.omega_at(n);
    const std::complex<double> e = (tau == 0.0) ? 1.0 : cis(tau * table.f_at(n));
    kahan_add(re[k], cre[k], e.real());
    kahan_add(im[k], cim[k], e.imag());
  }
  std::vector<std::complex<double>> c(kmax + 1);
  for (std::uint32_t k = 0; k <= kmax; ++k) c[k] = {re[k], im[k]};
  return c;
}

TruncationDiscrepancy truncation_discrepancy(const SieveTable& table, double R) {
  if (R < 3.0) throw input_error("truncation_discrepancy: R must be >= 3");
  if (table.mode() != SieveMode::Exact) {
    throw refusal_error("truncation_discrepancy requires an exact table");
  }
  const std::uint64_t x = table.x();
  const auto& spec = table.spec();
  std::vector<double> delta(x + 1, 0.0);

  for_each_prime(1, x, [&](std::uint64_t p) {
    std::uint64_t q = p;
    std::uint32_t nu = 1;
    while (true) {
      const double v = spec.eval_prime_power_unchecked(p, nu);
      if (std::abs(v) > 1.0 && static_cast<double>(q) > R) {
        // every n with p^nu || n loses this contribution under truncation
        for (std::uint64_t m = 1; m <= x / q; ++m) {
          if (m % p == 0) continue;
          delta[m * q] += v;
        }
      }
      if (q > x / p) break;
      q *= p;
      ++nu;
    }
  });

  TruncationDiscrepancy d;
  std::vector<std::uint64_t> per_level(table.max_omega() + 1, 0);
  for (std::uint64_t n = 1; n <= x; ++n) {
    if (delta[n] != 0.0) {
      ++d.count;
      ++per_level[table.omega_at(n)];
    }
  }
  d.overall = static_cast<double>(d.count) / static_cast<double>(x);
  d.per_level.resize(per_level.size(), 0.0);
  for (std::size_t k = 0; k < per_level.size(); ++k) {
    const std::uint64_t pik = table.pi_k(static_cast<std::uint32_t>(k));
    d.per_level[k] = pik ? static_cast<double>(per_level[k]) / static_cast<double>(pik) : 0.0;
  }
  return d;
}

}  // namespace addlab
