#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "addlab/function_spec.hpp"

namespace addlab {

// Exact per-n tables of f(n) and omega(n) for n <= x, produced by a
// segmented smallest-prime-factor walk. Values are accumulated in ascending
// prime order with compensated summation, so tables are bitwise identical
// for every segment size and thread schedule. Query structures (sorted
// values, per-omega buckets) are built once at the end; the table is
// immutable afterwards and safe for concurrent readers.
//
// Storage modes: Exact keeps all values (required below the streaming cap);
// Histogram keeps per-omega quantile-bin counts only and serves CDFs with a
// reported resolution error (intended for x beyond 2^32).
enum class SieveMode { Exact, Histogram };

struct BuildOptions {
  std::uint64_t segment_size = std::uint64_t{1} << 20;
  SieveMode mode = SieveMode::Exact;
  std::uint32_t histogram_bins = std::uint32_t{1} << 16;
  unsigned threads = 0;  // 0 = std::thread::hardware_concurrency()
};

class SieveTable {
 public:
  const AdditiveFunctionSpec& spec() const { return spec_; }
  std::uint64_t x() const { return x_; }
  std::uint64_t segment_size() const { return segment_size_; }
  SieveMode mode() const { return mode_; }

  double f_at(std::uint64_t n) const { return f_[n]; }
  std::uint8_t omega_at(std::uint64_t n) const { return omega_[n]; }
  const std::vector<double>& f_values() const { return f_; }
  const std::vector<std::uint8_t>& omega_values() const { return omega_; }

  std::uint8_t max_omega() const;
  // #{n <= x : omega(n) = k}
  std::uint64_t pi_k(std::uint32_t k) const;

  // (1/x) #{n <= x : f(n) <= y}
  double empirical_cdf(double y) const;
  // (1/pi_k) #{n in level set k : f(n) <= y}; throws on an empty level set.
  double levelset_cdf(std::uint32_t k, double y) const;

  // Sorted sample access for distance computations (Exact mode only).
  const std::vector<double>& sorted_values() const;
  const std::vector<double>& levelset_sorted(std::uint32_t k) const;

  // Histogram mode: upper bound on the CDF evaluation error (max bin mass).
  double cdf_resolution_error() const { return resolution_error_; }

  // CSV export of the value histogram: header y,count,cdf. In Exact mode
  // rows are the distinct values; in Histogram mode the bin edges.
  void export_histogram_csv(std::ostream& out) const;

  // Versioned binary dump (magic, version, x, spec hash) and reload.
  void dump(std::ostream& out) const;
  static SieveTable load(std::istream& in);

  friend SieveTable build_sieve(const AdditiveFunctionSpec&, std::uint64_t,
                                const BuildOptions&);

 private:
  AdditiveFunctionSpec spec_;
  std::uint64_t x_ = 0;
  std::uint64_t segment_size_ = 0;
  SieveMode mode_ = SieveMode::Exact;
  std::vector<double> f_;             // index n, [0] and values up to x
  std::vector<std::uint8_t> omega_;   // index n
  std::vector<std::uint64_t> omega_counts_;
  std::vector<double> sorted_;
  std::vector<std::vector<double>> level_sorted_;
  // histogram mode
  std::vector<double> hist_edges_;
  std::vector<std::vector<std::uint64_t>> hist_counts_;  // per omega
  std::vector<std::uint64_t> hist_total_;
  double resolution_error_ = 0.0;

  void finalize_queries();
};

SieveTable build_sieve(const AdditiveFunctionSpec& spec, std::uint64_t x,
                       const BuildOptions& options = {});

// Lightweight view of a sorted sample, full population or one level set.
struct EmpiricalCdf {
  const std::vector<double>* values = nullptr;
  std::uint64_t sample_size = 0;
  std::optional<std::uint32_t> restriction;

  double operator()(double y) const;  // right-continuous CDF
  double left(double y) const;        // left limit at y
};

EmpiricalCdf empirical_view(const SieveTable& table);
EmpiricalCdf levelset_view(const SieveTable& table, std::uint32_t k);

// Multiplicative test functions for mean-value sums:
//   Unit            g(n) = 1
//   OmegaPower      g(n) = z^omega(n)
//   CfTwist         g(n) = e^{i tau f_R(n)}
//   LevelsetTwist   g(n) = z^omega(n) e^{i tau f_R(n)}
// For the twisted kinds the table must have been built from the spec
// truncated at R (checked unless tau == 0).
struct MeanValueKind {
  enum Kind { Unit, OmegaPower, CfTwist, LevelsetTwist } kind = Unit;
  std::complex<double> z{1.0, 0.0};
  double tau = 0.0;
  std::optional<double> R;

  static MeanValueKind unit() { return {}; }
  static MeanValueKind omega_power(std::complex<double> z);
  static MeanValueKind cf_twist(double tau, std::optional<double> R);
  static MeanValueKind levelset_twist(std::complex<double> z, double tau,
                                      std::optional<double> R);
};

struct MeanValueSums {
  std::complex<double> M{0.0, 0.0};  // sum_{n <= x} g(n)
  std::complex<double> Z{0.0, 0.0};  // sum_{p <= x} g(p)/p
};

MeanValueSums direct_mean_value(const SieveTable& table, const MeanValueKind& kind);

// Same sums without retaining a table (single streaming pass; x need not fit
// an exact table). The spec passed here already carries the truncation.
MeanValueSums streamed_mean_value(const AdditiveFunctionSpec& spec, std::uint64_t x,
                                  const MeanValueKind& kind,
                                  const BuildOptions& options = {});

// Per-level characteristic sums c_k = sum_{omega(n)=k, n<=x} e^{i tau f(n)};
// index k from 0 to max omega. S(x; tau, z) = sum_k z^k c_k for any z.
std::vector<std::complex<double>> levelset_char_sums(const SieveTable& table, double tau);

struct TruncationDiscrepancy {
  double overall = 0.0;                // (1/x) #{n : f_R(n) != f(n)}
  std::vector<double> per_level;       // same per level set (index k)
  std::uint64_t count = 0;
};

// Counts n <= x whose truncated value differs from f(n); the table must be
// built from the untruncated spec.
TruncationDiscrepancy truncation_discrepancy(const SieveTable& table, double R);

}  // namespace addlab
