#ifndef PKM_BENCH_HPP
#define PKM_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pkm/product.hpp"

namespace pkm {

enum class StepKind { kWrite, kRead };

std::string to_string(StepKind kind);
StepKind step_kind_from_string(const std::string& s);

/// One benchmark measurement at a fixed (m, k).
struct BenchRecord {
  Eigen::Index m = 0;
  int k = 0;
  StepKind kind = StepKind::kWrite;
  double mean_seconds = 0.0;
  double std_seconds = 0.0;
  int trials = 0;
};

struct BenchConfig {
  Eigen::Index m = 240;
  Eigen::Index code_size = 50;
  std::vector<int> k_list = {1, 2, 3, 4, 6, 8, 12};
  std::vector<StepKind> steps = {StepKind::kWrite};
  int steps_per_trial = 4;
  int trials = 9;
  int threads = 1;
  double lambda = kDefaultLambda;
  double sigma = kDefaultSigma;
  std::uint64_t seed = 0;
};

/// Wall-clock cost of one memory step (address solves included) for each
/// k in the list. Three warmup steps are discarded per trial; the reported
/// mean is the median over trials of the per-trial mean step time.
std::vector<BenchRecord> run_bench(const BenchConfig& config);

/// Fitted runtime model t(k) ≈ c + a·k + b·(m/k)³.
struct ScalingFit {
  double a = 0.0;          // per-machine overhead, seconds
  double b = 0.0;          // cubic coefficient, seconds
  double c = 0.0;          // fixed overhead, seconds
  double r_squared = 0.0;
  double k_opt = 1.0;      // clamped to [1, m]
};

/// Optimal machine count (3·b·m³/a)^(1/4) of the runtime model. Returns
/// +inf when a = 0 and 0 when b = 0; fit_scaling clamps afterwards.
double k_opt_formula(double a, double b, double m);

/// Linear least squares of mean_seconds on the basis {1, k, (m/k)³}, with
/// negative coefficients clamped to zero. Needs at least four distinct k.
ScalingFit fit_scaling(const std::vector<BenchRecord>& records, double m);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

/// CSV with header `m,k,kind,mean_seconds,std_seconds,trials`. Doubles
/// round-trip bit exactly.
std::string bench_records_to_csv(const std::vector<BenchRecord>& records);
std::vector<BenchRecord> bench_records_from_csv(const std::string& csv);

std::string scaling_fit_to_json(const ScalingFit& fit);
ScalingFit scaling_fit_from_json(const std::string& text);

}  // namespace pkm

#endif  // PKM_BENCH_HPP
