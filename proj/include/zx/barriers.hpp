#pragma once
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "zx/models.hpp"
#include "zx/primes.hpp"
#include "zx/stats.hpp"

namespace zx {

// left_tail: walk recentered near its typical maximum, n0 = floor(y),
// integer top level, grid step e^{-(nL-n0)} on [-1/2, 1/2].
// right_tail: deviations y above the maximum, n0 = floor(y/100),
// nL = n - log 100 (not an integer), grid step e^{-nL}.
enum class Convention { left_tail, right_tail };

struct WalkConfig {
  double T = 0.0;  // 0 when the run is model-only
  int n = 0;
  int n0 = 0;
  double nL = 0.0;
  double y = 0.0;
  double alpha = 0.0;  // 1 - (3/4) log(n)/n
  Convention convention = Convention::left_tail;
  double grid_step = 0.0;
  std::vector<std::string> flags;  // soft range violations
};

// n <= 0 derives n = floor(log log T). Range violations (left_tail wants
// 0 <= y <= n^{1/10}, right_tail 10 <= y <~ n/log n) are flagged, not fatal.
WalkConfig make_walk_config(Convention conv, int n, double y, double T = 0.0);

// Symmetrized profile: f(k - n0) for n0 < k <= n/2 (exact integer
// comparison 2k <= n), f(nL - k) for n/2 < k < nL, else 0.
double symmetrize(const std::function<double(double)>& f, int k, int n0,
                  double nL, int n);

struct BarrierSpec {
  int n0 = 0;
  std::vector<double> rungs;  // time indices, ascending; final one may be
                              // fractional (right_tail top)
  std::vector<double> L;
  std::vector<double> U;
  std::string generator;  // "left-tail", "right-tail", "custom"
};

BarrierSpec barrier_values(const WalkConfig& config);

// Field levels (n0, nL] with variances from the prime blocks; right_tail
// adds a fractional top level of variance (nL - floor(nL))/2. grid_max > 0
// caps the point count by widening the step.
FieldSpec to_field_spec(const WalkConfig& config, const PrimePartition& part,
                        MomentMode mode, uint64_t grid_max = 0);

// Number of grid points whose path obeys L_k - slack <= path_k <= U_k +
// slack at every rung. Rung n0 reads the zero path; a fractional final
// rung reads the last level.
uint64_t good_set_count(const FieldSample& field, const BarrierSpec& spec,
                        double slack);

struct SeedMoments {
  uint64_t seed = 0;
  double mean_count = 0.0;
  double second_moment = 0.0;
  double pz_lower = 0.0;
};

struct MomentReport {
  EstimateCI mean_count;     // E[#G], slack 0
  EstimateCI second_moment;  // E[#G^2], slack 0
  double pz_lower = 0.0;     // mean^2/second at matched slack
  double pz_se_jackknife = 0.0;
  double pz_jackknife_bias = 0.0;
  EstimateCI mean_count_wide;       // slack +1
  EstimateCI second_moment_narrow;  // slack -1
  EstimateCI p_nonempty;            // P(#G >= 1), slack 0
  bool degenerate = false;          // every replica count was zero
  std::vector<SeedMoments> per_seed;
  std::vector<std::string> flags;
};

// Replicas split evenly across the seeds; counting parallelizes over
// replicas with results stored by replica index, so the report is
// independent of n_threads.
MomentReport moment_report(const WalkConfig& config, const BarrierSpec& spec,
                           const FieldSpec& fspec, uint64_t n_replicas,
                           const std::vector<uint64_t>& seeds,
                           int n_threads = 1);

struct TailPoint {
  double y = 0.0;
  double p_hat = 0.0;
  double lo = 0.0;  // Wilson 95%
  double hi = 0.0;
  uint64_t exceedances = 0;
  bool usable = true;  // >= 10 exceedances
};

struct TailReport {
  std::vector<TailPoint> right;  // P(X > y)
  std::vector<TailPoint> left;   // P(X < -y)
  LinFit fit;  // log p - log y + y^2/n_scale against y; target slope -2
  double slope_lo = 0.0;
  double slope_hi = 0.0;
  bool degenerate = false;
  uint64_t n_samples = 0;
  std::vector<std::string> flags;
};

// Samples must already be recentered by the caller. n_scale sets the y^2/n
// correction; pass +infinity to drop it.
TailReport tail_statistics(std::span<const double> samples, double n_scale,
                           std::span<const double> y_grid);

// Draws with right tail exactly P(Y > y) = min(1, 2e * y * e^{-2y}): the
// made-to-measure generator for exercising the -2 slope recovery.
double synthetic_tail_sample(uint64_t seed, uint64_t i);

}  // namespace zx
