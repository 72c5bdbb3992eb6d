#pragma once
#include <cstdint>
#include <vector>

#include "zx/stats.hpp"

namespace zx {

// Gaussian bridge walk: S_0 = a, increments X_1..X_t with Var X_k =
// variances[k-1], conditioned on S_t = b. Barriers are indexed by time
// 0..t; +-infinity entries disable a side.
struct BridgeSpec {
  int t = 0;
  std::vector<double> variances;  // size t, each in [kappa, 1/kappa]
  double a = 0.0;
  double b = 0.0;
  std::vector<double> lower;  // size t+1
  std::vector<double> upper;  // size t+1
  double kappa = 1.0;

  static BridgeSpec flat(int t, double a, double b, double lo, double hi);
  void validate() const;
  double sigma_total() const;
};

double bridge_stay_positive_exact(double x, double y, double t);

struct CorridorEstimate {
  EstimateCI est;
  // crude-bound monitors, zero when the matching lower barrier is infinite:
  // free_end_ratio = p * sqrt(sigma) / (a - lower_0),
  // bridge_ratio   = p * sigma / ((a - lower_0)(b - lower_t))
  double free_end_ratio = 0.0;
  double bridge_ratio = 0.0;
};

// Fraction of conditioned paths staying inside the corridor, with
// continuous-time crossing accounted for by per-step Brownian-bridge
// rejection against linearly interpolated barriers. Deterministic in
// (spec, seed, M) independent of n_threads.
CorridorEstimate walk_corridor_mc(const BridgeSpec& spec, uint64_t seed,
                                  uint64_t M, int n_threads = 1);

struct BallotRatio {
  double ratio = 0.0;  // estimate * sigma / (2ab)
  CorridorEstimate corridor;
  double sigma = 0.0;
  double d = 0.0;  // min(|y-a|, |y-b|, |a|, |b|)
  bool range_warning = false;  // y beyond t^{1/10}
};

// Corridor [-min(s, t-s)^alpha, y + min(s, t-s)^delta] with unit step
// variances; requires delta > 1/2 > alpha > 0 and a, b in [1, y-1].
BallotRatio ballot_asymptotic_ratio(int t, double alpha, double delta,
                                    double y, double a, double b,
                                    uint64_t seed, uint64_t M,
                                    int n_threads = 1);

struct ReflectionBound {
  EstimateCI lhs;  // P(M_t <= a, m_t >= -c, B_t in A)
  EstimateCI rhs;  // P(m_t >= -c, B_t in A) - P(B_t in A - 2a)
};

// Discretized Brownian path at step 1/64 with per-step bridge-extremum
// corrections; A is the interval [box_lo, box_hi] (empty when lo > hi).
ReflectionBound reflection_bound_mc(double a, double c, double box_lo,
                                    double box_hi, double t, uint64_t seed,
                                    uint64_t M);

}  // namespace zx
