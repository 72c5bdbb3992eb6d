#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "zx/primes.hpp"
#include "zx/stats.hpp"

namespace zx {

// ---- Steinhaus random Euler product ----

// Angles are drawn per prime, keyed by (seed, prime index), so a sample is a
// pure function of (seed, parameters). When the top block is too large to
// enumerate per draw, primes above exact_cutoff inside it are replaced by a
// Gaussian aggregate with the exact residual covariance across the offsets;
// the replacement error is certified separately (see berry_esseen_gap).
struct SteinhausSample {
  uint64_t seed = 0;
  int k_max = 0;
  uint64_t exact_cutoff = 0;
  std::vector<double> h_set;
  std::vector<std::pair<uint64_t, double>> theta;  // (p, angle), exact part
  // trajectories[i][k] = S_k(h_set[i]), cumulative over blocks 0..k
  std::vector<std::vector<double>> trajectories;
  // Gaussian tail component added to the top block, per offset (all zero
  // when the exact part covers everything)
  std::vector<double> tail_component;
};

SteinhausSample sample_steinhaus(uint64_t seed, const PrimePartition& part,
                                 const std::vector<double>& h_set, int k_max,
                                 uint64_t exact_cutoff = 100000);

// ---- Correlated Gaussian walk pair ----

struct GaussianWalkPair {
  double delta_h = 0.0;
  int k_lo = 0;
  int k_hi = 0;
  std::vector<std::pair<double, double>> increments;
  std::vector<std::pair<double, double>> paths;  // cumulative sums, exactly
};

// Per k draws a bivariate normal with covariance [[s2, rho], [rho, s2]] via
// the closed-form square root. s2/rho are indexed k_lo..k_hi.
GaussianWalkPair sample_gaussian_pair(uint64_t seed, double delta_h, int k_lo,
                                      int k_hi, const std::vector<double>& s2,
                                      const std::vector<double>& rho);

// ---- Hierarchical (shared-increment) field ----

struct FieldLevel {
  double scale = 1.0;  // level cells are floor(h * scale)
  double var = 0.0;
};

struct FieldSpec {
  std::vector<FieldLevel> levels;  // coarse to fine
  double grid_lo = -0.5;
  double grid_step = 1.0;
  uint64_t grid_points = 1;
};

struct FieldSample {
  std::vector<double> grid;
  // paths[j][i] = sum of level increments 0..j at grid[i]
  std::vector<std::vector<double>> paths;
};

// Level-j increment is drawn once per cell and shared by the grid points in
// that cell; replica tags keep draws independent across replicas.
FieldSample sample_field(uint64_t seed, const FieldSpec& spec,
                         uint64_t replica = 0);

// Maxima of the final path over the grid, replicas [0, R). Deterministic in
// (seed, spec, R) independent of n_threads.
std::vector<double> field_max_replicas(uint64_t seed, const FieldSpec& spec,
                                       uint64_t R, int n_threads = 1);

// ---- Exact-covariance oracle sampler (small grids) ----

struct ExactCovSampler {
  std::vector<double> grid;
  std::vector<double> chol;  // lower triangular, row-major
  size_t n = 0;
};

// cov_by_lag[d] = Cov(value(h), value(h + d * step)) on a uniform grid.
ExactCovSampler build_exact_cov_sampler(const std::vector<double>& grid,
                                        const std::vector<double>& cov_by_lag);

std::vector<double> exact_cov_sample(const ExactCovSampler& s, uint64_t seed,
                                     uint64_t replica);

// ---- Distribution comparison ----

struct Box {
  double lo;
  double hi;
};

// P((X, Y) in A x B) for centered jointly normal X, Y with common variance
// s2 and covariance rho, by conditional 1-d quadrature.
double gaussian_box_prob(double s2, double rho, Box a, Box b);

struct BerryEsseenReport {
  double gap = 0.0;  // |mc - quad|
  double mc = 0.0;
  double mc_se = 0.0;
  double quad = 0.0;
  // Esseen bound on the distributional error of the Gaussian tail
  // replacement; zero when the block was sampled exactly
  double tail_gauss_bound = 0.0;
};

// MC estimate of P((Y_k(0), Y_k(delta_h)) in A x B) over Steinhaus draws of
// block k, against the Gaussian pair probability with the exact block
// moments.
BerryEsseenReport berry_esseen_gap(uint64_t seed, int k, Box a, Box b,
                                   double delta_h, uint64_t M,
                                   const PrimePartition& part,
                                   int n_threads = 1,
                                   uint64_t exact_cutoff = 100000);

}  // namespace zx
