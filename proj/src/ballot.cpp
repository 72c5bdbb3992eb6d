#include "zx/ballot.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "zx/rng.hpp"

namespace zx {
namespace {

// exp(-41.4) < 1.1e-18: a crossing this unlikely never flips a draw, and
// keyed channels make skipping it safe for common-random-number tests.
constexpr double kSkipExponent = 41.4;

// P(linear bridge over variance v from x0 to x1 dips to a line l0 -> l1),
// given both ends strictly above the line. Exact for Brownian bridges.
inline double crossing_prob(double d0, double d1, double v) {
  const double e = 2.0 * d0 * d1 / v;
  if (e > kSkipExponent) return -1.0;  // caller skips the draw
  return std::exp(-e);
}

struct StepPlan {
  double mean_coef;  // increment mean = mean_coef * (b - s)
  double sd;         // conditional increment sd
  double var;        // unconditional step variance (crossing clock)
};

std::vector<StepPlan> build_plan(const BridgeSpec& spec) {
  const int t = spec.t;
  std::vector<double> rem(static_cast<size_t>(t) + 1, 0.0);
  for (int k = t - 1; k >= 0; --k)
    rem[k] = rem[k + 1] + spec.variances[static_cast<size_t>(k)];
  std::vector<StepPlan> plan(static_cast<size_t>(t));
  for (int k = 0; k < t; ++k) {
    const double v = spec.variances[static_cast<size_t>(k)];
    const double r = rem[k + 1];
    plan[static_cast<size_t>(k)].mean_coef = v / (v + r);
    plan[static_cast<size_t>(k)].sd = std::sqrt(v * r / (v + r));
    plan[static_cast<size_t>(k)].var = v;
  }
  return plan;
}

}  // namespace

BridgeSpec BridgeSpec::flat(int t, double a, double b, double lo, double hi) {
  BridgeSpec s;
  s.t = t;
  s.variances.assign(static_cast<size_t>(t), 1.0);
  s.a = a;
  s.b = b;
  s.lower.assign(static_cast<size_t>(t) + 1, lo);
  s.upper.assign(static_cast<size_t>(t) + 1, hi);
  return s;
}

void BridgeSpec::validate() const {
  if (t < 1) throw std::domain_error("BridgeSpec: need at least one step");
  if (!(kappa > 0.0 && kappa <= 1.0))
    throw std::domain_error("BridgeSpec: kappa must lie in (0, 1]");
  if (variances.size() != static_cast<size_t>(t))
    throw std::domain_error("BridgeSpec: need one variance per step");
  for (double v : variances)
    if (!(v >= kappa && v <= 1.0 / kappa))
      throw std::domain_error(
          "BridgeSpec: step variance outside [kappa, 1/kappa]");
  if (lower.size() != static_cast<size_t>(t) + 1 ||
      upper.size() != static_cast<size_t>(t) + 1)
    throw std::domain_error("BridgeSpec: barriers must cover times 0..t");
  if (!(sigma_total() > 0.0))
    throw std::domain_error("BridgeSpec: total variance must be positive");
}

double BridgeSpec::sigma_total() const {
  double s = 0.0;
  for (double v : variances) s += v;
  return s;
}

double bridge_stay_positive_exact(double x, double y, double t) {
  if (!(x > 0.0) || !(y > 0.0) || !(t > 0.0))
    throw std::domain_error("bridge_stay_positive_exact: inputs must be > 0");
  return -std::expm1(-2.0 * x * y / t);
}

CorridorEstimate walk_corridor_mc(const BridgeSpec& spec, uint64_t seed,
                                  uint64_t M, int n_threads) {
  spec.validate();
  if (M < 1000)
    throw std::domain_error("walk_corridor_mc: need at least 1e3 paths");
  const int t = spec.t;
  if (!(spec.a > spec.lower[0] && spec.a < spec.upper[0]))
    throw std::invalid_argument(
        "walk_corridor_mc: start endpoint not strictly inside the corridor");
  if (!(spec.b > spec.lower[static_cast<size_t>(t)] &&
        spec.b < spec.upper[static_cast<size_t>(t)]))
    throw std::invalid_argument(
        "walk_corridor_mc: end endpoint not strictly inside the corridor");

  const std::vector<StepPlan> plan = build_plan(spec);
  const double b = spec.b;

  // sub-draw channels per step k (1-based): increment, lower cross, upper
  // cross. Draws are pure functions of (seed, replica, channel) so paths
  // and crossing decisions are corridor-independent.
  const uint64_t n_chunks = 256;
  std::vector<uint64_t> hits(n_chunks, 0);
  std::atomic<uint64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const uint64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      const uint64_t r0 = M * c / n_chunks;
      const uint64_t r1 = M * (c + 1) / n_chunks;
      uint64_t local = 0;
      for (uint64_t r = r0; r < r1; ++r) {
        double s = spec.a;
        bool inside = true;
        for (int k = 1; k <= t; ++k) {
          const StepPlan& pl = plan[static_cast<size_t>(k - 1)];
          const uint64_t ch = static_cast<uint64_t>(k) << 2;
          const double z = keyed_normal(seed, r, ch);
          const double s_next = s + pl.mean_coef * (b - s) + pl.sd * z;
          const double lo0 = spec.lower[static_cast<size_t>(k - 1)];
          const double lo1 = spec.lower[static_cast<size_t>(k)];
          const double hi0 = spec.upper[static_cast<size_t>(k - 1)];
          const double hi1 = spec.upper[static_cast<size_t>(k)];
          if (!(s_next > lo1 && s_next < hi1)) {
            inside = false;
            break;
          }
          if (std::isfinite(lo0) && std::isfinite(lo1)) {
            const double p = crossing_prob(s - lo0, s_next - lo1, pl.var);
            if (p >= 0.0 && keyed_uniform(seed, r, ch | 1) < p) {
              inside = false;
              break;
            }
          }
          if (std::isfinite(hi0) && std::isfinite(hi1)) {
            const double p = crossing_prob(hi0 - s, hi1 - s_next, pl.var);
            if (p >= 0.0 && keyed_uniform(seed, r, ch | 2) < p) {
              inside = false;
              break;
            }
          }
          s = s_next;
        }
        if (inside) {
          if (!(std::abs(s - b) <= 1e-9))
            throw std::logic_error(
                "walk_corridor_mc: sampled path missed its endpoint");
          ++local;
        }
      }
      hits[c] = local;
    }
  };
  const int workers = std::max(1, n_threads);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  uint64_t total = 0;
  for (uint64_t h : hits) total += h;

  CorridorEstimate out;
  out.est = binomial_ci(total, M);
  const double sigma = spec.sigma_total();
  const double da = spec.a - spec.lower[0];
  const double db = spec.b - spec.lower[static_cast<size_t>(t)];
  out.free_end_ratio = out.est.value * std::sqrt(sigma) / da;
  out.bridge_ratio = out.est.value * sigma / (da * db);
  return out;
}

BallotRatio ballot_asymptotic_ratio(int t, double alpha, double delta,
                                    double y, double a, double b,
                                    uint64_t seed, uint64_t M, int n_threads) {
  if (!(delta > 0.5 && 0.5 > alpha && alpha > 0.0))
    throw std::invalid_argument(
        "ballot_asymptotic_ratio: need delta > 1/2 > alpha > 0");
  if (!(a >= 1.0 && a <= y - 1.0 && b >= 1.0 && b <= y - 1.0))
    throw std::invalid_argument(
        "ballot_asymptotic_ratio: endpoints must lie in [1, y-1]");
  if (t < 2) throw std::invalid_argument("ballot_asymptotic_ratio: t < 2");

  BridgeSpec spec = BridgeSpec::flat(t, a, b, 0.0, 0.0);
  for (int s = 0; s <= t; ++s) {
    const double m = std::min<double>(s, t - s);
    spec.lower[static_cast<size_t>(s)] = -std::pow(m, alpha);
    spec.upper[static_cast<size_t>(s)] = y + std::pow(m, delta);
  }

  BallotRatio out;
  out.range_warning = y > std::pow(static_cast<double>(t), 0.1);
  out.sigma = spec.sigma_total();
  out.d = std::min(std::min(std::abs(y - a), std::abs(y - b)),
                   std::min(std::abs(a), std::abs(b)));
  out.corridor = walk_corridor_mc(spec, seed, M, n_threads);
  out.ratio = out.corridor.est.value * out.sigma / (2.0 * a * b);
  return out;
}

ReflectionBound reflection_bound_mc(double a, double c, double box_lo,
                                    double box_hi, double t, uint64_t seed,
                                    uint64_t M) {
  if (!(a > 0.0) || !(c > 0.0))
    throw std::domain_error("reflection_bound_mc: need a, c > 0");
  if (!(t > 0.0)) throw std::domain_error("reflection_bound_mc: need t > 0");
  const bool empty_box = !(box_lo <= box_hi);
  if (!empty_box && (box_lo < -c || box_hi > a))
    throw std::domain_error("reflection_bound_mc: box must lie in [-c, a]");
  if (M < 1000)
    throw std::domain_error("reflection_bound_mc: need at least 1e3 paths");

  const int n = std::max(1, static_cast<int>(std::llround(t * 64.0)));
  const double dt = t / n;
  const double sd = std::sqrt(dt);

  uint64_t lhs_hits = 0;
  long double rhs_sum = 0.0L, rhs_sq = 0.0L;
  for (uint64_t r = 0; r < M; ++r) {
    double x = 0.0;
    bool hit_upper = false, hit_lower = false;
    for (int i = 1; i <= n; ++i) {
      const uint64_t ch = static_cast<uint64_t>(i) << 2;
      const double x1 = x + sd * keyed_normal(seed, r, ch);
      if (x1 >= a) {
        hit_upper = true;
      } else if (!hit_upper && x < a) {
        // bridge-extremum law for the step max
        const double p = crossing_prob(a - x, a - x1, dt);
        if (p >= 0.0 && keyed_uniform(seed, r, ch | 1) < p) hit_upper = true;
      }
      if (x1 <= -c) {
        hit_lower = true;
      } else if (!hit_lower && x > -c) {
        const double p = crossing_prob(x + c, x1 + c, dt);
        if (p >= 0.0 && keyed_uniform(seed, r, ch | 2) < p) hit_lower = true;
      }
      x = x1;
    }
    const bool in_a = !empty_box && x >= box_lo && x <= box_hi;
    const bool in_shift = !empty_box && x >= box_lo - 2.0 * a && x <= box_hi - 2.0 * a;
    if (!hit_upper && !hit_lower && in_a) ++lhs_hits;
    const double d = (!hit_lower && in_a ? 1.0 : 0.0) - (in_shift ? 1.0 : 0.0);
    rhs_sum += d;
    rhs_sq += d * d;
  }

  ReflectionBound out;
  out.lhs = binomial_ci(lhs_hits, M);
  const double mean = static_cast<double>(rhs_sum) / static_cast<double>(M);
  const double var =
      std::max(0.0, static_cast<double>(rhs_sq) / static_cast<double>(M) -
                        mean * mean);
  out.rhs.value = mean;
  out.rhs.se = std::sqrt(var / static_cast<double>(M));
  out.rhs.lo = mean - 1.959963984540054 * out.rhs.se;
  out.rhs.hi = mean + 1.959963984540054 * out.rhs.se;
  out.rhs.n = M;
  return out;
}

}  // namespace zx
