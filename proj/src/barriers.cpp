#include "zx/barriers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "zx/rng.hpp"

namespace zx {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-9; }

}  // namespace

WalkConfig make_walk_config(Convention conv, int n, double y, double T) {
  WalkConfig c;
  c.T = T;
  c.convention = conv;
  if (n <= 0) {
    if (!(T > 15.2))  // log log T must exceed 1
      throw std::domain_error("make_walk_config: need n >= 1 or T > e^e");
    n = static_cast<int>(std::floor(std::log(std::log(T))));
  }
  if (n < 2) throw std::domain_error("make_walk_config: n must be >= 2");
  if (!(y >= 0.0)) throw std::domain_error("make_walk_config: y must be >= 0");
  c.n = n;
  c.y = y;
  c.alpha = 1.0 - 0.75 * std::log(static_cast<double>(n)) / n;
  if (conv == Convention::left_tail) {
    c.n0 = static_cast<int>(std::floor(y));
    c.nL = static_cast<double>(n - c.n0);
    c.grid_step = std::exp(-(c.nL - c.n0));
    if (y > std::pow(static_cast<double>(n), 0.1))
      c.flags.push_back("y-above-range");
    if (y < 1.0) c.flags.push_back("small-y");
  } else {
    c.n0 = static_cast<int>(std::floor(y / 100.0));
    c.nL = n - std::log(100.0);
    c.grid_step = std::exp(-c.nL);
    if (y < 10.0) c.flags.push_back("y-below-range");
    if (y > 2.0 * n / std::log(static_cast<double>(n)))
      c.flags.push_back("y-above-range");
  }
  if (!(c.n0 < c.nL))
    throw std::domain_error("make_walk_config: barrier range (n0, nL] empty");
  return c;
}

double symmetrize(const std::function<double(double)>& f, int k, int n0,
                  double nL, int n) {
  if (!(n0 < nL && nL <= static_cast<double>(n)))
    throw std::domain_error("symmetrize: need n0 < nL <= n");
  if (k <= n0 || static_cast<double>(k) >= nL) return 0.0;
  if (2 * k <= n) return f(static_cast<double>(k - n0));
  return f(nL - k);
}

BarrierSpec barrier_values(const WalkConfig& config) {
  BarrierSpec spec;
  spec.n0 = config.n0;
  const int n = config.n;
  const double y = config.y;
  const double alpha = config.alpha;
  if (config.convention == Convention::left_tail) {
    spec.generator = "left-tail";
    const int nl = static_cast<int>(std::llround(config.nL));
    for (int k = config.n0; k <= nl; ++k) {
      const auto lg = [](double x) { return std::log(x); };
      const auto pw = [](double x) { return std::pow(x, 0.75); };
      spec.rungs.push_back(k);
      spec.U.push_back(y / 10.0 + alpha * (k - config.n0) -
                       10.0 * symmetrize(lg, k, config.n0, config.nL, n));
      spec.L.push_back(-10.0 * y + alpha * (k - config.n0) -
                       symmetrize(pw, k, config.n0, config.nL, n));
    }
  } else {
    spec.generator = "right-tail";
    const int top = static_cast<int>(std::floor(config.nL));
    for (int j = config.n0; j <= top; ++j) {
      const double m = std::min<double>(j, n - j);
      spec.rungs.push_back(j);
      spec.U.push_back(y + alpha * j - 10.0 * std::log(m));  // +inf at m = 0
      spec.L.push_back(-10.0 + (alpha + y / config.nL) * j -
                       std::pow(m, 0.75));
    }
    // the pinned final rung: recentering anchor, width exactly 10
    const double u_top = n - 0.75 * std::log(static_cast<double>(n)) + y;
    spec.rungs.push_back(config.nL);
    spec.U.push_back(u_top);
    spec.L.push_back(u_top - 10.0);
  }
  return spec;
}

FieldSpec to_field_spec(const WalkConfig& config, const PrimePartition& part,
                        MomentMode mode, uint64_t grid_max) {
  FieldSpec spec;
  const int top = static_cast<int>(std::floor(config.nL));
  for (int j = config.n0 + 1; j <= top; ++j) {
    FieldLevel lv;
    lv.scale = std::exp(static_cast<double>(j));
    lv.var = sk2(part, j, mode).value;
    spec.levels.push_back(lv);
  }
  const double frac = config.nL - top;
  if (frac > 1e-12) {
    FieldLevel lv;
    lv.scale = std::exp(config.nL);
    lv.var = frac / 2.0;  // leading-order variance of the partial block
    spec.levels.push_back(lv);
  }
  spec.grid_lo = -0.5;
  spec.grid_step = config.grid_step;
  spec.grid_points =
      static_cast<uint64_t>(std::floor(1.0 / config.grid_step)) + 1;
  if (grid_max > 0 && spec.grid_points > grid_max) {
    spec.grid_points = grid_max;
    spec.grid_step = 1.0 / static_cast<double>(grid_max - 1);
  }
  return spec;
}

namespace {

// rung -> field level index; -1 means the identically-zero path
std::vector<int> rung_level_map(const FieldSample& field,
                                const BarrierSpec& spec) {
  const int n_levels = static_cast<int>(field.paths.size());
  std::vector<int> idx(spec.rungs.size());
  for (size_t m = 0; m < spec.rungs.size(); ++m) {
    const double r = spec.rungs[m];
    if (r <= spec.n0 + 1e-9) {
      idx[m] = -1;
    } else if (near_integer(r)) {
      const int j = static_cast<int>(std::llround(r)) - spec.n0 - 1;
      if (j >= n_levels)
        throw std::out_of_range(
            "good_set_count: field levels do not cover the barrier range");
      idx[m] = j;
    } else {
      idx[m] = n_levels - 1;  // fractional top rung
    }
  }
  return idx;
}

}  // namespace

uint64_t good_set_count(const FieldSample& field, const BarrierSpec& spec,
                        double slack) {
  if (spec.rungs.size() != spec.L.size() || spec.rungs.size() != spec.U.size())
    throw std::invalid_argument("good_set_count: ragged barrier arrays");
  const std::vector<int> idx = rung_level_map(field, spec);
  const size_t n_grid = field.grid.size();
  uint64_t count = 0;
  for (size_t i = 0; i < n_grid; ++i) {
    bool good = true;
    for (size_t m = 0; m < idx.size(); ++m) {
      const double v = idx[m] < 0 ? 0.0 : field.paths[static_cast<size_t>(idx[m])][i];
      if (!(v >= spec.L[m] - slack && v <= spec.U[m] + slack)) {
        good = false;
        break;
      }
    }
    if (good) ++count;
  }
  return count;
}

MomentReport moment_report(const WalkConfig& config, const BarrierSpec& spec,
                           const FieldSpec& fspec, uint64_t n_replicas,
                           const std::vector<uint64_t>& seeds, int n_threads) {
  if (n_replicas < 100)
    throw std::domain_error("moment_report: need at least 100 replicas");
  if (seeds.empty())
    throw std::domain_error("moment_report: need at least one seed");

  const size_t n_seeds = seeds.size();
  const uint64_t base = n_replicas / n_seeds;
  const uint64_t rem = n_replicas % n_seeds;
  // group g owns replicas [offset[g], offset[g+1])
  std::vector<uint64_t> offset(n_seeds + 1, 0);
  for (size_t g = 0; g < n_seeds; ++g)
    offset[g + 1] = offset[g] + base + (g < rem ? 1 : 0);

  std::vector<double> cm(n_replicas), c0(n_replicas), cp(n_replicas);
  std::atomic<uint64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const uint64_t i = next.fetch_add(1);
      if (i >= n_replicas) return;
      const size_t g = static_cast<size_t>(
          std::upper_bound(offset.begin(), offset.end(), i) - offset.begin() -
          1);
      const FieldSample sample =
          sample_field(seeds[g], fspec, i - offset[g]);
      cm[i] = static_cast<double>(good_set_count(sample, spec, -1.0));
      c0[i] = static_cast<double>(good_set_count(sample, spec, 0.0));
      cp[i] = static_cast<double>(good_set_count(sample, spec, 1.0));
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

  MomentReport rep;
  rep.flags = config.flags;
  std::vector<double> c0sq(n_replicas), cmsq(n_replicas);
  uint64_t nonempty = 0;
  for (uint64_t i = 0; i < n_replicas; ++i) {
    c0sq[i] = c0[i] * c0[i];
    cmsq[i] = cm[i] * cm[i];
    if (c0[i] >= 1.0) ++nonempty;
  }
  rep.mean_count = mean_ci(c0);
  rep.second_moment = mean_ci(c0sq);
  rep.mean_count_wide = mean_ci(cp);
  rep.second_moment_narrow = mean_ci(cmsq);
  rep.p_nonempty = binomial_ci(nonempty, n_replicas);
  rep.degenerate = nonempty == 0;
  if (rep.degenerate) rep.flags.push_back("degenerate");

  const double m1 = rep.mean_count.value;
  const double m2 = rep.second_moment.value;
  rep.pz_lower = (m2 > 0.0) ? m1 * m1 / m2 : 0.0;

  if (m2 > 0.0) {
    // leave-one-out over replicas
    const double N = static_cast<double>(n_replicas);
    const double sum1 = m1 * N;
    const double sum2 = m2 * N;
    std::vector<double> loo(n_replicas);
    double loo_mean = 0.0;
    for (uint64_t i = 0; i < n_replicas; ++i) {
      const double s1 = (sum1 - c0[i]) / (N - 1.0);
      const double s2 = (sum2 - c0sq[i]) / (N - 1.0);
      loo[i] = (s2 > 0.0) ? s1 * s1 / s2 : 0.0;
      loo_mean += loo[i];
    }
    loo_mean /= N;
    double ssq = 0.0;
    for (uint64_t i = 0; i < n_replicas; ++i) {
      const double d = loo[i] - loo_mean;
      ssq += d * d;
    }
    rep.pz_se_jackknife = std::sqrt((N - 1.0) / N * ssq);
    rep.pz_jackknife_bias = (N - 1.0) * (loo_mean - rep.pz_lower);
  }

  for (size_t g = 0; g < n_seeds; ++g) {
    SeedMoments sm;
    sm.seed = seeds[g];
    const uint64_t cnt = offset[g + 1] - offset[g];
    double s1 = 0.0, s2 = 0.0;
    for (uint64_t i = offset[g]; i < offset[g + 1]; ++i) {
      s1 += c0[i];
      s2 += c0sq[i];
    }
    sm.mean_count = s1 / static_cast<double>(cnt);
    sm.second_moment = s2 / static_cast<double>(cnt);
    sm.pz_lower = (sm.second_moment > 0.0)
                      ? sm.mean_count * sm.mean_count / sm.second_moment
                      : 0.0;
    rep.per_seed.push_back(sm);
  }
  return rep;
}

TailReport tail_statistics(std::span<const double> samples, double n_scale,
                           std::span<const double> y_grid) {
  if (samples.size() < 10000)
    throw std::domain_error("tail_statistics: need at least 1e4 samples");
  TailReport rep;
  rep.n_samples = samples.size();

  bool all_equal = true;
  for (double s : samples)
    if (s != samples[0]) {
      all_equal = false;
      break;
    }
  if (all_equal) {
    rep.degenerate = true;
    rep.flags.push_back("degenerate");
  }

  const uint64_t N = samples.size();
  for (double y : y_grid) {
    uint64_t over = 0, under = 0;
    for (double s : samples) {
      if (s > y) ++over;
      if (s < -y) ++under;
    }
    TailPoint r;
    r.y = y;
    r.exceedances = over;
    r.usable = over >= 10;
    const EstimateCI ci = binomial_ci(over, N);
    r.p_hat = ci.value;
    r.lo = ci.lo;
    r.hi = ci.hi;
    rep.right.push_back(r);
    TailPoint l;
    l.y = y;
    l.exceedances = under;
    l.usable = under >= 10;
    const EstimateCI cl = binomial_ci(under, N);
    l.p_hat = cl.value;
    l.lo = cl.lo;
    l.hi = cl.hi;
    rep.left.push_back(l);
  }

  std::vector<double> fx, fy, fw;
  for (const TailPoint& p : rep.right) {
    if (!p.usable || p.y <= 0.0 || p.exceedances >= N) continue;
    fx.push_back(p.y);
    fy.push_back(std::log(p.p_hat) - std::log(p.y) + p.y * p.y / n_scale);
    fw.push_back(static_cast<double>(N) * p.p_hat / (1.0 - p.p_hat));
  }
  if (rep.degenerate || fx.size() < 2) {
    if (!rep.degenerate) rep.flags.push_back("fit-underdetermined");
    rep.degenerate = true;
    return rep;
  }
  rep.fit = wls_fit(fx, fy, fw);
  rep.slope_lo = rep.fit.slope - 1.959963984540054 * rep.fit.se_slope;
  rep.slope_hi = rep.fit.slope + 1.959963984540054 * rep.fit.se_slope;
  return rep;
}

double synthetic_tail_sample(uint64_t seed, uint64_t i) {
  // survival S(y) = 2e * y * e^{-2y} on [1/2, inf), S(1/2) = 1
  const double u = 1.0 - keyed_uniform(seed, i, 0);  // (0, 1]
  double lo = 0.5, hi = 60.0;
  const double target = std::log(u);
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = std::log(2.0 * mid) + 1.0 - 2.0 * mid;
    if (g >= target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace zx
