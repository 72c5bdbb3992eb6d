// zxlab: experiment driver. Subcommands wrap the library entry points and
// emit CSV/JSON with the resolved configuration embedded, so every artifact
// can be reproduced from its own header. Exit codes: 0 ok, 1 usage or input
// error, 2 internal invariant failure.
#include <cinttypes>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "zx/ballot.hpp"
#include "zx/barriers.hpp"
#include "zx/dirichlet.hpp"
#include "zx/io.hpp"
#include "zx/models.hpp"
#include "zx/mollifier.hpp"
#include "zx/primes.hpp"
#include "zx/rng.hpp"
#include "zx/stats.hpp"
#include "zx/zeta.hpp"

using namespace zx;

namespace {

std::string json_escape(const std::string& s) {
  std::string r;
  r.reserve(s.size() + 8);
  for (char ch : s) {
    switch (ch) {
      case '"': r += "\\\""; break;
      case '\\': r += "\\\\"; break;
      case '\n': r += "\\n"; break;
      case '\r': r += "\\r"; break;
      case '\t': r += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          r += buf;
        } else {
          r += ch;
        }
    }
  }
  return r;
}

// Non-finite values are emitted as strings so the document stays valid JSON.
std::string json_num(double v) {
  if (std::isfinite(v)) return fmt_g17(v);
  if (std::isnan(v)) return "\"nan\"";
  return v > 0 ? "\"inf\"" : "\"-inf\"";
}

// Insertion-ordered JSON writer; close() pops either kind of container.
class JsonDoc {
 public:
  void open(const std::string& key = "") { item(key); s_ += '{'; depth_.push_back('}'); fresh_ = true; }
  void open_array(const std::string& key = "") { item(key); s_ += '['; depth_.push_back(']'); fresh_ = true; }
  void close() {
    char c = depth_.back();
    depth_.pop_back();
    s_ += '\n';
    s_.append(2 * depth_.size(), ' ');
    s_ += c;
  }
  void num(const std::string& key, double v) { item(key); s_ += json_num(v); }
  void integer(const std::string& key, long long v) { item(key); s_ += std::to_string(v); }
  void uinteger(const std::string& key, uint64_t v) { item(key); s_ += std::to_string(v); }
  void boolean(const std::string& key, bool v) { item(key); s_ += v ? "true" : "false"; }
  void str(const std::string& key, const std::string& v) {
    item(key);
    s_ += '"';
    s_ += json_escape(v);
    s_ += '"';
  }
  std::string take() {
    s_ += '\n';
    return std::move(s_);
  }

 private:
  void item(const std::string& key) {
    if (!depth_.empty()) {
      if (!fresh_) s_ += ',';
      s_ += '\n';
      s_.append(2 * depth_.size(), ' ');
    }
    if (!key.empty()) {
      s_ += '"';
      s_ += json_escape(key);
      s_ += "\": ";
    }
    fresh_ = false;
  }
  std::string s_;
  std::vector<char> depth_;
  bool fresh_ = true;
};

void put_estimate(JsonDoc& j, const std::string& key, const EstimateCI& e) {
  j.open(key);
  j.num("value", e.value);
  j.num("se", e.se);
  j.num("lo", e.lo);
  j.num("hi", e.hi);
  j.uinteger("n", e.n);
  j.close();
}

// Resolved parameter list; goes verbatim into every artifact.
struct Resolved {
  std::vector<std::pair<std::string, std::string>> kv;
  void add(const std::string& k, std::string v) { kv.emplace_back(k, std::move(v)); }
  void add_num(const std::string& k, double v) { add(k, fmt_g17(v)); }
  void add_int(const std::string& k, long long v) { add(k, std::to_string(v)); }
  void add_u64(const std::string& k, uint64_t v) { add(k, std::to_string(v)); }

  std::string csv_comments(const std::string& sub) const {
    std::string s = "# zxlab " + sub + "\n";
    for (const auto& [k, v] : kv) s += "# " + k + "=" + v + "\n";
    return s;
  }
  void to_json(JsonDoc& j, const std::string& sub) const {
    j.open("config");
    j.str("subcommand", sub);
    for (const auto& [k, v] : kv) j.str(k, v);
    j.close();
  }
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    atomic_write_file(path, text);
  }
}

const std::set<std::string> kConfigKeys = {"T", "n", "y", "convention", "replicas", "seed", "grid_max"};

struct Ctx {
  uint64_t seed = 1;
  long long replicas = -1;  // -1: unset; each subcommand has its own default
  int threads = 1;
  std::string out;
  std::string config_path;
  std::map<std::string, std::string> cfg;
};

double cfg_num(const Ctx& c, const std::string& key) {
  const std::string& s = c.cfg.at(key);
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (...) {
    throw std::runtime_error("config key '" + key + "' is not numeric: " + s);
  }
}

uint64_t cfg_u64(const Ctx& c, const std::string& key) {
  const std::string& s = c.cfg.at(key);
  try {
    size_t pos = 0;
    unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (...) {
    throw std::runtime_error("config key '" + key + "' is not a nonnegative integer: " + s);
  }
}

uint64_t resolve_replicas(const Ctx& c, uint64_t dflt) {
  return c.replicas < 0 ? dflt : static_cast<uint64_t>(c.replicas);
}

Convention parse_convention(const std::string& s) {
  if (s == "left") return Convention::left_tail;
  if (s == "right") return Convention::right_tail;
  throw std::runtime_error("convention must be 'left' or 'right'");
}

// Loads a cache covering [2, limit] when one is known, else sieves (and
// saves when a cache location is available).
PrimePartition get_partition(uint64_t limit, const std::string& cache_flag) {
  std::string path = cache_flag;
  if (path.empty()) {
    std::string dir = cache_dir();
    if (!dir.empty()) path = dir + "/primes_" + std::to_string(limit) + ".zxc";
  }
  if (!path.empty() && std::filesystem::exists(path)) {
    PrimePartition p = PrimePartition::load(path);
    if (p.sieve_limit() >= limit) return p;
  }
  PrimePartition p = PrimePartition::build(limit);
  if (!path.empty()) p.save(path);
  return p;
}

std::string join_nums(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt_g17(v[i]);
  }
  return s;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

void add_common(Resolved& r, const Ctx& c, uint64_t replicas_used) {
  r.add_u64("seed", c.seed);
  r.add_u64("replicas", replicas_used);
  r.add_int("threads", c.threads);
}

void tail_point_rows(JsonDoc& j, const std::string& key, const std::vector<TailPoint>& pts) {
  j.open_array(key);
  for (const auto& p : pts) {
    j.open();
    j.num("y", p.y);
    j.num("p_hat", p.p_hat);
    j.num("lo", p.lo);
    j.num("hi", p.hi);
    j.uinteger("exceedances", p.exceedances);
    j.boolean("usable", p.usable);
    j.close();
  }
  j.close();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for prime random walks, barrier moments and smoothed indicators"};
  app.require_subcommand(1);

  Ctx ctx;
  auto* seed_opt = app.add_option("--seed", ctx.seed, "base RNG seed (64-bit)");
  auto* rep_opt = app.add_option("--replicas", ctx.replicas, "Monte Carlo replica count");
  app.add_option("--threads", ctx.threads, "worker threads")->check(CLI::Range(1, 256));
  app.add_option("--out", ctx.out, "output path (stdout when omitted)");
  app.add_option("--config", ctx.config_path, "key=value config file (keys: T, n, y, convention, replicas, seed, grid_max)");

  // sieve-cache
  auto* sc_sieve = app.add_subcommand("sieve-cache", "build or validate the on-disk prime cache");
  uint64_t sv_limit = 600000000ull;
  std::string sv_path;
  sc_sieve->add_option("--limit", sv_limit, "sieve limit");
  sc_sieve->add_option("--path", sv_path, "cache file (default $ZXLB_CACHE_DIR/primes_<limit>.zxc or ./primes_<limit>.zxc)");

  // walk
  auto* sc_walk = app.add_subcommand("walk", "prime-block partial sums along the critical line");
  double wk_t = 10000.0, wk_h = 0.0;
  int wk_klo = 0, wk_khi = 2;
  std::string wk_conv = "shifted", wk_cache;
  sc_walk->add_option("--t", wk_t, "height t")->required();
  sc_walk->add_option("--h", wk_h, "offset h");
  sc_walk->add_option("--k-lo", wk_klo, "first reported block");
  sc_walk->add_option("--k-hi", wk_khi, "last block (blocks above 2 force a large sieve)");
  sc_walk->add_option("--convention", wk_conv, "block accumulation convention")
      ->check(CLI::IsMember({"shifted", "from-two"}));
  sc_walk->add_option("--sieve-cache", wk_cache, "prime cache file");

  // euler-check
  auto* sc_euler = app.add_subcommand("euler-check", "smoothed zeta-times-Euler-product identity scan");
  std::vector<double> eu_t = {1000.0};
  double eu_h = 0.0, eu_x = 15.154262241479262, eu_cap = 2500.0;
  int eu_panels = 2;
  sc_euler->add_option("--t", eu_t, "heights t (repeatable)");
  sc_euler->add_option("--h", eu_h, "offset h");
  sc_euler->add_option("--X", eu_x, "Euler product cutoff");
  sc_euler->add_option("--panels-per-unit", eu_panels, "quadrature panels per unit x")->check(CLI::Range(1, 64));
  sc_euler->add_option("--window-cap", eu_cap, "integration window cap");

  // zeta-max
  auto* sc_zmax = app.add_subcommand("zeta-max", "local maximum of log|zeta| over a short window");
  std::vector<double> zm_t = {10000.0};
  double zm_half = 1.0, zm_step = 0.0;
  int zm_depth = 20;
  sc_zmax->add_option("--t", zm_t, "center heights (repeatable)");
  sc_zmax->add_option("--half-width", zm_half, "window half-width (0, 2]");
  sc_zmax->add_option("--coarse-step", zm_step, "grid step (0 = 2pi/(8 log t))");
  sc_zmax->add_option("--refine-depth", zm_depth, "trisection refinement depth")->check(CLI::Range(0, 60));

  // model-sample
  auto* sc_msample = app.add_subcommand("model-sample", "trajectories of the randomized Euler-product walk");
  int ms_kmax = 2;
  uint64_t ms_cutoff = 100000;
  std::vector<double> ms_h = {0.0};
  std::string ms_cache;
  sc_msample->add_option("--k-max", ms_kmax, "last block (k >= 3 forces a large sieve)")->check(CLI::Range(0, 6));
  sc_msample->add_option("--h", ms_h, "offsets (repeatable)");
  sc_msample->add_option("--exact-cutoff", ms_cutoff, "largest prime sampled individually");
  sc_msample->add_option("--sieve-cache", ms_cache, "prime cache file");

  // model-verify
  auto* sc_mverify = app.add_subcommand("model-verify", "MC vs closed-form gap report for the surrogate models");
  int mv_kmax = 2, mv_be_k = 1;
  uint64_t mv_cutoff = 100000;
  double mv_dh = 0.1;
  std::string mv_cache;
  sc_mverify->add_option("--k-max", mv_kmax, "blocks checked")->check(CLI::Range(0, 3));
  sc_mverify->add_option("--be-k", mv_be_k, "block for the box-probability gap")->check(CLI::Range(0, 3));
  sc_mverify->add_option("--delta-h", mv_dh, "offset separation");
  sc_mverify->add_option("--exact-cutoff", mv_cutoff, "largest prime sampled individually");
  sc_mverify->add_option("--sieve-cache", mv_cache, "prime cache file");

  // barrier-dump
  auto* sc_barrier = app.add_subcommand("barrier-dump", "barrier rungs for a walk configuration");
  int bd_n = 0;
  double bd_y = 0.0, bd_T = 0.0;
  std::string bd_conv = "left";
  auto* bd_n_opt = sc_barrier->add_option("--n", bd_n, "number of scales (0 derives from T)");
  auto* bd_y_opt = sc_barrier->add_option("--y", bd_y, "deviation parameter");
  auto* bd_T_opt = sc_barrier->add_option("--T", bd_T, "height T");
  auto* bd_conv_opt = sc_barrier->add_option("--convention", bd_conv, "barrier convention")
                          ->check(CLI::IsMember({"left", "right"}));

  // moments
  auto* sc_moments = app.add_subcommand("moments", "good-set count moments and the second-moment lower bound");
  int mo_n = 0, mo_seed_count = 1;
  double mo_y = 0.0, mo_T = 0.0;
  uint64_t mo_grid_max = 0, mo_sieve = 2000000;
  std::string mo_conv = "left", mo_mode = "pnt", mo_cache;
  auto* mo_n_opt = sc_moments->add_option("--n", mo_n, "number of scales (0 derives from T)");
  auto* mo_y_opt = sc_moments->add_option("--y", mo_y, "deviation parameter");
  auto* mo_T_opt = sc_moments->add_option("--T", mo_T, "height T");
  auto* mo_conv_opt = sc_moments->add_option("--convention", mo_conv, "barrier convention")
                          ->check(CLI::IsMember({"left", "right"}));
  auto* mo_gm_opt = sc_moments->add_option("--grid-max", mo_grid_max, "grid point cap (0 = full)");
  sc_moments->add_option("--mode", mo_mode, "block variance mode")->check(CLI::IsMember({"exact", "pnt"}));
  sc_moments->add_option("--seed-count", mo_seed_count, "independent seed groups")->check(CLI::Range(1, 64));
  sc_moments->add_option("--sieve-limit", mo_sieve, "sieve limit for block variances");
  sc_moments->add_option("--sieve-cache", mo_cache, "prime cache file");

  // tail
  auto* sc_tail = app.add_subcommand("tail", "tail exponent fit of recentered maxima");
  int tl_n = 0;
  uint64_t tl_grid_max = 0, tl_sieve = 2000000;
  std::string tl_mode = "synthetic", tl_cache;
  std::vector<double> tl_y = {1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  sc_tail->add_option("--mode", tl_mode, "sample source")->check(CLI::IsMember({"synthetic", "field"}));
  auto* tl_n_opt = sc_tail->add_option("--n", tl_n, "scale count (field mode; optional y^2/n correction in synthetic mode)");
  sc_tail->add_option("--y", tl_y, "tail grid (repeatable)");
  auto* tl_gm_opt = sc_tail->add_option("--grid-max", tl_grid_max, "grid point cap (0 = full)");
  sc_tail->add_option("--sieve-limit", tl_sieve, "sieve limit for block variances");
  sc_tail->add_option("--sieve-cache", tl_cache, "prime cache file");

  // ballot
  auto* sc_ballot = app.add_subcommand("ballot", "bridge corridor probability (flat or barrier corridor)");
  int bl_t = 100;
  double bl_a = 2.0, bl_b = 2.0, bl_alpha = 0.0, bl_delta = 0.0, bl_y = 0.0;
  sc_ballot->add_option("--t", bl_t, "number of steps")->required();
  sc_ballot->add_option("--a", bl_a, "start point")->required();
  sc_ballot->add_option("--b", bl_b, "end point")->required();
  auto* bl_alpha_opt = sc_ballot->add_option("--alpha", bl_alpha, "lower barrier exponent");
  auto* bl_delta_opt = sc_ballot->add_option("--delta", bl_delta, "upper barrier exponent");
  auto* bl_y_opt = sc_ballot->add_option("--y", bl_y, "upper barrier offset");

  // mollifier-certify
  auto* sc_moll = app.add_subcommand("mollifier-certify", "sandwich certificate for the smoothed indicator pair");
  double ml_delta = 3.0, ml_a = 3.0;
  std::vector<int> ml_nus = {8, 32};
  sc_moll->add_option("--delta", ml_delta, "base scale (>= 3)");
  sc_moll->add_option("--A", ml_a, "exponent (>= 3)");
  sc_moll->add_option("--nu", ml_nus, "truncation degrees (repeatable)")->check(CLI::Range(0, 60));

  for (auto* sc : app.get_subcommands({})) sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (!ctx.config_path.empty()) {
      ctx.cfg = parse_config_file(ctx.config_path);
      for (const auto& [k, v] : ctx.cfg)
        if (!kConfigKeys.count(k)) throw std::runtime_error("unknown config key '" + k + "'");
    }
    if (!seed_opt->count() && ctx.cfg.count("seed")) ctx.seed = cfg_u64(ctx, "seed");
    if (!rep_opt->count() && ctx.cfg.count("replicas"))
      ctx.replicas = static_cast<long long>(cfg_u64(ctx, "replicas"));

    if (app.got_subcommand(sc_sieve)) {
      if (sv_limit < 2) throw std::invalid_argument("limit must be >= 2");
      std::string path = sv_path;
      if (path.empty()) {
        std::string dir = cache_dir();
        path = (dir.empty() ? std::string(".") : dir) + "/primes_" + std::to_string(sv_limit) + ".zxc";
      }
      std::string action;
      PrimePartition part = [&] {
        if (std::filesystem::exists(path)) {
          PrimePartition p = PrimePartition::load(path);
          if (p.sieve_limit() < sv_limit)
            throw std::runtime_error("cache " + path + " stops at " + std::to_string(p.sieve_limit()) +
                                     " < requested limit; remove it or pass --path");
          PrimePartition fresh = PrimePartition::build(std::min<uint64_t>(sv_limit, 100000));
          if (p.count_primes(2, fresh.sieve_limit()) != fresh.count_primes(2, fresh.sieve_limit()))
            throw std::logic_error("cache prime counts disagree with a fresh sieve");
          action = "validated";
          return p;
        }
        PrimePartition p = PrimePartition::build(sv_limit);
        p.save(path);
        action = "built";
        return p;
      }();
      Resolved r;
      r.add_u64("limit", sv_limit);
      r.add("path", path);
      add_common(r, ctx, 0);
      JsonDoc j;
      j.open();
      r.to_json(j, "sieve-cache");
      j.str("action", action);
      j.uinteger("sieve_limit", part.sieve_limit());
      j.integer("k_max_exact", part.k_max_exact());
      j.open_array("blocks");
      for (int k = 0; k <= part.k_max_exact(); ++k) {
        j.open();
        j.integer("k", k);
        j.uinteger("primes", part.count_primes(PrimePartition::block_lo(k), PrimePartition::block_hi(k)));
        j.num("sk2_exact", sk2(part, k, MomentMode::exact).value);
        if (k >= 1) j.num("sk2_pnt", sk2(part, k, MomentMode::pnt).value);
        j.close();
      }
      j.close();
      j.close();
      emit(ctx.out, j.take());
      return 0;
    }

    if (app.got_subcommand(sc_walk)) {
      if (wk_klo < 0 || wk_khi < wk_klo) throw std::invalid_argument("need 0 <= k-lo <= k-hi");
      PrimePartition part = get_partition(PrimePartition::block_hi(wk_khi), wk_cache);
      WalkConvention conv = wk_conv == "shifted" ? WalkConvention::shifted : WalkConvention::from_two;
      WalkSample ws = partial_sums(wk_t, wk_h, wk_klo, wk_khi, part, conv);
      Resolved r;
      r.add_num("t", wk_t);
      r.add_num("h", wk_h);
      r.add_int("k_lo", wk_klo);
      r.add_int("k_hi", wk_khi);
      r.add("convention", wk_conv);
      r.add_u64("sieve_limit", part.sieve_limit());
      add_common(r, ctx, 0);
      std::string csv = r.csv_comments("walk") + "t,h,k,S_k\n";
      for (size_t i = 0; i < ws.values.size(); ++i)
        csv += fmt_g17(wk_t) + "," + fmt_g17(wk_h) + "," + std::to_string(wk_klo + static_cast<int>(i)) +
               "," + fmt_g17(ws.values[i]) + "\n";
      emit(ctx.out, csv);
      return 0;
    }

    if (app.got_subcommand(sc_euler)) {
      if (eu_x < 2.0) throw std::invalid_argument("X must be >= 2");
      uint64_t limit = std::max<uint64_t>(16, static_cast<uint64_t>(std::ceil(eu_x)));
      PrimePartition part = get_partition(limit, "");
      Resolved r;
      r.add("t", join_nums(eu_t));
      r.add_num("h", eu_h);
      r.add_num("X", eu_x);
      r.add_int("panels_per_unit", eu_panels);
      r.add_num("window_cap", eu_cap);
      add_common(r, ctx, 0);
      JsonDoc j;
      j.open();
      r.to_json(j, "euler-check");
      j.open_array("records");
      for (double t : eu_t) {
        EulerProductResult res = smoothed_euler_product(t, eu_h, eu_x, part, eu_panels, eu_cap, ctx.threads);
        j.open();
        j.num("t", t);
        j.num("h", eu_h);
        j.num("X", eu_x);
        j.num("value_re", res.value.real());
        j.num("value_im", res.value.imag());
        j.num("abs_err", res.abs_err);
        j.num("window", res.window);
        j.uinteger("nodes", res.nodes);
        j.close();
      }
      j.close();
      j.close();
      emit(ctx.out, j.take());
      return 0;
    }

    if (app.got_subcommand(sc_zmax)) {
      Resolved r;
      r.add("t", join_nums(zm_t));
      r.add_num("half_width", zm_half);
      r.add_num("coarse_step", zm_step);
      r.add_int("refine_depth", zm_depth);
      add_common(r, ctx, 0);
      std::string csv = r.csv_comments("zeta-max") + "t,h_star,max_log_abs,recenter\n";
      for (double t : zm_t) {
        if (t < 10.0) throw std::invalid_argument("zeta-max needs t >= 10");
        double step = zm_step > 0 ? zm_step : 2.0 * M_PI / (8.0 * std::log(t));
        ZetaMax zm = max_log_abs_zeta(t, zm_half, step, zm_depth);
        double n = std::log(std::log(t));
        double recenter = n - 0.75 * std::log(n);
        csv += fmt_g17(t) + "," + fmt_g17(zm.h_star) + "," + fmt_g17(zm.max_log_abs) + "," +
               fmt_g17(recenter) + "\n";
      }
      emit(ctx.out, csv);
      return 0;
    }

    if (app.got_subcommand(sc_msample)) {
      uint64_t R = resolve_replicas(ctx, 4);
      if (R < 1) throw std::invalid_argument("replicas must be ≥ 1");
      if (ms_h.empty()) throw std::invalid_argument("need at least one --h");
      PrimePartition part = get_partition(PrimePartition::block_hi(ms_kmax), ms_cache);
      Resolved r;
      r.add_int("k_max", ms_kmax);
      r.add("h", join_nums(ms_h));
      r.add_u64("exact_cutoff", ms_cutoff);
      r.add_u64("sieve_limit", part.sieve_limit());
      add_common(r, ctx, R);
      std::string csv = r.csv_comments("model-sample") + "r,h,k,S_k\n";
      for (uint64_t rep = 0; rep < R; ++rep) {
        SteinhausSample s = sample_steinhaus(derive_seed(ctx.seed, rep), part, ms_h, ms_kmax, ms_cutoff);
        for (size_t i = 0; i < ms_h.size(); ++i)
          for (int k = 0; k <= ms_kmax; ++k)
            csv += std::to_string(rep) + "," + fmt_g17(ms_h[i]) + "," + std::to_string(k) + "," +
                   fmt_g17(s.trajectories[i][static_cast<size_t>(k)]) + "\n";
      }
      emit(ctx.out, csv);
      return 0;
    }

    if (app.got_subcommand(sc_mverify)) {
      uint64_t M = resolve_replicas(ctx, 2000);
      if (M < 100) throw std::invalid_argument("model-verify needs replicas >= 100");
      uint64_t limit = std::max(PrimePartition::block_hi(std::max(mv_kmax, mv_be_k)),
                                PrimePartition::block_hi(2));
      PrimePartition part = get_partition(limit, mv_cache);
      Resolved r;
      r.add_int("k_max", mv_kmax);
      r.add_int("be_k", mv_be_k);
      r.add_num("delta_h", mv_dh);
      r.add_u64("exact_cutoff", mv_cutoff);
      r.add_u64("sieve_limit", part.sieve_limit());
      add_common(r, ctx, M);
      JsonDoc j;
      j.open();
      r.to_json(j, "model-verify");
      j.open_array("checks");

      std::vector<std::vector<double>> sq(static_cast<size_t>(mv_kmax) + 1,
                                          std::vector<double>(M));
      for (uint64_t rep = 0; rep < M; ++rep) {
        SteinhausSample s = sample_steinhaus(derive_seed(ctx.seed, rep), part, {0.0}, mv_kmax, mv_cutoff);
        double prev = 0.0;
        for (int k = 0; k <= mv_kmax; ++k) {
          double inc = s.trajectories[0][static_cast<size_t>(k)] - prev;
          prev = s.trajectories[0][static_cast<size_t>(k)];
          sq[static_cast<size_t>(k)][rep] = inc * inc;
        }
      }
      for (int k = 0; k <= mv_kmax; ++k) {
        EstimateCI est = mean_ci(sq[static_cast<size_t>(k)]);
        double ref = sk2(part, k, MomentMode::exact).value;
        j.open();
        j.str("name", "steinhaus_increment_variance");
        j.integer("k", k);
        j.num("mc", est.value);
        j.num("se", est.se);
        j.num("reference", ref);
        j.num("gap", std::abs(est.value - ref));
        j.uinteger("seed", ctx.seed);
        j.close();
      }

      for (int k = 0; k <= mv_kmax; ++k) {
        double s2 = sk2(part, k, MomentMode::exact).value;
        double rho = rho_k(part, k, mv_dh, MomentMode::exact).value;
        std::vector<double> msq(M);
        for (uint64_t rep = 0; rep < M; ++rep) {
          GaussianWalkPair gp = sample_gaussian_pair(derive_seed(ctx.seed, (1ull << 32) + rep), mv_dh, k,
                                                     k, {s2}, {rho});
          msq[rep] = gp.increments[0].first * gp.increments[0].first;
        }
        EstimateCI est = mean_ci(msq);
        j.open();
        j.str("name", "gaussian_pair_marginal_variance");
        j.integer("k", k);
        j.num("mc", est.value);
        j.num("se", est.se);
        j.num("reference", s2);
        j.num("gap", std::abs(est.value - s2));
        j.uinteger("seed", ctx.seed);
        j.close();
      }

      {
        const double inf = std::numeric_limits<double>::infinity();
        double quad = gaussian_box_prob(1.0, 0.6, Box{0.0, inf}, Box{0.0, inf});
        double ref = 0.25 + std::asin(0.6) / (2.0 * M_PI);
        j.open();
        j.str("name", "gaussian_orthant_quadrature");
        j.integer("k", -1);
        j.num("mc", quad);
        j.num("se", 0.0);
        j.num("reference", ref);
        j.num("gap", std::abs(quad - ref));
        j.uinteger("seed", ctx.seed);
        j.close();
      }

      {
        const double inf = std::numeric_limits<double>::infinity();
        uint64_t be_m = std::max<uint64_t>(M, 10000);
        BerryEsseenReport rep = berry_esseen_gap(ctx.seed, mv_be_k, Box{0.0, inf}, Box{0.0, inf}, mv_dh,
                                                 be_m, part, ctx.threads, mv_cutoff);
        j.open();
        j.str("name", "berry_esseen_box_gap");
        j.integer("k", mv_be_k);
        j.num("mc", rep.mc);
        j.num("se", rep.mc_se);
        j.num("reference", rep.quad);
        j.num("gap", rep.gap);
        j.num("tail_gauss_bound", rep.tail_gauss_bound);
        j.uinteger("seed", ctx.seed);
        j.close();
      }

      j.close();
      j.close();
      emit(ctx.out, j.take());
      return 0;
    }

    if (app.got_subcommand(sc_barrier)) {
      if (!bd_n_opt->count() && ctx.cfg.count("n")) bd_n = static_cast<int>(cfg_num(ctx, "n"));
      if (!bd_y_opt->count() && ctx.cfg.count("y")) bd_y = cfg_num(ctx, "y");
      if (!bd_T_opt->count() && ctx.cfg.count("T")) bd_T = cfg_num(ctx, "T");
      if (!bd_conv_opt->count() && ctx.cfg.count("convention")) bd_conv = ctx.cfg.at("convention");
      WalkConfig wc = make_walk_config(parse_convention(bd_conv), bd_n, bd_y, bd_T);
      BarrierSpec bs = barrier_values(wc);
      Resolved r;
      r.add_int("n", wc.n);
      r.add_num("y", wc.y);
      r.add_num("T", wc.T);
      r.add("convention", bd_conv);
      r.add_num("alpha", wc.alpha);
      r.add_int("n0", wc.n0);
      r.add_num("nL", wc.nL);
      add_common(r, ctx, 0);
      std::string csv = r.csv_comments("barrier-dump");
      for (const std::string& f : wc.flags) csv += "# flag=" + f + "\n";
      csv += "k,L_k,U_k\n";
      for (size_t i = 0; i < bs.rungs.size(); ++i)
        csv += fmt_g17(bs.rungs[i]) + "," + fmt_g17(bs.L[i]) + "," + fmt_g17(bs.U[i]) + "\n";
      emit(ctx.out, csv);
      return 0;
    }

    if (app.got_subcommand(sc_moments)) {
      if (!mo_n_opt->count() && ctx.cfg.count("n")) mo_n = static_cast<int>(cfg_num(ctx, "n"));
      if (!mo_y_opt->count() && ctx.cfg.count("y")) mo_y = cfg_num(ctx, "y");
      if (!mo_T_opt->count() && ctx.cfg.count("T")) mo_T = cfg_num(ctx, "T");
      if (!mo_conv_opt->count() && ctx.cfg.count("convention")) mo_conv = ctx.cfg.at("convention");
      if (!mo_gm_opt->count() && ctx.cfg.count("grid_max")) mo_grid_max = cfg_u64(ctx, "grid_max");
      long long reps = ctx.replicas < 0 ? 2000 : ctx.replicas;
      if (reps < 1) throw std::invalid_argument("replicas must be ≥ 1");
      WalkConfig wc = make_walk_config(parse_convention(mo_conv), mo_n, mo_y, mo_T);
      PrimePartition part = get_partition(mo_sieve, mo_cache);
      BarrierSpec bs = barrier_values(wc);
      MomentMode mode = mo_mode == "exact" ? MomentMode::exact : MomentMode::pnt;
      FieldSpec fs = to_field_spec(wc, part, mode, mo_grid_max);
      std::vector<uint64_t> seeds(static_cast<size_t>(mo_seed_count));
      for (int g = 0; g < mo_seed_count; ++g) seeds[static_cast<size_t>(g)] = derive_seed(ctx.seed, static_cast<uint64_t>(g));
      MomentReport rep = moment_report(wc, bs, fs, static_cast<uint64_t>(reps), seeds, ctx.threads);

      Resolved r;
      r.add_int("n", wc.n);
      r.add_num("y", wc.y);
      r.add_num("T", wc.T);
      r.add("convention", mo_conv);
      r.add("mode", mo_mode);
      r.add_u64("grid_max", mo_grid_max);
      r.add_int("seed_count", mo_seed_count);
      r.add_u64("sieve_limit", part.sieve_limit());
      add_common(r, ctx, static_cast<uint64_t>(reps));
      JsonDoc j;
      j.open();
      r.to_json(j, "moments");
      j.open("walk_config");
      j.integer("n", wc.n);
      j.integer("n0", wc.n0);
      j.num("nL", wc.nL);
      j.num("y", wc.y);
      j.num("alpha", wc.alpha);
      j.num("grid_step", wc.grid_step);
      j.uinteger("grid_points", fs.grid_points);
      j.integer("rungs", static_cast<long long>(bs.rungs.size()));
      j.close();
      put_estimate(j, "mean_count", rep.mean_count);
      put_estimate(j, "second_moment", rep.second_moment);
      j.num("pz_lower", rep.pz_lower);
      j.num("pz_se_jackknife", rep.pz_se_jackknife);
      j.num("pz_jackknife_bias", rep.pz_jackknife_bias);
      put_estimate(j, "mean_count_wide", rep.mean_count_wide);
      put_estimate(j, "second_moment_narrow", rep.second_moment_narrow);
      put_estimate(j, "p_nonempty", rep.p_nonempty);
      j.boolean("degenerate", rep.degenerate);
      j.open_array("per_seed");
      for (const SeedMoments& sm : rep.per_seed) {
        j.open();
        j.uinteger("seed", sm.seed);
        j.num("mean_count", sm.mean_count);
        j.num("second_moment", sm.second_moment);
        j.num("pz_lower", sm.pz_lower);
        j.close();
      }
      j.close();
      j.open_array("flags");
      for (const std::string& f : wc.flags) j.str("", f);
      for (const std::string& f : rep.flags) j.str("", f);
      j.close();
      j.close();
      emit(ctx.out, j.take());
      return 0;
    }

    if (app.got_subcommand(sc_tail)) {
      if (!tl_n_opt->count() && ctx.cfg.count("n")) tl_n = static_cast<int>(cfg_num(ctx, "n"));
      if (!tl_gm_opt->count() && ctx.cfg.count("grid_max")) tl_grid_max = cfg_u64(ctx, "grid_max");
      long long reps = ctx.replicas < 0 ? 20000 : ctx.replicas;
      if (reps < 1) throw std::invalid_argument("replicas must be ≥ 1");
      std::vector<double> samples;
      double n_scale = std::numeric_limits<double>::infinity();
      uint64_t grid_points = 0;
      if (tl_mode == "synthetic") {
        samples.resize(static_cast<size_t>(reps));
        for (size_t i = 0; i < samples.size(); ++i)
          samples[i] = synthetic_tail_sample(ctx.seed, static_cast<uint64_t>(i));
        if (tl_n > 0) n_scale = tl_n;
      } else {
        if (tl_n < 2) throw std::invalid_argument("field mode needs --n >= 2");
        PrimePartition part = get_partition(tl_sieve, tl_cache);
        WalkConfig wc = make_walk_config(Convention::left_tail, tl_n, 0.0, 0.0);
        FieldSpec fs = to_field_spec(wc, part, MomentMode::pnt, tl_grid_max);
        grid_points = fs.grid_points;
        samples = field_max_replicas(derive_seed(ctx.seed, 0), fs, static_cast<uint64_t>(reps), ctx.threads);
        double nn = tl_n;
        double recenter = nn - 0.75 * std::log(nn);
        for (double& s : samples) s -= recenter;
        n_scale = nn;
      }
      TailReport tr = tail_statistics(samples, n_scale, tl_y);

      Resolved r;
      r.add("mode", tl_mode);
      r.add_int("n", tl_n);
      r.add("y", join_nums(tl_y));
      r.add_u64("grid_max", tl_grid_max);
      if (grid_points) r.add_u64("grid_points", grid_points);
      add_common(r, ctx, static_cast<uint64_t>(reps));
      std::string csv = r.csv_comments("tail") + "y,p_hat,lo,hi\n";
      for (const TailPoint& p : tr.right)
        csv += fmt_g17(p.y) + "," + fmt_g17(p.p_hat) + "," + fmt_g17(p.lo) + "," + fmt_g17(p.hi) + "\n";

      JsonDoc j;
      j.open();
      r.to_json(j, "tail");
      j.open("fit");
      j.num("intercept", tr.fit.intercept);
      j.num("slope", tr.fit.slope);
      j.num("se_intercept", tr.fit.se_intercept);
      j.num("se_slope", tr.fit.se_slope);
      j.close();
      j.num("slope_lo", tr.slope_lo);
      j.num("slope_hi", tr.slope_hi);
      j.boolean("degenerate", tr.degenerate);
      j.uinteger("n_samples", tr.n_samples);
      tail_point_rows(j, "right", tr.right);
      tail_point_rows(j, "left", tr.left);
      j.open_array("flags");
      for (const std::string& f : tr.flags) j.str("", f);
      j.close();
      j.close();
      if (ctx.out.empty()) {
        emit("", csv);
        emit("", j.take());
      } else {
        emit(ctx.out, csv);
        emit(ctx.out + ".fit.json", j.take());
      }
      return 0;
    }

    if (app.got_subcommand(sc_ballot)) {
      uint64_t M = resolve_replicas(ctx, 1000);
      bool any = bl_alpha_opt->count() || bl_delta_opt->count() || bl_y_opt->count();
      bool all = bl_alpha_opt->count() && bl_delta_opt->count() && bl_y_opt->count();
      if (any && !all)
        throw std::invalid_argument("barrier corridor mode needs --alpha, --delta and --y together");
      Resolved r;
      r.add_int("t", bl_t);
      r.add_num("a", bl_a);
      r.add_num("b", bl_b);
      JsonDoc j;
      j.open();
      if (all) {
        r.add_num("alpha", bl_alpha);
        r.add_num("delta", bl_delta);
        r.add_num("y", bl_y);
        add_common(r, ctx, M);
        BallotRatio br =
            ballot_asymptotic_ratio(bl_t, bl_alpha, bl_delta, bl_y, bl_a, bl_b, ctx.seed, M, ctx.threads);
        r.to_json(j, "ballot");
        j.num("estimate", br.corridor.est.value);
        j.num("se", br.corridor.est.se);
        j.num("exact_reference", 2.0 * bl_a * bl_b / br.sigma);
        j.num("ratio", br.ratio);
        j.num("sigma", br.sigma);
        j.num("d", br.d);
        j.boolean("range_warning", br.range_warning);
        j.num("free_end_ratio", br.corridor.free_end_ratio);
        j.num("bridge_ratio", br.corridor.bridge_ratio);
      } else {
        add_common(r, ctx, M);
        BridgeSpec spec =
            BridgeSpec::flat(bl_t, bl_a, bl_b, 0.0, std::numeric_limits<double>::infinity());
        CorridorEstimate ce = walk_corridor_mc(spec, ctx.seed, M, ctx.threads);
        double ref = bridge_stay_positive_exact(bl_a, bl_b, spec.sigma_total());
        r.to_json(j, "ballot");
        j.num("estimate", ce.est.value);
        j.num("se", ce.est.se);
        j.num("exact_reference", ref);
        j.num("ratio", ref > 0 ? ce.est.value / ref : 0.0);
        j.num("sigma", spec.sigma_total());
        j.num("free_end_ratio", ce.free_end_ratio);
        j.num("bridge_ratio", ce.bridge_ratio);
      }
      j.close();
      emit(ctx.out, j.take());
      return 0;
    }

    if (app.got_subcommand(sc_moll)) {
      if (ml_nus.empty()) throw std::invalid_argument("need at least one --nu");
      ApproximationParams params = make_params(ml_delta, ml_a, ml_nus.back());
      SandwichCertificate cert = certify_sandwich(params, ml_nus);
      Resolved r;
      r.add_num("delta", ml_delta);
      r.add_num("A", ml_a);
      r.add("nu", join_ints(ml_nus));
      add_common(r, ctx, 0);
      JsonDoc j;
      j.open();
      r.to_json(j, "mollifier-certify");
      j.num("fourier_leak_minus", cert.fourier_leak_minus);
      j.num("fourier_leak_plus", cert.fourier_leak_plus);
      j.num("fourier_l1_minus", cert.fourier_l1_minus);
      j.num("fourier_l1_plus", cert.fourier_l1_plus);
      j.boolean("item1", cert.item1);
      j.num("order_violation", cert.order_violation);
      j.boolean("item2", cert.item2);
      j.num("eps_plus", cert.eps_plus);
      j.boolean("item3", cert.item3);
      j.num("eps_minus", cert.eps_minus);
      j.num("eps_inner", cert.eps_inner);
      j.boolean("item4", cert.item4);
      j.num("l1_margin_minus", cert.l1_margin_minus);
      j.num("l1_margin_plus", cert.l1_margin_plus);
      j.boolean("item5", cert.item5);
      j.boolean("all_items", cert.item1 && cert.item2 && cert.item3 && cert.item4 && cert.item5);
      j.open_array("truncation");
      for (size_t i = 0; i < cert.nus.size(); ++i) {
        j.open();
        j.integer("nu", cert.nus[i]);
        j.num("gap_minus", cert.gaps_minus[i]);
        j.num("gap_plus", cert.gaps_plus[i]);
        j.close();
      }
      j.close();
      j.num("coef_margin_min", cert.coef_margin_min);
      j.close();
      emit(ctx.out, j.take());
      return 0;
    }

    throw std::runtime_error("no subcommand dispatched");
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::length_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "invariant failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
