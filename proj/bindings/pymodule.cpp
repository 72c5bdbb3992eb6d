// Python bindings for the zx core. Long-running entry points release the
// GIL; everything returned is a plain value object.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zx/ballot.hpp"
#include "zx/barriers.hpp"
#include "zx/dirichlet.hpp"
#include "zx/models.hpp"
#include "zx/mollifier.hpp"
#include "zx/primes.hpp"
#include "zx/rng.hpp"
#include "zx/stats.hpp"
#include "zx/zeta.hpp"

namespace py = pybind11;
using namespace zx;
using py::call_guard;
using nogil = py::gil_scoped_release;

PYBIND11_MODULE(_core, m) {
  m.doc() = "prime-block random walk laboratory (core bindings)";

  // ---- rng ----
  m.def("derive_seed", &derive_seed, py::arg("seed"), py::arg("stream"));
  m.def("keyed_uniform", &keyed_uniform, py::arg("seed"), py::arg("s1"),
        py::arg("s2"));
  m.def("keyed_normal", &keyed_normal, py::arg("seed"), py::arg("s1"),
        py::arg("s2"));

  // ---- stats ----
  py::class_<EstimateCI>(m, "EstimateCI")
      .def_readonly("value", &EstimateCI::value)
      .def_readonly("se", &EstimateCI::se)
      .def_readonly("lo", &EstimateCI::lo)
      .def_readonly("hi", &EstimateCI::hi)
      .def_readonly("n", &EstimateCI::n)
      .def("__repr__", [](const EstimateCI& e) {
        return "EstimateCI(value=" + std::to_string(e.value) +
               ", se=" + std::to_string(e.se) + ")";
      });
  m.def("mean_ci",
        [](const std::vector<double>& v) {
          return mean_ci(std::span<const double>(v));
        },
        py::arg("values"));
  m.def("binomial_ci", &binomial_ci, py::arg("successes"), py::arg("trials"));
  m.def("ks_distance", &ks_distance, py::arg("a"), py::arg("b"));
  m.def("median", &median, py::arg("values"));
  m.def("quantile", &quantile, py::arg("values"), py::arg("q"));
  m.def("interquartile_range", &interquartile_range, py::arg("values"));

  // ---- primes ----
  py::enum_<MomentMode>(m, "MomentMode")
      .value("exact", MomentMode::exact)
      .value("pnt", MomentMode::pnt);
  py::class_<BlockMoments>(m, "BlockMoments")
      .def_readonly("k", &BlockMoments::k)
      .def_readonly("value", &BlockMoments::value)
      .def_readonly("square_tail_bound", &BlockMoments::square_tail_bound)
      .def_readonly("mode", &BlockMoments::mode)
      .def_readonly("empty_block", &BlockMoments::empty_block);
  py::class_<PrimePartition>(m, "PrimePartition")
      .def_static("build", &PrimePartition::build, py::arg("sieve_limit"),
                  call_guard<nogil>())
      .def_static("load", &PrimePartition::load, py::arg("path"),
                  call_guard<nogil>())
      .def("save", &PrimePartition::save, py::arg("path"),
           call_guard<nogil>())
      .def("sieve_limit", &PrimePartition::sieve_limit)
      .def("k_max_exact", &PrimePartition::k_max_exact)
      .def("block_is_exact", &PrimePartition::block_is_exact, py::arg("k"))
      .def_static("block_of", &PrimePartition::block_of, py::arg("p"))
      .def_static("block_lo", &PrimePartition::block_lo, py::arg("k"))
      .def_static("block_hi", &PrimePartition::block_hi, py::arg("k"))
      .def("is_prime", &PrimePartition::is_prime, py::arg("n"))
      .def("count_primes", &PrimePartition::count_primes, py::arg("lo"),
           py::arg("hi"))
      .def("block_primes", &PrimePartition::block_primes, py::arg("k"));
  m.def("sk2", &sk2, py::arg("part"), py::arg("k"), py::arg("mode"));
  m.def("rho_k", &rho_k, py::arg("part"), py::arg("k"), py::arg("delta_h"),
        py::arg("mode"));
  m.def("rho_k_pnt_quadrature", &rho_k_pnt_quadrature, py::arg("k"),
        py::arg("delta_h"));
  m.def("epsilon_j", &epsilon_j, py::arg("part"), py::arg("j"),
        py::arg("delta_h"));

  // ---- dirichlet walks ----
  py::enum_<WalkConvention>(m, "WalkConvention")
      .value("shifted", WalkConvention::shifted)
      .value("from_two", WalkConvention::from_two);
  py::class_<WalkSample>(m, "WalkSample")
      .def_readonly("t", &WalkSample::t)
      .def_readonly("h", &WalkSample::h)
      .def_readonly("k_lo", &WalkSample::k_lo)
      .def_readonly("k_hi", &WalkSample::k_hi)
      .def_readonly("convention", &WalkSample::convention)
      .def_readonly("values", &WalkSample::values);
  m.def("partial_sums", &partial_sums, py::arg("t"), py::arg("h"),
        py::arg("k_lo"), py::arg("k_hi"), py::arg("part"), py::arg("conv"),
        call_guard<nogil>());
  m.def("walk_term", &walk_term, py::arg("p"), py::arg("t"), py::arg("h"));
  py::class_<EulerProductResult>(m, "EulerProductResult")
      .def_readonly("value", &EulerProductResult::value)
      .def_readonly("abs_err", &EulerProductResult::abs_err)
      .def_readonly("window", &EulerProductResult::window)
      .def_readonly("nodes", &EulerProductResult::nodes);
  m.def("smoothed_euler_product", &smoothed_euler_product, py::arg("t"),
        py::arg("h"), py::arg("X"), py::arg("part"),
        py::arg("panels_per_unit") = 2, py::arg("window_cap") = 2500.0,
        py::arg("n_threads") = 1, call_guard<nogil>());

  // ---- zeta scans ----
  py::class_<ZetaMax>(m, "ZetaMax")
      .def_readonly("h_star", &ZetaMax::h_star)
      .def_readonly("max_log_abs", &ZetaMax::max_log_abs);
  m.def("max_log_abs_zeta", &max_log_abs_zeta, py::arg("t"),
        py::arg("half_width"), py::arg("coarse_step"),
        py::arg("refine_depth") = 20, call_guard<nogil>());

  // ---- surrogate models ----
  py::class_<SteinhausSample>(m, "SteinhausSample")
      .def_readonly("seed", &SteinhausSample::seed)
      .def_readonly("k_max", &SteinhausSample::k_max)
      .def_readonly("exact_cutoff", &SteinhausSample::exact_cutoff)
      .def_readonly("h_set", &SteinhausSample::h_set)
      .def_readonly("trajectories", &SteinhausSample::trajectories)
      .def_readonly("tail_component", &SteinhausSample::tail_component);
  m.def("sample_steinhaus", &sample_steinhaus, py::arg("seed"),
        py::arg("part"), py::arg("h_set"), py::arg("k_max"),
        py::arg("exact_cutoff") = 100000, call_guard<nogil>());
  py::class_<Box>(m, "Box")
      .def(py::init([](double lo, double hi) {
             return Box{lo, hi};
           }),
           py::arg("lo"), py::arg("hi"))
      .def_readwrite("lo", &Box::lo)
      .def_readwrite("hi", &Box::hi);
  m.def("gaussian_box_prob", &gaussian_box_prob, py::arg("s2"),
        py::arg("rho"), py::arg("a"), py::arg("b"));
  py::class_<BerryEsseenReport>(m, "BerryEsseenReport")
      .def_readonly("gap", &BerryEsseenReport::gap)
      .def_readonly("mc", &BerryEsseenReport::mc)
      .def_readonly("mc_se", &BerryEsseenReport::mc_se)
      .def_readonly("quad", &BerryEsseenReport::quad)
      .def_readonly("tail_gauss_bound", &BerryEsseenReport::tail_gauss_bound);
  m.def("berry_esseen_gap", &berry_esseen_gap, py::arg("seed"), py::arg("k"),
        py::arg("a"), py::arg("b"), py::arg("delta_h"), py::arg("M"),
        py::arg("part"), py::arg("n_threads") = 1,
        py::arg("exact_cutoff") = 100000, call_guard<nogil>());
  py::class_<FieldLevel>(m, "FieldLevel")
      .def(py::init([](double scale, double var) {
             return FieldLevel{scale, var};
           }),
           py::arg("scale"), py::arg("var"))
      .def_readwrite("scale", &FieldLevel::scale)
      .def_readwrite("var", &FieldLevel::var);
  py::class_<FieldSpec>(m, "FieldSpec")
      .def(py::init<>())
      .def_readwrite("levels", &FieldSpec::levels)
      .def_readwrite("grid_lo", &FieldSpec::grid_lo)
      .def_readwrite("grid_step", &FieldSpec::grid_step)
      .def_readwrite("grid_points", &FieldSpec::grid_points);
  py::class_<FieldSample>(m, "FieldSample")
      .def_readonly("grid", &FieldSample::grid)
      .def_readonly("paths", &FieldSample::paths);
  m.def("sample_field", &sample_field, py::arg("seed"), py::arg("spec"),
        py::arg("replica") = 0, call_guard<nogil>());
  m.def("field_max_replicas", &field_max_replicas, py::arg("seed"),
        py::arg("spec"), py::arg("R"), py::arg("n_threads") = 1,
        call_guard<nogil>());

  // ---- ballot corridors ----
  py::class_<BridgeSpec>(m, "BridgeSpec")
      .def_static("flat", &BridgeSpec::flat, py::arg("t"), py::arg("a"),
                  py::arg("b"), py::arg("lo"), py::arg("hi"))
      .def_readwrite("t", &BridgeSpec::t)
      .def_readwrite("kappa", &BridgeSpec::kappa)
      .def_readwrite("variances", &BridgeSpec::variances)
      .def_readwrite("lower", &BridgeSpec::lower)
      .def_readwrite("upper", &BridgeSpec::upper)
      .def_readwrite("a", &BridgeSpec::a)
      .def_readwrite("b", &BridgeSpec::b)
      .def("sigma_total", &BridgeSpec::sigma_total)
      .def("validate", &BridgeSpec::validate);
  py::class_<CorridorEstimate>(m, "CorridorEstimate")
      .def_readonly("est", &CorridorEstimate::est)
      .def_readonly("free_end_ratio", &CorridorEstimate::free_end_ratio)
      .def_readonly("bridge_ratio", &CorridorEstimate::bridge_ratio);
  py::class_<BallotRatio>(m, "BallotRatio")
      .def_readonly("ratio", &BallotRatio::ratio)
      .def_readonly("corridor", &BallotRatio::corridor)
      .def_readonly("sigma", &BallotRatio::sigma)
      .def_readonly("d", &BallotRatio::d)
      .def_readonly("range_warning", &BallotRatio::range_warning);
  m.def("bridge_stay_positive_exact", &bridge_stay_positive_exact,
        py::arg("a"), py::arg("b"), py::arg("sigma"));
  m.def("walk_corridor_mc", &walk_corridor_mc, py::arg("spec"),
        py::arg("seed"), py::arg("M"), py::arg("n_threads") = 1,
        call_guard<nogil>());
  m.def("ballot_asymptotic_ratio", &ballot_asymptotic_ratio, py::arg("t"),
        py::arg("alpha"), py::arg("delta"), py::arg("y"), py::arg("a"),
        py::arg("b"), py::arg("seed"), py::arg("M"), py::arg("n_threads") = 1,
        call_guard<nogil>());

  // ---- barrier pipeline ----
  py::enum_<Convention>(m, "Convention")
      .value("left_tail", Convention::left_tail)
      .value("right_tail", Convention::right_tail);
  py::class_<WalkConfig>(m, "WalkConfig")
      .def_readonly("T", &WalkConfig::T)
      .def_readonly("n", &WalkConfig::n)
      .def_readonly("n0", &WalkConfig::n0)
      .def_readonly("nL", &WalkConfig::nL)
      .def_readonly("y", &WalkConfig::y)
      .def_readonly("alpha", &WalkConfig::alpha)
      .def_readonly("convention", &WalkConfig::convention)
      .def_readonly("grid_step", &WalkConfig::grid_step)
      .def_readonly("flags", &WalkConfig::flags);
  m.def("make_walk_config", &make_walk_config, py::arg("conv"), py::arg("n"),
        py::arg("y"), py::arg("T") = 0.0);
  py::class_<BarrierSpec>(m, "BarrierSpec")
      .def_readonly("n0", &BarrierSpec::n0)
      .def_readonly("rungs", &BarrierSpec::rungs)
      .def_readonly("L", &BarrierSpec::L)
      .def_readonly("U", &BarrierSpec::U)
      .def_readonly("generator", &BarrierSpec::generator);
  m.def("barrier_values", &barrier_values, py::arg("config"));
  m.def("to_field_spec", &to_field_spec, py::arg("config"), py::arg("part"),
        py::arg("mode"), py::arg("grid_max") = 0);
  m.def("good_set_count", &good_set_count, py::arg("field"), py::arg("spec"),
        py::arg("slack"));
  py::class_<SeedMoments>(m, "SeedMoments")
      .def_readonly("seed", &SeedMoments::seed)
      .def_readonly("mean_count", &SeedMoments::mean_count)
      .def_readonly("second_moment", &SeedMoments::second_moment)
      .def_readonly("pz_lower", &SeedMoments::pz_lower);
  py::class_<MomentReport>(m, "MomentReport")
      .def_readonly("mean_count", &MomentReport::mean_count)
      .def_readonly("second_moment", &MomentReport::second_moment)
      .def_readonly("pz_lower", &MomentReport::pz_lower)
      .def_readonly("pz_se_jackknife", &MomentReport::pz_se_jackknife)
      .def_readonly("pz_jackknife_bias", &MomentReport::pz_jackknife_bias)
      .def_readonly("mean_count_wide", &MomentReport::mean_count_wide)
      .def_readonly("second_moment_narrow", &MomentReport::second_moment_narrow)
      .def_readonly("p_nonempty", &MomentReport::p_nonempty)
      .def_readonly("degenerate", &MomentReport::degenerate)
      .def_readonly("per_seed", &MomentReport::per_seed)
      .def_readonly("flags", &MomentReport::flags);
  m.def("moment_report", &moment_report, py::arg("config"), py::arg("spec"),
        py::arg("fspec"), py::arg("n_replicas"), py::arg("seeds"),
        py::arg("n_threads") = 1, call_guard<nogil>());
  py::class_<LinFit>(m, "LinFit")
      .def_readonly("intercept", &LinFit::intercept)
      .def_readonly("slope", &LinFit::slope)
      .def_readonly("se_intercept", &LinFit::se_intercept)
      .def_readonly("se_slope", &LinFit::se_slope);
  py::class_<TailPoint>(m, "TailPoint")
      .def_readonly("y", &TailPoint::y)
      .def_readonly("p_hat", &TailPoint::p_hat)
      .def_readonly("lo", &TailPoint::lo)
      .def_readonly("hi", &TailPoint::hi)
      .def_readonly("exceedances", &TailPoint::exceedances)
      .def_readonly("usable", &TailPoint::usable);
  py::class_<TailReport>(m, "TailReport")
      .def_readonly("right", &TailReport::right)
      .def_readonly("left", &TailReport::left)
      .def_readonly("fit", &TailReport::fit)
      .def_readonly("slope_lo", &TailReport::slope_lo)
      .def_readonly("slope_hi", &TailReport::slope_hi)
      .def_readonly("degenerate", &TailReport::degenerate)
      .def_readonly("n_samples", &TailReport::n_samples)
      .def_readonly("flags", &TailReport::flags);
  m.def("tail_statistics",
        [](const std::vector<double>& samples, double n_scale,
           const std::vector<double>& y_grid) {
          return tail_statistics(std::span<const double>(samples), n_scale,
                                 std::span<const double>(y_grid));
        },
        py::arg("samples"), py::arg("n_scale"), py::arg("y_grid"),
        call_guard<nogil>());
  m.def("synthetic_tail_sample", &synthetic_tail_sample, py::arg("seed"),
        py::arg("i"));

  // ---- smoothed indicator sandwich ----
  py::enum_<IndicatorSign>(m, "IndicatorSign")
      .value("plus", IndicatorSign::plus)
      .value("minus", IndicatorSign::minus);
  py::class_<ApproximationParams>(m, "ApproximationParams")
      .def_readwrite("delta", &ApproximationParams::delta)
      .def_readwrite("A", &ApproximationParams::A)
      .def_readwrite("nu", &ApproximationParams::nu)
      .def_readwrite("grid_lo", &ApproximationParams::grid_lo)
      .def_readwrite("grid_hi", &ApproximationParams::grid_hi)
      .def_readwrite("grid_points", &ApproximationParams::grid_points)
      .def("validate", &ApproximationParams::validate);
  m.def("make_params", &make_params, py::arg("delta"), py::arg("A"),
        py::arg("nu") = 8);
  py::class_<SmoothedIndicator>(m, "SmoothedIndicator")
      .def_readonly("sign", &SmoothedIndicator::sign)
      .def_readonly("params", &SmoothedIndicator::params)
      .def_readonly("c", &SmoothedIndicator::c)
      .def_readonly("d", &SmoothedIndicator::d)
      .def_readonly("grid", &SmoothedIndicator::grid)
      .def_readonly("values", &SmoothedIndicator::values)
      .def_readonly("fourier_xi", &SmoothedIndicator::fourier_xi)
      .def_readonly("fourier_values", &SmoothedIndicator::fourier_values);
  m.def("build_smoothed_indicator", &build_smoothed_indicator,
        py::arg("params"), py::arg("sign"), call_guard<nogil>());
  m.def("indicator_value", &indicator_value, py::arg("ind"), py::arg("x"));
  m.def("fourier_g", &fourier_g, py::arg("ind"), py::arg("xi"));
  py::class_<TruncationResult>(m, "TruncationResult")
      .def_readonly("nu", &TruncationResult::nu)
      .def_readonly("coefficients", &TruncationResult::coefficients)
      .def_readonly("window_lo", &TruncationResult::window_lo)
      .def_readonly("window_hi", &TruncationResult::window_hi)
      .def_readonly("sup_gap", &TruncationResult::sup_gap)
      .def_readonly("window_flag", &TruncationResult::window_flag)
      .def_readonly("coef_bound_log", &TruncationResult::coef_bound_log)
      .def_readonly("deriv_route_rel", &TruncationResult::deriv_route_rel);
  m.def("truncate_to_polynomial", &truncate_to_polynomial, py::arg("ind"),
        py::arg("nu"), py::arg("window_lo"), py::arg("window_hi"),
        call_guard<nogil>());
  m.def("truncation_poly_eval", &truncation_poly_eval, py::arg("tr"),
        py::arg("x"));
  m.def("crude_truncation_bound", &crude_truncation_bound, py::arg("delta"),
        py::arg("A"), py::arg("nu"), py::arg("x_window"));
  py::class_<SandwichCertificate>(m, "SandwichCertificate")
      .def_readonly("delta", &SandwichCertificate::delta)
      .def_readonly("A", &SandwichCertificate::A)
      .def_readonly("fourier_leak_minus",
                    &SandwichCertificate::fourier_leak_minus)
      .def_readonly("fourier_leak_plus",
                    &SandwichCertificate::fourier_leak_plus)
      .def_readonly("fourier_l1_minus", &SandwichCertificate::fourier_l1_minus)
      .def_readonly("fourier_l1_plus", &SandwichCertificate::fourier_l1_plus)
      .def_readonly("item1", &SandwichCertificate::item1)
      .def_readonly("order_violation", &SandwichCertificate::order_violation)
      .def_readonly("item2", &SandwichCertificate::item2)
      .def_readonly("eps_plus", &SandwichCertificate::eps_plus)
      .def_readonly("item3", &SandwichCertificate::item3)
      .def_readonly("eps_minus", &SandwichCertificate::eps_minus)
      .def_readonly("eps_inner", &SandwichCertificate::eps_inner)
      .def_readonly("item4", &SandwichCertificate::item4)
      .def_readonly("l1_margin_minus", &SandwichCertificate::l1_margin_minus)
      .def_readonly("l1_margin_plus", &SandwichCertificate::l1_margin_plus)
      .def_readonly("item5", &SandwichCertificate::item5)
      .def_readonly("nus", &SandwichCertificate::nus)
      .def_readonly("gaps_minus", &SandwichCertificate::gaps_minus)
      .def_readonly("gaps_plus", &SandwichCertificate::gaps_plus)
      .def_readonly("coef_margin_min", &SandwichCertificate::coef_margin_min);
  m.def("certify_sandwich", &certify_sandwich, py::arg("params"),
        py::arg("nus"), call_guard<nogil>());
}
