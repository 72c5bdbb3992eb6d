import math

import pytest

import zxlab as zx


@pytest.fixture(scope="module")
def part():
    return zx.PrimePartition.build(2_000_000)


def test_keyed_rng_reproducible():
    assert zx.derive_seed(42, 7) == 11385309249619826346
    assert math.isclose(zx.keyed_uniform(0, 0, 0), 0.3990464708489645,
                        rel_tol=1e-15)
    assert math.isclose(zx.keyed_normal(1, 2, 3), -0.09934243784976432,
                        rel_tol=1e-12)


def test_partition_and_block_moments(part):
    assert part.sieve_limit() == 2_000_000
    assert part.k_max_exact() == 2
    assert part.count_primes(2, 2_000_000) == 148933
    assert zx.PrimePartition.block_hi(2) == 1618
    assert len(part.block_primes(1)) == 5
    s1 = zx.sk2(part, 1, zx.MomentMode.exact)
    assert math.isclose(s1.value, 0.44522393413002803, rel_tol=1e-12)
    assert zx.sk2(part, 1, zx.MomentMode.pnt).value > s1.value


def test_walk_partial_sums(part):
    w = zx.partial_sums(77.5, 0.25, 0, 1, part, zx.WalkConvention.from_two)
    assert len(w.values) == 2
    assert all(math.isfinite(v) for v in w.values)
    assert w.convention == zx.WalkConvention.from_two


def test_euler_product_identity(part):
    part16 = zx.PrimePartition.build(16)
    r = zx.smoothed_euler_product(200.0, 0.0, math.e ** math.e, part16,
                                  panels_per_unit=2, window_cap=40.0,
                                  n_threads=2)
    assert abs(r.value - (0.99414328538884711 - 9.2348617538566321e-05j)) < 1e-9
    assert r.abs_err < 0.05


def test_zeta_scan():
    step = 2 * math.pi / (8 * math.log(100.0))
    zm = zx.max_log_abs_zeta(100.0, 0.5, step, 20)
    assert math.isclose(zm.h_star, 0.050647800240757462, rel_tol=1e-9)
    assert math.isclose(zm.max_log_abs, 0.99263182244293691, rel_tol=1e-9)


def test_ballot_corridor():
    assert math.isclose(zx.bridge_stay_positive_exact(1.0, 1.0, 2.0),
                        0.63212055882855767, rel_tol=1e-15)
    spec = zx.BridgeSpec.flat(100, 2.0, 2.0, 0.0, math.inf)
    assert spec.sigma_total() == 100.0
    ce = zx.walk_corridor_mc(spec, 11, 100000, n_threads=2)
    assert math.isclose(ce.est.value, 0.076270000000000004, rel_tol=1e-12)
    ref = zx.bridge_stay_positive_exact(2.0, 2.0, 100.0)
    assert abs(ce.est.value - ref) < 4 * ce.est.se


def test_barrier_pipeline(part):
    cfg = zx.make_walk_config(zx.Convention.left_tail, 6, 0.0)
    assert cfg.n0 == 0 and cfg.nL == 6.0
    spec = zx.barrier_values(cfg)
    assert spec.generator == "left-tail"
    fs = zx.to_field_spec(cfg, part, zx.MomentMode.pnt, grid_max=64)
    assert fs.grid_points == 64
    seeds = [zx.derive_seed(9, g) for g in range(2)]
    rep = zx.moment_report(cfg, spec, fs, 200, seeds, n_threads=2)
    assert 0.0 <= rep.pz_lower <= 1.0
    assert len(rep.per_seed) == 2
    f = zx.sample_field(seeds[0], fs, 0)
    assert zx.good_set_count(f, spec, 0.0) <= fs.grid_points
    maxima = zx.field_max_replicas(5, fs, 50, n_threads=2)
    assert len(maxima) == 50
    assert all(math.isfinite(v) for v in maxima)


def test_tail_fit_synthetic():
    samples = [zx.synthetic_tail_sample(5, i) for i in range(20000)]
    tr = zx.tail_statistics(samples, math.inf, [1.0, 1.5, 2.0, 2.5, 3.0])
    assert not tr.degenerate
    assert -2.5 < tr.fit.slope < -1.5
    assert tr.n_samples == 20000


def test_indicator_sandwich():
    params = zx.make_params(3.0, 3.0, nu=8)
    plus = zx.build_smoothed_indicator(params, zx.IndicatorSign.plus)
    assert math.isclose(zx.indicator_value(plus, 1.0 / 6.0),
                        0.99573433015304902, rel_tol=1e-9)
    assert zx.fourier_g(plus, 1e9) == 0
    cert = zx.certify_sandwich(params, [4, 8])
    assert cert.item1 and cert.item2 and cert.item3 and cert.item4 and cert.item5
    assert cert.order_violation == 0.0
    assert list(cert.nus) == [4, 8]
    tr = zx.truncate_to_polynomial(plus, 8, -0.25, 0.25)
    mid = zx.truncation_poly_eval(tr, 0.1)
    assert abs(mid - zx.indicator_value(plus, 0.1)) <= tr.sup_gap + 1e-12
