"""Acceptance gate: one test per release criterion, one verdict line each
under ``pytest -v``.

Every numeric tolerance here is frozen.  Two criteria are currently red on
purpose (see notes inside): the measured system disagrees with its linear
small-noise model by more than the stated tolerance at the larger decay
rates, and the 2-D zero-decay settling rate is slower than the stated
factor.  The tests report the measured values rather than hiding them.
"""

import math
import time

import numpy as np
import pytest

from exdyn import (
    DistributionSpec,
    Domain,
    ModelConfig,
    boundary_params,
    boundary_variance_curve,
    centroidal_deviation,
    fixed_point,
    limit_total_weight,
    linearization,
    mean_map,
    parse_config,
    run_trajectory,
    simulate_ar1,
    stationary_autocovariance,
    substream,
    theorem_suite,
    variance_of_Y,
    weight_bound,
)
from exdyn.cli import main
from exdyn.rng import GEOMETRY_STREAM

UNIT = Domain(np.array([0.0]), np.array([1.0]))


def pair_config(decay_rate, seed, means=(0.25, 0.75), weights=(1.0, 1.0)):
    return ModelConfig(k=2, decay_rate=decay_rate, domain=UNIT,
                       dist=DistributionSpec.uniform(),
                       init_means=np.array([[means[0]], [means[1]]]),
                       init_weights=np.array(weights, dtype=float), seed=seed)


def test_criterion_1_closed_form_identities():
    t0 = time.perf_counter()
    for lam in np.geomspace(1e-3, 3.0, 20):
        K, sigma = boundary_params(lam)
        J, H, Hsqrt = linearization(lam)
        assert abs(K - (J[0, 0] + J[0, 1])) < 1e-10
        assert abs(sigma - math.sqrt(H[0, 0] / 2.0)) < 1e-10
        assert np.max(np.abs(Hsqrt @ Hsqrt - H)) < 1e-10
        assert np.max(np.abs(np.linalg.eigvals(J))) < 1.0
    elapsed = time.perf_counter() - t0
    print(f"criterion 1: identities hold at 1e-10 over 20 rates, {elapsed:.3f}s")
    assert elapsed < 1.0


def test_criterion_2_fixed_point_quadrature():
    t0 = time.perf_counter()
    for lam in (0.01, 0.1, 1.0):
        z = fixed_point(lam)
        drift = np.max(np.abs(mean_map(z, lam) - z))
        print(f"criterion 2 [decay {lam}]: max quadrature drift {drift:.3e}")
        assert drift <= 1e-6
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0


def test_criterion_3_equilibrium_variance_matches_closed_form():
    # frozen seed 20260823, registered before the run.  KNOWN RED at decay
    # 0.05 and 0.1: the measured equilibrium variance sits about 1.1*decay
    # above the small-noise value (checked against the closed form with
    # independent ensembles; the discrepancy is real curvature, not noise),
    # so the 5% / 3 SE budget only holds at 0.01.  Kept verbatim.
    curve = boundary_variance_curve([0.01, 0.05, 0.1], [math.inf],
                                    replicas=10_000, master_seed=20260823)
    failures = []
    for est in curve:
        pred = variance_of_Y(est.decay_rate, math.inf)
        z = abs(est.variance - pred) / est.var_stderr
        rel = abs(est.variance - pred) / pred
        ok = z <= 3.0 and rel < 0.05
        print(f"criterion 3 [decay {est.decay_rate}]: var {est.variance:.6e} "
              f"vs {pred:.6e}, {z:.2f} SE, rel {rel:.2%}"
              f" -> {'ok' if ok else 'FAIL'}")
        if not ok:
            failures.append((est.decay_rate, round(z, 2), f"{rel:.2%}"))
    assert not failures, f"equilibrium variance off the closed form: {failures}"


def test_criterion_4_variance_curve_is_nondecreasing():
    # frozen seed 20260825
    curve = boundary_variance_curve([0.05], [100, 1000, 10_000, math.inf],
                                    replicas=10_000, master_seed=20260825)
    curve = sorted(curve, key=lambda e: e.n_steps)
    for a, b in zip(curve, curve[1:]):
        slack = math.hypot(a.var_stderr, b.var_stderr)
        print(f"criterion 4: var({a.n_steps}) {a.variance:.6e} -> "
              f"var({b.n_steps}) {b.variance:.6e} (1 SE slack {slack:.2e})")
        assert b.variance >= a.variance - slack


def test_criterion_5_longrun_property_suite():
    spec = parse_config("preset = theorem-suite\n")
    t0 = time.perf_counter()
    results = theorem_suite(spec.model, n_steps=spec.n_steps,
                            window=spec.window,
                            check_stride=spec.check_stride,
                            negative_control=spec.negative_control)
    elapsed = time.perf_counter() - t0
    for rep, expected in results:
        print(f"criterion 5: {rep.name} passed={rep.passed} "
              f"expected={expected}")
        assert rep.passed == expected
    print(f"criterion 5: suite ran in {elapsed:.1f}s")
    assert elapsed < 60.0


def test_criterion_6_zero_decay_centroidal_limit():
    # 1-D clause passes cleanly.  2-D clause: KNOWN RED.  With zero decay
    # the deviation is fluctuation-dominated and shrinks like 1/sqrt(n), so
    # one decade in n buys about sqrt(10) = 3.16x, not 4x; over 24 seeds the
    # median measured ratio is 2.1.  Frozen on the canned 2-D seed (101).
    cfg = pair_config(0.0, seed=606, means=(0.3, 0.8))
    rec = run_trajectory(cfg, 1_000_000, stride=1_000_000)
    final = rec.means[-1]
    off = np.abs(final[:, 0] - [0.25, 0.75])
    dev1 = centroidal_deviation(final, UNIT, 100_000,
                                substream(606, GEOMETRY_STREAM, 0))
    print(f"criterion 6 [1-D]: offsets {off[0]:.4f}, {off[1]:.4f}; "
          f"deviation {dev1:.5f}")
    assert np.all(off < 0.02) and dev1 < 0.02

    spec = parse_config("preset = fig1\n", overrides={"lambda": "0.0"})
    rec = run_trajectory(spec.model, 100_000, stride=10_000)
    dom = spec.model.domain
    dev_early = centroidal_deviation(rec.means[1], dom, 2_000_000,
                                     substream(101, GEOMETRY_STREAM, 0))
    dev_late = centroidal_deviation(rec.means[-1], dom, 2_000_000,
                                    substream(101, GEOMETRY_STREAM, 1))
    ratio = dev_early / dev_late
    print(f"criterion 6 [2-D]: deviation {dev_early:.4f} at 1e4 -> "
          f"{dev_late:.4f} at 1e5, ratio {ratio:.2f} (need >= 4)")
    assert ratio >= 4.0, (
        f"2-D deviation fell {ratio:.2f}x from n=1e4 to n=1e5, not 4x")


def test_criterion_7_weight_bookkeeping():
    cfg = pair_config(0.05, seed=707)
    rec = run_trajectory(cfg, 100_000, stride=1)
    W = rec.weights.sum(axis=1)
    decay = math.exp(-0.05)
    rel = np.max(np.abs(W[1:] - (W[:-1] * decay + 1.0)) / W[1:])
    gamma = weight_bound(cfg.init_weights, 0.05)
    W_lim = limit_total_weight(0.05)
    n = np.arange(301)
    slope = np.polyfit(n, np.log(np.abs(W[:301] - W_lim)), 1)[0]
    print(f"criterion 7: recursion residual {rel:.2e}, max weight "
          f"{W.max():.6f} <= {gamma:.6f}, decay-fit slope {slope:.6f}")
    assert rel <= 1e-12
    assert W.max() <= gamma * (1.0 + 1e-12)
    assert abs(slope + 0.05) <= 0.01 * 0.05


def test_criterion_8_ar1_self_consistency():
    y = simulate_ar1(0.05, 10_000_000, substream(808))
    tail = y[100_000:]
    dev = tail - tail.mean()
    n_batches = 500

    def batch_estimate(series):
        usable = series[:series.size - series.size % n_batches]
        means = usable.reshape(n_batches, -1).mean(axis=1)
        return usable.mean(), means.std(ddof=1) / math.sqrt(n_batches)

    var_hat, var_se = batch_estimate(dev * dev)
    cov_hat, cov_se = batch_estimate(dev[:-1] * dev[1:])
    var_true = variance_of_Y(0.05, math.inf)
    cov_true = stationary_autocovariance(0.05, 1)
    z_var = abs(var_hat - var_true) / var_se
    z_cov = abs(cov_hat - cov_true) / cov_se
    print(f"criterion 8: variance {var_hat:.6e} vs {var_true:.6e} "
          f"({z_var:.2f} SE); lag-1 {cov_hat:.6e} vs {cov_true:.6e} "
          f"({z_cov:.2f} SE)")
    assert z_var <= 3.0
    assert z_cov <= 3.0


# each preset run at a scale that keeps the whole gate under a few minutes;
# determinism is about bytes, not statistics, so the reduction is harmless
_PRESET_RUNS = [
    ("snapshot", "preset = fig1\n"),
    ("trajectory", "preset = fig3-left\n"),
    ("trajectory", "preset = fig3-right\n"),
    ("variance-curve", "preset = fig4\nlambda_grid = 0.02 0.1\nreplicas = 500\n"),
    ("properties", "preset = theorem-suite\nn_steps = 20000\n"),
]


def test_criterion_9_reruns_are_byte_identical(tmp_path):
    for i, (sub, text) in enumerate(_PRESET_RUNS):
        cfg = tmp_path / f"p{i}.cfg"
        cfg.write_text(text)
        dirs = [tmp_path / f"p{i}{tag}" for tag in "ab"]
        for d in dirs:
            assert main([sub, "--config", str(cfg), "--out", str(d)]) == 0
        names = sorted(p.name for p in dirs[0].glob("*.csv"))
        assert names
        for name in names:
            assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()
        print(f"criterion 9: {text.splitlines()[0]} -> "
              f"{len(names)} file(s) byte-identical")

    cfg = tmp_path / "seeded.cfg"
    cfg.write_text("preset = fig3-left\n")
    outs = []
    for seed in ("31001", "31002"):
        d = tmp_path / f"s{seed}"
        assert main(["trajectory", "--config", str(cfg), "--seed", seed,
                     "--out", str(d)]) == 0
        outs.append((d / "trajectory.csv").read_bytes())
    assert outs[0] != outs[1]
