"""Acceptance criteria, one test per criterion, each recorded as PASS/FAIL.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines are
printed at the end of the session.
"""

import itertools
import math
import random
import time
from fractions import Fraction as F

import pytest

from acceptance_log import criterion
from oracle import brute_force_groups
from shepwm import model
from shepwm.algebra import UniPoly, isolate_real_roots, refine_root
from shepwm.harmonics import fourier_b, numeric_b, sweep, synthesize_waveform, trajectory_jumps
from shepwm.model import (
    build_elementary_system, build_power_sum_system, harmonic_orders, sign_pattern_ok,
)
from shepwm.parametric import load_cache, same_rur, save_cache, specialize
from shepwm.rur import rur_fixed
from shepwm.solve import order_check, recover_s, solve, vieta_roots
from test_model import test_elementary_system_n3_matches_printed as _check_elementary
from test_model import test_power_sum_system_n3_matches_printed as _check_power_sum
from test_parametric import CHI_3, G_ONE_3, G_S2_3

HALF = F(1, 2)
WORKED_DEG = (50.06528, 62.26686, 71.12892)
S_TRIPLES = [
    (0.5, -0.9630774604, -0.4950353924),
    (0.5, -0.4738830663, 0.002366801877),
    (0.5, -0.2416109013, -0.09661712410),
]
G = {
    "G1": (21.218, 26.939, 36.526, 46.817, 53.842),
    "G2": (10.055, 21.255, 33.889, 66.911, 74.966),
    "G3": (17.534, 49.299, 54.967, 79.869, 87.110),
}
SWEEP_PROBES = {F(40, 100): 2, F(85, 100): 2, F(60, 100): 3, F(75, 100): 3, F(50, 100): 1}


@pytest.fixture(scope="module")
def n5(build):
    return build(5)


@criterion(1, "system construction, N=3 exact")
def test_criterion_1_system_construction():
    model.build_elementary_system.cache_clear()
    model._power_sums.cache_clear()
    model.cos_multiple_angle.cache_clear()
    t0 = time.perf_counter()
    build_power_sum_system(3)
    build_elementary_system(3)
    dt = time.perf_counter() - t0
    _check_power_sum()
    _check_elementary()
    assert dt < 1.0
    return f"{dt * 1000:.1f} ms"


@criterion(2, "parametric RUR N=3 equals printed chi, g(1), g(s2)")
def test_criterion_2_parametric_exact(build):
    p, dt = build(3)
    assert p.t.coefficients == (1, 0)
    assert p.chi == CHI_3
    assert p.g_one == G_ONE_3
    assert p.g_coord["s2"] == G_S2_3
    assert dt < 60
    return f"built in {dt:.2f} s from {len(p.nodes)} nodes"


@criterion(3, "specialization at m=1/2 exact")
def test_criterion_3_specialization(build):
    r = specialize(build(3)[0], HALF)
    assert r.chi == UniPoly((F(247, 2240), F(45, 56), F(47, 28), 1))
    assert r.g_one == UniPoly((F(45, 56), F(47, 14), 3))
    assert r.coordinate("s2") == UniPoly((F(-741, 2240), F(-45, 28), F(-47, 28)))
    assert r.coordinate("s3") == UniPoly((F(-449, 4480), F(-549, 1120), F(-33, 56)))


@criterion(4, "worked example N=3, m=1/2")
def test_criterion_4_worked_example(build):
    p = build(3)[0]
    rep = solve(p, HALF)
    assert len(rep.groups) == 1
    err = max(abs(a - b) for a, b in zip(rep.groups[0].angles_deg, WORKED_DEG))
    assert err < 1e-3
    r = specialize(p, HALF)
    triples = [recover_s(r, refine_root(r.chi_bar, iv, F(1, 10**14), squarefree=True))
               for iv in isolate_real_roots(r.chi_bar, squarefree=True)]
    assert len(triples) == 3
    s_err = max(abs(float(a) - b) for s, want in zip(triples, S_TRIPLES) for a, b in zip(s, want))
    assert s_err < 1e-8
    return f"angle err {err:.1e} deg, s err {s_err:.1e}"


def _match_named(groups, table, tol):
    """Bijection between computed groups and the named reference groups."""
    if len(groups) != len(table):
        return None
    names = list(table)
    for perm in itertools.permutations(range(len(groups))):
        errs = [max(abs(a - b) for a, b in zip(groups[i].angles_deg, table[name]))
                for i, name in zip(perm, names)]
        if max(errs) < tol:
            return max(errs)
    return None


@criterion(5, "N=5 headline groups at m=3/4 and solve time")
def test_criterion_5_headline(n5):
    p, build_time = n5
    rep = solve(p, F(3, 4))
    assert len(rep.groups) == 3
    err = _match_named(rep.groups, G, 0.01)
    assert err is not None, [g.angles_deg for g in rep.groups]
    rng = random.Random(500)
    ms = [F(rng.randint(1, 9999), 10000) for _ in range(100)]
    t0 = time.perf_counter()
    for m0 in ms:
        solve(p, m0)
    avg = (time.perf_counter() - t0) / len(ms)
    assert avg <= 0.1
    return f"max err {err:.4f} deg; build {build_time:.0f} s; solve avg {avg * 1000:.1f} ms"


def _spectral_check(groups, m0, orders):
    worst_b = worst_num = 0.0
    for g in groups:
        a = list(g.angles_rad)
        for k in orders:
            worst_b = max(worst_b, abs(fourier_b(a, k)))
        worst_b = max(worst_b, abs(fourier_b(a, 1) - 4 * float(m0) / math.pi))
        theta, u = synthesize_waveform(a, 2**16)
        for k in sorted(set((1,) + tuple(orders) + tuple(range(1, 26, 2)))):
            worst_num = max(worst_num, abs(numeric_b(theta, u, k) - fourier_b(a, k)))
    return worst_b, worst_num


@criterion(6, "spectral soundness of computed groups")
def test_criterion_6_spectral(build, n5):
    b3, num3 = _spectral_check(solve(build(3)[0], HALF).groups, HALF, (5, 7))
    b5, num5 = _spectral_check(solve(n5[0], F(3, 4)).groups, F(3, 4), (5, 7, 11, 13))
    worst_b, worst_num = max(b3, b5), max(num3, num5)
    assert worst_b < 1e-8
    assert worst_num < 1e-6
    return f"max |b_k| residual {worst_b:.1e}; quadrature gap {worst_num:.1e}"


@criterion(7, "N=5 sweep counts and trajectory continuity")
def test_criterion_7_sweep(n5):
    p = n5[0]
    res = sweep(p, F(3, 10), F(92, 100), F(1, 500))
    counts = {m0: res.counts.get(m0) for m0 in SWEEP_PROBES}
    assert counts == SWEEP_PROBES, counts
    assert len(solve(p, F(93, 100)).groups) == 0
    jumps = trajectory_jumps(res)
    worst = max(jumps, key=lambda j: j[2])
    over = [(float(a), float(b), round(j, 2)) for a, b, j in jumps if j >= 2]
    assert worst[2] < 2, f"probe counts ok; {len(over)} step(s) >= 2 deg: {over}"
    return f"probe counts ok; max step {worst[2]:.2f} deg"


def _alternating_vector(rng, n):
    while True:
        mags = sorted((F(rng.randint(1, 10**6), 10**6) for _ in range(n)), reverse=True)
        if all(a > b for a, b in zip(mags, mags[1:])):
            return [v if i % 2 == 0 else -v for i, v in enumerate(mags)]


@criterion(8, "sign-filter property suite and filter soundness")
def test_criterion_8_sign_filter(build):
    rng = random.Random(8)
    for _ in range(1000):
        n = rng.randint(1, 10)
        assert sign_pattern_ok(model.elementary_symmetric(_alternating_vector(rng, n)))
    rejected = 0
    for n in (2, 3, 4, 5):
        p = build(n)[0]
        for m0 in [F(rng.randint(1, 999), 1000) for _ in range(10)]:
            r = specialize(p, m0)
            for iv in isolate_real_roots(r.chi_bar, squarefree=True):
                s = recover_s(r, refine_root(r.chi_bar, iv, F(1, 10**12), squarefree=True))
                if sign_pattern_ok(s):
                    continue
                rejected += 1
                roots = vieta_roots([F(float(v)) for v in s])
                assert roots is None or order_check(roots) is None, (n, m0, s)
    return f"1000 vectors; {rejected} rejected s-vectors checked"


@criterion(9, "completeness against brute-force oracle, N=3")
def test_criterion_9_oracle(build):
    p = build(3)[0]
    orders = harmonic_orders(3).orders
    rng = random.Random(9)
    worst, total = 0.0, 0
    for _ in range(20):
        m0 = F(rng.randint(50, 900), 1000)
        ours = [g.angles_rad for g in solve(p, m0).groups]
        ref = brute_force_groups(float(m0), orders)
        assert len(ours) == len(ref), (m0, ours, ref)
        for a, b in zip(ours, ref):
            worst = max(worst, max(abs(x - y) for x, y in zip(a, b)))
        total += len(ours)
    assert worst < 1e-5
    return f"{total} groups over 20 m; max gap {worst:.1e} rad"


@criterion(10, "parametric consistency N=2..5 and cache round trip")
def test_criterion_10_consistency(build, tmp_path):
    rng = random.Random(10)
    for n in (2, 3, 4, 5):
        p = build(n)[0]
        es = build_elementary_system(n)
        fresh = [m0 for m0 in (F(rng.randint(1, 9999), 10007) for _ in range(40)) if m0 not in p.nodes][:10]
        assert len(fresh) == 10
        for m0 in fresh:
            assert same_rur(specialize(p, m0), rur_fixed(es.reduced, m0, coords=es.coords, t=p.t)), (n, m0)
        path = tmp_path / f"rur{n}.json"
        save_cache(p, path)
        q = load_cache(path, n)
        assert q == p
        save_cache(q, tmp_path / f"again{n}.json")
        assert path.read_bytes() == (tmp_path / f"again{n}.json").read_bytes()
    return "40 specializations exact; 4 caches bit-identical"


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
