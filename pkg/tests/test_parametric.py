import json
import random
from fractions import Fraction as F

import pytest

from shepwm.algebra import Interval, RationalFunction, UniPoly
from shepwm.model import build_elementary_system
from shepwm.parametric import (
    BadParameterError, CacheError, InterpolationError, ParametricRUR, _interpolate_all,
    farey_points, from_json, interpolate_coefficient, load_cache, same_rur, sample_points,
    save_cache, specialize, to_json,
)
from shepwm.rur import rur_fixed


def R(num, den=(1,)):
    # coefficients given highest degree first, as printed
    return RationalFunction.from_coeffs(list(reversed(num)), list(reversed(den)))


DEN_A = (35840, 0, -44800, 0, 11200)
DEN_B = (1792, 0, -2240, 0, 560)
DEN_C = (448, 0, -560, 0, 140)
CHI_3 = (
    R((-3072, 0, 15360, 0, -28160, 0, 24080, 0, -9800, 0, 1575), DEN_A),
    R((1024, 0, -3904, 0, 5152, 0, -2800, 0, 525), DEN_B),
    R((-576, 0, 1456, 0, -1120, 0, 245), DEN_C),
)
G_ONE_3 = (
    R((1024, 0, -3904, 0, 5152, 0, -2800, 0, 525), DEN_B),
    R((-576, 0, 1456, 0, -1120, 0, 245), (224, 0, -280, 0, 70)),
    R((3,)),
)
G_S2_3 = (
    R((9216, 0, -46080, 0, 84480, 0, -72240, 0, 29400, 0, -4725), DEN_A),
    R((-1024, 0, 3904, 0, -5152, 0, 2800, 0, -525), (896, 0, -1120, 0, 280)),
    R((576, 0, -1456, 0, 1120, 0, -245), DEN_C),
)
# third coordinate with the printed misprints corrected (m^5 and m^1 terms, sign of m^3)
G_S3_3 = (
    R((2048, 0, -13056, 0, 28160, 0, -27440, 0, 12600, 0, -2275, 0), DEN_A),
    R((-2304, 0, 12480, 0, -20160, 0, 12600, 0, -2625, 0), (8960, 0, -11200, 0, 2800)),
    R((32, 0, -140, 0, 140, 0, -35, 0), (112, 0, -140, 0, 35)),
)


@pytest.fixture(scope="module")
def p3(build):
    return build(3)[0]


def test_farey_and_samples():
    pts = list(zip(range(6), farey_points()))
    assert [x for _, x in pts] == [F(1, 2), F(1, 3), F(2, 3), F(1, 4), F(3, 4), F(1, 5)]
    s = sample_points(5, exclude={F(1, 2)})
    assert len(set(s)) == 5 and F(1, 2) not in s and all(0 < x < 1 for x in s)
    again = sample_points(5, exclude={F(1, 2), s[0]})
    assert s[0] not in again


def test_interpolate_examples():
    nodes = sample_points(14)
    assert interpolate_coefficient([(x, x * x) for x in nodes[:4]], surplus=1) == R((1, 0, 0))
    assert interpolate_coefficient([(x, F(7, 3)) for x in nodes[:5]]) == R((F(7, 3),))
    f = CHI_3[2]
    assert interpolate_coefficient([(x, f(x)) for x in nodes]) == f
    with pytest.raises(InterpolationError):
        interpolate_coefficient([(x, f(x)) for x in nodes[:8]])


def test_interpolate_rejects_duplicates():
    with pytest.raises(ValueError):
        interpolate_coefficient([(F(1, 2), 1), (F(1, 2), 2)])


def test_interpolate_random_rational_functions():
    rng = random.Random(5)
    for _ in range(10):
        num = [F(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(rng.randint(1, 8))]
        den = [F(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(rng.randint(1, 5))] + [1]
        f = RationalFunction.from_coeffs(num, den)
        nodes = [x for x in sample_points(40) if f.den(x) != 0]
        assert interpolate_coefficient([(x, f(x)) for x in nodes]) == f


def test_n3_matches_printed(p3):
    assert p3.t.coefficients == (1, 0)
    assert p3.chi == CHI_3
    assert p3.g_one == G_ONE_3
    assert p3.g_coord["s2"] == G_S2_3


def test_n3_third_coordinate_corrected(p3):
    assert p3.g_coord["s3"] == G_S3_3


def test_n3_denominator(p3):
    assert p3.chi[2].den == UniPoly((F(5, 16), 0, F(-5, 4), 0, 1), "m")


def test_specialize_half(p3):
    r = specialize(p3, F(1, 2))
    assert r.chi == UniPoly((F(247, 2240), F(45, 56), F(47, 28), 1))
    assert r.g_one == UniPoly((F(45, 56), F(47, 14), 3))
    assert r.g_coord == (UniPoly((F(-741, 2240), F(-45, 28), F(-47, 28))),
                         UniPoly((F(-449, 4480), F(-549, 1120), F(-33, 56))))


def test_specialize_quarter_matches_direct(p3):
    es = build_elementary_system(3)
    direct = rur_fixed(es.reduced, F(1, 4), coords=es.coords, t=p3.t)
    assert same_rur(specialize(p3, F(1, 4)), direct)


def test_specialize_rejects(p3):
    with pytest.raises(BadParameterError):
        specialize(p3, F(0))
    with pytest.raises(BadParameterError):
        specialize(p3, F(3, 2))
    # bad_m brackets every denominator root in (0, 1)
    den = p3.chi[0].den
    assert len(p3.bad_m) == 2
    for iv in p3.bad_m:
        assert den(iv.lo) * den(iv.hi) < 0


def test_specialize_rejects_exact_pole():
    m = UniPoly.x("m")
    one = RationalFunction.constant(1)
    pole = RationalFunction(UniPoly((1,), "m"), m - F(1, 3))
    from shepwm.rur import SeparatingElement
    p = ParametricRUR(2, SeparatingElement((1,), ("s2",)), (pole,), (one,), {"s2": (one,)},
                      (Interval(F(1, 3), F(1, 3)),))
    with pytest.raises(BadParameterError):
        specialize(p, F(1, 3))


def test_n2_solutions_satisfy_system(build):
    p2 = build(2)[0]
    es = build_elementary_system(2)
    rng = random.Random(2)
    for _ in range(10):
        m0 = F(rng.randint(1, 999), 1000)
        direct = rur_fixed(es.reduced, m0, coords=es.coords, t=p2.t)
        assert same_rur(specialize(p2, m0), direct)


def test_degree_stability(p3):
    es = build_elementary_system(3)
    extra = sample_points(5, exclude=p3.nodes, start=200)
    nodes = sorted(set(p3.nodes) | set(extra))
    rurs = [rur_fixed(es.reduced, m0, coords=es.coords, t=p3.t) for m0 in nodes]
    again = _interpolate_all(3, p3.t, rurs, nodes)
    assert again.chi == p3.chi and again.g_one == p3.g_one and again.g_coord == p3.g_coord


def test_cache_round_trip(p3, tmp_path):
    path = tmp_path / "c3.json"
    save_cache(p3, path)
    q = load_cache(path, 3)
    assert q == p3
    save_cache(q, tmp_path / "again.json")
    assert (tmp_path / "again.json").read_bytes() == path.read_bytes()
    body = json.loads(path.read_text())
    assert body["version"] == 1 and body["n"] == 3 and body["t"] == [1, 0]
    assert set(body["g_coord"]) == {"s2", "s3"}


def test_cache_errors(p3, tmp_path):
    path = tmp_path / "c3.json"
    save_cache(p3, path)
    text = path.read_text()
    (tmp_path / "trunc.json").write_text(text[: len(text) // 2])
    with pytest.raises(CacheError):
        load_cache(tmp_path / "trunc.json")
    with pytest.raises(CacheError):
        load_cache(path, 5)
    body = json.loads(text)
    body["chi"][0]["num"][0] = "1/7"
    with pytest.raises(CacheError, match="checksum"):
        from_json(body)
    body = to_json(p3)
    body["version"] = 99
    with pytest.raises(CacheError, match="version"):
        from_json(body)
