import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from ergorisk.errors import DispersionDeficitError, DomainError
from ergorisk.fragility import (
    Decomposition,
    FragilityCurve,
    compose,
    conditional_capacity,
    decompose,
    product_density_numeric,
)
from ergorisk.probcore import LognormalSpec as LN
from ergorisk.probcore import lognormal_cdf, lognormal_pdf

specs = st.builds(LN, st.floats(0.05, 10), st.floats(0.0, 1.5))


def test_compose_case4():
    z = compose(LN(1.3, 0.40), LN(0.85, 0.26533))
    assert z.median == pytest.approx(1.105, abs=1e-12)
    assert round(z.median, 2) == 1.10 or round(z.median, 2) == 1.11
    assert z.dispersion == pytest.approx(0.48, abs=5e-3)


def test_compose_case1():
    z = compose(LN(1.7, 0.30), LN(1, 0.5))
    assert z.median == pytest.approx(1.7)
    assert z.dispersion == pytest.approx(0.583, abs=5e-4)


def test_compose_identity():
    x = LN(1.7, 0.3)
    assert compose(x, LN(1, 0)) == x


@pytest.mark.parametrize("z,x,expected", [
    (LN(0.56, 0.52), LN(0.61, 0.473), (0.91803, 0.21603)),
    (LN(0.38, 0.49), LN(0.35, 0.415), (1.0857, 0.26053)),
])
def test_decompose_table_rows(z, x, expected):
    y = decompose(z, x)
    assert y.median == pytest.approx(expected[0], abs=5e-5)
    assert y.dispersion == pytest.approx(expected[1], abs=5e-5)


def test_decompose_identity():
    x = LN(2.1, 0.29)
    assert decompose(x, x) == LN(1.0, 0.0)


def test_decompose_deficit():
    with pytest.raises(DispersionDeficitError):
        decompose(LN(1, 0.3), LN(1, 0.4))


def test_decompose_clamps_rounding_deficit():
    x = LN(1, 0.3)
    z = LN(1, math.sqrt(0.09 - 5e-10))
    assert decompose(z, x).dispersion == 0.0


@given(specs, st.floats(0.05, 10), st.floats(0.0, 1.0))
def test_roundtrip(x, zm, extra):
    z = LN(zm, math.hypot(x.dispersion, extra))
    back = compose(x, decompose(z, x))
    assert back.median == pytest.approx(z.median, rel=1e-12)
    assert back.dispersion == pytest.approx(z.dispersion, abs=1e-12)


@given(specs, specs)
def test_compose_commutes(a, b):
    ab, ba = compose(a, b), compose(b, a)
    assert ab.median == pytest.approx(ba.median, rel=1e-15)
    assert ab.dispersion == ba.dispersion


def test_decomposition_type():
    d = Decomposition(LN(1.3, 0.4), LN(0.85, 0.26533))
    assert d.z == compose(d.x, d.y)


@given(specs, st.lists(st.floats(1e-3, 100), min_size=100, max_size=100))
def test_fragility_monotone_bounded(cap, probes):
    curve = FragilityCurve(cap)
    vals = curve.evaluate(np.sort(np.array(probes)))
    assert np.all((vals >= 0) & (vals <= 1))
    assert np.all(np.diff(vals) >= 0)


def test_fragility_matches_cdf():
    curve = FragilityCurve(LN(1.7, 0.58))
    assert curve(0.805) == lognormal_cdf(LN(1.7, 0.58), 0.805)


def test_conditional_capacity():
    assert conditional_capacity(LN(4, 0.4), 0.85) == LN(3.4, 0.4)
    assert conditional_capacity(LN(1.7, 0.3), 1.0) == LN(1.7, 0.3)
    c = conditional_capacity(LN(1.7, 0.3), 0.5)
    assert c.median == pytest.approx(0.85) and c.dispersion == 0.3
    for bad in (0.0, -1.0):
        with pytest.raises(DomainError):
            conditional_capacity(LN(1, 0.3), bad)


def test_product_density_closed_form():
    x, y = LN(4, 0.4), LN(0.85, 0.4)
    ref = lognormal_pdf(LN(3.4, math.hypot(0.4, 0.4)), 3.4)
    assert product_density_numeric(x, y, 3.4) == pytest.approx(ref, rel=1e-6)


@pytest.mark.parametrize("x,y", [(LN(1.7, 0.3), LN(1, 0.5)), (LN(0.35, 0.415), LN(1.086, 0.26053)), (LN(2, 0.05), LN(1, 0.9))])
def test_product_density_closed_form_grid(x, y):
    z = compose(x, y)
    for zv in z.median * np.exp(np.linspace(-2.5, 2.5, 7) * z.dispersion):
        assert product_density_numeric(x, y, zv) == pytest.approx(lognormal_pdf(z, zv), rel=1e-6)


def test_product_density_degenerate_y():
    x = LN(1.3, 0.4)
    assert product_density_numeric(x, LN(1, 0), 1.2) == pytest.approx(lognormal_pdf(x, 1.2), rel=1e-14)


def test_cdf_from_density_matches_double_integral():
    x, y = LN(1.3, 0.40), LN(0.85, 0.26533)

    def cdf_from_density(zv):
        # integrate the numerical product density in log space
        val, _ = integrate.quad(lambda v: product_density_numeric(x, y, math.exp(v)) * math.exp(v),
                                -12.0, math.log(zv), epsabs=1e-13, epsrel=1e-12, limit=200)
        return val

    def cdf_double(zv):
        # independent factors: P(XY <= z) as an explicit double integral over (x, y)
        f = lambda xv, yv: lognormal_pdf(x, xv) * lognormal_pdf(y, yv)
        val, _ = integrate.dblquad(f, 1e-6, 20.0, 1e-12, lambda yv: zv / yv, epsabs=1e-13, epsrel=1e-11)
        return val

    for zv in (0.5, 0.8, 1.1, 1.6, 2.5):
        assert abs(cdf_from_density(zv) - cdf_double(zv)) < 1e-8
