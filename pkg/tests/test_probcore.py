import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from ergorisk.errors import DomainError
from ergorisk.probcore import (
    LognormalSpec,
    lognormal_cdf,
    lognormal_pdf,
    lognormal_quantile,
    lognormal_sf,
    std_normal_cdf,
    std_normal_pdf,
)

# 40-digit mpmath references, computed once and frozen
PHI_1_0651 = 0.85658466035882178
PHI_CASE1_MARGIN = 0.098722645976838296  # Phi(ln(0.805/1.7)/0.58)
PDF_1 = 0.24197072451914334


def test_cdf_at_zero():
    assert std_normal_cdf(0.0) == 0.5


def test_cdf_reference_value():
    assert std_normal_cdf(1.0651) == pytest.approx(PHI_1_0651, abs=1e-15)
    # value as stated in the requirements, at its tolerance
    assert abs(std_normal_cdf(1.0651) - 0.856576) < 1e-5


def test_cdf_saturates():
    v = std_normal_cdf(-40.0)
    assert 0.0 <= v < 1e-300


@given(st.floats(-8, 8))
def test_cdf_symmetry(u):
    assert abs(std_normal_cdf(u) + std_normal_cdf(-u) - 1.0) <= 1e-14


@given(st.floats(-10, 10), st.floats(0, 5))
def test_cdf_monotone(u, d):
    assert std_normal_cdf(u + d) >= std_normal_cdf(u)


def test_pdf_values():
    assert std_normal_pdf(0.0) == pytest.approx(0.3989422804, abs=1e-10)
    assert std_normal_pdf(1.0) == pytest.approx(PDF_1, abs=1e-15)
    assert std_normal_pdf(1.7) == std_normal_pdf(-1.7)


def test_pdf_integrates_to_one():
    val, _ = integrate.quad(std_normal_pdf, -10, 10, epsabs=1e-13)
    assert abs(val - 1.0) < 1e-10


def test_lognormal_cdf_examples():
    assert lognormal_cdf(LognormalSpec(2, 0.4), 2.0) == pytest.approx(0.5, abs=1e-15)
    assert lognormal_cdf(LognormalSpec(1.7, 0.58), 0.805) == pytest.approx(PHI_CASE1_MARGIN, rel=1e-12)
    assert abs(lognormal_cdf(LognormalSpec(1.7, 0.58), 0.805) - 0.0987) < 1e-3


def test_degenerate_step():
    spec = LognormalSpec(1.5, 0.0)
    assert lognormal_cdf(spec, 1.49) == 0.0
    assert lognormal_cdf(spec, 1.5) == 1.0
    assert lognormal_cdf(spec, 3.0) == 1.0


def test_domain_errors():
    spec = LognormalSpec(1, 0.3)
    with pytest.raises(DomainError):
        lognormal_cdf(spec, 0.0)
    with pytest.raises(DomainError):
        lognormal_cdf(spec, -1.0)
    for p in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            lognormal_quantile(spec, p)
    with pytest.raises(DomainError):
        LognormalSpec(0.0, 0.3)
    with pytest.raises(DomainError):
        LognormalSpec(1.0, -0.1)


def test_quantile_examples():
    spec = LognormalSpec(2.3, 0.45)
    assert lognormal_quantile(spec, 0.5) == pytest.approx(2.3, rel=1e-15)
    for p in (0.01, 0.5, 0.99):
        assert lognormal_cdf(spec, lognormal_quantile(spec, p)) == pytest.approx(p, abs=1e-12)


@given(st.floats(0.05, 20), st.floats(0.01, 2), st.floats(1e-6, 1 - 1e-6))
def test_quantile_roundtrip_log_space(median, disp, p):
    spec = LognormalSpec(median, disp)
    x = lognormal_quantile(spec, p)
    # invert through the cdf, compare in log space
    back = lognormal_quantile(spec, lognormal_cdf(spec, x))
    assert abs(math.log(back) - math.log(x)) < 1e-10 * max(1.0, abs(math.log(x))) + 1e-9 * disp


def test_pdf_integrates_to_one_lognormal():
    spec = LognormalSpec(1.3, 0.6)
    upper = lognormal_quantile(spec, 1 - 1e-12)
    # integrate in log space to resolve the peak near zero
    val, _ = integrate.quad(lambda v: lognormal_pdf(spec, math.exp(v)) * math.exp(v), -40, math.log(upper), epsabs=1e-13, limit=200)
    assert abs(val - 1.0) < 1e-8


@pytest.mark.parametrize("spec", [LognormalSpec(1.7, 0.3), LognormalSpec(0.28, 0.5), LognormalSpec(4, 0.4)])
def test_pdf_is_cdf_derivative(spec):
    xs = spec.median * np.exp(np.linspace(-3, 3, 10) * spec.dispersion)
    for x in xs:
        h = 1e-5 * x
        fd = (lognormal_cdf(spec, x + h) - lognormal_cdf(spec, x - h)) / (2 * h)
        assert fd == pytest.approx(lognormal_pdf(spec, x), rel=1e-6)


def test_vectorised_shapes():
    spec = LognormalSpec(1, 0.5)
    out = lognormal_cdf(spec, np.array([0.5, 1.0, 2.0]))
    assert out.shape == (3,)
    assert np.all(np.diff(out) > 0)
    assert isinstance(lognormal_cdf(spec, 1.0), float)


@given(st.floats(0.05, 20), st.floats(0.01, 2), st.floats(1e-3, 1e3))
def test_sf_complements_cdf(median, disp, x):
    spec = LognormalSpec(median, disp)
    assert lognormal_sf(spec, x) + lognormal_cdf(spec, x) == pytest.approx(1.0, abs=1e-15)


def test_sf_upper_tail():
    # 1 - cdf would round to zero here
    spec = LognormalSpec(1.0, 0.5)
    assert lognormal_sf(spec, math.exp(0.5 * 10)) == pytest.approx(7.61985302416e-24, rel=1e-10)


def test_frozen_constants_against_mpmath():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 40
    assert float(mpmath.ncdf(1.0651)) == pytest.approx(PHI_1_0651, rel=1e-15)
    assert float(mpmath.ncdf(mpmath.log(mpmath.mpf("0.805") / mpmath.mpf("1.7")) / mpmath.mpf("0.58"))) == pytest.approx(
        PHI_CASE1_MARGIN, rel=1e-14)
    assert float(mpmath.npdf(1)) == pytest.approx(PDF_1, rel=1e-15)
