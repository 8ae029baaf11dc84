import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from qwlaws._quadrature import QuadratureError
from qwlaws.initial_state import (
    KINKS,
    DegenerateWeightError,
    InitCoin,
    SynthesisError,
    WeightSpec,
    closed_form_norm,
    erf,
    fourier_profile,
    load_tabulated,
    sqrt_sin_coefficients,
    synthesize_initial,
    weight_eval,
    weight_norm,
)

Q = math.pi / 4


def seeds(theta, sigma=0.3):
    return [
        WeightSpec.semicircle(theta),
        WeightSpec.arcsine(theta),
        WeightSpec.gaussian(theta, sigma),
        WeightSpec.uniform(theta),
    ]


def erf_series(x, dps=300):
    """erf by direct summation of its Taylor series in high precision."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        term, total, n = x, x, 0
        while True:
            n += 1
            term *= -x * x / n
            piece = term / (2 * n + 1)
            total += piece
            if abs(piece) < mpmath.mpf(10) ** (-dps + 20) and n > x * x:
                break
        return float(2 / mpmath.sqrt(mpmath.pi) * total)


@pytest.mark.parametrize("x", [0.0, 1e-8, 0.5, 0.84375, 1.25, 2.0, 3.7, 6.0, 12.5, 20.0])
def test_erf_against_series(x):
    assert erf(x) == pytest.approx(erf_series(x), abs=1e-12)


def test_erf_known_values():
    assert erf(0.0) == 0.0
    assert erf(0.5) == pytest.approx(0.5204998778, abs=1e-10)
    assert erf(30.0) == 1.0


def test_weight_eval_examples():
    assert weight_eval(WeightSpec.semicircle(Q), math.pi / 2) == pytest.approx(2.0, rel=1e-15)
    for theta in (0.3, Q, 2.0):
        assert weight_eval(WeightSpec.arcsine(theta), 0.0) == 1.0
        assert weight_eval(WeightSpec.uniform(theta), 0.0) == 0.0
    assert weight_eval(WeightSpec.unit(), 17.0) == 1.0


def test_weight_eval_is_periodic():
    k = np.linspace(-3, 3, 11)
    for w in seeds(1.0):
        np.testing.assert_allclose(weight_eval(w, k + 2 * np.pi), weight_eval(w, k), rtol=1e-13)


@pytest.mark.parametrize("theta", [Q, math.pi / 3, 2 * math.pi / 3, 4.0])
def test_weight_norm_matches_closed_forms(theta):
    for w in seeds(theta):
        assert weight_norm(w) == pytest.approx(closed_form_norm(w), rel=1e-10)


def test_weight_norm_closed_values_at_quarter_pi():
    assert weight_norm(WeightSpec.semicircle(Q)) == pytest.approx(8.885765876, rel=1e-9)
    assert weight_norm(WeightSpec.arcsine(Q)) == pytest.approx(2 * math.sqrt(2) * math.pi, rel=1e-12)
    assert weight_norm(WeightSpec.uniform(Q)) == pytest.approx(8.0, rel=1e-12)
    assert weight_norm(WeightSpec.unit()) == 2 * math.pi


@pytest.mark.parametrize("w", seeds(Q, 0.3), ids=lambda w: w.kind)
def test_weight_norm_against_adaptive_quadrature(w):
    # independent route: scipy's adaptive rule on each smooth piece
    pieces = [
        integrate.quad(lambda k: float(weight_eval(w, k)) ** 2, a, b, epsabs=1e-14, epsrel=1e-13)[0]
        for a, b in zip(KINKS[:-1], KINKS[1:])
    ]
    assert weight_norm(w) == pytest.approx(math.fsum(pieces), rel=1e-11)


def test_weight_norm_preconditions_and_failures():
    with pytest.raises(ValueError):
        weight_norm(WeightSpec.unit(), grid_size=100)
    with pytest.raises(ValueError):
        weight_norm(WeightSpec.unit(), grid_size=32)
    k = -np.pi + 2 * np.pi * np.arange(32) / 32
    with pytest.raises(DegenerateWeightError):
        weight_norm(WeightSpec.tabulated(k, np.zeros(32)))
    # sigma so narrow that 64 nodes cannot resolve it
    with pytest.raises(QuadratureError):
        weight_norm(WeightSpec.gaussian(Q, 0.002), grid_size=64)


def test_tabulated_norm_is_exact_for_linear_interpolant():
    k = -np.pi + 2 * np.pi * np.arange(24) / 24
    vals = np.cos(k) + 0.3 * np.sin(3 * k) + 1.2
    w = WeightSpec.tabulated(k, vals)
    fine = np.linspace(-np.pi, np.pi, 24 * 4000 + 1)
    interp = weight_eval(w, fine) ** 2
    assert weight_norm(w) == pytest.approx(integrate.simpson(interp, x=fine), rel=1e-9)


def test_weight_spec_validation():
    with pytest.raises(ValueError):
        WeightSpec.gaussian(Q, 0.0)
    with pytest.raises(ValueError):
        WeightSpec.semicircle(0.0)
    with pytest.raises(ValueError):
        WeightSpec("triangle", Q)
    with pytest.raises(ValueError):
        WeightSpec.tabulated(np.linspace(-np.pi, np.pi, 8, endpoint=False), np.ones(8))
    with pytest.raises(ValueError):
        WeightSpec.tabulated(np.linspace(0, 1, 16), np.ones(16))


def test_init_coin_validation():
    InitCoin(1, 0)
    with pytest.raises(ValueError):
        InitCoin(1, 1)
    c = InitCoin.normalized(3, 4j)
    assert c.alpha == pytest.approx(0.6) and c.beta == pytest.approx(0.8j)
    assert abs(InitCoin.symmetric().beta) ** 2 == pytest.approx(0.5)


def test_unit_weight_gives_localized_state():
    coin = InitCoin(0.6, 0.8j)
    state, rep = synthesize_initial(WeightSpec.unit(), coin, grid_size=256)
    assert state.origin_offset == 0 and state.width == 1
    np.testing.assert_array_equal(state.amplitudes[0], [0.6, 0.8j])
    assert rep.cutoff == 0 and rep.deficit == 0 and not rep.renormalized


def test_symmetry_of_profiles():
    x, odd = fourier_profile(WeightSpec.semicircle(Q), 1 << 12)
    mid = len(x) // 2  # x = 0
    # drop x = -N/2, which has no mirror partner on the grid
    inner = odd[1:]
    assert np.max(np.abs(odd.real)) < 1e-15
    np.testing.assert_allclose(inner, -inner[::-1], atol=1e-15)
    x, even = fourier_profile(WeightSpec.arcsine(Q), 1 << 12)
    assert np.max(np.abs(even.imag)) < 1e-15
    np.testing.assert_allclose(even[1:], even[1:][::-1], atol=1e-15)
    assert x[mid] == 0


@pytest.mark.parametrize("w", seeds(Q, 0.25 * math.cos(Q)), ids=lambda w: w.kind)
def test_synthesis_mass_and_deficit(w):
    state, rep = synthesize_initial(w, InitCoin.symmetric())
    assert math.fsum(np.abs(state.amplitudes.ravel()) ** 2) == pytest.approx(1, abs=1e-14)
    assert 0 <= rep.deficit < 1e-10
    assert state.origin_offset == -rep.cutoff
    assert state.width == 2 * rep.cutoff + 1
    assert state.deficit == rep.deficit


def full_grid_transform(phi):
    """Σ_x φ(x) e^{-i k_j x} on k_j = -π + 2πj/N, for φ on x = -N/2 .. N/2-1."""
    n = len(phi)
    x = np.arange(-n // 2, n // 2)
    signed = phi * np.where(x % 2 == 0, 1.0, -1.0)
    return np.fft.fft(np.fft.ifftshift(signed))


@pytest.mark.parametrize("w", seeds(Q, 0.25 * math.cos(Q)), ids=lambda w: w.kind)
def test_round_trip_recovers_normalized_weight(w):
    # the plain trapezoid profile is the exact discrete inverse of the samples
    n = 1 << 14
    _, phi = fourier_profile(w, n, cusp_correction=False)
    k = -np.pi + 2 * np.pi * np.arange(n) / n
    target = math.sqrt(2 * math.pi / weight_norm(w)) * weight_eval(w, k)
    np.testing.assert_allclose(full_grid_transform(phi), target, atol=1e-8)


@pytest.mark.parametrize("w", seeds(Q)[:2], ids=lambda w: w.kind)
def test_round_trip_of_synthesized_state_for_smooth_seeds(w):
    n = 1 << 14
    _, phi = fourier_profile(w, n)
    k = -np.pi + 2 * np.pi * np.arange(n) / n
    target = math.sqrt(2 * math.pi / weight_norm(w)) * weight_eval(w, k)
    np.testing.assert_allclose(full_grid_transform(phi), target, atol=1e-12)


def test_sqrt_sin_coefficients_against_quadrature():
    for x in (0, 1, 2, 6, 31, 64):
        ref, _ = integrate.quad(
            lambda k: math.sqrt(math.sin(k)), 0, math.pi, weight="cos", wvar=x, epsabs=1e-13
        )
        # √|sin k| is even with period π: the full-period integral is (1 + (-1)^x)·ref
        assert sqrt_sin_coefficients([x])[0] == pytest.approx((1 + (-1) ** x) * ref, abs=1e-12)


@pytest.mark.parametrize("w", seeds(Q, 0.25 * math.cos(Q))[2:], ids=lambda w: w.kind)
def test_cusp_profile_against_fourier_quadrature(w):
    # independent route: QUADPACK's Fourier-weighted rule on [0, π], using that
    # these seeds are even with period π
    x, phi = fourier_profile(w, 1 << 16)
    scale = 1 / math.sqrt(2 * math.pi * weight_norm(w))
    for target in (0, 2, 10, 300, 4000):
        ref, _ = integrate.quad(
            lambda k: float(weight_eval(w, k)), 0, math.pi, weight="cos", wvar=target, epsabs=1e-15
        )
        got = phi[x == target][0]
        assert got.imag == pytest.approx(0, abs=1e-14)
        assert got.real == pytest.approx(2 * ref * scale, abs=1e-12)


def test_cusp_correction_only_removes_aliasing():
    w = WeightSpec.uniform(Q)
    _, raw = fourier_profile(w, 1 << 16, cusp_correction=False)
    _, fixed = fourier_profile(w, 1 << 16)
    gap = np.abs(raw - fixed)
    assert 1e-10 < gap.max() < 1e-6


@pytest.mark.parametrize("theta", [Q, math.pi / 3])
@pytest.mark.parametrize("kind", ["semicircle", "arcsine", "gaussian", "uniform"])
def test_grid_doubling_changes_amplitudes_little(kind, theta):
    w = WeightSpec(kind, theta, 0.25 * abs(math.cos(theta)) if kind == "gaussian" else None)
    coarse, _ = synthesize_initial(w, InitCoin(1, 0), grid_size=1 << 18)
    fine, _ = synthesize_initial(w, InitCoin(1, 0), grid_size=1 << 19)
    half = min(coarse.width, fine.width) // 2

    def centre(state):
        mid = state.width // 2
        return state.amplitudes[mid - half : mid + half + 1]

    assert np.max(np.abs(centre(coarse) - centre(fine))) < 1e-8


def test_synthesis_failure_reports_deficit():
    with pytest.raises(SynthesisError) as info:
        synthesize_initial(WeightSpec.uniform(Q), InitCoin(1, 0), grid_size=256, tail_tol=1e-10)
    assert info.value.achievable_deficit > 1e-10


def test_synthesis_preconditions():
    w = WeightSpec.arcsine(Q)
    with pytest.raises(ValueError):
        synthesize_initial(w, InitCoin(1, 0), grid_size=128)
    with pytest.raises(ValueError):
        synthesize_initial(w, InitCoin(1, 0), tail_tol=1e-3)


def test_load_tabulated_csv(tmp_path):
    k = -np.pi + 2 * np.pi * np.arange(64) / 64
    vals = 1 / np.sqrt(1 - 0.5 * np.sin(k) ** 2)
    path = tmp_path / "w.csv"
    path.write_text("k,w\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(k, vals)))
    w = load_tabulated(path, theta=Q)
    assert w.kind == "tabulated"
    np.testing.assert_allclose(weight_eval(w, k), vals, rtol=1e-15)
    # linear interpolation between nodes
    mid = 0.5 * (k[3] + k[4])
    assert weight_eval(w, mid) == pytest.approx(0.5 * (vals[3] + vals[4]))
    bad = tmp_path / "bad.csv"
    bad.write_text("k,w\n0,1\nfoo,bar\n")
    with pytest.raises(ValueError):
        load_tabulated(bad)
