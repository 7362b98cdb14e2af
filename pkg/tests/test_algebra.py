import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hepta import (HeptaSpec, SingularLambdaError, SingularStructureError, apply_inverse,
                   block_diagonalize, build_H, determinant, eigenvalues, inverse, lambda_spectrum)
from hepta.algebra import ScaledReal, block_determinant
from hepta.oracle import lu_det
from specgen import random_spec

seeds = st.integers(0, 2**32 - 1)
TWO_I = HeptaSpec(5, 2, 0, 0, 0, 2, 0)


def _brute_block(poles, lw, pw):
    m = poles.size
    total = np.prod(poles)
    for k in range(m):
        total += lw[k] * np.prod(np.delete(poles, k))
        for l in range(k + 1, m):
            total -= pw[k, l] * np.prod(np.delete(poles, [k, l]))
    return total


def test_det_two_identity():
    det = determinant(TWO_I)
    assert det.value == 32.0 and det.scale_exponent == 0
    assert det.odd_factor * det.even_factor == 32.0


def test_det_trivial_gap_is_lambda_product():
    spec = HeptaSpec(11, 1.5, 0.5, -0.25, 0.125, 1.5 + 0.25, 0.5 - 0.125)
    assert determinant(spec).value == pytest.approx(np.prod(lambda_spectrum(spec)), rel=1e-12)


@pytest.mark.parametrize("poles", [[0.0, 0.0, 1.5, -2.0, 3.0], [0.0, 0.0, 0.0, 2.0, 3.0],
                                   [0.0, 1.0, 2.0, 3.0, 4.0], [1e-200, 2.0, 3.0, 4.0, 5.0]])
def test_block_determinant_expansion_with_zero_poles(poles):
    rng = np.random.default_rng(0)
    poles = np.array(poles)
    lw = rng.standard_normal(5)
    c = rng.standard_normal((5, 5))
    pw = c + c.T
    np.fill_diagonal(pw, 0.0)
    assert block_determinant(poles, lw, pw).to_float() == pytest.approx(_brute_block(poles, lw, pw),
                                                                        rel=1e-12, abs=1e-300)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from(["generic", "rank1", "trivial"]))
def test_det_matches_lu(seed, kind):
    spec = random_spec(np.random.default_rng(seed), lo=5, hi=30, kind=kind)
    det = determinant(spec)
    ref = lu_det(build_H(spec)).value
    assert abs(det.value - ref) <= 1e-8 * max(1.0, abs(ref))
    pair = block_diagonalize(spec)
    assert det.odd_factor == pytest.approx(lu_det(pair.phi).value, rel=1e-8, abs=1e-8)
    assert det.even_factor == pytest.approx(lu_det(pair.psi).value, rel=1e-8, abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_det_is_eigenvalue_product(seed):
    spec = random_spec(np.random.default_rng(seed), lo=5, hi=25)
    sol = eigenvalues(spec)
    if not sol.fallback_used:
        assert determinant(spec).value == pytest.approx(np.prod(sol.eigenvalues), rel=1e-7)


def test_det_scaling_large_n():
    spec = HeptaSpec(512, 1, 2, 3, 4, 5, 6)
    det = determinant(spec)
    ref = lu_det(build_H(spec))
    assert det.scale_exponent != 0 and det.value == np.inf
    assert det.log2_abs == pytest.approx(ref.log2_abs, rel=1e-10)
    assert np.sign(det.odd_factor * det.even_factor) == ref.sign


def test_det_zero_when_singular():
    # lambda_3 = 0 with no corner perturbation: H itself is singular
    spec = HeptaSpec(5, 0, 1, 0, 0, 0, 1)
    assert abs(determinant(spec).value) < 1e-14


def test_scaled_real_roundtrip():
    x = ScaledReal.of(3.0) * ScaledReal.of(-0.25)
    assert x.to_float() == -0.75
    assert ScaledReal.of(0.0).to_float() == 0.0


def test_inverse_trivial_blocks_diagonal():
    spec = HeptaSpec(9, 3.0, 0.5, 0.25, 0.125, 3.0 - 0.25, 0.5 - 0.125)
    inv = inverse(spec)
    pair = block_diagonalize(spec)
    np.testing.assert_allclose(inv.Q, np.diag(1 / pair.odd_poles), atol=1e-15)
    np.testing.assert_allclose(inv.R, np.diag(1 / pair.even_poles), atol=1e-15)


def test_inverse_two_identity():
    inv = inverse(TWO_I)
    np.testing.assert_allclose(apply_inverse(inv, np.eye(5)[0]), 0.5 * np.eye(5)[0], atol=1e-15)
    np.testing.assert_allclose(apply_inverse(inv, np.ones(5)), 0.5 * np.ones(5), atol=1e-15)
    assert not apply_inverse(inv, np.zeros(5)).any()


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_inverse_roundtrip(seed):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, lo=5, hi=30)
    try:
        inv = inverse(spec)
    except (SingularLambdaError, SingularStructureError):
        return
    h = build_H(spec)
    x0 = rng.standard_normal(spec.n)
    if np.linalg.cond(h) > 1e6:
        return
    np.testing.assert_allclose(apply_inverse(inv, h @ x0), x0, atol=1e-8 * np.linalg.norm(x0))
    dense = inv.dense()
    assert np.max(np.abs(dense - dense.T)) <= 1e-10
    assert np.max(np.abs(inv.Q - inv.Q.T)) <= 1e-12 and np.max(np.abs(inv.R - inv.R.T)) <= 1e-12


def test_inverse_singular_lambda_named():
    with pytest.raises(SingularLambdaError) as info:
        inverse(HeptaSpec(5, 0, 1, 0, 0, 0.5, 0.5))
    assert info.value.k == 3
    assert "lambda_3" in str(info.value)


def test_inverse_singular_structure():
    # nonzero lambdas, but corners chosen so that H is singular: det(Phi) vanishes
    base = HeptaSpec(6, 2.0, 0.5, 0.25, 0.0, 0.0, 0.0)
    lo, hi = -50.0, 50.0

    def odd_det(xi):
        return determinant(HeptaSpec(6, 2.0, 0.5, 0.25, 0.0, xi, 0.0)).odd_factor

    xs = np.linspace(lo, hi, 2001)
    vals = np.array([odd_det(x) for x in xs])
    k = int(np.flatnonzero(np.sign(vals[1:]) != np.sign(vals[:-1]))[0])
    a, b = xs[k], xs[k + 1]
    for _ in range(200):
        m = 0.5 * (a + b)
        if np.sign(odd_det(m)) == np.sign(odd_det(a)):
            a = m
        else:
            b = m
    spec = HeptaSpec(6, base.a, base.b, base.c, base.d, a, 0.0)
    with pytest.raises(SingularStructureError) as info:
        inverse(spec)
    assert info.value.which == "odd"


def test_apply_inverse_length_checked():
    with pytest.raises(ValueError):
        apply_inverse(inverse(TWO_I), np.ones(4))


def test_rho_is_determinant_ratio():
    spec = random_spec(np.random.default_rng(21), n=10)
    inv = inverse(spec)
    pair = block_diagonalize(spec)
    det = determinant(spec)
    assert inv.rho * np.prod(pair.odd_poles) == pytest.approx(det.odd_factor, rel=1e-10)
    assert inv.varrho * np.prod(pair.even_poles) == pytest.approx(det.even_factor, rel=1e-10)
