"""Finite-difference checks of the analytic gradients and the identity that
ties each multiplicative update to entrywise-scaled gradient descent."""

import numpy as np
import pytest

from ssnmf.objectives import VARIANTS, ObjectiveSpec, objective
from ssnmf.solver import FactorState, gradient, mu_step, step_scale

N1, N2, K, R = 5, 6, 3, 2


def make_instance(seed, binary_masks=False):
    rng = np.random.default_rng(seed)
    state = FactorState(
        rng.random((N1, R)) + 0.2,
        rng.random((K, R)) + 0.2,
        rng.random((R, N2)) + 0.2,
    )
    x = rng.random((N1, N2)) + 0.2
    y = rng.random((K, N2)) + 0.2
    if binary_masks:
        w = (rng.random((N1, N2)) < 0.8).astype(float)
        l = (rng.random((K, N2)) < 0.8).astype(float)
    else:
        w = l = None
    return state, x, y, w, l


def numeric_gradient(spec, state, x, y, w, l, which, h=1e-6):
    """Central differences of the exact objective in one factor."""
    factor = getattr(state, which)
    grad = np.zeros_like(factor)
    for idx in np.ndindex(*factor.shape):
        up = state.copy()
        down = state.copy()
        getattr(up, which)[idx] += h
        getattr(down, which)[idx] -= h
        fu = objective(spec, up.a, up.b, up.s, x, y, w, l)
        fd = objective(spec, down.a, down.b, down.s, x, y, w, l)
        grad[idx] = (fu - fd) / (2 * h)
    return grad


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("binary_masks,lam", [(False, 1.0), (True, 2.5)])
def test_gradient_matches_central_differences(variant, binary_masks, lam):
    state, x, y, w, l = make_instance(101, binary_masks)
    spec = ObjectiveSpec(variant, lam)
    da, db, ds = gradient(variant, state, x, y, w, l, lam=lam)
    for analytic, which in ((da, "a"), (db, "b"), (ds, "s")):
        numeric = numeric_gradient(spec, state, x, y, w, l, which)
        scale = np.abs(numeric).max()
        assert scale > 0
        rel = np.abs(analytic - numeric).max() / scale
        assert rel < 1e-5, f"{variant.key} d{which}: max rel err {rel:.2e}"


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("binary_masks", [False, True])
def test_update_equals_scaled_gradient_descent(variant, binary_masks):
    # the eps ratio guard is the only gap in the algebra, so shrink it
    eps = 1e-14
    lam = 1.7
    state, x, y, w, l = make_instance(211, binary_masks)
    stepped = mu_step(variant, state, x, y, w, l, lam=lam, eps=eps)

    ga, gb, _ = step_scale(variant, state, x, y, w, l, lam=lam, eps=eps)
    da, db, _ = gradient(variant, state, x, y, w, l, lam=lam, eps=eps)
    assert np.allclose(stepped.a, state.a - ga * da, rtol=0, atol=1e-10)
    assert np.allclose(stepped.b, state.b - gb * db, rtol=0, atol=1e-10)

    # the S update runs after A and B, so its gradient and step sizes are
    # taken at the mid-sweep state
    mid = FactorState(stepped.a, stepped.b, state.s)
    _, _, gs = step_scale(variant, mid, x, y, w, l, lam=lam, eps=eps)
    _, _, ds = gradient(variant, mid, x, y, w, l, lam=lam, eps=eps)
    assert np.allclose(stepped.s, state.s - gs * ds, rtol=0, atol=1e-10)


@pytest.mark.parametrize("variant", VARIANTS)
def test_gradient_near_zero_at_exact_factorization(variant):
    state, _, _, _, _ = make_instance(307)
    x = state.a @ state.s
    y = state.b @ state.s
    da, db, ds = gradient(variant, state, x, y, eps=1e-12)
    for g in (da, db, ds):
        assert np.abs(g).max() < 1e-6


def test_gradient_descent_direction_decreases_objective():
    state, x, y, _, _ = make_instance(401)
    variant = VARIANTS[0]
    spec = ObjectiveSpec(variant, 1.0)
    before = objective(spec, state.a, state.b, state.s, x, y)
    da, db, ds = gradient(variant, state, x, y)
    t = 1e-4
    after = objective(
        spec,
        np.maximum(state.a - t * da, 0),
        np.maximum(state.b - t * db, 0),
        np.maximum(state.s - t * ds, 0),
        x,
        y,
    )
    assert after < before
