"""Multiplicative-update training for the joint factorization.

One sweep updates A, then B, then S; each later update sees the factors
already updated in the same sweep. Every multiplicative ratio is guarded as
(numerator + eps) / (denominator + eps), so a fully masked-out factor is left
unchanged instead of being dragged to zero, and exact factorizations are fixed
points of the sweep. Masks may be None, meaning all ones; that path skips
materializing the mask and agrees with the explicit-ones path to rounding.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import matrix
from .exceptions import ConfigError, FitError, ShapeError
from .objectives import Loss, ModelVariant, ObjectiveSpec, objective
from .rng import substream


@dataclass(frozen=True)
class SsnmfConfig:
    """Training knobs: factorization rank and loop controls.

    tol stops training once objective(now) / objective(start) drops below it;
    tol = 0 disables the check and runs all max_iters sweeps.
    """

    r: int
    lam: float = 1.0
    max_iters: int = 100
    tol: float = 0.0
    eps: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.r < 1:
            raise ConfigError(f"r must be >= 1, got {self.r}")
        if self.lam < 0:
            raise ConfigError(f"lam must be nonnegative, got {self.lam}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.tol < 0:
            raise ConfigError(f"tol must be nonnegative, got {self.tol}")
        if self.eps <= 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")


@dataclass
class FactorState:
    """Current factors: a is n1 x r, b is k x r, s is r x n2."""

    a: np.ndarray
    b: np.ndarray
    s: np.ndarray

    def copy(self) -> "FactorState":
        return FactorState(self.a.copy(), self.b.copy(), self.s.copy())


@dataclass
class FitResult:
    variant: ModelVariant
    config: SsnmfConfig
    state: FactorState
    objective_trace: list = field(default_factory=list)
    relative_error: float = 0.0
    iterations_run: int = 0

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.key,
            "config": {
                "r": self.config.r,
                "lam": self.config.lam,
                "max_iters": self.config.max_iters,
                "tol": self.config.tol,
                "eps": self.config.eps,
                "seed": self.config.seed,
            },
            "objective_trace": [float(v) for v in self.objective_trace],
            "relative_error": float(self.relative_error),
            "iterations_run": int(self.iterations_run),
        }

    def save(self, out_dir) -> None:
        """Write result.json plus A.csv, B.csv, S.csv into out_dir."""
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "result.json"), "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        matrix.write_csv(os.path.join(out_dir, "A.csv"), self.state.a)
        matrix.write_csv(os.path.join(out_dir, "B.csv"), self.state.b)
        matrix.write_csv(os.path.join(out_dir, "S.csv"), self.state.s)


def initialize(n1: int, n2: int, k: int, config: SsnmfConfig) -> FactorState:
    """Strictly positive uniform draws on [0.01, 1.01), deterministic per seed."""
    gen = substream(config.seed, "init")
    a = gen.random((n1, config.r)) + 0.01
    b = gen.random((k, config.r)) + 0.01
    s = gen.random((config.r, n2)) + 0.01
    return FactorState(a, b, s)


def _ratio(num, den, eps):
    # symmetric guard: zero-signal updates become exact no-ops
    return (num + eps) / (den + eps)


# Smallest magnitude a factor entry may keep. Multiplicative decay toward an
# unneeded entry otherwise walks through the subnormal float range, where
# hardware arithmetic is an order of magnitude slower. Entries at the floor
# are zero for every practical purpose; exact zeros stay exact zeros.
FACTOR_FLOOR = 1e-100


def _apply_floor(f):
    np.maximum(f, FACTOR_FLOOR, out=f, where=f != 0.0)
    return f


def _update_dictionary(f, s, data, mask, loss, eps):
    """One multiplicative update of a dictionary factor (A or B).

    f is the factor, data/mask the matching matrix pair. The coefficient
    matrix s is held fixed. Works for both loss choices.
    """
    fs = f @ s
    if mask is None:
        if loss is Loss.FRO:
            num = data @ s.T
            den = fs @ s.T
        else:
            num = (data / (fs + eps)) @ s.T
            den = s.sum(axis=1)[None, :]
    else:
        mdata = mask * data
        mfs = mask * fs
        if loss is Loss.FRO:
            num = mdata @ s.T
            den = mfs @ s.T
        else:
            num = ((mdata / (mfs + eps)) * mask) @ s.T
            den = mask @ s.T
    return f * _ratio(num, den, eps)


def _s_terms(f, s, data, mask, loss, eps):
    """Numerator and denominator contribution of one fit term to the S update."""
    fs = f @ s
    if mask is None:
        if loss is Loss.FRO:
            return f.T @ data, f.T @ fs
        num = f.T @ (data / (fs + eps))
        den = f.sum(axis=0)[:, None]
        return num, den
    mdata = mask * data
    mfs = mask * fs
    if loss is Loss.FRO:
        return f.T @ mdata, f.T @ mfs
    num = f.T @ ((mdata / (mfs + eps)) * mask)
    den = f.T @ mask
    return num, den


def mu_step(
    variant: ModelVariant,
    state: FactorState,
    x,
    y,
    w=None,
    l=None,
    lam: float = 1.0,
    eps: float = 1e-10,
) -> FactorState:
    """One sweep of multiplicative updates (A, then B, then S)."""
    rec = variant.reconstruction
    sup = variant.supervision
    a = _apply_floor(_update_dictionary(state.a, state.s, x, w, rec, eps))
    b = _apply_floor(_update_dictionary(state.b, state.s, y, l, sup, eps))

    # mixed Frobenius/divergence pairs keep the factor 2 from the squared
    # residual gradient; it cancels only when both terms share a loss
    num_r, den_r = _s_terms(a, state.s, x, w, rec, eps)
    num_s, den_s = _s_terms(b, state.s, y, l, sup, eps)
    cr = 2.0 if (rec is Loss.FRO and sup is Loss.DIV) else 1.0
    cs = 2.0 if (sup is Loss.FRO and rec is Loss.DIV) else 1.0
    num = cr * num_r + cs * lam * num_s
    den = cr * den_r + cs * lam * den_s
    s = _apply_floor(state.s * _ratio(num, den, eps))
    return FactorState(a, b, s)


def _check_system(x, y, w, l):
    x = matrix.as_matrix(x, "x")
    y = matrix.as_matrix(y, "y")
    matrix.check_nonnegative(x, "x")
    matrix.check_nonnegative(y, "y")
    n2 = x.shape[1]
    if y.shape[1] != n2:
        raise ShapeError(f"x has {n2} columns but y has {y.shape[1]}")
    if w is not None:
        w = matrix.as_matrix(w, "w")
        matrix.check_nonnegative(w, "w")
        if w.shape != x.shape:
            raise ShapeError(f"w shape {w.shape} does not match x shape {x.shape}")
    if l is not None:
        l = matrix.as_matrix(l, "l")
        matrix.check_nonnegative(l, "l")
        if l.shape != y.shape:
            raise ShapeError(f"l shape {l.shape} does not match y shape {y.shape}")
    return x, y, w, l


def fit(
    variant: ModelVariant,
    x,
    y,
    config: SsnmfConfig,
    w=None,
    l=None,
    init: Optional[FactorState] = None,
) -> FitResult:
    """Train the variant on (x, y) and return factors plus the objective trace.

    The trace has one entry per sweep plus the value before the first sweep.
    Stops early once trace[-1] / trace[0] < config.tol.
    """
    x, y, w, l = _check_system(x, y, w, l)
    n1, n2 = x.shape
    k = y.shape[0]
    state = init.copy() if init is not None else initialize(n1, n2, k, config)
    spec = ObjectiveSpec(variant, config.lam)
    start = objective(spec, state.a, state.b, state.s, x, y, w, l, eps=config.eps)
    if not math.isfinite(start):
        raise FitError(f"objective is {start} at initialization")
    trace = [start]
    iterations = 0
    for _ in range(config.max_iters):
        state = mu_step(variant, state, x, y, w, l, config.lam, config.eps)
        value = objective(spec, state.a, state.b, state.s, x, y, w, l, eps=config.eps)
        trace.append(value)
        iterations += 1
        if start > 0 and value / start < config.tol:
            break
    relative_error = trace[-1] / trace[0] if trace[0] > 0 else 0.0
    return FitResult(
        variant=variant,
        config=config,
        state=state,
        objective_trace=trace,
        relative_error=relative_error,
        iterations_run=iterations,
    )


def gradient(
    variant: ModelVariant,
    state: FactorState,
    x,
    y,
    w=None,
    l=None,
    lam: float = 1.0,
    eps: float = 1e-10,
):
    """Analytic gradients (dA, dB, dS) of the joint objective.

    Frobenius terms differentiate the masked residual, so the mask enters
    squared; for binary masks that coincides with the mask itself. Divergence
    quotients are eps-guarded and never raise.
    """
    a, b, s = state.a, state.b, state.s
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)

    def dict_grad(f, data, mask, loss, scale):
        fs = f @ s
        if loss is Loss.FRO:
            resid = data - fs
            if mask is not None:
                resid = mask * mask * resid
            return (-2.0 * scale) * (resid @ s.T)
        if mask is None:
            q = data / (fs + eps)
            return scale * (np.broadcast_to(s.sum(axis=1)[None, :], f.shape) - q @ s.T)
        q = ((mask * data) / (mask * fs + eps)) * mask
        return scale * (mask @ s.T - q @ s.T)

    def coeff_grad(f, data, mask, loss, scale):
        fs = f @ s
        if loss is Loss.FRO:
            resid = data - fs
            if mask is not None:
                resid = mask * mask * resid
            return (-2.0 * scale) * (f.T @ resid)
        if mask is None:
            q = data / (fs + eps)
            return scale * (f.sum(axis=0)[:, None] - f.T @ q)
        q = ((mask * data) / (mask * fs + eps)) * mask
        return scale * (f.T @ mask - f.T @ q)

    da = dict_grad(a, x, w, variant.reconstruction, 1.0)
    db = dict_grad(b, y, l, variant.supervision, lam)
    ds = coeff_grad(a, x, w, variant.reconstruction, 1.0) + coeff_grad(
        b, y, l, variant.supervision, lam
    )
    return da, db, ds


def step_scale(
    variant: ModelVariant,
    state: FactorState,
    x,
    y,
    w=None,
    l=None,
    lam: float = 1.0,
    eps: float = 1e-10,
):
    """Entrywise step sizes (Ga, Gb, Gs) for the scaled gradient-descent view.

    Each multiplicative update equals factor - G . grad for these scales (up
    to the eps ratio guard), which is what makes the sweep a descent scheme.
    """
    a, b, s = state.a, state.b, state.s

    def dict_scale(f, mask, loss, scale):
        fs = f @ s
        if loss is Loss.FRO:
            mfs = fs if mask is None else mask * fs
            return f / (2.0 * scale * (mfs @ s.T) + eps)
        if mask is None:
            return f / (scale * np.broadcast_to(s.sum(axis=1)[None, :], f.shape) + eps)
        return f / (scale * (mask @ s.T) + eps)

    def coeff_den(f, mask, loss, scale):
        fs = f @ s
        if loss is Loss.FRO:
            mfs = fs if mask is None else mask * fs
            return 2.0 * scale * (f.T @ mfs)
        if mask is None:
            return scale * np.broadcast_to(f.sum(axis=0)[:, None], s.shape)
        return scale * (f.T @ mask)

    ga = dict_scale(a, w, variant.reconstruction, 1.0)
    gb = dict_scale(b, l, variant.supervision, lam)
    den = coeff_den(a, w, variant.reconstruction, 1.0) + coeff_den(
        b, l, variant.supervision, lam
    )
    gs = s / (den + eps)
    return ga, gb, gs
