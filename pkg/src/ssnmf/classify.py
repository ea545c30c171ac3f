"""Classification on top of the joint factorization.

Three steps: train dictionaries A, B on labeled data, project new data onto
the fixed dictionary A to get codes S, then read off labels from B @ S. The
projection reuses the multiplicative update for S under the model's
reconstruction error, so both Frobenius and divergence models share one
mechanism.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import matrix
from .exceptions import ShapeError
from .objectives import ModelVariant
from .rng import substream
from .solver import SsnmfConfig, _apply_floor, _ratio, _s_terms, fit

DEFAULT_TRANSFORM_ITERS = 200


@dataclass
class ClassifierModel:
    a_train: np.ndarray
    b_train: np.ndarray
    variant: ModelVariant
    config: SsnmfConfig

    @property
    def r(self) -> int:
        return self.a_train.shape[1]


def train(
    x_train,
    y_train,
    variant: ModelVariant,
    config: SsnmfConfig,
    w_train=None,
    l_train=None,
):
    """Fit the variant on labeled data and keep the dictionaries.

    With l_train omitted every training column counts as labeled. Returns the
    model together with the full fit diagnostics.
    """
    result = fit(variant, x_train, y_train, config, w=w_train, l=l_train)
    model = ClassifierModel(
        a_train=result.state.a,
        b_train=result.state.b,
        variant=variant,
        config=config,
    )
    return model, result


def transform(
    model: ClassifierModel,
    x_test,
    w_test=None,
    iters: int = DEFAULT_TRANSFORM_ITERS,
) -> np.ndarray:
    """Codes S for new data under the frozen dictionary A.

    Runs one-sided multiplicative updates on S alone, using the model's
    reconstruction error. S starts from the same seeded uniform scheme as
    training initialization (its own substream of config.seed).
    """
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    x_test = matrix.as_matrix(x_test, "x_test")
    matrix.check_nonnegative(x_test, "x_test")
    a = model.a_train
    if x_test.shape[0] != a.shape[0]:
        raise ShapeError(
            f"x_test has {x_test.shape[0]} rows, dictionary expects {a.shape[0]}"
        )
    if w_test is not None:
        w_test = matrix.as_matrix(w_test, "w_test")
        matrix.check_nonnegative(w_test, "w_test")
        if w_test.shape != x_test.shape:
            raise ShapeError(
                f"w_test shape {w_test.shape} does not match x_test {x_test.shape}"
            )
    eps = model.config.eps
    gen = substream(model.config.seed, "transform")
    s = gen.random((a.shape[1], x_test.shape[1])) + 0.01
    loss = model.variant.reconstruction
    for _ in range(iters):
        num, den = _s_terms(a, s, x_test, w_test, loss, eps)
        s = _apply_floor(s * _ratio(num, den, eps))
    return s


def label(z) -> np.ndarray:
    """One-hot per column at the largest entry; ties go to the lowest row."""
    z = matrix.as_matrix(z, "z")
    out = np.zeros_like(z)
    out[np.argmax(z, axis=0), np.arange(z.shape[1])] = 1.0
    return out


def predict(model: ClassifierModel, s_test) -> np.ndarray:
    s_test = matrix.as_matrix(s_test, "s_test")
    if s_test.shape[0] != model.b_train.shape[1]:
        raise ShapeError(
            f"s_test has {s_test.shape[0]} rows, model rank is {model.b_train.shape[1]}"
        )
    return label(model.b_train @ s_test)


def accuracy(y_true, y_pred) -> float:
    """Fraction of columns whose one-hot labels match exactly."""
    y_true = matrix.as_matrix(y_true, "y_true")
    y_pred = matrix.as_matrix(y_pred, "y_pred")
    if y_true.shape != y_pred.shape:
        raise ShapeError(f"shape mismatch: {y_true.shape} vs {y_pred.shape}")
    return float(np.all(y_true == y_pred, axis=0).mean())


def save_model(model: ClassifierModel, out_dir, vocabulary: Optional[str] = None) -> None:
    """Persist as A.csv + B.csv + manifest.json in out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    matrix.write_csv(os.path.join(out_dir, "A.csv"), model.a_train)
    matrix.write_csv(os.path.join(out_dir, "B.csv"), model.b_train)
    manifest = {
        "variant": model.variant.key,
        "r": model.config.r,
        "lam": model.config.lam,
        "max_iters": model.config.max_iters,
        "tol": model.config.tol,
        "eps": model.config.eps,
        "seed": model.config.seed,
        "vocabulary": vocabulary,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(model_dir) -> ClassifierModel:
    with open(os.path.join(model_dir, "manifest.json"), "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    config = SsnmfConfig(
        r=manifest["r"],
        lam=manifest["lam"],
        max_iters=manifest["max_iters"],
        tol=manifest["tol"],
        eps=manifest["eps"],
        seed=manifest["seed"],
    )
    return ClassifierModel(
        a_train=matrix.read_csv(os.path.join(model_dir, "A.csv")),
        b_train=matrix.read_csv(os.path.join(model_dir, "B.csv")),
        variant=ModelVariant.parse(manifest["variant"]),
        config=config,
    )
