"""Analytic, gradient-free weight estimation.

Weights are solved layer by layer in closed form. Each layer k fits the
least-squares system A_{k-1} W_k = T_k, where A_{k-1} is the design matrix
produced by the layers before k and T_k is the training target pulled back
through the layers after k by alternating functional inverses with
right-multiplied pseudoinverses. Layers not yet solved contribute random
placeholder matrices on both sides; the output layer is always solved last,
which makes its solve the exact least-squares optimum of the final system.

There is no iteration: every weight matrix is written once.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .activations import apply as _apply, invert_with_count
from .errors import InvalidArgumentError, InvalidConfigurationError
from .linalg import Matrix, PinvOptions, _pinv_array, as_array, sse
from .network import NetworkSpec, WeightSet, augment, default_masks, forward

__all__ = [
    "InitScheme",
    "TrainConfig",
    "TrainReport",
    "back_target",
    "train",
    "solve_masked_layer",
]


@dataclass(frozen=True)
class InitScheme:
    """Placeholder initialization and solve order.

    kind "random": placeholders drawn uniform on [-1, 1] times scale_c from
    a seeded generator. kind "data_matrix": no randomness, every non-output
    weight is the pseudoinverse of its design matrix (requires all hidden
    widths equal to the sample count). solve_order None solves layers
    1..n in order; a custom order permutes the inner layers only, the
    output layer is solved last by construction.
    """

    kind: str = "random"
    seed: int = 0
    scale_c: float = 1.0
    solve_order: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.kind not in ("random", "data_matrix"):
            raise InvalidConfigurationError(f"unknown init kind {self.kind!r}")
        if self.kind == "random" and not self.scale_c > 0:
            raise InvalidConfigurationError("scale_c must be > 0")
        if self.solve_order is not None:
            object.__setattr__(self, "solve_order", tuple(self.solve_order))
            if self.kind == "data_matrix":
                raise InvalidConfigurationError(
                    "data_matrix init is inherently sequential; no custom order"
                )

    @classmethod
    def random(cls, seed: int = 0, scale_c: float = 1.0, solve_order=None):
        return cls("random", seed, scale_c, solve_order)

    @classmethod
    def data_matrix(cls):
        return cls("data_matrix")


@dataclass(frozen=True)
class TrainConfig:
    init: InitScheme
    pinv_opts: PinvOptions = field(default_factory=PinvOptions)
    clamp_margin: Optional[float] = 1e-9
    record_intermediates: bool = False

    def __post_init__(self):
        if self.clamp_margin is not None and self.clamp_margin < 0:
            raise InvalidConfigurationError("clamp_margin must be >= 0 or None")


@dataclass
class TrainReport:
    weights: WeightSet
    train_sse: float
    per_layer_solve_residuals: List[float]
    clamped_entry_counts: List[int]
    wall_time: float
    intermediates: Optional[list] = None


def _back_chain(y, eff_weights_desc, acts_desc, skip_first_inverse,
                clamp_margin, opts):
    """Pull y back through (W, g) pairs given in output-to-inner order.

    Each step applies the functional inverse g_j (skipped for the first
    pair when the output layer is linear) and then right-multiplies by the
    pseudoinverse of W_j. Returns (target, clamped entry count).
    """
    t = y
    clamped = 0
    for idx, (wj, gj) in enumerate(zip(eff_weights_desc, acts_desc)):
        if not (idx == 0 and skip_first_inverse):
            t, c = invert_with_count(gj, t, clamp_margin)
            clamped += c
        t = t @ _pinv_array(as_array(wj), opts)
    return t, clamped


def back_target(y, weights_after, activations_after, linear_output,
                clamp_margin=1e-9, pinv_opts: PinvOptions = None) -> Matrix:
    """Back-propagated target for a layer, given the downstream weights in
    output-to-inner order. The layer's own inverse is not applied here."""
    yarr = as_array(y, "y")
    if len(weights_after) != len(activations_after):
        raise InvalidArgumentError("weights_after / activations_after mismatch")
    opts = pinv_opts if pinv_opts is not None else PinvOptions()
    t, _ = _back_chain(yarr, list(weights_after), list(activations_after),
                       linear_output, clamp_margin, opts)
    return Matrix(t)


def solve_masked_layer(a, t, mask, opts: PinvOptions = None) -> Matrix:
    """Least-squares weight with support restricted to a boolean mask.

    Column j is solved against only the design columns its mask admits;
    off-support entries are exactly zero. A column with empty support
    stays all zero.
    """
    aa = as_array(a, "a")
    tt = as_array(t, "t")
    if aa.shape[0] != tt.shape[0]:
        raise InvalidArgumentError("a and t must have the same row count")
    m = np.asarray(mask, dtype=bool)
    if m.shape != (aa.shape[1], tt.shape[1]):
        raise InvalidArgumentError(
            f"mask shape {m.shape} != {(aa.shape[1], tt.shape[1])}"
        )
    opts = opts if opts is not None else PinvOptions()
    w = np.zeros(m.shape)
    for j in range(m.shape[1]):
        support = np.flatnonzero(m[:, j])
        if support.size == 0:
            continue
        w[support, j] = (_pinv_array(aa[:, support], opts) @ tt[:, j : j + 1]).ravel()
    return Matrix(w)


def _solve_order(spec: NetworkSpec, init: InitScheme):
    n = spec.n_layers
    if init.solve_order is None:
        return list(range(1, n + 1))
    inner = list(init.solve_order)
    if sorted(inner) != list(range(1, n)):
        raise InvalidConfigurationError(
            f"solve_order must be a permutation of 1..{n - 1}, got {inner}"
        )
    return inner + [n]


def train(spec: NetworkSpec, x_raw, y, cfg: TrainConfig) -> TrainReport:
    """Solve every layer of `spec` once, in closed form.

    Random init draws a placeholder for each layer after the first, shaped
    like that layer's weight, from a generator seeded by cfg.init.seed.
    Each layer's weight is then the pseudoinverse of its design matrix
    times its back-propagated target; solved layers replace their
    placeholders in all later targets. data_matrix init sets every
    non-output weight to the pseudoinverse of its design matrix (hidden
    widths must equal the sample count) and solves only the output layer
    against data.
    """
    t_start = time.perf_counter()
    x = as_array(x_raw, "x_raw")
    yarr = as_array(y, "y")
    if x.shape[1] != spec.input_dim:
        raise InvalidArgumentError(
            f"x has {x.shape[1]} columns, spec.input_dim is {spec.input_dim}"
        )
    if yarr.shape[0] != x.shape[0]:
        raise InvalidArgumentError("x and y must have the same row count")
    if yarr.shape[1] != spec.widths[-1]:
        raise InvalidArgumentError(
            f"y has {yarr.shape[1]} columns, output width is {spec.widths[-1]}"
        )

    n = spec.n_layers
    m = x.shape[0]
    acts = [layer.activation for layer in spec.layers]
    masks = default_masks(spec)
    xa = augment(x)
    opts = cfg.pinv_opts
    margin = cfg.clamp_margin
    intermediates = [] if cfg.record_intermediates else None

    residuals: List[float] = [0.0] * n
    counts: List[int] = [0] * n

    if cfg.init.kind == "data_matrix":
        for h in spec.widths[:-1]:
            if h != m:
                raise InvalidConfigurationError(
                    f"data_matrix init needs every hidden width equal to the "
                    f"sample count {m}, got {h}"
                )
        if any(mk is not None for mk in masks):
            raise InvalidConfigurationError(
                "banded layers cannot hold pseudoinverse-valued weights"
            )
        solved: List[np.ndarray] = []
        a = xa
        for k in range(1, n):
            wk = _pinv_array(a, opts)
            residuals[k - 1] = float(np.linalg.norm(a @ wk - np.eye(m)))
            if intermediates is not None:
                intermediates.append({"layer": k, "design": Matrix(a)})
            solved.append(wk)
            a = _apply(acts[k - 1], a @ wk)
        t = yarr
        if not spec.linear_output:
            t, c = invert_with_count(acts[n - 1], t, margin)
            counts[n - 1] = c
        wn = _pinv_array(a, opts) @ t
        residuals[n - 1] = float(np.linalg.norm(a @ wn - t))
        if intermediates is not None:
            intermediates.append({"layer": n, "design": Matrix(a), "target": Matrix(t)})
        solved.append(wn)
        weights = WeightSet([Matrix(wk) for wk in solved], masks)
    else:
        rng = np.random.default_rng(cfg.init.seed)
        c = cfg.init.scale_c
        placeholders: dict = {}
        for k in range(2, n + 1):
            r = rng.uniform(-1.0, 1.0, (spec.in_dims[k - 1], spec.widths[k - 1])) * c
            if masks[k - 1] is not None:
                r = np.where(masks[k - 1], r, 0.0)
            placeholders[k] = r
        order = _solve_order(spec, cfg.init)
        if order[0] != 1:
            # custom orders that defer layer 1 need a placeholder for it on
            # the design side; drawn after the others so forward-order runs
            # consume exactly the same stream
            r1 = rng.uniform(-1.0, 1.0, (spec.in_dims[0], spec.widths[0])) * c
            if masks[0] is not None:
                r1 = np.where(masks[0], r1, 0.0)
            placeholders[1] = r1

        current: List[Optional[np.ndarray]] = [None] * (n + 1)

        def eff(j: int) -> np.ndarray:
            return current[j] if current[j] is not None else placeholders[j]

        for k in order:
            a = xa
            for j in range(1, k):
                a = _apply(acts[j - 1], a @ eff(j))
            desc_w = [eff(j) for j in range(n, k, -1)]
            desc_g = [acts[j - 1] for j in range(n, k, -1)]
            t, clamped = _back_chain(yarr, desc_w, desc_g, spec.linear_output,
                                     margin, opts)
            if not (k == n and spec.linear_output):
                t, c2 = invert_with_count(acts[k - 1], t, margin)
                clamped += c2
            if masks[k - 1] is not None:
                wk = solve_masked_layer(a, t, masks[k - 1], opts).array
            else:
                wk = _pinv_array(a, opts) @ t
            current[k] = wk
            residuals[k - 1] = float(np.linalg.norm(a @ wk - t))
            counts[k - 1] = clamped
            if intermediates is not None:
                intermediates.append(
                    {"layer": k, "design": Matrix(a), "target": Matrix(t)}
                )
        weights = WeightSet([Matrix(current[k]) for k in range(1, n + 1)], masks)

    out = forward(spec, weights, x)
    report = TrainReport(
        weights=weights,
        train_sse=sse(out, yarr),
        per_layer_solve_residuals=residuals,
        clamped_entry_counts=counts,
        wall_time=time.perf_counter() - t_start,
        intermediates=intermediates,
    )
    return report
