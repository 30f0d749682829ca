"""Reproducible generators for the benchmark systems M1-M3 and a toy cosine.

M1 is a linear five-variable recursion, M2 swaps in bounded nonlinear maps,
and M3 is a lag-3 vector autoregression.  Noise is unit-variance Gaussian,
drawn per column from PCG64 seeded with SeedSequence([seed, column]); the
split rule is documented so another implementation can match moments
without matching bit streams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ofter.frame import TimePanel

MODELS = ("m1", "m2", "m3", "toy")


@dataclass(frozen=True)
class SyntheticSpec:
    model: str
    t_len: int
    sigma: float = 0.0  # noise sd, toy model only
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.t_len < 10:
            raise ValueError("t_len must be at least 10")
        if self.model == "toy" and self.sigma < 0:
            raise ValueError("sigma must be non-negative")


def _noise(spec: SyntheticSpec, n_cols: int) -> np.ndarray:
    cols = []
    for j in range(n_cols):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([spec.seed, j])))
        cols.append(rng.standard_normal(spec.t_len))
    return np.column_stack(cols)


def _bounded_map(x):
    return 3.4 * x * (1.0 - np.exp(-(x ** 2))) * np.exp(-(x ** 2))


def generate(spec: SyntheticSpec) -> TimePanel:
    """Simulate the requested system; deterministic under the seed."""
    T = spec.t_len
    if spec.model == "toy":
        t = np.arange(1, T + 1, dtype=float)
        e = _noise(spec, 1)[:, 0] * spec.sigma
        y = 0.5 + np.cos(np.pi * t / 64.0) + e
        return TimePanel(y[:, None], ("y",), np.arange(1, T + 1))

    e = _noise(spec, 5)
    y = np.zeros((T, 5))
    if spec.model == "m1":
        for t in range(1, T):
            y1, y2 = y[t - 1, 0], y[t - 1, 1]
            y[t, 0] = 0.2 * y1 - 0.4 * y2 + e[t, 0]
            y[t, 1] = -0.5 * y1 + 0.15 * y2 + e[t, 1]
            y[t, 2] = -0.14 * y2 + e[t, 2]
            y[t, 3] = 0.5 * y1 - 0.25 * y2 + e[t, 3]
            y[t, 4] = 0.15 * y1 + e[t, 4]
    elif spec.model == "m2":
        for t in range(1, T):
            y1, y2, y3 = y[t - 1, 0], y[t - 1, 1], y[t - 1, 2]
            y[t, 0] = _bounded_map(y1) + e[t, 0]
            y[t, 1] = _bounded_map(y2) + 0.5 * y1 * y2 + e[t, 1]
            y[t, 2] = _bounded_map(y3) + 0.3 * y2 + 0.5 * y1 ** 2 + e[t, 2]
            y[t, 3] = 0.5 * y1 - 0.25 * y2 + e[t, 3]
            y[t, 4] = 0.15 * y1 + e[t, 4]
    else:  # m3: lag-3 recursion, first three rows stay zero
        for t in range(3, T):
            y1_1 = y[t - 1, 0]
            y1_3, y2_3 = y[t - 3, 0], y[t - 3, 1]
            y[t, 0] = 0.1 * y1_1 - 0.6 * y2_3 + e[t, 0]
            y[t, 1] = -0.15 * y1_3 + 0.8 * y2_3 + e[t, 1]
            y[t, 2] = -0.45 * y2_3 + e[t, 2]
            y[t, 3] = 0.45 * y1_3 - 0.85 * y2_3 + e[t, 3]
            y[t, 4] = 0.95 * y[t - 2, 0] + e[t, 4]
    columns = tuple(f"y{j + 1}" for j in range(5))
    return TimePanel(y, columns, np.arange(1, T + 1))


def generate_noiseless(model: str, t_len: int) -> TimePanel:
    """The deterministic skeleton of a system (noise forced to zero)."""
    spec = SyntheticSpec(model=model, t_len=t_len, sigma=0.0, seed=0)
    if model == "toy":
        return generate(spec)
    panel = generate(spec)
    # Rebuild with zero noise by re-running the recursion on a zero draw.
    zero = TimePanel(np.zeros_like(panel.values), panel.columns, panel.index)
    if model == "m1" or model == "m3":
        return zero  # zero initial state is a fixed point of the linear maps
    y = np.zeros_like(panel.values)
    for t in range(1, t_len):
        y1, y2, y3 = y[t - 1, 0], y[t - 1, 1], y[t - 1, 2]
        y[t, 0] = _bounded_map(y1)
        y[t, 1] = _bounded_map(y2) + 0.5 * y1 * y2
        y[t, 2] = _bounded_map(y3) + 0.3 * y2 + 0.5 * y1 ** 2
        y[t, 3] = 0.5 * y1 - 0.25 * y2
        y[t, 4] = 0.15 * y1
    return TimePanel(y, panel.columns, panel.index)
