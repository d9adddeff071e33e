"""Seeded cohort simulator.

Random numbers come from the Philox-4x64-10 counter-based generator (numpy's
``Philox`` bit generator) keyed by ``(seed, stream)``. Output words are the four lanes of the
blocks for counters 1, 2, 3, ... (lane 0 first). Each 64-bit word
``w`` becomes the uniform ``(w >> 11) * 2**-53`` in ``[0, 1)``; every variate
below is a fixed transform of those uniforms, so streams do not depend on
numpy's distribution samplers.

Draw order for ``n`` individuals, ``q - 2`` extra covariates and ``p`` SNPs:

1. covariates, column by column, each entry a Box-Muller normal
   ``sqrt(-2 log(1 - u1)) cos(2 pi u2)`` using two uniforms;
2. environment: ``u < pi`` for Bernoulli, or Box-Muller for standard normal;
3. genotypes, SNP by SNP, each entry ``(u1 < maf) + (u2 < maf)``;
4. outcomes ``u < expit(eta)``.

The covariate matrix is laid out as ``[1, covariates..., s]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .errors import InvalidConfig
from .null_model import Dataset

UINT64_MAX = 2**64 - 1


class UniformStream:
    """Uniform ``[0, 1)`` doubles from Philox-4x64 keyed by ``(seed, stream)``."""

    def __init__(self, seed: int, stream: int = 0):
        if not (0 <= seed <= UINT64_MAX and 0 <= stream <= UINT64_MAX):
            raise InvalidConfig("seed and stream must be 64-bit unsigned integers")
        self._bits = np.random.Philox(key=np.array([seed, stream], dtype=np.uint64))

    def raw(self, size: int) -> np.ndarray:
        return np.asarray(self._bits.random_raw(size), dtype=np.uint64)

    def uniform(self, size: int) -> np.ndarray:
        return (self.raw(size) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normal(self, size: int) -> np.ndarray:
        u = self.uniform(2 * size).reshape(size, 2)
        return np.sqrt(-2.0 * np.log1p(-u[:, 0])) * np.cos(2.0 * np.pi * u[:, 1])


@dataclass(frozen=True)
class SimConfig:
    n: int
    q: int = 2
    p: int = 3
    beta_true: tuple = None
    a_true: tuple = None
    b_true: tuple = None
    maf: tuple = None
    env: str = "bernoulli"
    env_prob: float = 0.5
    seed: int = 0
    stream: int = field(default=0)

    def __post_init__(self):
        if self.n < 2 or self.q < 2 or self.p < 1:
            raise InvalidConfig("need n >= 2, q >= 2 (intercept and environment) and p >= 1")
        defaults = {
            "beta_true": (0.0,) * self.q,
            "a_true": (0.0,) * self.p,
            "b_true": (0.0,) * self.p,
            "maf": tuple(np.linspace(0.1, 0.4, self.p)) if self.p > 1 else (0.25,),
        }
        for name, expected in (("beta_true", self.q), ("a_true", self.p), ("b_true", self.p), ("maf", self.p)):
            value = getattr(self, name)
            value = defaults[name] if value is None else tuple(float(v) for v in value)
            if len(value) != expected:
                raise InvalidConfig(f"{name} has length {len(value)}, expected {expected}")
            object.__setattr__(self, name, value)
        if not all(0.0 < m <= 0.5 for m in self.maf):
            raise InvalidConfig("minor allele frequencies must lie in (0, 0.5]")
        if self.env not in ("bernoulli", "normal"):
            raise InvalidConfig(f"env must be 'bernoulli' or 'normal', got {self.env!r}")
        if self.env == "bernoulli" and not 0.0 < self.env_prob < 1.0:
            raise InvalidConfig("env_prob must lie in (0, 1)")

    @property
    def is_null(self) -> bool:
        return not any(self.a_true) and not any(self.b_true)


def simulate(cfg: SimConfig) -> Dataset:
    rng = UniformStream(cfg.seed, cfg.stream)
    n = cfg.n
    cov = np.column_stack([rng.normal(n) for _ in range(cfg.q - 2)]) if cfg.q > 2 else np.zeros((n, 0))
    if cfg.env == "bernoulli":
        s = (rng.uniform(n) < cfg.env_prob).astype(np.float64)
    else:
        s = rng.normal(n)
    Z = np.empty((n, cfg.p))
    for j, maf in enumerate(cfg.maf):
        u = rng.uniform(2 * n).reshape(n, 2)
        Z[:, j] = (u < maf).sum(axis=1)
    X = np.column_stack([np.ones(n), cov, s])
    eta = X @ np.array(cfg.beta_true) + Z @ np.array(cfg.a_true) + s * (Z @ np.array(cfg.b_true))
    y = (rng.uniform(n) < expit(eta)).astype(np.float64)
    return Dataset(y, X, s, Z, env_col=cfg.q - 1)
