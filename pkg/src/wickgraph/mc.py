"""Monte Carlo estimate of the time-ordered moment integral.

Times are drawn uniformly from the cube and the result divided by ``n!``.
Samples are generated in fixed-size blocks; block ``b`` draws from a Philox
stream keyed by ``(seed, b)``, so the sample set does not depend on how many
threads process the blocks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import SamplingError, ValidationError
from .kernel import CovarianceKernel
from .poly import Polynomial

BLOCK = 1 << 16
JITTER_STEPS = 3  # 1e-12 -> 1e-10 -> 1e-8 by default


@dataclass(frozen=True)
class McConfig:
    samples: int = 100_000
    seed: int = 0
    jitter: float = 1e-12
    threads: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValidationError("samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    samples: int

    def to_json(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "samples": self.samples}


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) | int(block)))


def _cholesky(G: np.ndarray, jitter: float) -> np.ndarray:
    eye = np.eye(G.shape[-1])
    for step in range(JITTER_STEPS):
        try:
            return np.linalg.cholesky(G + jitter * 100**step * eye)
        except np.linalg.LinAlgError:
            continue
    raise SamplingError(
        f"covariance not positive semidefinite even with jitter {jitter * 100 ** (JITTER_STEPS - 1):.0e}"
    )


def sample_values(
    k: CovarianceKernel, times, m: int, rng: np.random.Generator, jitter: float = 1e-12
) -> np.ndarray:
    """One draw of ``X(t_1), ..., X(t_n)``: an ``(n, m)`` array with independent columns."""
    G = k.gram(times)
    L = _cholesky(G, jitter)
    return L @ rng.standard_normal((len(G), m))


def _poly_values(Q: Polynomial, X: np.ndarray) -> np.ndarray:
    """``Q`` applied along the last axis of ``X``."""
    out = np.zeros(X.shape[:-1])
    for alpha, q in Q.terms:
        mono = np.full(X.shape[:-1], q)
        for i, a in enumerate(alpha):
            if a:
                mono = mono * X[..., i] ** a
        out += mono
    return out


def _block_stats(Q: Polynomial, n: int, k: CovarianceKernel, cfg: McConfig, block: int, size: int):
    rng = block_rng(cfg.seed, block)
    s = rng.random((size, n))
    G = k(s[:, :, None], s[:, None, :])
    G = 0.5 * (G + np.swapaxes(G, 1, 2))
    L = _cholesky(G, cfg.jitter)
    X = L @ rng.standard_normal((size, n, Q.m))
    y = np.prod(_poly_values(Q, X), axis=1)
    mean = float(np.mean(y))
    return size, mean, float(np.sum((y - mean) ** 2))


def estimate(Q: Polynomial, n: int, k: CovarianceKernel, cfg: McConfig | None = None) -> McEstimate:
    """Estimate ``int_{simplex} E[prod_k Q(X(s_k))] ds`` as ``E_uniform-cube[...] / n!``."""
    cfg = cfg or McConfig()
    if n < 1:
        raise ValidationError("Monte Carlo needs n >= 1")
    sizes = [BLOCK] * (cfg.samples // BLOCK)
    if cfg.samples % BLOCK:
        sizes.append(cfg.samples % BLOCK)
    jobs = list(enumerate(sizes))
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            stats = list(pool.map(lambda job: _block_stats(Q, n, k, cfg, *job), jobs))
    else:
        stats = [_block_stats(Q, n, k, cfg, b, size) for b, size in jobs]

    # pairwise (Chan et al.) merge in block order
    count, mean, m2 = 0, 0.0, 0.0
    for c, mu, s2 in stats:
        delta = mu - mean
        total = count + c
        mean += delta * c / total
        m2 += s2 + delta * delta * count * c / total
        count = total
    std = math.sqrt(m2 / (count - 1)) if count > 1 else 0.0
    scale = math.factorial(n)
    return McEstimate(mean / scale, std / math.sqrt(count) / scale, count)
