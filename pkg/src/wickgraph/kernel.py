"""Scalar covariance kernels ``f(s, t)`` on ``[0, 1]^2``."""
from __future__ import annotations

import hashlib
import warnings
from pathlib import Path

import numpy as np

from .errors import ValidationError

PRESETS = ("brownian_motion", "brownian_bridge", "product", "constant", "exponential")

# kernels whose only non-smoothness sits on the diagonal s == t
_DIAGONAL_KINK = {"brownian_motion", "brownian_bridge", "exponential"}

_TIME_SLACK = 1e-12


class CovarianceKernel:
    """Symmetric covariance function, either an analytic preset or a tabulated grid.

    Calling the kernel evaluates it elementwise on numpy arrays without range
    checks; :meth:`eval` is the checked scalar entry point.
    """

    def __init__(self, variant: str, scale: float = 1.0, table: np.ndarray | None = None):
        if variant not in PRESETS and variant != "grid":
            raise ValidationError(f"unknown kernel {variant!r}; choose from {PRESETS + ('grid',)}")
        if variant == "exponential" and not scale > 0:
            raise ValidationError("exponential kernel needs scale > 0")
        self.variant = variant
        self.scale = float(scale)
        self.table = None
        if variant == "grid":
            if table is None:
                raise ValidationError("grid kernel needs a table")
            self.table = _symmetrized(np.asarray(table, dtype=float))
            self.table.setflags(write=False)

    @classmethod
    def preset(cls, name: str, scale: float = 1.0) -> "CovarianceKernel":
        if name not in PRESETS:
            raise ValidationError(f"unknown preset {name!r}; choose from {PRESETS}")
        return cls(name, scale=scale)

    @classmethod
    def from_grid(cls, table) -> "CovarianceKernel":
        return cls("grid", table=table)

    @classmethod
    def from_csv(cls, path: str | Path) -> "CovarianceKernel":
        try:
            table = np.loadtxt(path, delimiter=",", ndmin=2)
        except (OSError, ValueError) as exc:
            raise ValidationError(f"cannot read grid file {path}: {exc}") from exc
        return cls.from_grid(table)

    @classmethod
    def from_config(cls, spec: dict, base_dir: str | Path | None = None) -> "CovarianceKernel":
        """Build from ``{"preset": name[, "scale": rho]}`` or ``{"grid_file": path}``."""
        if "preset" in spec:
            return cls.preset(spec["preset"], scale=spec.get("scale", 1.0))
        if "grid_file" in spec:
            path = Path(spec["grid_file"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            return cls.from_csv(path)
        raise ValidationError(f"kernel config needs 'preset' or 'grid_file': {spec}")

    def to_config(self) -> dict:
        if self.variant == "grid":
            return {"grid": {"nodes": int(self.table.shape[0]), "sha1": self.identity[1]}}
        out = {"preset": self.variant}
        if self.variant == "exponential":
            out["scale"] = self.scale
        return out

    @property
    def identity(self) -> tuple:
        """Hashable value identifying the function, used as a memo key."""
        if self.variant == "grid":
            digest = hashlib.sha1(np.ascontiguousarray(self.table).tobytes()).hexdigest()
            return ("grid", digest, self.table.shape[0])
        if self.variant == "exponential":
            return ("exponential", self.scale)
        return (self.variant,)

    def __eq__(self, other):
        return isinstance(other, CovarianceKernel) and self.identity == other.identity

    def __hash__(self):
        return hash(self.identity)

    def __repr__(self):
        return f"CovarianceKernel({self.variant!r}" + (
            f", scale={self.scale})" if self.variant == "exponential" else ")"
        )

    @property
    def diagonal_kink(self) -> bool:
        """True when the kernel is smooth except across ``s == t``."""
        return self.variant in _DIAGONAL_KINK

    @property
    def breakpoints(self) -> np.ndarray | None:
        """Grid nodes for tabulated kernels (piecewise bilinear between them)."""
        if self.variant != "grid":
            return None
        return np.linspace(0.0, 1.0, self.table.shape[0])

    def __call__(self, s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        v = self.variant
        if v == "brownian_motion":
            return np.minimum(s, t)
        if v == "brownian_bridge":
            return np.minimum(s, t) - s * t
        if v == "product":
            return s * t
        if v == "constant":
            return np.ones(np.broadcast(s, t).shape)
        if v == "exponential":
            return np.exp(-np.abs(s - t) / self.scale)
        return self._bilinear(s, t)

    def _bilinear(self, s, t):
        T = self.table
        N = T.shape[0]
        if N == 1:
            return np.full(np.broadcast(s, t).shape, T[0, 0])
        xs = np.clip(s, 0.0, 1.0) * (N - 1)
        ys = np.clip(t, 0.0, 1.0) * (N - 1)
        i = np.minimum(np.floor(xs).astype(int), N - 2)
        j = np.minimum(np.floor(ys).astype(int), N - 2)
        a = xs - i
        b = ys - j
        return (
            (1 - a) * (1 - b) * T[i, j]
            + a * (1 - b) * T[i + 1, j]
            + (1 - a) * b * T[i, j + 1]
            + a * b * T[i + 1, j + 1]
        )

    def eval(self, s: float, t: float) -> float:
        _check_times((s, t))
        return float(self(s, t))

    def gram(self, times) -> np.ndarray:
        times = np.asarray(times, dtype=float).ravel()
        _check_times(times)
        G = self(times[:, None], times[None, :])
        # exact symmetry regardless of floating-point evaluation order
        return np.triu(G) + np.triu(G, 1).T


def _check_times(times) -> None:
    arr = np.asarray(times, dtype=float)
    if arr.size and (np.any(arr < -_TIME_SLACK) or np.any(arr > 1 + _TIME_SLACK) or np.any(np.isnan(arr))):
        raise ValidationError(f"times must lie in [0, 1], got {arr}")


def _symmetrized(T: np.ndarray) -> np.ndarray:
    if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] < 1:
        raise ValidationError(f"grid table must be square, got shape {T.shape}")
    if not np.all(np.isfinite(T)):
        raise ValidationError("grid table contains non-finite values")
    S = 0.5 * (T + T.T)
    correction = float(np.max(np.abs(S - T)))
    if correction > 1e-9:
        warnings.warn(f"grid table symmetrized; max correction {correction:.3g}", stacklevel=3)
    return S


def gram(k: CovarianceKernel, times) -> np.ndarray:
    return k.gram(times)
