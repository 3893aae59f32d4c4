"""Cosine-series potentials, domain walls, and the modulated dimer potential.

All periodic potentials are finite Fourier cosine series with period 1.  The
even-index series plays the role of the unperturbed lattice, the odd-index
series is the dimerizing perturbation, and a domain wall profile interpolates
between the two asymptotic dimerizations.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import GridError

__all__ = [
    "CosineSeries",
    "DomainWall",
    "ModulatedPotential",
    "SuperlatticeBase",
    "eval_series",
    "eval_wall",
    "superlattice_series",
    "dimer_linearization",
]

EVEN = "even-index"
ODD = "odd-index"
MIXED = "mixed"


def _cospi(y: float) -> float:
    """cos(pi*y), exact at half-integer y."""
    r = y % 2.0
    if r == 0.0:
        return 1.0
    if r == 1.0:
        return -1.0
    if r == 0.5 or r == 1.5:
        return 0.0
    return math.cos(math.pi * r)


def _sinpi(y: float) -> float:
    """sin(pi*y), exact at half-integer y."""
    r = y % 2.0
    if r == 0.0 or r == 1.0:
        return 0.0
    if r == 0.5:
        return 1.0
    if r == 1.5:
        return -1.0
    return math.sin(math.pi * r)


@dataclass(frozen=True)
class CosineSeries:
    """Finite cosine series  c0 + sum_p a_p cos(2 pi p x), tagged by index parity.

    ``parity`` is "even-index" (all p even), "odd-index" (all p odd, zero
    constant) or "mixed".  Harmonics are stored sorted with unique positive p.
    """

    parity: str
    constant_term: float = 0.0
    harmonics: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        if self.parity not in (EVEN, ODD, MIXED):
            raise ValueError(f"unknown parity tag {self.parity!r}")
        ps = [p for p, _ in self.harmonics]
        if any(p <= 0 for p in ps):
            raise ValueError("harmonic indices must be positive integers")
        if ps != sorted(set(ps)):
            raise ValueError("harmonics must be sorted with unique p")
        if self.parity == EVEN and any(p % 2 for p in ps):
            raise ValueError("even-index series contains an odd harmonic")
        if self.parity == ODD:
            if any(p % 2 == 0 for p in ps):
                raise ValueError("odd-index series contains an even harmonic")
            if self.constant_term != 0.0:
                raise ValueError("odd-index series must have zero constant term")

    @classmethod
    def even(cls, harmonics: Iterable[tuple[int, float]], constant: float = 0.0) -> "CosineSeries":
        return cls(EVEN, constant, tuple(sorted((int(p), float(a)) for p, a in harmonics)))

    @classmethod
    def odd(cls, harmonics: Iterable[tuple[int, float]]) -> "CosineSeries":
        return cls(ODD, 0.0, tuple(sorted((int(p), float(a)) for p, a in harmonics)))

    @classmethod
    def mixed(cls, harmonics: Iterable[tuple[int, float]], constant: float = 0.0) -> "CosineSeries":
        return cls(MIXED, constant, tuple(sorted((int(p), float(a)) for p, a in harmonics)))

    @classmethod
    def zero(cls) -> "CosineSeries":
        return cls(EVEN, 0.0, ())

    @property
    def max_harmonic(self) -> int:
        return self.harmonics[-1][0] if self.harmonics else 0

    def coefficient(self, p: int) -> float:
        """Cosine coefficient a_p (0 when absent); p=0 returns the constant."""
        if p == 0:
            return self.constant_term
        for q, a in self.harmonics:
            if q == abs(p):
                return a
        return 0.0

    def fourier(self, m: int) -> float:
        """Exponential-basis coefficient Qhat(m): a_|m|/2 for m != 0, constant at m=0."""
        if m == 0:
            return self.constant_term
        return 0.5 * self.coefficient(abs(m))

    def evaluate(self, x):
        """Pointwise value; accepts scalars or arrays, 1-periodic in x."""
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, self.constant_term)
        for p, a in self.harmonics:
            out = out + a * np.cos(2.0 * np.pi * p * x)
        return out if out.ndim else float(out)

    def scaled(self, factor: float) -> "CosineSeries":
        return CosineSeries(
            self.parity,
            factor * self.constant_term,
            tuple((p, factor * a) for p, a in self.harmonics),
        )

    def __add__(self, other: "CosineSeries") -> "CosineSeries":
        coeffs: dict[int, float] = {}
        for p, a in self.harmonics + other.harmonics:
            coeffs[p] = coeffs.get(p, 0.0) + a
        parity = self.parity if self.parity == other.parity else MIXED
        const = self.constant_term + other.constant_term
        harm = tuple(sorted((p, a) for p, a in coeffs.items() if a != 0.0))
        if parity == ODD and const != 0.0:
            parity = MIXED
        return CosineSeries(parity, const, harm)


def eval_series(series: CosineSeries, x) -> float:
    """Evaluate a cosine series at x (1-periodic)."""
    return series.evaluate(x)


@dataclass(frozen=True)
class SuperlatticeBase:
    """Base profile Q entering Q(x+s/2)+Q(x-s/2), by its Fourier data.

    ``base_harmonics`` are pairs (m, Qhat(m)) with m >= 1; ``constant`` is the
    zeroth Fourier coefficient Qhat(0) of Q itself.
    """

    base_harmonics: tuple[tuple[int, float], ...] = ()
    constant: float = 0.0

    def __post_init__(self):
        ms = [m for m, _ in self.base_harmonics]
        if any(m <= 0 for m in ms) or ms != sorted(set(ms)):
            raise ValueError("base harmonics must be sorted, unique, positive")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]], constant: float = 0.0) -> "SuperlatticeBase":
        return cls(tuple(sorted((int(m), float(q)) for m, q in pairs)), float(constant))

    def base_profile(self, x):
        """Q(x) itself: Qhat(0) + sum_m 2 Qhat(m) cos(2 pi m x)."""
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, self.constant)
        for m, q in self.base_harmonics:
            out = out + 2.0 * q * np.cos(2.0 * np.pi * m * x)
        return out if out.ndim else float(out)


def superlattice_series(base: SuperlatticeBase, s: float) -> CosineSeries:
    """Two-translate superlattice Q(x+s/2)+Q(x-s/2) as a cosine series.

    The harmonic-m coefficient is 4 Qhat(m) cos(pi m s); at s=1/2 every odd
    harmonic vanishes exactly and the result has minimal period 1/2.
    """
    harmonics = []
    for m, q in base.base_harmonics:
        a = 4.0 * q * _cospi(m * s)
        if a != 0.0:
            harmonics.append((m, a))
    const = 2.0 * base.constant
    if harmonics and all(m % 2 == 0 for m, _ in harmonics):
        return CosineSeries(EVEN, const, tuple(harmonics))
    if not harmonics:
        return CosineSeries(EVEN, const, ())
    if all(m % 2 == 1 for m, _ in harmonics) and const == 0.0:
        return CosineSeries(ODD, 0.0, tuple(harmonics))
    return CosineSeries(MIXED, const, tuple(harmonics))


def dimer_linearization(base: SuperlatticeBase) -> tuple[CosineSeries, CosineSeries]:
    """Linearize the superlattice about s=1/2.

    Returns (V, W): V is the symmetric-point series Q(.;1/2) (even harmonics,
    coefficient 4 Qhat(m) cos(pi m/2)) and W = d/ds Q(.;1/2) (odd harmonics,
    coefficient -4 pi m Qhat(m) sin(pi m/2)).
    """
    v_harm = []
    w_harm = []
    for m, q in base.base_harmonics:
        if m % 2 == 0:
            a = 4.0 * q * _cospi(0.5 * m)
            if a != 0.0:
                v_harm.append((m, a))
        else:
            a = -4.0 * math.pi * m * q * _sinpi(0.5 * m)
            if a != 0.0:
                w_harm.append((m, a))
    V = CosineSeries(EVEN, 2.0 * base.constant, tuple(v_harm))
    W = CosineSeries(ODD, 0.0, tuple(w_harm))
    return V, W


@dataclass(frozen=True)
class DomainWall:
    """Slow profile kappa(X) with constant limits kappa_plus / kappa_minus.

    Kinds: "tanh" (kappa_plus * tanh(X), antisymmetric), "scaled-tanh"
    (kappa_plus * tanh(X/scale)), and "tabulated" (sampled profile with
    asymptote metadata: beyond |X| > threshold the declared limits are
    substituted).
    """

    kind: str
    kappa_plus: float
    kappa_minus: float
    scale: float = 1.0
    table_x: tuple[float, ...] = ()
    table_values: tuple[float, ...] = ()
    threshold: float = math.inf

    def __post_init__(self):
        if self.kind not in ("tanh", "scaled-tanh", "tabulated"):
            raise ValueError(f"unknown wall kind {self.kind!r}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.kind in ("tanh", "scaled-tanh") and self.kappa_minus != -self.kappa_plus:
            raise ValueError("tanh walls are antisymmetric: kappa_minus = -kappa_plus")
        if self.kind == "tabulated":
            if len(self.table_x) != len(self.table_values) or len(self.table_x) < 2:
                raise ValueError("tabulated wall needs matching sample arrays (>= 2 points)")
            if list(self.table_x) != sorted(self.table_x):
                raise ValueError("tabulated sample points must be increasing")

    @classmethod
    def tanh(cls, kappa_inf: float = 1.0) -> "DomainWall":
        return cls("tanh", kappa_inf, -kappa_inf, 1.0)

    @classmethod
    def scaled_tanh(cls, kappa_inf: float, scale: float) -> "DomainWall":
        return cls("scaled-tanh", kappa_inf, -kappa_inf, scale)

    @classmethod
    def tabulated(
        cls,
        x: Sequence[float],
        values: Sequence[float],
        kappa_plus: float,
        kappa_minus: float,
        threshold: float,
    ) -> "DomainWall":
        return cls(
            "tabulated",
            float(kappa_plus),
            float(kappa_minus),
            1.0,
            tuple(float(v) for v in x),
            tuple(float(v) for v in values),
            float(threshold),
        )

    @classmethod
    def constant(cls, value: float, extent: float = 100.0) -> "DomainWall":
        """Sign-definite wall kappa(X) = value everywhere."""
        return cls.tabulated([-extent, extent], [value, value], value, value, extent)

    def evaluate(self, X):
        X = np.asarray(X, dtype=float)
        if self.kind in ("tanh", "scaled-tanh"):
            out = self.kappa_plus * np.tanh(X / self.scale)
            return out if out.ndim else float(out)
        out = np.empty_like(X)
        lo, hi = self.table_x[0], self.table_x[-1]
        inside = (X >= lo) & (X <= hi)
        above = X > self.threshold
        below = X < -self.threshold
        uncovered = ~inside & ~above & ~below
        if np.any(uncovered):
            bad = np.atleast_1d(X)[np.atleast_1d(uncovered)]
            raise GridError(
                f"tabulated wall queried at X={bad[:3]}... outside its samples "
                f"[{lo}, {hi}] and below the asymptote threshold {self.threshold}"
            )
        out[inside] = np.interp(X[inside], self.table_x, self.table_values)
        out[above] = self.kappa_plus
        out[below] = self.kappa_minus
        return out if out.ndim else float(out)

    def derivative(self, X):
        """kappa'(X); analytic for tanh kinds, centered differences for tables."""
        X = np.asarray(X, dtype=float)
        if self.kind in ("tanh", "scaled-tanh"):
            out = (self.kappa_plus / self.scale) / np.cosh(X / self.scale) ** 2
            return out if out.ndim else float(out)
        tx = np.asarray(self.table_x)
        tv = np.asarray(self.table_values)
        dv = np.gradient(tv, tx)
        out = np.where(np.abs(X) > self.threshold, 0.0, np.interp(X, tx, dv, left=0.0, right=0.0))
        return out if out.ndim else float(out)

    def second_derivative(self, X):
        X = np.asarray(X, dtype=float)
        if self.kind in ("tanh", "scaled-tanh"):
            y = X / self.scale
            out = -2.0 * (self.kappa_plus / self.scale**2) * np.tanh(y) / np.cosh(y) ** 2
            return out if out.ndim else float(out)
        tx = np.asarray(self.table_x)
        tv = np.asarray(self.table_values)
        d2 = np.gradient(np.gradient(tv, tx), tx)
        out = np.where(np.abs(X) > self.threshold, 0.0, np.interp(X, tx, d2, left=0.0, right=0.0))
        return out if out.ndim else float(out)

    def integral(self, X):
        """K(X) = Int_0^X kappa(s) ds; closed form for tanh kinds, smooth in X."""
        X = np.asarray(X, dtype=float)
        if self.kind in ("tanh", "scaled-tanh"):
            y = np.abs(X) / self.scale
            # log cosh, overflow-safe:  |y| + log1p(e^{-2|y|}) - log 2
            logcosh = y + np.log1p(np.exp(-2.0 * y)) - math.log(2.0)
            out = self.kappa_plus * self.scale * logcosh
            return out if out.ndim else float(out)
        tx = np.asarray(self.table_x)
        tv = np.asarray(self.table_values)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (tv[1:] + tv[:-1]) * np.diff(tx))])
        k0 = float(np.interp(0.0, tx, cum))
        inner = np.interp(np.clip(X, tx[0], tx[-1]), tx, cum) - k0
        out = inner + np.where(
            X > tx[-1], self.kappa_plus * (X - tx[-1]), 0.0
        ) + np.where(X < tx[0], self.kappa_minus * (X - tx[0]), 0.0)
        return out if out.ndim else float(out)

    def to_json_dict(self) -> dict:
        if self.kind in ("tanh", "scaled-tanh"):
            return {"kind": self.kind, "kappa_inf": self.kappa_plus, "scale": self.scale}
        return {
            "kind": "tabulated",
            "kappa_inf": self.kappa_plus,
            "kappa_inf_minus": self.kappa_minus,
            "threshold": self.threshold,
            "x": list(self.table_x),
            "values": list(self.table_values),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "DomainWall":
        kind = d.get("kind", "tanh")
        if kind == "tanh":
            return cls.tanh(float(d.get("kappa_inf", 1.0)))
        if kind == "scaled-tanh":
            return cls.scaled_tanh(float(d.get("kappa_inf", 1.0)), float(d.get("scale", 1.0)))
        if kind == "tabulated":
            return cls.tabulated(
                d["x"], d["values"],
                float(d.get("kappa_inf", d["values"][-1])),
                float(d.get("kappa_inf_minus", d["values"][0])),
                float(d.get("threshold", abs(d["x"][-1]))),
            )
        raise ValueError(f"unknown wall kind {kind!r}")


def eval_wall(wall: DomainWall, X) -> float:
    """Evaluate the domain wall profile kappa at X."""
    return wall.evaluate(X)


@dataclass(frozen=True)
class ModulatedPotential:
    """U_delta(x) = V(x) + delta * kappa(delta x) * W(x)."""

    V: CosineSeries
    W: CosineSeries
    wall: DomainWall
    delta: float = 0.0

    def __post_init__(self):
        if self.V.parity != EVEN:
            raise ValueError("V must be an even-index cosine series")
        if self.W.parity != ODD and self.W.harmonics:
            raise ValueError("W must be an odd-index cosine series")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        out = self.V.evaluate(x)
        if self.delta > 0.0:
            out = out + self.delta * self.wall.evaluate(self.delta * x) * self.W.evaluate(x)
        return out if np.ndim(out) else float(out)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def to_json_dict(self) -> dict:
        return {
            "even": [[p, a] for p, a in self.V.harmonics],
            "odd": [[p, a] for p, a in self.W.harmonics],
            "constant": self.V.constant_term,
            "wall": self.wall.to_json_dict(),
            "delta": self.delta,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ModulatedPotential":
        V = CosineSeries.even(tuple((int(p), float(a)) for p, a in d.get("even", [])),
                              float(d.get("constant", 0.0)))
        W = CosineSeries.odd(tuple((int(p), float(a)) for p, a in d.get("odd", [])))
        wall = DomainWall.from_json_dict(d.get("wall", {"kind": "tanh", "kappa_inf": 1.0}))
        return cls(V, W, wall, float(d.get("delta", 0.0)))

    @classmethod
    def from_json(cls, text: str) -> "ModulatedPotential":
        return cls.from_json_dict(json.loads(text))
