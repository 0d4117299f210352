"""Seeded random binary CSP generators: Model D, Model RB (optionally forced) and geometric.

Tightness is the fraction of value pairs a relation forbids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CONFLICTS, Constraint, CspInstance, Relation


class GeneratorError(ValueError):
    pass


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _pair_from_index(k: int, n: int):
    # row-major enumeration of pairs (i, j), i < j
    i = 0
    row = n - 1
    while k >= row:
        k -= row
        i += 1
        row -= 1
    return i, i + 1 + k


def _pick_pairs(n: int, e: int, rng) -> list:
    total = n * (n - 1) // 2
    if e > total:
        raise GeneratorError(f"cannot place {e} constraints on {n} variables (max {total})")
    idx = sorted(int(k) for k in rng.choice(total, size=e, replace=False))
    return [_pair_from_index(k, n) for k in idx]


def _forbidden(d: int, k: int, rng, avoid: int | None = None) -> frozenset:
    """k distinct tuples over d x d, never the tuple with flat index ``avoid``."""
    pool = d * d - (avoid is not None)
    flat = rng.choice(pool, size=k, replace=False) if k else []
    out = []
    for f in flat:
        f = int(f)
        if avoid is not None and f >= avoid:
            f += 1
        out.append((f // d, f % d))
    return frozenset(out)


def _build(name, n, d, pairs, k, rng, planted=None) -> CspInstance:
    cons = []
    for cid, (x, y) in enumerate(pairs):
        avoid = None if planted is None else planted[x] * d + planted[y]
        cons.append(Constraint(cid, (x, y), Relation(CONFLICTS, _forbidden(d, k, rng, avoid))))
    dom = tuple(range(d))
    return CspInstance(name, (dom,) * n, tuple(cons))


@dataclass(frozen=True)
class ModelDParams:
    n: int
    d: int
    e: int
    tightness: float
    seed: int = 0


@dataclass(frozen=True)
class ModelRbParams:
    n: int
    alpha: float
    r: float
    p: float
    forced: bool = True
    seed: int = 0

    @property
    def d(self) -> int:
        return round_half_up(self.n ** self.alpha)

    @property
    def e(self) -> int:
        return round_half_up(self.r * self.n * math.log(self.n))


@dataclass(frozen=True)
class GeoParams:
    n: int
    d: int
    distance: float
    tightness: float
    seed: int = 0


def _check_tightness(t):
    if not 0.0 <= t <= 1.0:
        raise GeneratorError(f"tightness {t} outside [0, 1]")


def model_d_name(p: ModelDParams) -> str:
    return f"rand-2-{p.n}-{p.d}-{p.e}-{round_half_up(1000 * p.tightness)}-{p.seed}"


def gen_model_d(p: ModelDParams) -> CspInstance:
    _check_tightness(p.tightness)
    if p.n < 1 or p.d < 1 or p.e < 0:
        raise GeneratorError("n, d must be positive and e non-negative")
    rng = np.random.default_rng(p.seed)
    pairs = _pick_pairs(p.n, p.e, rng)
    k = round_half_up(p.tightness * p.d * p.d)
    return _build(model_d_name(p), p.n, p.d, pairs, k, rng)


def gen_model_rb(p: ModelRbParams):
    """Returns ``(instance, planted)``; ``planted`` is None unless forced."""
    if p.n < 2 or p.alpha <= 0 or p.r <= 0:
        raise GeneratorError("Model RB needs n >= 2, alpha > 0, r > 0")
    if not 0.0 <= p.p <= 1.0:
        raise GeneratorError(f"tightness {p.p} outside [0, 1]")
    d, e = p.d, p.e
    if d < 2:
        raise GeneratorError(f"derived domain size {d} < 2")
    k = round_half_up(p.p * d * d)
    if p.forced and k > d * d - 1:
        raise GeneratorError("forced instance cannot forbid every tuple")
    rng = np.random.default_rng(p.seed)
    planted = None
    if p.forced:
        planted = {v: int(x) for v, x in enumerate(rng.integers(d, size=p.n))}
    pairs = _pick_pairs(p.n, e, rng)
    name = f"frb{p.n}-{d}-{p.seed}" if p.forced else f"rb-{p.n}-{d}-{e}-{p.seed}"
    inst = _build(name, p.n, d, pairs, k, rng, planted)
    return inst, planted


def gen_geo(p: GeoParams, points=None) -> CspInstance:
    """Constraint between every pair of unit-square points within ``distance``.

    ``points`` overrides the random placement (shape ``(n, 2)``).
    """
    _check_tightness(p.tightness)
    if not 0.0 <= p.distance <= math.sqrt(2):
        raise GeneratorError("distance must lie in [0, sqrt(2)]")
    rng = np.random.default_rng(p.seed)
    pts = rng.random((p.n, 2))
    if points is not None:
        pts = np.asarray(points, dtype=float)
        if pts.shape != (p.n, 2):
            raise GeneratorError("points must have shape (n, 2)")
    pairs = [
        (i, j) for i in range(p.n) for j in range(i + 1, p.n)
        if math.dist(pts[i], pts[j]) <= p.distance
    ]
    k = round_half_up(p.tightness * p.d * p.d)
    name = f"geo-{p.n}-{p.d}-{round_half_up(1000 * p.distance)}-{round_half_up(1000 * p.tightness)}-{p.seed}"
    return _build(name, p.n, p.d, pairs, k, rng)
