"""The Heisenberg nilmanifold H / Gamma with two commuting rotations.

H is R^3 with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab') and Gamma is the
integer lattice.  Every coset has a unique representative in [0,1)^3,
computed by :func:`canonical`.  The rotations are S(h) = s h and T(h) = t h
with s = (alpha, 0, 0) and t = (0, 1/alpha, alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ResourceError

CBRT2 = 2.0 ** (1.0 / 3.0)
ALPHAS = {"cbrt2": CBRT2}


@dataclass(frozen=True)
class HPoint:
    a: float
    b: float
    c: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class NilPoint:
    a: float
    b: float
    c: float

    def __post_init__(self):
        for v in (self.a, self.b, self.c):
            if not 0.0 <= v < 1.0:
                raise ContractError(f"NilPoint coordinates must lie in [0,1), got {v}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)


IDENTITY = HPoint(0.0, 0.0, 0.0)
BASE_POINT = NilPoint(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class RotationParams:
    alpha: float = CBRT2

    def __post_init__(self):
        if not self.alpha > 0:
            raise ContractError("alpha must be positive")

    @property
    def s(self) -> HPoint:
        return HPoint(self.alpha, 0.0, 0.0)

    @property
    def t(self) -> HPoint:
        return HPoint(0.0, 1.0 / self.alpha, self.alpha)

    def s_power(self, n: int) -> HPoint:
        return HPoint(n * self.alpha, 0.0, 0.0)

    def t_power(self, m: int) -> HPoint:
        # t^m stays in the abelian subgroup a = 0
        return HPoint(0.0, m / self.alpha, m * self.alpha)


def parse_alpha(text: str) -> float:
    if text in ALPHAS:
        return ALPHAS[text]
    try:
        return float(text)
    except ValueError as exc:
        raise ContractError(f"alpha must be a number or one of {sorted(ALPHAS)}") from exc


def mul(g: HPoint, h: HPoint) -> HPoint:
    return HPoint(g.a + h.a, g.b + h.b, g.c + h.c + g.a * h.b)


def frac(x: float) -> float:
    r = x - math.floor(x)
    return 0.0 if r >= 1.0 else r


def _split(x: float) -> tuple[float, float]:
    """(floor, fractional part) with x - floor rounded into [0, 1)."""
    fl = math.floor(x)
    r = x - fl
    if r >= 1.0:  # tiny negative x: the remainder rounds up to 1
        return fl + 1, 0.0
    return fl, r


def canonical(h: HPoint) -> NilPoint:
    fb, b = _split(h.b)
    return NilPoint(frac(h.a), b, frac(h.c - h.a * fb))


def lift(p: NilPoint) -> HPoint:
    return HPoint(p.a, p.b, p.c)


def apply_S(p: NilPoint, params: RotationParams = RotationParams(), times: int = 1) -> NilPoint:
    return canonical(mul(params.s_power(times), lift(p)))


def apply_T(p: NilPoint, params: RotationParams = RotationParams(), times: int = 1) -> NilPoint:
    return canonical(mul(params.t_power(times), lift(p)))


def circle_distance(x: float, y: float) -> float:
    d = frac(x - y)
    return min(d, 1.0 - d)


def distance(p: NilPoint, q: NilPoint) -> float:
    """Max over coordinates of the circle distance, in the canonical chart."""
    return max(circle_distance(u, v) for u, v in zip(p.as_tuple(), q.as_tuple()))


def _circ(x: np.ndarray) -> np.ndarray:
    d = x - np.floor(x)
    return np.minimum(d, 1.0 - d)


@dataclass(frozen=True)
class WitnessReport:
    c: float
    alpha: float
    epsilon: float
    n: int
    m: int
    distances: tuple[float, float, float, float]
    quadruple: tuple[NilPoint, NilPoint, NilPoint, NilPoint]

    @property
    def max(self) -> float:
        return max(self.distances)

    @property
    def bound(self) -> float:
        return 6 * self.epsilon

    @property
    def passed(self) -> bool:
        return self.max < self.bound

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "distances": list(self.distances), "max": self.max,
                "bound": self.bound, "pass": self.passed,
                "quadruple": [list(p.as_tuple()) for p in self.quadruple]}


def _first_index(pred, start: int, budget: int, chunk: int = 1 << 20) -> int | None:
    k = start
    while k <= budget:
        idx = np.arange(k, min(k + chunk, budget + 1), dtype=np.float64)
        hit = np.nonzero(pred(idx))[0]
        if len(hit):
            return int(idx[hit[0]])
        k += chunk
    return None


def witness_search(c: float, alpha: float = CBRT2, epsilon: float = 0.01,
                   n_budget: int = 10**7, m_budget: int = 10**9) -> WitnessReport:
    """Build a quadruple (x, S^n x, T^m x, S^n T^m x) close to
    (Gamma, z, z, z) with z = (0, 0, c) Gamma.

    n is the least positive integer with {n alpha} < eps and c/(n alpha) < eps;
    x = (0, c/(n alpha), 0).  Then m is the least positive integer with
    m/alpha + c/(n alpha) within eps/(1 + n alpha) of an integer and m alpha
    within eps of c mod 1.  The distances of the final quadruple are measured
    directly rather than inferred from these conditions.
    """
    if not 0.0 < epsilon < 1.0:
        raise ContractError("epsilon must lie in (0, 1)")
    if not 0.0 <= c < 1.0:
        raise ContractError("c must lie in [0, 1)")
    params = RotationParams(alpha)
    target = NilPoint(0.0, 0.0, c)
    if c == 0.0:
        quad = (BASE_POINT,) * 4
        return WitnessReport(c, alpha, epsilon, 0, 0, (0.0,) * 4, quad)
    n = _first_index(lambda k: ((k * alpha) % 1.0 < epsilon) & (c / (k * alpha) < epsilon), 1, n_budget)
    if n is None:
        raise ResourceError(f"no n <= {n_budget} meets the n-conditions", best=None)
    beta = c / (n * alpha)
    delta_b = epsilon / (1.0 + n * alpha)
    m = _first_index(lambda k: (_circ(k / alpha + beta) < delta_b) & (_circ(k * alpha - c) < epsilon),
                     1, m_budget)
    if m is None:
        raise ResourceError(f"no m <= {m_budget} meets the m-conditions", best={"n": n})
    x = HPoint(0.0, beta, 0.0)
    quad = (canonical(x),
            canonical(mul(params.s_power(n), x)),
            canonical(mul(params.t_power(m), x)),
            canonical(mul(params.s_power(n), mul(params.t_power(m), x))))
    dists = (distance(quad[0], BASE_POINT), distance(quad[1], target),
             distance(quad[2], target), distance(quad[3], target))
    return WitnessReport(c, alpha, epsilon, n, m, dists, quad)


def anchored_distances(c: float, alpha: float, ns: np.ndarray, ms: np.ndarray) -> np.ndarray:
    """Max distance of (Gamma, S^n Gamma, T^m Gamma, S^n T^m Gamma) to
    (Gamma, z, z, z) for the grid ns x ms (shape (len(ns), len(ms)))."""
    n = ns.astype(np.float64)[:, None]
    m = ms.astype(np.float64)[None, :]
    a_n = n * alpha
    sa = _circ(a_n)
    d1 = np.maximum(sa, _circ(np.zeros_like(a_n) - c))
    d2 = np.maximum(_circ(m / alpha), _circ(m * alpha - c))
    b = m / alpha
    third = m * alpha + n * m - a_n * np.floor(b)
    d3 = np.maximum(np.maximum(sa, _circ(b)), _circ(third - c))
    return np.maximum(np.maximum(d1, d2), d3)


def strong_witness_scan(c: float, alpha: float = CBRT2, epsilon: float = 0.01, bound: int = 1000) -> bool:
    """Whether some anchored quadruple with |n|, |m| <= bound is within
    epsilon of (Gamma, z, z, z).

    The second point S^n Gamma = ({n alpha}, 0, 0) alone must be within
    epsilon of z; every n failing that is discarded before scanning m, which
    is exact since the quadruple distance is a maximum.
    """
    ns = np.arange(-bound, bound + 1)
    d1 = np.maximum(_circ(ns * alpha), circle_distance(0.0, c))
    keep = ns[d1 < epsilon]
    ms = np.arange(-bound, bound + 1)
    for start in range(0, len(keep), 64):
        if (anchored_distances(c, alpha, keep[start:start + 64], ms) < epsilon).any():
            return True
    return False
