"""Finite-window cube sets, relations and related diagnostics.

A window quadruple is read off one patch: for a base shift v and exponents
(n, m), the four windows sit at v, v + (n,0), v + (0,m) and v + (n,m).  All
patterns in results are re-anchored on the observation window.  Everything
here is a lower approximation of the corresponding closed set of the
infinite system: only generating-form quadruples visible in the patch count.

Result lists are sorted by (base.m, base.n, n, m) unless stated otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ContractError, RangeError
from .grid import Pattern, Rect, ShiftVector, Verdict, subpattern, translate, window_ids

S_VEC = ShiftVector(1, 0)
T_VEC = ShiftVector(0, 1)


@dataclass(frozen=True)
class WindowSpec:
    window: Rect
    nmax: int
    mmax: int

    def __post_init__(self):
        if self.nmax < 0 or self.mmax < 0:
            raise ContractError("shift bounds must be non-negative")

    def to_json(self) -> dict:
        return {"window": self.window.to_json(), "bounds": [self.nmax, self.mmax]}


def centered_window(k: int) -> Rect:
    """The square [-2^(k-1), 2^(k-1) - 1]^2 (a single cell at the origin for k = 0)."""
    if k == 0:
        return Rect(0, 0, 1, 1)
    h = 2 ** (k - 1)
    return Rect(-h, -h, 2 * h, 2 * h)


@dataclass(frozen=True)
class CubeQuadruple:
    base: ShiftVector
    n: int
    m: int
    patterns: tuple[Pattern, Pattern, Pattern, Pattern]
    s_vec: ShiftVector = S_VEC
    t_vec: ShiftVector = T_VEC
    source: int = 0  # index of the patch it was read from, for pooled samples

    def positions(self) -> tuple[ShiftVector, ShiftVector, ShiftVector, ShiftVector]:
        return cube_positions(self.base, self.n, self.m, self.s_vec, self.t_vec)

    def key(self) -> tuple[int, int, int, int]:
        return (self.base.m, self.base.n, self.n, self.m)

    def to_json(self) -> dict:
        return {"base": [self.base.n, self.base.m], "n": self.n, "m": self.m, "source": self.source,
                "windows": [p.rows() for p in self.patterns]}


@dataclass(frozen=True)
class RelationWitness:
    kind: str
    pair: tuple[Pattern, Pattern]
    companion: Pattern
    quadruple: CubeQuadruple

    def to_json(self) -> dict:
        return {"kind": self.kind, "pair": [p.rows() for p in self.pair],
                "companion": self.companion.rows(), "witness": self.quadruple.to_json()}


def cube_positions(base, n, m, s_vec=S_VEC, t_vec=T_VEC):
    sn, tm = s_vec.scaled(n), t_vec.scaled(m)
    return (base, base + sn, base + tm, base + sn + tm)


def read_window(patch: Pattern, window: Rect, v: ShiftVector) -> Pattern:
    """The configuration shifted by v, restricted to the window."""
    return translate(subpattern(patch, window.shifted(v)), v)


def _cells_at(patch: Pattern, window: Rect, v: ShiftVector) -> np.ndarray:
    x, y = window.x0 + v.n - patch.support.x0, window.y0 + v.m - patch.support.y0
    return patch.cells[y:y + window.height, x:x + window.width]


def _fits(patch: Pattern, window: Rect, v: ShiftVector) -> bool:
    return patch.support.contains(window.shifted(v))


class WindowTable:
    """Ids of every placement of a window in a patch.

    ``ids[j, i]`` is the id of the window at shift (v0.n + i, v0.m + j).
    Tables built together by :func:`window_tables` share ids.
    """

    def __init__(self, patch: Pattern, window: Rect, ids: np.ndarray, blocks: np.ndarray):
        self.patch = patch
        self.window = window
        self.ids = ids
        self.blocks = blocks
        self.v0 = ShiftVector(patch.support.x0 - window.x0, patch.support.y0 - window.y0)
        self._cache: dict[int, Pattern] = {}

    @property
    def shape(self) -> tuple[int, int]:
        return self.ids.shape

    def pattern(self, k: int) -> Pattern:
        if k not in self._cache:
            self._cache[k] = Pattern._trusted(self.window, self.blocks[k], self.patch.alphabet)
        return self._cache[k]

    def shift_of(self, i: int, j: int) -> ShiftVector:
        return ShiftVector(self.v0.n + i, self.v0.m + j)

    def id_at(self, v: ShiftVector) -> int:
        i, j = v.n - self.v0.n, v.m - self.v0.m
        if not (0 <= j < self.ids.shape[0] and 0 <= i < self.ids.shape[1]):
            raise RangeError(f"window at shift ({v.n},{v.m}) leaves the patch")
        return int(self.ids[j, i])

    def quadruple_ids(self, n: int, m: int, s_vec=S_VEC, t_vec=T_VEC):
        """Id arrays (a, b, c, d) over all bases where the four windows fit,
        and the (i, j) index offsets of the first base."""
        offs = [(0, 0), (n * s_vec.n, n * s_vec.m), (m * t_vec.n, m * t_vec.m),
                (n * s_vec.n + m * t_vec.n, n * s_vec.m + m * t_vec.m)]
        ny, nx = self.ids.shape
        i0 = max(-dx for dx, _ in offs)
        j0 = max(-dy for _, dy in offs)
        i1 = min(nx - dx for dx, _ in offs)
        j1 = min(ny - dy for _, dy in offs)
        i0, j0 = max(i0, 0), max(j0, 0)
        if i1 <= i0 or j1 <= j0:
            return None
        arrs = tuple(self.ids[j0 + dy:j1 + dy, i0 + dx:i1 + dx] for dx, dy in offs)
        return arrs, (i0, j0)


def window_tables(patches: Sequence[Pattern], window: Rect) -> list[WindowTable]:
    for p in patches[1:]:
        if p.alphabet != patches[0].alphabet:
            raise ContractError("all sampled patches must share one alphabet")
    ids, blocks = window_ids(patches, window.width, window.height)
    return [WindowTable(p, window, k, blocks) for p, k in zip(patches, ids)]


def _as_list(patch) -> list[Pattern]:
    return [patch] if isinstance(patch, Pattern) else list(patch)


def _require_placement(patches: Sequence[Pattern], window: Rect) -> None:
    if not any(p.width >= window.width and p.height >= window.height for p in patches):
        p = patches[0]
        bound = "width" if window.width > p.width else "height"
        raise ContractError(f"window {bound} exceeds the patch {bound}: no placement")


def _exponents(spec: WindowSpec) -> Iterator[tuple[int, int]]:
    for n in range(-spec.nmax, spec.nmax + 1):
        for m in range(-spec.mmax, spec.mmax + 1):
            yield n, m


def cube_set(patch: Pattern, spec: WindowSpec) -> list[CubeQuadruple]:
    """Every window quadruple visible in the patch, in canonical order."""
    _require_placement([patch], spec.window)
    (table,) = window_tables([patch], spec.window)
    ny, nx = table.shape
    out = []
    for j in range(ny):
        for i in range(nx):
            base = table.shift_of(i, j)
            for n, m in _exponents(spec):
                if 0 <= i + n < nx and 0 <= j + m < ny:
                    ks = (table.ids[j, i], table.ids[j, i + n], table.ids[j + m, i], table.ids[j + m, i + n])
                    out.append(CubeQuadruple(base, n, m, tuple(table.pattern(int(k)) for k in ks)))
    return out


def k_set(patch: Pattern, anchor: ShiftVector, spec: WindowSpec) -> list[tuple[Pattern, Pattern, Pattern]]:
    """Distinct triples (S^n x|B, T^m x|B, S^n T^m x|B) for the anchored point,
    listed by first occurrence in (n, m) order."""
    (table,) = window_tables([patch], spec.window)
    table.id_at(anchor)
    seen: dict[tuple[int, int, int], None] = {}
    for n, m in _exponents(spec):
        try:
            key = (table.id_at(anchor + ShiftVector(n, 0)), table.id_at(anchor + ShiftVector(0, m)),
                   table.id_at(anchor + ShiftVector(n, m)))
        except RangeError:
            continue
        seen.setdefault(key, None)
    return [tuple(table.pattern(k) for k in key) for key in seen]


_KINDS = ("R_S", "R_T")


def relation_pairs(patch, spec: WindowSpec, kind: str = "R_S",
                   anchor: ShiftVector | None = None) -> dict[tuple[Pattern, Pattern], RelationWitness]:
    """Window pairs related through a quadruple of shape (p,q,a,a) (R_S) or
    (p,b,q,b) (R_T), each with its first witness in canonical order.

    ``patch`` may be a single patch or a list of patches sampled from the
    same system; a witness always comes from one patch.  With ``anchor`` the
    base is fixed, which gives the anchored (strong) variants.
    """
    if kind not in _KINDS:
        raise ContractError(f"unknown relation kind {kind!r}; expected one of {_KINDS}")
    patches = _as_list(patch)
    _require_placement(patches, spec.window)
    tables = window_tables(patches, spec.window)
    best: dict[tuple[int, int], tuple] = {}
    for t_idx, table in enumerate(tables):
        for n, m in _exponents(spec):
            got = table.quadruple_ids(n, m)
            if got is None:
                continue
            (a, b, c, d), (i0, j0) = got
            if anchor is not None:
                i, j = anchor.n - table.v0.n - i0, anchor.m - table.v0.m - j0
                if not (0 <= j < a.shape[0] and 0 <= i < a.shape[1]):
                    continue
                sl = (slice(j, j + 1), slice(i, i + 1))
                a, b, c, d = a[sl], b[sl], c[sl], d[sl]
                i0, j0 = i0 + i, j0 + j
            if kind == "R_S":
                mask, p, q = c == d, a, b
            else:
                mask, p, q = b == d, a, c
            js, is_ = np.nonzero(mask)
            if len(js) == 0:
                continue
            pp, qq = p[js, is_], q[js, is_]
            codes = pp * (len(table.blocks) + 1) + qq
            uniq, first = np.unique(codes, return_index=True)
            for code, f in zip(uniq.tolist(), first.tolist()):
                pair = (int(pp[f]), int(qq[f]))
                base = table.shift_of(int(is_[f]) + i0, int(js[f]) + j0)
                key = (t_idx, base.m, base.n, n, m)
                if pair not in best or key < best[pair]:
                    best[pair] = key
    out = {}
    for pair, key in sorted(best.items(), key=lambda kv: kv[1]):
        t_idx, bm, bn, n, m = key
        q = _quadruple_at(tables[t_idx], ShiftVector(bn, bm), n, m, source=t_idx)
        comp = q.patterns[2] if kind == "R_S" else q.patterns[1]
        p0, p1 = tables[t_idx].pattern(pair[0]), tables[t_idx].pattern(pair[1])
        label = kind if anchor is None else kind.replace("R_", "R_star_")
        out[(p0, p1)] = RelationWitness(label, (p0, p1), comp, q)
    return out


def _quadruple_at(table: WindowTable, base: ShiftVector, n: int, m: int,
                  s_vec=S_VEC, t_vec=T_VEC, source: int = 0) -> CubeQuadruple:
    pos = cube_positions(base, n, m, s_vec, t_vec)
    return CubeQuadruple(base, n, m, tuple(table.pattern(table.id_at(v)) for v in pos),
                         s_vec, t_vec, source)


def off_diagonal(pairs: dict) -> list:
    return [w for (p, q), w in pairs.items() if p != q]


def distinct_quadruples(patch, spec: WindowSpec) -> dict[tuple[int, int, int, int], CubeQuadruple]:
    """One representative quadruple (first in canonical order) per distinct
    content, keyed by window ids; accepts one patch or a list of patches."""
    patches = _as_list(patch)
    _require_placement(patches, spec.window)
    tables = window_tables(patches, spec.window)
    k = len(tables[0].blocks) + 1
    best: dict[tuple[int, int, int, int], tuple] = {}
    for t_idx, table in enumerate(tables):
        for n, m in _exponents(spec):
            got = table.quadruple_ids(n, m)
            if got is None:
                continue
            (a, b, c, d), (i0, j0) = got
            codes = ((a * k + b) * k + c) * k + d
            flat = codes.reshape(-1)
            uniq, first = np.unique(flat, return_index=True)
            w = a.shape[1]
            for code, f in zip(uniq.tolist(), first.tolist()):
                jj, ii = divmod(f, w)
                quad = (int(a[jj, ii]), int(b[jj, ii]), int(c[jj, ii]), int(d[jj, ii]))
                base = table.shift_of(ii + i0, jj + j0)
                key = (t_idx, base.m, base.n, n, m)
                if quad not in best or key < best[quad]:
                    best[quad] = key
    out = {}
    for quad, key in sorted(best.items(), key=lambda kv: kv[1]):
        t_idx, bm, bn, n, m = key
        out[quad] = _quadruple_at(tables[t_idx], ShiftVector(bn, bm), n, m, source=t_idx)
    return out


def symmetry_closure_check(q: CubeQuadruple, patch: Pattern, spec: WindowSpec) -> Verdict:
    """Check that the symmetric images of q are realized in generating form.

    Verified by reading windows straight from the patch:
    the two coordinate swaps at re-anchored bases, the transpose in the
    transposed patch, the projections onto the S and T pair sets, and the
    degenerate quadruples built from those pairs.
    """
    x0, x1, x2, x3 = q.patterns
    B, base, n, m = spec.window, q.base, q.n, q.m
    if abs(n) > spec.nmax or abs(m) > spec.mmax:
        return Verdict(False, "exponents outside the given bounds")

    def realized(p, window, b, nn, mm, expected, bounds=(spec.nmax, spec.mmax)) -> bool:
        if abs(nn) > bounds[0] or abs(mm) > bounds[1]:
            return False
        pos = cube_positions(b, nn, mm)
        if not all(_fits(p, window, v) for v in pos):
            return False
        # shapes agree by construction, so byte equality is cell equality
        return all(_cells_at(p, window, v).tobytes() == e.cells.tobytes() for v, e in zip(pos, expected))

    checks = [
        ("swap S-pairs", base + ShiftVector(0, m), n, -m, (x2, x3, x0, x1)),
        ("swap T-pairs", base + ShiftVector(n, 0), -n, m, (x1, x0, x3, x2)),
        ("S projection low", base, n, 0, (x0, x1, x0, x1)),
        ("S projection high", base + ShiftVector(0, m), n, 0, (x2, x3, x2, x3)),
        ("T projection left", base, 0, m, (x0, x0, x2, x2)),
        ("T projection right", base + ShiftVector(n, 0), 0, m, (x1, x1, x3, x3)),
    ]
    for name, b, nn, mm, expected in checks:
        if not realized(patch, B, b, nn, mm, expected):
            return Verdict(False, name)
    # in the transposed patch S and T trade places, and so do the bounds
    expected_t = tuple(x.transposed() for x in (x0, x2, x1, x3))
    if not realized(patch.transposed(), B.transposed(), ShiftVector(base.m, base.n), m, n,
                    expected_t, (spec.mmax, spec.nmax)):
        return Verdict(False, "transpose")
    return Verdict(True)


def return_times(patch: Pattern, anchor: ShiftVector, window: Rect, nmax: int, mmax: int) -> list[ShiftVector]:
    """All (n, m) within bounds whose shifted window equals the anchored one."""
    (table,) = window_tables([patch], window)
    target = table.id_at(anchor)
    ny, nx = table.shape
    i, j = anchor.n - table.v0.n, anchor.m - table.v0.m
    lo_i, hi_i = max(0, i - nmax), min(nx, i + nmax + 1)
    lo_j, hi_j = max(0, j - mmax), min(ny, j + mmax + 1)
    js, is_ = np.nonzero(table.ids[lo_j:hi_j, lo_i:hi_i] == target)
    return [ShiftVector(int(a) + lo_i - i, int(b) + lo_j - j) for b, a in zip(js, is_)]


def change_generators(q: CubeQuadruple, patch: Pattern, inverse: bool = False) -> CubeQuadruple:
    """Re-index q for the generators S' = T^-1 S, T' = T (or back, with inverse)."""
    s_vec = q.s_vec + q.t_vec if inverse else q.s_vec - q.t_vec
    B = q.patterns[0].support
    pos = cube_positions(q.base, q.n, q.m, s_vec, q.t_vec)
    for v in pos:
        if not _fits(patch, B, v):
            raise RangeError(f"re-indexed window at shift ({v.n},{v.m}) leaves the patch")
    return CubeQuadruple(q.base, q.n, q.m, tuple(read_window(patch, B, v) for v in pos), s_vec, q.t_vec)


def _pair_codes(table: WindowTable, step: ShiftVector, bound: int) -> set[tuple[int, int]]:
    seen = set()
    k = len(table.blocks) + 1
    for e in range(-bound, bound + 1):
        got = table.quadruple_ids(e, 0, step, T_VEC)
        if got is None:
            continue
        (a, b, _, _), _ = got
        for code in np.unique(a * k + b).tolist():
            seen.add(divmod(code, k))
    return seen


def window_transitivity(patch: Pattern, spec: WindowSpec, direction: str = "T") -> bool:
    """Whether every ordered pair of occurring windows is joined by a power of
    the chosen generator within the bounds."""
    if direction not in ("S", "T"):
        raise ContractError("direction must be 'S' or 'T'")
    _require_placement([patch], spec.window)
    (table,) = window_tables([patch], spec.window)
    occurring = np.unique(table.ids)
    step, bound = (S_VEC, spec.nmax) if direction == "S" else (T_VEC, spec.mmax)
    return len(_pair_codes(table, step, bound)) == len(occurring) ** 2


def window_weak_mixing_proxy(patch: Pattern, spec: WindowSpec) -> bool:
    """Whether every quadruple of occurring windows is realized as
    (x, T^n x, T^m x, T^(n+m) x) within the bounds."""
    _require_placement([patch], spec.window)
    (table,) = window_tables([patch], spec.window)
    occurring = len(np.unique(table.ids))
    k = len(table.blocks) + 1
    seen: set[int] = set()
    for n, m in _exponents(spec):
        got = table.quadruple_ids(n, m, T_VEC, T_VEC)
        if got is None:
            continue
        (a, b, c, d), _ = got
        seen.update(np.unique(((a * k + b) * k + c) * k + d).tolist())
    return len(seen) == occurring**4


def complexity_proxy(patch: Pattern, n: int) -> int:
    """Symbolic stand-in for the S-fiber complexity of the 1x1 cylinder cover.

    A full-width row of the patch is one horizontal orbit segment, so all its
    positions lie in one S-fiber.  For each row the number of distinct
    height-(n+1) column words standing on it is counted; the proxy is the
    maximum over rows.
    """
    if n < 0:
        raise ContractError("n must be non-negative")
    if patch.height < n + 1:
        raise ContractError(f"patch height {patch.height} too small for columns of height {n + 1}")
    cols = sliding_window_view(patch.cells, (n + 1, 1))[..., 0]  # (rows, width, n+1)
    best = 0
    for row in cols:
        best = max(best, len(np.unique(row, axis=0)))
    return best


def quadruples_to_json(quads: Sequence[CubeQuadruple], spec: WindowSpec, summary: bool = False) -> dict:
    out = {"window": spec.window.to_json(), "bounds": [spec.nmax, spec.mmax], "count": len(quads)}
    if not summary:
        out["quadruples"] = [q.to_json() for q in quads]
    return out


def pairs_to_json(pairs: dict, spec: WindowSpec, summary: bool = False) -> dict:
    out = {"window": spec.window.to_json(), "bounds": [spec.nmax, spec.mmax], "count": len(pairs),
           "off_diagonal": len(off_diagonal(pairs))}
    if not summary:
        out["pairs"] = [w.to_json() for w in pairs.values()]
    return out
