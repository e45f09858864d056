"""Robinson tiles, supertiles, validity checking and fault lines.

Edge encoding.  Every tile edge is crossed by the central arrow of the tile,
which either leaves the tile through that edge (``outgoing``) or enters it.
An edge may also be crossed by one thin line at offset -1 or +1 along the edge
(x offset for north/south edges, y offset for east/west edges), in absolute
coordinates.  Two tiles fit along an edge when exactly one of them points out
through it and both carry the thin line at the same offset.

The five base tiles are a cross and four arm tiles; their D4 images give the
28 tiles.  Supertiles are produced by placing the four quadrant supertiles
(each facing the new centre), dropping a cross in the middle and filling the
middle row and column by forced propagation outward from the cross.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContractError
from .grid import Alphabet, Pattern, Rect, Verdict, occurrences
from .substitution import check_side

N, E, S, W = 0, 1, 2, 3
EDGE_NAMES = ("N", "E", "S", "W")
OPPOSITE = (S, W, N, E)
STEP = {N: (0, 1), E: (1, 0), S: (0, -1), W: (-1, 0)}
# facing direction (sx, sy) of the cross L for orientation k
FACES = ((1, 1), (-1, 1), (-1, -1), (1, -1))

ALPHABET = Alphabet(tuple(f"R{i:02d}" for i in range(28)))


@dataclass(frozen=True)
class EdgeLabel:
    outgoing: bool
    side: int = 0

    def fits(self, other: "EdgeLabel") -> bool:
        return self.outgoing != other.outgoing and self.side == other.side


@dataclass(frozen=True)
class RobinsonTile:
    id: int
    edges: tuple[EdgeLabel, EdgeLabel, EdgeLabel, EdgeLabel]
    is_cross: bool
    base: int
    rotation: int
    reflection: int

    def fits(self, edge: int, other: "RobinsonTile") -> bool:
        """Whether ``other`` may sit next to this tile across ``edge``."""
        return self.edges[edge].fits(other.edges[OPPOSITE[edge]])


def _edges(spec):
    return tuple(EdgeLabel(o, s) for o, s in spec)


_BASE = (
    # cross facing north-east
    _edges([(True, 1), (True, 1), (True, 0), (True, 0)]),
    # arm pointing north
    _edges([(True, 0), (False, 0), (False, 0), (False, 0)]),
    # arm with a parallel thin line
    _edges([(True, 1), (False, 0), (False, 1), (False, 0)]),
    # arm crossed by a thin line on its tail side
    _edges([(True, 0), (False, -1), (False, 0), (False, -1)]),
    # arm with both
    _edges([(True, 1), (False, -1), (False, 1), (False, -1)]),
)


def _rotate(edges):
    """Quarter turn counter-clockwise."""
    n, e, s, w = edges
    return (EdgeLabel(e.outgoing, -e.side), EdgeLabel(s.outgoing, s.side),
            EdgeLabel(w.outgoing, -w.side), EdgeLabel(n.outgoing, n.side))


def _reflect(edges):
    """Mirror across the vertical axis."""
    n, e, s, w = edges
    return (EdgeLabel(n.outgoing, -n.side), w, EdgeLabel(s.outgoing, -s.side), e)


def _d4(edges, rotation: int, reflection: int):
    if reflection:
        edges = _reflect(edges)
    for _ in range(rotation):
        edges = _rotate(edges)
    return edges


@lru_cache(maxsize=None)
def tileset() -> tuple[RobinsonTile, ...]:
    seen: dict = {}
    for base, edges in enumerate(_BASE):
        for reflection in (0, 1):
            for rotation in range(4):
                img = _d4(edges, rotation, reflection)
                if img not in seen:
                    seen[img] = RobinsonTile(len(seen), img, base == 0, base, rotation, reflection)
    return tuple(seen.values())


def tile_table() -> list[dict]:
    return [{"id": t.id, "base": t.base, "rotation": t.rotation, "reflection": t.reflection,
             "cross": t.is_cross,
             "edges": {EDGE_NAMES[k]: ["out" if e.outgoing else "in", e.side]
                       for k, e in enumerate(t.edges)}}
            for t in tileset()]


def rotate_tile(tile_id: int, turns: int = 1) -> int:
    edges = tileset()[tile_id].edges
    for _ in range(turns % 4):
        edges = _rotate(edges)
    return _edge_index()[edges]


def reflect_tile(tile_id: int) -> int:
    return _edge_index()[_reflect(tileset()[tile_id].edges)]


@lru_cache(maxsize=None)
def _edge_index() -> dict:
    return {t.edges: t.id for t in tileset()}


@lru_cache(maxsize=None)
def fit_table() -> np.ndarray:
    """``fit[e, a, b]``: tile b may sit across edge e of tile a."""
    ts = tileset()
    fit = np.zeros((4, len(ts), len(ts)), dtype=bool)
    for e in range(4):
        for a in ts:
            for b in ts:
                fit[e, a.id, b.id] = a.fits(e, b)
    return fit


@lru_cache(maxsize=None)
def cross_mask() -> np.ndarray:
    return np.array([t.is_cross for t in tileset()])


def cross_id(orientation: int) -> int:
    sx, sy = FACES[orientation]
    spec = [(True, sx if sy == 1 else 0), (True, sy if sx == 1 else 0),
            (True, sx if sy == -1 else 0), (True, sy if sx == -1 else 0)]
    return _edge_index()[_edges(spec)]


def _candidates(grid: np.ndarray, x: int, y: int) -> np.ndarray:
    fit = fit_table()
    ok = np.ones(len(tileset()), dtype=bool)
    h, w = grid.shape
    for e, (dx, dy) in STEP.items():
        u, v = x + dx, y + dy
        if 0 <= u < w and 0 <= v < h and grid[v, u] >= 0:
            ok &= fit[OPPOSITE[e], grid[v, u]]
    return np.nonzero(ok)[0]


def _fill_lines(grid: np.ndarray, cells: list[tuple[int, int]], limit: int | None = None) -> list[np.ndarray]:
    """All ways to fill ``cells`` (in the given order) consistently with the grid."""
    solutions: list[np.ndarray] = []

    def go(k: int) -> bool:
        if k == len(cells):
            solutions.append(grid.copy())
            return limit is not None and len(solutions) >= limit
        x, y = cells[k]
        for t in _candidates(grid, x, y):
            grid[y, x] = t
            if go(k + 1):
                return True
        grid[y, x] = -1
        return False

    go(0)
    return solutions


def _outward_cells(size: int, center: int, rows: bool = True, cols: bool = True) -> list[tuple[int, int]]:
    cells = []
    for i in range(1, size):
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            if (dy == 0 and not rows) or (dx == 0 and not cols):
                continue
            x, y = center + dx * i, center + dy * i
            if 0 <= x < size and 0 <= y < size:
                cells.append((x, y))
    return cells


# quadrant offsets (SW, SE, NW, NE) and the orientation making each face the centre
_QUADS = ((0, 0), (1, 0), (0, 1), (1, 1))
_INWARD = (0, 1, 3, 2)
_OUTWARD = (2, 3, 1, 0)


@lru_cache(maxsize=None)
def _supertile_cells(n: int, orientation: int) -> np.ndarray:
    if n == 1:
        return np.array([[cross_id(orientation)]], dtype=np.int16)
    size, half = 2**n - 1, 2 ** (n - 1)
    grid = np.full((size, size), -1, dtype=np.int16)
    for (qx, qy), k in zip(_QUADS, _INWARD):
        grid[qy * half:qy * half + half - 1, qx * half:qx * half + half - 1] = _supertile_cells(n - 1, k)
    c = half - 1
    grid[c, c] = cross_id(orientation)
    sols = _fill_lines(grid, _outward_cells(size, c), limit=2)
    if len(sols) != 1:
        raise AssertionError(f"supertile({n},{orientation}) is not forced: {len(sols)} fillings")
    out = sols[0]
    out.setflags(write=False)
    return out


def supertile(n: int, orientation: int = 0) -> Pattern:
    """Order-n supertile, side 2^n - 1, centred on the origin."""
    if n < 1:
        raise ContractError("supertile order must be positive")
    if orientation not in range(4):
        raise ContractError("orientation must be 0..3")
    side = 2**n - 1
    check_side(side, "supertile")
    c = side // 2
    return Pattern._trusted(Rect(-c, -c, side, side), _supertile_cells(n, orientation), ALPHABET)


def quadrant_assembly(n: int, orientations=_OUTWARD) -> np.ndarray:
    """Four order-n supertiles with an empty middle row and column (-1 cells)."""
    L = 2**n - 1
    size = 2 * L + 1
    check_side(size, "assembly")
    grid = np.full((size, size), -1, dtype=np.int16)
    for (qx, qy), k in zip(_QUADS, orientations):
        grid[qy * (L + 1):qy * (L + 1) + L, qx * (L + 1):qx * (L + 1) + L] = _supertile_cells(n, k)
    return grid


def _as_patterns(grids: list[np.ndarray], origin: tuple[int, int]) -> list[Pattern]:
    pats = [Pattern._trusted(Rect(origin[0], origin[1], g.shape[1], g.shape[0]), g, ALPHABET) for g in grids]
    return sorted(pats, key=lambda p: p.cells.tobytes())


def two_fault_completions(n: int, orientations=_OUTWARD) -> list[Pattern]:
    """All fillings of the middle row and column between four order-n supertiles.

    By default the quadrants face away from the centre, which is the picture
    of a tiling with two fault lines meeting at the centre cell.
    """
    grid = quadrant_assembly(n, orientations)
    L = 2**n - 1
    cells = [(L, L)] + _outward_cells(grid.shape[0], L)
    return _as_patterns(_fill_lines(grid, cells), (-L, -L))


def one_fault_completions(n: int) -> list[Pattern]:
    """All fillings of the column between two order-n supertiles facing apart."""
    L = 2**n - 1
    check_side(2 * L + 1, "assembly")
    grid = np.full((L, 2 * L + 1), -1, dtype=np.int16)
    grid[:, :L] = _supertile_cells(n, 1)
    grid[:, L + 1:] = _supertile_cells(n, 0)
    cells = [(L, y) for y in range(L)]
    return _as_patterns(_fill_lines(grid, cells), (-L, -(L // 2)))


@dataclass(frozen=True)
class EdgeViolation:
    x: int
    y: int
    edge: str


@dataclass(frozen=True)
class LatticeViolation:
    missing: tuple[tuple[int, int], ...]  # one non-cross lattice cell per offset


def _check_alphabet(p: Pattern) -> None:
    if p.alphabet.size != 28:
        raise ContractError("not a Robinson patch: alphabet must have 28 symbols")


def is_valid(patch: Pattern) -> Verdict:
    _check_alphabet(patch)
    g = patch.cells.astype(np.intp)
    fit = fit_table()
    x0, y0 = patch.support.x0, patch.support.y0
    bad_h = ~fit[E, g[:, :-1], g[:, 1:]]
    bad_v = ~fit[N, g[:-1, :], g[1:, :]]
    first = None
    for edge, bad in (("E", bad_h), ("N", bad_v)):
        ys, xs = np.nonzero(bad)
        if len(ys):
            cand = (int(ys[0]), int(xs[0]), edge)
            if first is None or cand[:2] < first[:2]:
                first = cand
    if first is not None:
        return Verdict(False, EdgeViolation(first[1] + x0, first[0] + y0, first[2]))
    offsets = lattice_offsets(patch)
    if not offsets:
        crosses = cross_mask()[g]
        missing = []
        for oy in (0, 1):
            for ox in (0, 1):
                sub = crosses[(oy - y0) % 2::2, (ox - x0) % 2::2]
                ys, xs = np.nonzero(~sub)
                j, i = int(ys[0]), int(xs[0])
                missing.append(((ox - x0) % 2 + 2 * i + x0, (oy - y0) % 2 + 2 * j + y0))
        return Verdict(False, LatticeViolation(tuple(missing)))
    return Verdict(True)


def lattice_offsets(patch: Pattern) -> list[tuple[int, int]]:
    """Offsets (ox, oy) mod 2 whose coset of (2Z)^2 is entirely covered by crosses."""
    crosses = cross_mask()[patch.cells.astype(np.intp)]
    x0, y0 = patch.support.x0, patch.support.y0
    out = []
    for oy in (0, 1):
        for ox in (0, 1):
            if crosses[(oy - y0) % 2::2, (ox - x0) % 2::2].all():
                out.append((ox, oy))
    return out


@dataclass(frozen=True)
class FaultLineReport:
    horizontal: int | None = None
    vertical: int | None = None
    cross_counts: dict | None = None
    order: int = 0

    def lines(self) -> int:
        return (self.horizontal is not None) + (self.vertical is not None)

    def cells(self, patch: Pattern) -> list[tuple[int, int]]:
        s = patch.support
        out = []
        if self.horizontal is not None:
            out += [(x, self.horizontal) for x in range(s.x0, s.x1)]
        if self.vertical is not None:
            out += [(self.vertical, y) for y in range(s.y0, s.y1)]
        return out

    def to_json(self) -> dict:
        return {"horizontal": self.horizontal, "vertical": self.vertical,
                "cross_counts": self.cross_counts or {}, "order": self.order}


def largest_supertile(patch: Pattern):
    """The largest order with a supertile occurrence, with its first position."""
    top = int(np.log2(min(patch.width, patch.height) + 1))
    for k in range(top, 0, -1):
        hits = []
        for o in range(4):
            hits += occurrences(supertile(k, o), patch)
        if hits:
            return k, min(hits, key=lambda v: v.key())
    return 0, None


def fault_lines(patch: Pattern) -> FaultLineReport:
    """Lines of the patch not covered by its largest visible supertile grid.

    The order-k supertiles of a hierarchical tiling sit on a grid of period
    2^k, separated by single rows and columns.  Taking the largest k with a
    visible supertile, those separating rows and columns inside the patch
    are the fault candidates; among them only lines carrying at most one
    cross qualify, and the one with the fewest crosses is reported.
    """
    if not is_valid(patch):
        raise ContractError("fault_lines needs a valid patch")
    k, hit = largest_supertile(patch)
    if hit is None:
        return FaultLineReport(order=0)
    period = 2**k
    s = patch.support
    crosses = cross_mask()[patch.cells.astype(np.intp)]
    # hit is the shift placing the centred supertile; its lower-left cell is
    ll_x, ll_y = hit.n - (period // 2 - 1), hit.m - (period // 2 - 1)

    def pick(lo, hi, anchor, count):
        best = None
        for t in range(lo, hi):
            if (t - anchor) % period == period - 1:
                c = count(t)
                if c <= 1 and (best is None or c < best[1]):
                    best = (t, c)
        return best

    row = pick(s.y0, s.y1, ll_y, lambda y: int(crosses[y - s.y0].sum()))
    col = pick(s.x0, s.x1, ll_x, lambda x: int(crosses[:, x - s.x0].sum()))
    counts = {}
    if row:
        counts["horizontal"] = row[1]
    if col:
        counts["vertical"] = col[1]
    return FaultLineReport(row[0] if row else None, col[0] if col else None, counts, k)


def palette() -> list[tuple[int, int, int]]:
    shades = {0: (200, 30, 30), 1: (235, 235, 235), 2: (170, 200, 235), 3: (235, 210, 150), 4: (150, 200, 150)}
    return [shades[t.base] for t in tileset()]
