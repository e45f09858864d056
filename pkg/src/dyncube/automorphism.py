"""Sliding block codes on sampled 2D languages.

A block code of radius r maps each (2r+1)-square pattern to a symbol; an
optional shift v makes the output at u read the square centred at u + v.
Candidate automorphisms are searched as constraint satisfaction problems:
one variable per occurring (2r+1)-pattern, one constraint per occurring
window of variables, and each constraint requires the image window to be in
the sampled language.  Arc consistency is enforced after every assignment.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .cubes import WindowSpec, relation_pairs
from .errors import ContractError, ResourceError
from .grid import ORIGIN, Alphabet, Pattern, Rect, ShiftVector, Verdict, subpattern, window_ids
from .robinson import fault_lines

DEFAULT_BUDGET = 200_000


@dataclass(frozen=True)
class BlockCode:
    radius: int
    blocks: np.ndarray = field(compare=False)   # (V, 2r+1, 2r+1) sorted lexicographically
    outputs: tuple[int, ...]
    alphabet: Alphabet
    shift: ShiftVector = ORIGIN

    def __post_init__(self):
        k = 2 * self.radius + 1
        if self.blocks.shape[1:] != (k, k) or len(self.outputs) != len(self.blocks):
            raise ContractError("block table does not match the radius")

    @property
    def table(self) -> dict[Pattern, int]:
        r, k = self.radius, 2 * self.radius + 1
        return {Pattern._trusted(Rect(-r, -r, k, k), b, self.alphabet): s
                for b, s in zip(self.blocks, self.outputs)}

    def with_shift(self, v: ShiftVector) -> "BlockCode":
        return BlockCode(self.radius, self.blocks, self.outputs, self.alphabet, self.shift + v)

    def key(self) -> tuple:
        return (self.radius, self.shift.m, self.shift.n, self.blocks.tobytes(), self.outputs)

    def __eq__(self, other) -> bool:
        return isinstance(other, BlockCode) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def reach(self) -> int:
        """How far outside its cell the code reads."""
        return self.radius + max(abs(self.shift.n), abs(self.shift.m))

    def to_json(self) -> dict:
        return {"radius": self.radius, "shift": [self.shift.n, self.shift.m],
                "entries": [[b.tolist(), s] for b, s in zip(self.blocks, self.outputs)]}


def identity_code(alphabet: Alphabet) -> BlockCode:
    blocks = np.arange(alphabet.size, dtype=np.uint8 if alphabet.size <= 256 else np.int32).reshape(-1, 1, 1)
    return BlockCode(0, blocks, tuple(range(alphabet.size)), alphabet)


def symbol_map_code(mapping, alphabet: Alphabet) -> BlockCode:
    code = identity_code(alphabet)
    return BlockCode(0, code.blocks, tuple(int(mapping[a]) for a in alphabet.symbols), alphabet)


def _lookup(code: BlockCode) -> dict[bytes, int]:
    return {b.tobytes(): s for b, s in zip(code.blocks, code.outputs)}


def apply_code(code: BlockCode, patch: Pattern) -> Pattern:
    """Image of the patch; its support is the set of cells whose input square
    lies inside the patch."""
    r, k, v = code.radius, 2 * code.radius + 1, code.shift
    s = patch.support
    x0, y0 = s.x0 + r - v.n, s.y0 + r - v.m
    w, h = s.width - 2 * r, s.height - 2 * r
    if w < 1 or h < 1:
        raise ContractError(f"patch {s.width}x{s.height} too small for a radius-{r} code")
    views = sliding_window_view(patch.cells, (k, k))
    lut = _lookup(code)
    flat = views.reshape(h * w, k * k).astype(code.blocks.dtype)
    # map every distinct window once
    uniq, inv = np.unique(flat, axis=0, return_inverse=True)
    try:
        images = np.array([lut[u.reshape(k, k).tobytes()] for u in uniq])
    except KeyError as exc:
        raise ContractError("patch contains a block outside the code's table") from exc
    out = images[inv.reshape(-1)].reshape(h, w)
    return Pattern._trusted(Rect(x0, y0, w, h), out, code.alphabet)


def _determines_source(image_cells: np.ndarray, source_cells: np.ndarray, offset_x: int, offset_y: int,
                       c: int, reach: int) -> bool:
    """Whether c-windows of the image determine the source symbol at some
    fixed offset.  image cell (j, i) sits over source cell (j + offset_y, i + offset_x)."""
    H, W = image_cells.shape
    if H < c or W < c:
        return True
    iv = sliding_window_view(image_cells, (c, c)).reshape(H - c + 1, W - c + 1, c * c)
    _, ids = np.unique(iv.reshape(-1, c * c), axis=0, return_inverse=True)
    ids = ids.reshape(H - c + 1, W - c + 1)
    SH, SW = source_cells.shape
    for dy in range(-reach, c + reach):
        for dx in range(-reach, c + reach):
            # image window at (j, i) against source cell (j + oy + dy, i + ox + dx)
            j_lo = max(0, -(offset_y + dy))
            i_lo = max(0, -(offset_x + dx))
            j_hi = min(ids.shape[0], SH - offset_y - dy)
            i_hi = min(ids.shape[1], SW - offset_x - dx)
            if j_hi <= j_lo or i_hi <= i_lo:
                continue
            win = ids[j_lo:j_hi, i_lo:i_hi].reshape(-1)
            src = source_cells[j_lo + offset_y + dy:j_hi + offset_y + dy,
                               i_lo + offset_x + dx:i_hi + offset_x + dx].reshape(-1).astype(np.int64)
            pairs = np.unique(win * (int(source_cells.max()) + 1) + src)
            if len(np.unique(pairs // (int(source_cells.max()) + 1))) == len(pairs):
                return True
    return False


def check_code(code: BlockCode, patch: Pattern, check_size: int) -> Verdict:
    """Language preservation and the invertibility proxy on one patch.

    Every check_size-window of the image must occur in the patch, and the
    image windows must determine the source symbol at some fixed offset
    (so an inverse block code of that window size exists on the sample).
    """
    c = check_size
    image = apply_code(code, patch)
    if image.width < c or image.height < c:
        raise ContractError("image too small for the check size")
    (_, lang) = window_ids([patch], c, c)
    known = {b.tobytes() for b in lang.astype(image.cells.dtype)}
    _, img_blocks = window_ids([image], c, c)
    for b in img_blocks:
        if b.astype(image.cells.dtype).tobytes() not in known:
            return Verdict(False, ("language", b.tolist()))
    ox = image.support.x0 - patch.support.x0
    oy = image.support.y0 - patch.support.y0
    if not _determines_source(image.cells, patch.cells, ox, oy, c, code.reach()):
        return Verdict(False, ("not injective", None))
    return Verdict(True)


class _Search:
    def __init__(self, patch: Pattern, radius: int, check_size: int, budget: int):
        k, c = 2 * radius + 1, check_size
        if patch.width < k + c - 1 or patch.height < k + c - 1:
            raise ContractError("patch too small for the radius and check size")
        self.patch, self.r, self.c, self.budget = patch, radius, check_size, budget
        (pid,), self.blocks = window_ids([patch], k, k)
        self.pid = pid
        counts = np.bincount(pid.reshape(-1), minlength=len(self.blocks))
        self.order = sorted(range(len(self.blocks)), key=lambda v: (-counts[v], v))
        (_,), lang = window_ids([patch], c, c)
        self.lang = lang.reshape(len(lang), c * c).astype(np.intp)
        cv = sliding_window_view(pid, (c, c)).reshape(-1, c * c)
        self.cons = np.unique(cv, axis=0).astype(np.intp)
        self.A = patch.alphabet.size
        self.onehot = [np.eye(self.A, dtype=np.int32)[self.lang[:, j]] for j in range(c * c)]
        self.nodes = 0
        self.found: list[tuple[int, ...]] = []

    def propagate(self, D: np.ndarray) -> np.ndarray | None:
        while True:
            supp = D[self.cons[:, None, :], self.lang[None, :, :]].all(axis=2)
            if not supp.any(axis=1).all():
                return None
            new = D.copy()
            s32 = supp.astype(np.int32)
            for j in range(self.cons.shape[1]):
                allowed = (s32 @ self.onehot[j]) > 0
                np.logical_and.at(new, self.cons[:, j], allowed)
            if not new.any(axis=1).all():
                return None
            if np.array_equal(new, D):
                return D
            D = new

    def run(self) -> list[tuple[int, ...]]:
        D = np.ones((len(self.blocks), self.A), dtype=bool)
        self._dfs(D)
        return self.found

    def _dfs(self, D: np.ndarray) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise ResourceError(f"search budget of {self.budget} nodes exhausted",
                                best=[tuple(t) for t in self.found])
        D = self.propagate(D)
        if D is None:
            return
        sizes = D.sum(axis=1)
        if (sizes == 1).all():
            table = tuple(int(x) for x in D.argmax(axis=1))
            code = BlockCode(self.r, self.blocks, table, self.patch.alphabet)
            if check_code(code, self.patch, self.c):
                self.found.append(table)
            return
        var = next(v for v in self.order if sizes[v] > 1)
        for s in np.nonzero(D[var])[0]:
            D2 = D.copy()
            D2[var] = False
            D2[var, s] = True
            self._dfs(D2)


def enumerate_codes(patch: Pattern, radius: int, check_size: int,
                    budget: int = DEFAULT_BUDGET) -> list[BlockCode]:
    """Candidate automorphisms up to (radius, check_size) of the sampled language."""
    if radius < 0 or check_size < 1:
        raise ContractError("radius must be >= 0 and check_size >= 1")
    search = _Search(patch, radius, check_size, budget)
    tables = search.run()
    codes = [BlockCode(radius, search.blocks, t, patch.alphabet) for t in tables]
    return sorted(codes, key=lambda c: c.key())


def as_shifted_symbol_map(code: BlockCode) -> tuple[ShiftVector, tuple[int, ...]] | None:
    """If the code reads a single cell of its square, return that offset and
    the symbol map applied to it."""
    r, k = code.radius, 2 * code.radius + 1
    for dy in range(k):
        for dx in range(k):
            mapping: dict[int, int] = {}
            ok = True
            for b, s in zip(code.blocks, code.outputs):
                a = int(b[dy, dx])
                if mapping.setdefault(a, s) != s:
                    ok = False
                    break
            if ok:
                sym = tuple(mapping.get(a, a) for a in range(code.alphabet.size))
                return code.shift + ShiftVector(dx - r, dy - r), sym
    return None


def modulo_shifts(codes: list[BlockCode]) -> list[BlockCode]:
    """Distinct representatives after removing shift components.

    A code that reads one cell of its square becomes the radius-0 symbol map;
    other codes are kept as they are.
    """
    reps: dict = {}
    for code in codes:
        got = as_shifted_symbol_map(code)
        rep = code if got is None else symbol_map_code(got[1], code.alphabet)
        reps.setdefault(rep.key(), rep)
    return [reps[k] for k in sorted(reps)]


def is_identity(code: BlockCode, symbols=None) -> bool:
    got = as_shifted_symbol_map(code)
    if got is None:
        return False
    symbols = range(code.alphabet.size) if symbols is None else symbols
    return all(got[1][a] == a for a in symbols)


def _image_window(code: BlockCode, p: Pattern, shrink: int) -> Pattern:
    img = apply_code(code, p)
    s = p.support
    target = Rect(s.x0 + shrink, s.y0 + shrink, s.width - 2 * shrink, s.height - 2 * shrink)
    return subpattern(img, target)


def preserves_relations(code: BlockCode, patch: Pattern, spec: WindowSpec) -> Verdict:
    """Every witnessed R_S / R_T window pair maps to a witnessed pair on the
    shrunken window."""
    shrink = code.reach()
    B = spec.window
    if B.width - 2 * shrink < 1 or B.height - 2 * shrink < 1:
        raise ContractError(f"window {B.width}x{B.height} too small after shrinking by {shrink}")
    small = WindowSpec(Rect(B.x0 + shrink, B.y0 + shrink, B.width - 2 * shrink, B.height - 2 * shrink),
                       spec.nmax, spec.mmax)
    for kind in ("R_S", "R_T"):
        target = set(relation_pairs(patch, small, kind))
        for p, q in relation_pairs(patch, spec, kind):
            image = (_image_window(code, p, shrink), _image_window(code, q, shrink))
            if image not in target:
                return Verdict(False, {"kind": kind, "pair": (p, q), "image": image})
    return Verdict(True)


def classify_fibers(patches: list[Pattern], fault_cells=None) -> dict[int, int]:
    """Histogram {class size: number of classes} of patches agreeing off fault lines.

    Fault cells default to the union of the fault lines reported for each patch.
    """
    if not patches:
        return {}
    if fault_cells is None:
        fault_cells = set()
        for p in patches:
            fault_cells.update(fault_lines(p).cells(p))
    classes: Counter = Counter()
    for p in patches:
        masked = p.cells.astype(np.int64).copy()
        s = p.support
        for x, y in fault_cells:
            if s.contains_point(x, y):
                masked[y - s.y0, x - s.x0] = -1
        classes[(s, masked.tobytes())] += 1
    return dict(sorted(Counter(classes.values()).items()))
