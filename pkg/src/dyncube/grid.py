"""Alphabets, rectangles, shift vectors and anchored rectangular patterns.

Coordinates follow the usual mathematical convention: x grows to the right
(the S direction) and y grows upward (the T direction).  A pattern stores its
cells as a read-only numpy array indexed ``cells[y - y0, x - x0]``, so row 0 is
the bottom row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import AlphabetMismatch, ContractError, RangeError

COORD_LIMIT = 2**62


@dataclass(frozen=True)
class Alphabet:
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) == 0:
            raise ContractError("alphabet must be non-empty")
        if len(set(self.labels)) != len(self.labels):
            raise ContractError("alphabet labels must be distinct")

    @classmethod
    def of_size(cls, k: int) -> "Alphabet":
        return cls(tuple(str(i) for i in range(k)))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def symbols(self) -> range:
        return range(len(self.labels))

    def __len__(self) -> int:
        return len(self.labels)


BINARY = Alphabet(("0", "1"))


@dataclass(frozen=True, order=True)
class ShiftVector:
    """Exponents (n, m) of S and T; for subshifts, the shift by (n, m)."""

    n: int
    m: int

    def __add__(self, other: "ShiftVector") -> "ShiftVector":
        return ShiftVector(self.n + other.n, self.m + other.m)

    def __sub__(self, other: "ShiftVector") -> "ShiftVector":
        return ShiftVector(self.n - other.n, self.m - other.m)

    def __neg__(self) -> "ShiftVector":
        return ShiftVector(-self.n, -self.m)

    def scaled(self, k: int) -> "ShiftVector":
        return ShiftVector(k * self.n, k * self.m)

    def key(self) -> tuple[int, int]:
        """Sort key for the (m, n) lexicographic order."""
        return (self.m, self.n)


ORIGIN = ShiftVector(0, 0)


@dataclass(frozen=True)
class Rect:
    x0: int
    y0: int
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ContractError(f"rectangle needs positive size, got {self.width}x{self.height}")

    @property
    def x1(self) -> int:
        """Exclusive right edge."""
        return self.x0 + self.width

    @property
    def y1(self) -> int:
        """Exclusive top edge."""
        return self.y0 + self.height

    def contains_point(self, x: int, y: int) -> bool:
        return self.x0 <= x < self.x1 and self.y0 <= y < self.y1

    def contains(self, other: "Rect") -> bool:
        return (self.x0 <= other.x0 and self.y0 <= other.y0
                and other.x1 <= self.x1 and other.y1 <= self.y1)

    def shifted(self, v: ShiftVector) -> "Rect":
        return Rect(self.x0 + v.n, self.y0 + v.m, self.width, self.height)

    def transposed(self) -> "Rect":
        return Rect(self.y0, self.x0, self.height, self.width)

    def to_json(self) -> list[int]:
        return [self.x0, self.y0, self.width, self.height]


def square(radius: int, center: tuple[int, int] = (0, 0)) -> Rect:
    """The (2r+1)-square centred at ``center``."""
    return Rect(center[0] - radius, center[1] - radius, 2 * radius + 1, 2 * radius + 1)


def _dtype_for(alphabet: Alphabet):
    return np.uint8 if alphabet.size <= 256 else np.int32


class Pattern:
    """An immutable block of symbols over an anchored rectangle."""

    __slots__ = ("support", "cells", "alphabet", "_hash")

    def __init__(self, support: Rect, cells, alphabet: Alphabet):
        src = np.asarray(cells)
        if src.shape != (support.height, support.width):
            raise ContractError(
                f"cells have shape {src.shape}, support needs {(support.height, support.width)}")
        if not np.issubdtype(src.dtype, np.integer):
            raise ContractError(f"cells must be integers, got {src.dtype}")
        if int(src.max()) >= alphabet.size or int(src.min()) < 0:
            raise ContractError("cell symbol outside the alphabet")
        arr = src.astype(_dtype_for(alphabet), copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "cells", arr)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _trusted(cls, support: Rect, cells: np.ndarray, alphabet: Alphabet) -> "Pattern":
        # skips validation; callers guarantee shape and symbol range
        p = object.__new__(cls)
        arr = np.array(cells, dtype=_dtype_for(alphabet), copy=True, order="C")
        arr.setflags(write=False)
        object.__setattr__(p, "support", support)
        object.__setattr__(p, "cells", arr)
        object.__setattr__(p, "alphabet", alphabet)
        object.__setattr__(p, "_hash", None)
        return p

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], alphabet: Alphabet | None = None,
                  origin: tuple[int, int] = (0, 0)) -> "Pattern":
        """Build from rows listed bottom-up."""
        arr = np.asarray(rows)
        if arr.ndim != 2:
            raise ContractError("rows must form a rectangle")
        if alphabet is None:
            alphabet = Alphabet.of_size(int(arr.max()) + 1 if arr.size else 1)
        return cls(Rect(origin[0], origin[1], arr.shape[1], arr.shape[0]), arr, alphabet)

    def __setattr__(self, name, value):
        raise AttributeError("Pattern is immutable")

    @property
    def width(self) -> int:
        return self.support.width

    @property
    def height(self) -> int:
        return self.support.height

    def at(self, x: int, y: int) -> int:
        if not self.support.contains_point(x, y):
            raise RangeError(f"cell ({x},{y}) outside support {self.support}")
        return int(self.cells[y - self.support.y0, x - self.support.x0])

    def rows(self) -> list[list[int]]:
        return self.cells.tolist()

    def reanchored(self, x0: int = 0, y0: int = 0) -> "Pattern":
        return Pattern._trusted(Rect(x0, y0, self.width, self.height), self.cells, self.alphabet)

    def transposed(self) -> "Pattern":
        """Swap the roles of x and y (the S and T directions)."""
        return Pattern._trusted(self.support.transposed(), self.cells.T, self.alphabet)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.support == other.support and np.array_equal(self.cells, other.cells)

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.support, self.cells.tobytes())))
        return self._hash

    def sort_key(self) -> tuple:
        return (self.support.y0, self.support.x0, self.height, self.width, self.cells.tobytes())

    def __repr__(self) -> str:
        s = self.support
        return f"Pattern(origin=({s.x0},{s.y0}), size={s.width}x{s.height}, rows={self.rows()})"

    def to_json(self) -> dict:
        s = self.support
        return {"alphabet": list(self.alphabet.labels), "origin": [s.x0, s.y0],
                "width": s.width, "height": s.height, "rows": self.rows()}

    @classmethod
    def from_json(cls, obj: dict) -> "Pattern":
        try:
            alphabet = Alphabet(tuple(str(a) for a in obj["alphabet"]))
            x0, y0 = obj["origin"]
            support = Rect(int(x0), int(y0), int(obj["width"]), int(obj["height"]))
            rows = obj["rows"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractError(f"malformed pattern JSON: {exc}") from exc
        return cls(support, rows, alphabet)


def subpattern(p: Pattern, r: Rect) -> Pattern:
    s = p.support
    if not s.contains(r):
        if not s.contains_point(r.x0, r.y0):
            corner = (r.x0, r.y0)
        else:
            corner = (r.x1 - 1, r.y1 - 1)
        raise RangeError(f"rectangle {r} leaves support {s} at corner {corner}")
    block = p.cells[r.y0 - s.y0:r.y1 - s.y0, r.x0 - s.x0:r.x1 - s.x0]
    return Pattern._trusted(r, block, p.alphabet)


def translate(p: Pattern, v: ShiftVector) -> Pattern:
    """Reading ``translate(p, v)`` at u equals reading p at u + v."""
    s = p.support
    x0, y0 = s.x0 - v.n, s.y0 - v.m
    if max(abs(x0), abs(y0), abs(x0 + s.width), abs(y0 + s.height)) >= COORD_LIMIT:
        raise RangeError(f"translated support overflows coordinate limit: origin ({x0},{y0})")
    return Pattern._trusted(Rect(x0, y0, s.width, s.height), p.cells, p.alphabet)


def occurrences(needle: Pattern, haystack: Pattern) -> list[ShiftVector]:
    """All v with haystack over needle.support + v equal to needle, sorted by (m, n)."""
    if needle.alphabet != haystack.alphabet:
        raise AlphabetMismatch("needle and haystack use different alphabets")
    h, w = needle.height, needle.width
    if h > haystack.height or w > haystack.width:
        return []
    views = sliding_window_view(haystack.cells, (h, w))
    hits = np.all(views == needle.cells, axis=(2, 3))
    ys, xs = np.nonzero(hits)  # row-major order is already (m, n) order
    dx = haystack.support.x0 - needle.support.x0
    dy = haystack.support.y0 - needle.support.y0
    return [ShiftVector(int(x) + dx, int(y) + dy) for y, x in zip(ys, xs)]


def window_ids(patches: Sequence[Pattern], width: int, height: int):
    """Index every width x height window of the given patches.

    Returns ``(ids, blocks)``.  ``ids[k][j, i]`` is the id of the window of
    ``patches[k]`` whose lower-left cell is at offset (i, j) from the patch
    origin; ``blocks[id]`` is the window content as a (height, width) array.
    Ids are assigned in lexicographic order of the flattened content, so they
    agree across calls on the same window set.
    """
    flats, shapes = [], []
    for p in patches:
        if width > p.width or height > p.height:
            flats.append(np.zeros((0, width * height), dtype=p.cells.dtype))
            shapes.append((0, 0))
            continue
        v = sliding_window_view(p.cells, (height, width))
        shapes.append(v.shape[:2])
        flats.append(v.reshape(-1, width * height))
    allw = np.concatenate(flats) if flats else np.zeros((0, width * height))
    if allw.shape[0] == 0:
        return [np.zeros(s, dtype=np.int64) for s in shapes], np.zeros((0, height, width), dtype=np.uint8)
    blocks, inverse = np.unique(allw, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    ids, start = [], 0
    for s in shapes:
        k = s[0] * s[1]
        ids.append(inverse[start:start + k].reshape(s).astype(np.int64))
        start += k
    return ids, blocks.reshape(-1, height, width)


def to_pgm(p: Pattern) -> str:
    """Plain PGM (P2); the top image row is the top pattern row."""
    k = p.alphabet.size
    levels = np.zeros_like(p.cells, dtype=np.int64) if k == 1 else (255 * p.cells.astype(np.int64)) // (k - 1)
    lines = ["P2", f"{p.width} {p.height}", "255"]
    lines += [" ".join(str(v) for v in row) for row in levels[::-1]]
    return "\n".join(lines) + "\n"


def to_ppm(p: Pattern, palette: Sequence[tuple[int, int, int]]) -> str:
    """Plain PPM (P3) using one RGB color per symbol."""
    lines = ["P3", f"{p.width} {p.height}", "255"]
    for row in p.cells[::-1]:
        lines.append(" ".join(f"{r} {g} {b}" for r, g, b in (palette[int(s)] for s in row)))
    return "\n".join(lines) + "\n"


def load_pattern(path) -> Pattern:
    with open(path) as fh:
        return Pattern.from_json(json.load(fh))


def dump_pattern(p: Pattern, path) -> None:
    with open(path, "w") as fh:
        json.dump(p.to_json(), fh, sort_keys=True)
        fh.write("\n")


def patterns_equal_off(a: Pattern, b: Pattern, mask_cells: Iterable[tuple[int, int]]) -> bool:
    """True iff a and b agree on every cell except the listed absolute cells."""
    if a.support != b.support:
        return False
    diff = a.cells != b.cells
    s = a.support
    for x, y in mask_cells:
        if s.contains_point(x, y):
            diff[y - s.y0, x - s.x0] = False
    return not diff.any()


@dataclass(frozen=True)
class Verdict:
    """A yes/no answer carrying the first counterexample when the answer is no."""

    ok: bool
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok
