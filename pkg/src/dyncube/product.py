"""Symbolic products W(X, Y, phi) and detection of product structure.

A patch has product structure at radius r around an anchor when every cell
anchor + (i, j) is a function of the (2r+1)-block on the horizontal axis at
anchor + (i, 0) and the block on the vertical axis at anchor + (0, j).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .cubes import WindowSpec, distinct_quadruples
from .errors import ContractError
from .grid import Alphabet, Pattern, Rect, ShiftVector, Verdict, square, window_ids


@dataclass(frozen=True)
class ProductSpec:
    row_word: tuple[int, ...]
    col_word: tuple[int, ...]
    phi: Mapping[tuple[int, int], int]
    alphabet: Alphabet | None = None

    def __post_init__(self):
        if not self.row_word or not self.col_word:
            raise ContractError("product words must be non-empty")


def build_product(spec: ProductSpec) -> Pattern:
    """Cell (i, j) is phi(row_word[i], col_word[j]); anchored at the origin."""
    rows = []
    for b in spec.col_word:
        row = []
        for a in spec.row_word:
            if (a, b) not in spec.phi:
                raise ContractError(f"phi undefined on the occurring pair ({a}, {b})")
            row.append(spec.phi[(a, b)])
        rows.append(row)
    alphabet = spec.alphabet or Alphabet.of_size(max(spec.phi.values()) + 1)
    return Pattern(Rect(0, 0, len(spec.row_word), len(spec.col_word)), rows, alphabet)


@dataclass(frozen=True)
class ProductDecomposition:
    radius: int
    anchor: ShiftVector
    row_alphabet: tuple[Pattern, ...]
    col_alphabet: tuple[Pattern, ...]
    phi: dict = field(hash=False)
    row_word: tuple[int, ...]
    col_word: tuple[int, ...]
    row_start: int  # i offset of row_word[0] from the anchor
    col_start: int
    alphabet: Alphabet

    def rebuild(self) -> Pattern:
        """The scanned region recomputed from phi and the two axis words."""
        cells = [[self.phi[(a, b)] for a in self.row_word] for b in self.col_word]
        return Pattern(Rect(self.anchor.n + self.row_start, self.anchor.m + self.col_start,
                            len(self.row_word), len(self.col_word)), cells, self.alphabet)

    def to_json(self) -> dict:
        return {"radius": self.radius,
                "rowAlphabet": [p.rows() for p in self.row_alphabet],
                "colAlphabet": [p.rows() for p in self.col_alphabet],
                "phi": [[a, b, s] for (a, b), s in sorted(self.phi.items())],
                "anchor": [self.anchor.n, self.anchor.m]}


@dataclass(frozen=True)
class ConflictWitness:
    first: tuple[int, int]   # (i, j) relative to the anchor
    second: tuple[int, int]
    symbols: tuple[int, int]
    row_block: Pattern
    col_block: Pattern
    radius: int
    anchor: ShiftVector

    def to_json(self) -> dict:
        a = self.anchor
        return {"radius": self.radius, "anchor": [a.n, a.m],
                "positions": [list(self.first), list(self.second)],
                "absolute": [[a.n + self.first[0], a.m + self.first[1]],
                             [a.n + self.second[0], a.m + self.second[1]]],
                "symbols": list(self.symbols),
                "rowBlock": self.row_block.rows(), "colBlock": self.col_block.rows()}


def detect_product(patch: Pattern, radius: int, anchor: ShiftVector) -> ProductDecomposition | ConflictWitness:
    if radius < 0:
        raise ContractError("radius must be non-negative")
    s, r = patch.support, radius
    block = square(r, (anchor.n, anchor.m))
    if not s.contains(block):
        raise ContractError(f"radius {r} too large for the patch around anchor ({anchor.n},{anchor.m})")
    k = 2 * r + 1
    (ids,), blocks = window_ids([patch], k, k)
    # window id arrays are indexed by lower-left corner offsets
    ax, ay = anchor.n - s.x0, anchor.m - s.y0
    i_lo, i_hi = r - ax, s.width - 1 - r - ax
    j_lo, j_hi = r - ay, s.height - 1 - r - ay
    row_raw = ids[ay - r, i_lo + ax - r:i_hi + ax - r + 1]
    col_raw = ids[j_lo + ay - r:j_hi + ay - r + 1, ax - r]
    row_keys, row_idx = np.unique(row_raw, return_inverse=True)
    col_keys, col_idx = np.unique(col_raw, return_inverse=True)
    centre = patch.cells[j_lo + ay:j_hi + ay + 1, i_lo + ax:i_hi + ax + 1].astype(np.int64)
    codes = row_idx.reshape(-1)[None, :] * len(col_keys) + col_idx.reshape(-1)[:, None]
    flat_codes, flat_sym = codes.reshape(-1), centre.reshape(-1)
    order = np.lexsort((np.arange(flat_codes.size), flat_codes))
    sc, ss = flat_codes[order], flat_sym[order]
    starts = np.r_[0, np.nonzero(np.diff(sc))[0] + 1]
    lo = np.minimum.reduceat(ss, starts)
    hi = np.maximum.reduceat(ss, starts)
    bad = np.nonzero(lo != hi)[0]
    width = centre.shape[1]
    mkpat = lambda key: Pattern._trusted(Rect(-r, -r, k, k), blocks[key], patch.alphabet)
    if len(bad):
        g = bad[0]  # smallest (row block, column block) code with two symbols
        start = starts[g]
        end = starts[g + 1] if g + 1 < len(starts) else len(sc)
        members = order[start:end]  # increasing flat index = (j, i) order
        f0 = members[0]
        f1 = next(f for f in members if flat_sym[f] != flat_sym[f0])
        (j0, i0), (j1, i1) = divmod(int(f0), width), divmod(int(f1), width)
        code = int(sc[start])
        return ConflictWitness((i0 + i_lo, j0 + j_lo), (i1 + i_lo, j1 + j_lo),
                               (int(flat_sym[f0]), int(flat_sym[f1])),
                               mkpat(int(row_keys[code // len(col_keys)])),
                               mkpat(int(col_keys[code % len(col_keys)])), r, anchor)
    phi = {(int(c) // len(col_keys), int(c) % len(col_keys)): int(v) for c, v in zip(sc[starts], lo)}
    return ProductDecomposition(
        r, anchor, tuple(mkpat(int(x)) for x in row_keys), tuple(mkpat(int(x)) for x in col_keys),
        phi, tuple(int(x) for x in row_idx), tuple(int(x) for x in col_idx), i_lo, j_lo, patch.alphabet)


def extract_factors(d: ProductDecomposition, max_length: int | None = None):
    """All factor words of the two axis words, up to max_length (default: full)."""
    def factors(word):
        top = len(word) if max_length is None else min(max_length, len(word))
        return {tuple(word[i:i + L]) for L in range(1, top + 1) for i in range(len(word) - L + 1)}
    return factors(d.row_word), factors(d.col_word)


def verify_three_coordinate_rule(patch, spec: WindowSpec) -> Verdict:
    """No two window quadruples agree on three coordinates and differ on the fourth.

    ``patch`` may also be a list of patches from the same system; quadruples
    are always read off a single patch, then pooled.  The witness is the pair
    of offending quadruples.
    """
    quads = distinct_quadruples(patch, spec)
    seen: list[dict] = [{} for _ in range(4)]
    for ids, q in quads.items():
        for k in range(4):
            key = ids[:k] + ids[k + 1:]
            prev = seen[k].get(key)
            if prev is None:
                seen[k][key] = (ids, q)
            elif prev[0][k] != ids[k]:
                return Verdict(False, (prev[1], q))
    return Verdict(True)
