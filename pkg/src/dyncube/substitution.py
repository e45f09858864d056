"""Uniform rectangular substitutions: the 2D Morse rule and 1D Thue-Morse."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ResourceError
from .grid import BINARY, Alphabet, Pattern, Rect, window_ids

DEFAULT_MAX_PATCH = 4096


def max_patch_side() -> int:
    raw = os.environ.get("DYNCUBE_MAX_PATCH")
    if raw is None:
        return DEFAULT_MAX_PATCH
    try:
        value = int(raw)
    except ValueError as exc:
        raise ContractError(f"DYNCUBE_MAX_PATCH must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ContractError("DYNCUBE_MAX_PATCH must be positive")
    return value


def check_side(side: int, what: str = "patch") -> None:
    limit = max_patch_side()
    if side > limit:
        raise ResourceError(f"{what} side {side} exceeds the ceiling {limit} (set DYNCUBE_MAX_PATCH)")


@dataclass(frozen=True)
class SubstitutionRule:
    alphabet: Alphabet
    expansion: int
    images: tuple[Pattern, ...]

    def __post_init__(self):
        s = self.expansion
        if s < 2:
            raise ContractError("expansion must be at least 2")
        if len(self.images) != self.alphabet.size:
            raise ContractError("every symbol needs exactly one image")
        for k, img in enumerate(self.images):
            if img.support != Rect(0, 0, s, s):
                raise ContractError(f"image of {k} must have support Rect(0,0,{s},{s})")
            if img.alphabet != self.alphabet:
                raise ContractError(f"image of {k} uses a different alphabet")

    def stack(self) -> np.ndarray:
        return np.stack([img.cells for img in self.images])

    def to_json(self) -> dict:
        return {"alphabet": list(self.alphabet.labels), "expansion": self.expansion,
                "images": {str(k): img.rows() for k, img in enumerate(self.images)}}

    @classmethod
    def from_json(cls, obj: dict) -> "SubstitutionRule":
        try:
            alphabet = Alphabet(tuple(str(a) for a in obj["alphabet"]))
            s = int(obj["expansion"])
            images = tuple(Pattern(Rect(0, 0, s, s), obj["images"][str(k)], alphabet)
                           for k in alphabet.symbols)
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractError(f"malformed rule JSON: {exc}") from exc
        return cls(alphabet, s, images)


@dataclass(frozen=True)
class Rule1D:
    alphabet: Alphabet
    expansion: int
    images: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.expansion < 2:
            raise ContractError("expansion must be at least 2")
        if len(self.images) != self.alphabet.size:
            raise ContractError("every symbol needs exactly one image")
        for word in self.images:
            if len(word) != self.expansion or any(not 0 <= a < self.alphabet.size for a in word):
                raise ContractError(f"bad image word {word}")


def morse_rule() -> SubstitutionRule:
    zero = Pattern(Rect(0, 0, 2, 2), [[0, 1], [1, 0]], BINARY)
    one = Pattern(Rect(0, 0, 2, 2), 1 - zero.cells, BINARY)
    return SubstitutionRule(BINARY, 2, (zero, one))


def thue_morse_rule() -> Rule1D:
    return Rule1D(BINARY, 2, ((0, 1), (1, 0)))


def load_rule(path) -> SubstitutionRule:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ContractError(f"cannot read rule file {path}: {exc}") from exc
    return SubstitutionRule.from_json(obj)


def iterate(rule: SubstitutionRule, seed: int, n: int) -> Pattern:
    if n < 0:
        raise ContractError("iteration count must be non-negative")
    if not 0 <= seed < rule.alphabet.size:
        raise ContractError(f"seed {seed} not in alphabet")
    s = rule.expansion
    check_side(s**n)
    images = rule.stack()
    cells = np.array([[seed]], dtype=images.dtype)
    for _ in range(n):
        h, w = cells.shape
        # block (j, i) of the new array is the image of cells[j, i]
        cells = images[cells].transpose(0, 2, 1, 3).reshape(h * s, w * s)
    return Pattern._trusted(Rect(0, 0, cells.shape[1], cells.shape[0]), cells, rule.alphabet)


def central_patch(rule: SubstitutionRule, n: int, seed: int = 0) -> Pattern:
    if n < 1:
        raise ContractError("central patch level must be positive")
    p = iterate(rule, seed, n)
    half = rule.expansion**n // 2
    return p.reanchored(-half, -half)


def language(patch: Pattern, w: int, h: int) -> set[Pattern]:
    if not (1 <= w <= patch.width and 1 <= h <= patch.height):
        raise ContractError(f"window {w}x{h} does not fit in a {patch.width}x{patch.height} patch")
    _, blocks = window_ids([patch], w, h)
    return {Pattern._trusted(Rect(0, 0, w, h), b, patch.alphabet) for b in blocks}


def iterate1d(rule: Rule1D, seed: int, n: int) -> tuple[int, ...]:
    if n < 0:
        raise ContractError("iteration count must be non-negative")
    if not 0 <= seed < rule.alphabet.size:
        raise ContractError(f"seed {seed} not in alphabet")
    check_side(rule.expansion**n, "word")
    word = [seed]
    for _ in range(n):
        word = [a for sym in word for a in rule.images[sym]]
    return tuple(word)


def word_str(word) -> str:
    return "".join(str(a) for a in word)
