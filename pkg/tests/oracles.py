"""Slow, dictionary-based reference implementations used to cross-check the library."""

from __future__ import annotations


def morse_cell(i: int, j: int) -> int:
    return (bin(i).count("1") + bin(j).count("1")) % 2


def thue_morse(length: int) -> list[int]:
    return [bin(i).count("1") % 2 for i in range(length)]


def as_dict(patch) -> dict[tuple[int, int], int]:
    s = patch.support
    rows = patch.rows()
    return {(s.x0 + x, s.y0 + y): rows[y][x] for y in range(s.height) for x in range(s.width)}


def read(cells: dict, window, n: int, m: int):
    """Window contents at offset (n, m), or None if any cell is missing."""
    out = []
    for y in range(window.y0, window.y0 + window.height):
        for x in range(window.x0, window.x0 + window.width):
            v = cells.get((x + n, y + m))
            if v is None:
                return None
            out.append(v)
    return tuple(out)


def placements(cells: dict, window):
    xs = [x for x, _ in cells]
    ys = [y for _, y in cells]
    for b in range(min(ys) - window.y0 - window.height, max(ys) + 2):
        for a in range(min(xs) - window.x0 - window.width, max(xs) + 2):
            if read(cells, window, a, b) is not None:
                yield a, b


def naive_cube_set(patch, window, nmax: int, mmax: int) -> set:
    """Set of (base, n, m, four window tuples) with all four reads in bounds."""
    cells = as_dict(patch)
    out = set()
    for a, b in placements(cells, window):
        for m in range(-mmax, mmax + 1):
            for n in range(-nmax, nmax + 1):
                quad = (read(cells, window, a, b), read(cells, window, a + n, b),
                        read(cells, window, a, b + m), read(cells, window, a + n, b + m))
                if None not in quad:
                    out.add(((a, b), n, m, quad))
    return out


def naive_relation_pairs(patch, window, nmax: int, mmax: int, kind: str, cubes=None) -> set:
    """Pairs (p, q) with a quadruple shaped (p, q, a, a) for R_S or (p, a, q, a) for R_T."""
    out = set()
    if cubes is None:
        cubes = naive_cube_set(patch, window, nmax, mmax)
    for _, _, _, (w0, w1, w2, w3) in cubes:
        if kind == "R_S" and w2 == w3:
            out.add((w0, w1))
        if kind == "R_T" and w1 == w3:
            out.add((w0, w2))
    return out


def naive_return_times(patch, anchor, window, nmax: int, mmax: int) -> set:
    cells = as_dict(patch)
    ref = read(cells, window, anchor[0], anchor[1])
    out = set()
    for m in range(-mmax, mmax + 1):
        for n in range(-nmax, nmax + 1):
            if read(cells, window, anchor[0] + n, anchor[1] + m) == ref:
                out.add((n, m))
    return out


def naive_language(patch, w: int, h: int) -> set:
    rows = patch.rows()
    return {tuple(tuple(rows[y + dy][x:x + w]) for dy in range(h))
            for y in range(patch.height - h + 1) for x in range(patch.width - w + 1)}


def heisenberg_mul(g, h):
    return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])
