import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyncube.cubes import WindowSpec, centered_window
from dyncube.errors import ContractError
from dyncube.grid import Alphabet, Pattern, Rect, ShiftVector, subpattern
from dyncube.product import (ConflictWitness, ProductDecomposition, ProductSpec, build_product,
                             detect_product, extract_factors, verify_three_coordinate_rule)
from dyncube.robinson import supertile, two_fault_completions
from dyncube.substitution import central_patch, iterate, iterate1d, morse_rule, thue_morse_rule
from oracles import thue_morse

XOR = {(a, b): a ^ b for a in (0, 1) for b in (0, 1)}


def test_projection_gives_constant_columns():
    phi = {(a, b): a for a in range(3) for b in range(2)}
    p = build_product(ProductSpec((0, 2, 1, 1), (0, 1, 1), phi))
    assert p.rows() == [[0, 2, 1, 1]] * 3


def test_one_letter_column_word():
    phi = {(a, 0): (a + 1) % 3 for a in range(3)}
    p = build_product(ProductSpec((0, 1, 2, 2), (0,), phi))
    assert p.rows() == [[1, 2, 0, 0]]


def test_thue_morse_product_is_morse():
    for k in range(1, 7):
        word = tuple(iterate1d(thue_morse_rule(), 0, k))
        assert build_product(ProductSpec(word, word, XOR)) == iterate(morse_rule(), 0, k)


def test_missing_phi_entry_named():
    with pytest.raises(ContractError, match=r"\(1, 0\)"):
        build_product(ProductSpec((0, 1), (0,), {(0, 0): 0}))
    with pytest.raises(ContractError):
        ProductSpec((), (0,), {})


def test_detect_exact_product():
    phi = {(a, b): (2 * a + b) % 5 for a in range(3) for b in range(2)}
    p = build_product(ProductSpec((0, 1, 2, 1, 0, 2, 2), (1, 0, 0, 1, 1), phi))
    d = detect_product(p, 0, ShiftVector(0, 0))
    assert isinstance(d, ProductDecomposition)
    assert d.rebuild() == p


def test_detect_morse_xor():
    p = central_patch(morse_rule(), 6)
    assert p.at(0, 0) == 0
    d = detect_product(p, 0, ShiftVector(0, 0))
    assert isinstance(d, ProductDecomposition)
    symbols = {(d.row_alphabet[a].at(0, 0), d.col_alphabet[b].at(0, 0)): v for (a, b), v in d.phi.items()}
    assert symbols == XOR
    assert d.rebuild() == p
    rows, cols = extract_factors(d, max_length=8)
    assert len(d.row_alphabet) == 2 and len(d.col_alphabet) == 2
    tm = thue_morse(256)
    tm_lang = {tuple(tm[i:i + L]) for L in range(1, 9) for i in range(256 - L + 1)}
    decode = lambda w: tuple(d.row_alphabet[a].at(0, 0) for a in w)
    assert {decode(w) for w in rows} == tm_lang


def test_periodic_factor_languages():
    phi = {(a, b): 2 * a + b for a in range(2) for b in range(2)}
    p = build_product(ProductSpec((0, 1) * 6, (0, 0, 1) * 4, phi))
    d = detect_product(p, 0, ShiftVector(0, 0))
    rows, cols = extract_factors(d, max_length=4)
    assert {w for w in rows if len(w) == 3} == {(0, 1, 0), (1, 0, 1)}
    assert len({w for w in cols if len(w) == 3}) == 3


@pytest.mark.parametrize("radius", [0, 1, 2])
def test_robinson_conflict(radius):
    p = supertile(5)
    w = detect_product(p, radius, ShiftVector(0, 0))
    assert isinstance(w, ConflictWitness)
    # axis blocks equal at both positions, centre symbols differ
    (i0, j0), (i1, j1) = w.first, w.second
    block = lambda x, y: subpattern(p, Rect(x - radius, y - radius, 2 * radius + 1, 2 * radius + 1)).cells
    assert np.array_equal(block(i0, 0), block(i1, 0))
    assert np.array_equal(block(0, j0), block(0, j1))
    assert p.at(i0, j0) != p.at(i1, j1)
    assert w.symbols == (p.at(i0, j0), p.at(i1, j1))


def test_radius_too_large():
    with pytest.raises(ContractError):
        detect_product(central_patch(morse_rule(), 2), 2, ShiftVector(0, 0))
    with pytest.raises(ContractError):
        detect_product(central_patch(morse_rule(), 2), -1, ShiftVector(0, 0))


def test_three_coordinate_rule_examples():
    spec = WindowSpec(centered_window(1), 3, 3)
    p = build_product(ProductSpec((0, 1, 2) * 4, (0, 1) * 6, {(a, b): 2 * a + b for a in range(3) for b in range(2)}))
    assert verify_three_coordinate_rule(p.reanchored(-6, -6), spec)
    const = Pattern(Rect(-4, -4, 8, 8), np.zeros((8, 8), dtype=int), Alphabet.of_size(1))
    assert verify_three_coordinate_rule(const, spec)
    assert verify_three_coordinate_rule(central_patch(morse_rule(), 5), spec)


def test_three_coordinate_rule_fails_on_fault_assembly():
    comps = two_fault_completions(3)
    spec = WindowSpec(Rect(-1, -1, 3, 3), 1, 1)
    verdict = verify_three_coordinate_rule(comps, spec)
    assert not verdict
    q_prev, q = verdict.witness
    agree = [a == b for a, b in zip(q_prev.patterns, q.patterns)]
    assert sum(agree) == 3
    k = agree.index(False)
    # the differing windows cover the fault intersection and differ only there
    diff = np.argwhere(q_prev.patterns[k].cells != q.patterns[k].cells)
    pos = q.positions()[k]
    cells = {(int(x) + spec.window.x0 + pos.n, int(y) + spec.window.y0 + pos.m) for y, x in diff}
    assert all(x == 0 or y == 0 for x, y in cells)
    for c in comps:
        assert verify_three_coordinate_rule(c, spec)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=3, max_size=10), st.lists(st.integers(0, 1), min_size=3, max_size=10),
       st.integers(0, 5))
def test_round_trip(row, col, salt):
    phi = {(a, b): (a * 2 + b + salt) % 6 for a in range(3) for b in range(2)}
    p = build_product(ProductSpec(tuple(row), tuple(col), phi, Alphabet.of_size(6)))
    d = detect_product(p, 0, ShiftVector(0, 0))
    assert isinstance(d, ProductDecomposition)
    assert d.rebuild() == p


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=6, max_size=9), st.lists(st.integers(0, 1), min_size=6, max_size=9))
def test_product_success_implies_three_coordinate_rule(row, col):
    phi = {(a, b): 2 * a + b for a in range(2) for b in range(2)}
    p = build_product(ProductSpec(tuple(row), tuple(col), phi))
    assert isinstance(detect_product(p, 0, ShiftVector(0, 0)), ProductDecomposition)
    assert verify_three_coordinate_rule(p, WindowSpec(Rect(0, 0, 1, 1), 2, 2))
