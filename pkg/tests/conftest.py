import numpy as np
from hypothesis import strategies as st

from dyncube.grid import Alphabet, Pattern, Rect


@st.composite
def patterns(draw, max_side=8, max_symbols=3, origin_range=5):
    w = draw(st.integers(1, max_side))
    h = draw(st.integers(1, max_side))
    k = draw(st.integers(1, max_symbols))
    cells = draw(st.lists(st.integers(0, k - 1), min_size=w * h, max_size=w * h))
    x0 = draw(st.integers(-origin_range, origin_range))
    y0 = draw(st.integers(-origin_range, origin_range))
    return Pattern(Rect(x0, y0, w, h), np.array(cells).reshape(h, w), Alphabet.of_size(k))


def random_pattern(rng: np.random.Generator, w: int, h: int, k: int = 2, origin=(0, 0)) -> Pattern:
    return Pattern(Rect(origin[0], origin[1], w, h), rng.integers(0, k, size=(h, w)), Alphabet.of_size(k))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
