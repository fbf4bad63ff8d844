from fractions import Fraction
import math

from hypothesis import settings, strategies as st
import numpy as np
import pytest

from qframe.dyadic import DyadicValue
from qframe.states import MINUS, PLUS, StringRational, from_value
from qframe.superpose import Superposition

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")


def site_value(x: StringRational) -> Fraction:
    """Oracle: sign * sum of 2**j over the 1 sites, read from the printed form."""
    text = x.format()
    cut = next(i for i, ch in enumerate(text) if ch in "+-")
    whole, frac = text[:cut], text[cut + 1:]
    total = Fraction(0)
    for i, ch in enumerate(reversed(whole)):
        if ch == "1":
            total += Fraction(2) ** i
    for i, ch in enumerate(frac, start=1):
        if ch == "1":
            total += Fraction(1, 2 ** i)
    return -total if text[cut] == "-" else total


def canonical_states(lo: int = -4, hi: int = 4) -> list[StringRational]:
    """Every canonical state with ``l >= lo`` and ``u <= hi``, built site by site."""
    out = [StringRational(PLUS, 0, 0, 0)]
    for l in range(lo, 1):
        for u in range(0, hi + 1):
            width = u - l + 1
            for bits in range(1, 1 << width):
                top_ok = u == 0 or (bits >> (width - 1)) & 1
                bottom_ok = l == 0 or bits & 1
                if top_ok and bottom_ok:
                    x = StringRational(PLUS, l, u, bits)
                    out += [x, x.with_sign(MINUS)]
    return out


@st.composite
def states(draw, lo: int = -6, hi: int = 6):
    """Canonical states with bounds in ``[lo, hi]``, drawn through their value."""
    k = -lo
    n = draw(st.integers(-(2 ** (hi + k + 1) - 1), 2 ** (hi + k + 1) - 1))
    return from_value(DyadicValue.make(n, k))


@st.composite
def raw_states(draw, max_width: int = 10):
    """Legal, possibly non-canonical states on a fixed interval."""
    l = draw(st.integers(-max_width // 2, 0))
    u = draw(st.integers(0, max_width // 2))
    bits = draw(st.integers(0, 2 ** (u - l + 1) - 1))
    sign = draw(st.sampled_from([PLUS, MINUS]))
    return StringRational(sign, l, u, bits)


def random_superposition(rng: np.random.Generator, pool: list, size: int):
    keys = [pool[i] for i in rng.choice(len(pool), size=size, replace=False)]
    amps = rng.normal(size=size) + 1j * rng.normal(size=size)
    amps /= math.sqrt(float(np.sum(np.abs(amps) ** 2)))
    return Superposition(zip(keys, amps))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


# -- acceptance summary -------------------------------------------------------

_criteria: dict[int, list] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    number, title = mark.args
    entry = _criteria.setdefault(number, [title, True])
    entry[1] = entry[1] and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}: {title}")
