"""Rational string states of qubit strings.

A state carries a sign qubit at the binal point and a 0-1 qubit on every
site of an integer interval ``[l, u]`` containing 0. Bits are packed into a
Python int: site ``j`` lives at bit ``j - l``.

Text form puts the sign character at the binal point, e.g. ``1001-0111``
is -9.4375: integer bits for sites ``u..0``, the sign, then fraction bits
for sites ``-1..l``. The dotted form ``-1001.0111`` is also accepted on
input.
"""
from __future__ import annotations

from dataclasses import dataclass
import operator

from .dyadic import DyadicValue

PLUS, MINUS = 1, -1
_SIGN_CHARS = {"+": PLUS, "-": MINUS, "−": MINUS}


class ParseError(ValueError):
    def __init__(self, text: str, position: int, reason: str):
        super().__init__(f"{reason} at position {position} in {text!r}")
        self.text = text
        self.position = position


@dataclass(frozen=True)
class RawStringState:
    """State with the sign at an arbitrary lattice site ``m``.

    ``bits`` holds site ``j`` at bit ``j - l``; leading and trailing zeros
    are allowed.
    """

    sign: int
    m: int
    l: int
    u: int
    bits: int = 0

    def __post_init__(self):
        if self.sign not in (PLUS, MINUS):
            raise ValueError("sign must be +1 or -1")
        if not self.l <= self.m <= self.u:
            raise ValueError(f"need l <= m <= u, got l={self.l} m={self.m} u={self.u}")
        if self.bits < 0 or self.bits >> (self.u - self.l + 1):
            raise ValueError("bits outside the interval [l, u]")

    @classmethod
    def from_sites(cls, sign: int, m: int, sites: dict[int, int]) -> "RawStringState":
        """Build from an explicit ``site -> bit`` map covering a contiguous interval."""
        keys = sorted(sites)
        l, u = keys[0], keys[-1]
        if keys != list(range(l, u + 1)):
            raise ValueError("sites must form a contiguous interval")
        bits = 0
        for j, b in sites.items():
            if b not in (0, 1):
                raise ValueError(f"bit at site {j} must be 0 or 1")
            bits |= b << (j - l)
        return cls(sign, m, l, u, bits)

    def translate(self, d: int) -> "RawStringState":
        return RawStringState(self.sign, self.m + d, self.l + d, self.u + d, self.bits)

    def to_state(self) -> "StringRational":
        """Move the sign to site 0, keeping every bit (no zero stripping)."""
        return StringRational(self.sign, self.l - self.m, self.u - self.m, self.bits)

    def canonical(self) -> "StringRational":
        return self.to_state().canonical()


class StringRational(tuple):
    """State ``|sign, s>`` with the sign at site 0 and bits on ``[l, u]``.

    Instances produced by :func:`canonicalize` and the arithmetic are
    canonical. Gauge outcomes keep a fixed interval and may carry leading
    or trailing zeros (or a negative zero); they are still legal basis
    states, just not canonical representatives.

    Stored as an immutable ``(sign, l, u, bits)`` tuple: the exhaustive
    oracle sweeps build millions of these.
    """

    __slots__ = ()

    def __new__(cls, sign: int, l: int, u: int, bits: int = 0):
        if sign != PLUS and sign != MINUS:
            raise ValueError("sign must be +1 or -1")
        if l > 0 or u < 0:
            raise ValueError(f"interval [{l}, {u}] must contain 0")
        if bits < 0 or bits >> (u - l + 1):
            raise ValueError("bits outside the interval [l, u]")
        return tuple.__new__(cls, (sign, l, u, bits))

    sign = property(operator.itemgetter(0))
    l = property(operator.itemgetter(1))
    u = property(operator.itemgetter(2))
    bits = property(operator.itemgetter(3))

    def __getnewargs__(self):
        return tuple(self)

    def __repr__(self) -> str:
        return f"StringRational({self.format()!r}, l={self.l}, u={self.u})"

    # Deterministic key order for reductions; not the arithmetic order.
    def __lt__(self, other):
        if not isinstance(other, StringRational):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __le__(self, other):
        if not isinstance(other, StringRational):
            return NotImplemented
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other):
        if not isinstance(other, StringRational):
            return NotImplemented
        return self.sort_key() > other.sort_key()

    def __ge__(self, other):
        if not isinstance(other, StringRational):
            return NotImplemented
        return self.sort_key() >= other.sort_key()

    def __eq__(self, other):
        return isinstance(other, StringRational) and tuple.__eq__(self, other)

    def __ne__(self, other):
        return not self == other

    __hash__ = tuple.__hash__

    @property
    def width(self) -> int:
        return self.u - self.l + 1

    def bit(self, j: int) -> int:
        if not self.l <= j <= self.u:
            raise IndexError(f"site {j} outside [{self.l}, {self.u}]")
        return (self.bits >> (j - self.l)) & 1

    def sites(self) -> range:
        return range(self.l, self.u + 1)

    def ones(self) -> frozenset[int]:
        """The set of sites holding a 1."""
        return frozenset(j for j in self.sites() if self.bit(j))

    @property
    def is_zero(self) -> bool:
        return self.bits == 0

    @property
    def is_canonical(self) -> bool:
        if self.bits == 0:
            return self.sign == PLUS and self.l == 0 and self.u == 0
        if self.u > 0 and not self.bit(self.u):
            return False
        if self.l < 0 and not self.bit(self.l):
            return False
        return True

    def canonical(self) -> "StringRational":
        _, l, u, bits = self
        if bits == 0:
            return ZERO
        if (l == 0 or bits & 1) and (u == 0 or bits >> (u - l)):
            return self
        low = (self.bits & -self.bits).bit_length() - 1 + self.l
        high = self.bits.bit_length() - 1 + self.l
        l, u = min(0, low), max(0, high)
        bits = self.bits >> (l - self.l)
        bits &= (1 << (u - l + 1)) - 1
        return StringRational(self.sign, l, u, bits)

    def value(self) -> DyadicValue:
        return DyadicValue.make(self.sign * self.bits, -self.l)

    def with_sign(self, sign: int) -> "StringRational":
        return StringRational(sign, self.l, self.u, self.bits)

    def sort_key(self) -> tuple:
        return (self.l, self.u, self.sign, self.bits)

    def format(self) -> str:
        text = format(self.bits, f"0{self.width}b")
        cut = self.u + 1
        return text[:cut] + ("+" if self.sign == PLUS else "-") + text[cut:]

    def __str__(self) -> str:
        return self.format()

    def to_json(self) -> dict:
        return {"sign": "+" if self.sign == PLUS else "-", "l": self.l, "u": self.u,
                "bits": format(self.bits, f"0{self.width}b")}

    @classmethod
    def from_json(cls, obj: dict) -> "StringRational":
        sign = _SIGN_CHARS[obj["sign"]]
        l, u, bits = int(obj["l"]), int(obj["u"]), obj["bits"]
        if len(bits) != u - l + 1 or set(bits) - {"0", "1"}:
            raise ValueError(f"bits {bits!r} do not cover [{l}, {u}]")
        return cls(sign, l, u, int(bits, 2))

    @classmethod
    def parse(cls, text: str, *, keep_interval: bool = False) -> "StringRational":
        """Parse text; canonicalized unless ``keep_interval`` is set."""
        state = parse(text).to_state()
        return state if keep_interval else state.canonical()


ZERO = StringRational(PLUS, 0, 0, 0)


def canonicalize(raw: RawStringState | StringRational) -> StringRational:
    """Translate the sign to site 0 and strip leading/trailing zeros.

    All-zero bit content maps to the unique zero ``0+`` whatever the sign.
    """
    if type(raw) is RawStringState:
        raw = raw.to_state()
    return raw.canonical()


def value(x: StringRational | RawStringState) -> DyadicValue:
    if isinstance(x, RawStringState):
        x = x.to_state()
    return x.value()


def from_value(v: DyadicValue) -> StringRational:
    if v.numerator == 0:
        return ZERO
    mag, k = abs(v.numerator), v.exponent
    sign = PLUS if v.numerator > 0 else MINUS
    return StringRational(sign, -k, max(0, mag.bit_length() - 1 - k), mag).canonical()


def format_state(x: StringRational) -> str:
    return x.format()


def _check_bits(text: str, start: int, chunk: str) -> None:
    for i, ch in enumerate(chunk):
        if ch not in "01":
            raise ParseError(text, start + i, f"unexpected character {ch!r}")


def parse(text: str) -> RawStringState:
    """Parse compact (``1001-0111``) or dotted (``-1001.0111``) notation.

    The result has its sign at site 0 and keeps every written bit.
    """
    if not text:
        raise ParseError(text, 0, "empty state text")
    if text[0] in _SIGN_CHARS:
        sign = _SIGN_CHARS[text[0]]
        body = text[1:]
        whole, dot, frac = body.partition(".")
        _check_bits(text, 1, whole)
        _check_bits(text, 2 + len(whole), frac)
        if "." in frac:
            raise ParseError(text, 2 + len(whole) + frac.index("."), "second binal point")
        if not whole:
            if not frac:
                raise ParseError(text, 1, "missing bits")
            whole = "0"
    else:
        for i, ch in enumerate(text):
            if ch in _SIGN_CHARS:
                break
            if ch not in "01":
                raise ParseError(text, i, f"unexpected character {ch!r}")
        else:
            raise ParseError(text, len(text), "missing sign character")
        whole, sign, frac = text[:i], _SIGN_CHARS[text[i]], text[i + 1:]
        _check_bits(text, i + 1, frac)
    u, l = len(whole) - 1, -len(frac)
    return RawStringState(sign, 0, l, u, int(whole + frac, 2))


def nat_state(n: int) -> StringRational:
    """The natural-number state for ``n``: sign +, lower bound 0."""
    if n < 0:
        raise ValueError("natural numbers are nonnegative")
    if n == 0:
        return ZERO
    return StringRational(PLUS, 0, n.bit_length() - 1, n)


def is_natural(x: StringRational) -> bool:
    return x.sign == PLUS and x.l == 0 and x.is_canonical
