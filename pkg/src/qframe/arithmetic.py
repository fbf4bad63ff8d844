"""Arithmetic relations and operations on rational string states.

These are the ``A``-subscripted notions: equality and order of the numbers
encoded by basis states, not Hilbert-space equality. Inputs may carry
redundant zeros; every function works on canonical representatives and
returns canonical states.
"""
from __future__ import annotations

from collections.abc import Callable
import math

from .states import MINUS, PLUS, ZERO, StringRational, canonicalize
from .superpose import as_superposition, tensor_pairs


_new_tuple = tuple.__new__


class DomainError(ValueError):
    """Arithmetic request outside the operation's domain."""


def _scaled(x: StringRational, l: int) -> int:
    """Signed integer ``n`` with ``value(x) == n * 2**l`` (requires ``l <= x.l``)."""
    sign, xl, _, bits = x
    return sign * (bits << (xl - l))


def _from_scaled(n: int, l: int) -> StringRational:
    if not n:
        return ZERO
    if n < 0:
        sign, mag = MINUS, -n
    else:
        sign, mag = PLUS, n
    if l < 0:
        drop = (mag & -mag).bit_length() - 1
        if drop:
            if drop > -l:
                drop = -l
            mag >>= drop
            l += drop
    elif l:
        mag <<= l
        l = 0
    u = l + mag.bit_length() - 1
    # Valid by construction, so skip the constructor's checks.
    return _new_tuple(StringRational, (sign, l, u if u > 0 else 0, mag))


def accuracy_state(ell: int) -> StringRational:
    """The state ``+0.0...01`` with its single 1 at site ``-ell``; value ``2**-ell``."""
    if ell < 0:
        raise DomainError("accuracy index must be nonnegative")
    return StringRational(PLUS, -ell, 0, 1)


def eq_A(x: StringRational, y: StringRational) -> bool:
    """Same sign and same set of 1 sites; zero is equal to zero whatever its sign."""
    xs, xl, _, a = x
    ys, yl, _, b = y
    if not a or not b:
        return a == b
    # Redundant zero sites do not change the 1-set once both are aligned.
    return xs == ys and (a << (xl - yl) == b if xl > yl else a == b << (yl - xl))


def _ones_le(xl: int, a: int, yl: int, b: int) -> bool:
    # Highest site where the 1-sets differ decides; it must belong to y.
    if xl > yl:
        a <<= xl - yl
    elif yl > xl:
        b <<= yl - xl
    diff = a ^ b
    if not diff:
        return True
    return (b >> (diff.bit_length() - 1)) & 1 == 1


def le_A(x: StringRational, y: StringRational) -> bool:
    xs, xl, _, a = x
    ys, yl, _, b = y
    if not a:
        return not b or ys == PLUS
    if not b:
        return xs == MINUS
    if xs != ys:
        return xs == MINUS
    if xs == PLUS:
        return _ones_le(xl, a, yl, b)
    return _ones_le(yl, b, xl, a)


def lt_A(x: StringRational, y: StringRational) -> bool:
    return le_A(x, y) and not eq_A(x, y)


def add_A(x: StringRational, y: StringRational) -> StringRational:
    xs, xl, _, a = x
    ys, yl, _, b = y
    l = xl if xl < yl else yl
    return _from_scaled(xs * (a << (xl - l)) + ys * (b << (yl - l)), l)


def sub_A(x: StringRational, y: StringRational) -> StringRational:
    xs, xl, _, a = x
    ys, yl, _, b = y
    l = xl if xl < yl else yl
    return _from_scaled(xs * (a << (xl - l)) - ys * (b << (yl - l)), l)


def mul_A(x: StringRational, y: StringRational) -> StringRational:
    xs, xl, _, a = x
    ys, yl, _, b = y
    return _from_scaled(xs * ys * a * b, xl + yl)


def neg_A(x: StringRational) -> StringRational:
    x = canonicalize(x)
    return x if x.is_zero else x.with_sign(-x.sign)


def abs_A(x: StringRational) -> StringRational:
    return canonicalize(x).with_sign(PLUS)


def div_A(x: StringRational, y: StringRational, ell: int) -> StringRational:
    """Quotient truncated toward zero at site ``-ell``.

    The result is within ``2**-ell`` of the exact quotient.
    """
    if ell < 0:
        raise DomainError("accuracy index must be nonnegative")
    y = canonicalize(y)
    if y.is_zero:
        raise DomainError("division by the zero state")
    x = canonicalize(x)
    a, b = x.bits, y.bits
    shift = x.l - y.l + ell
    num, den = (a << shift, b) if shift >= 0 else (a, b << -shift)
    q = num // den
    return _from_scaled(x.sign * y.sign * q, -ell)


def add_registers(x: StringRational, y: StringRational) -> tuple[StringRational, StringRational]:
    """Two-register addition ``|x>|y> -> |x>|y +_A x>``; injective on pairs."""
    return canonicalize(x), add_A(y, x)


RELATIONS: dict[str, Callable[[StringRational, StringRational], bool]] = {
    "eq": eq_A,
    "le": le_A,
    "lt": lt_A,
    "ge": lambda x, y: le_A(y, x),
    "gt": lambda x, y: lt_A(y, x),
    "ne": lambda x, y: not eq_A(x, y),
}

OPERATIONS: dict[str, Callable[[StringRational, StringRational], StringRational]] = {
    "add": add_A,
    "sub": sub_A,
    "mul": mul_A,
}


def _relation(rel) -> Callable:
    if callable(rel):
        return rel
    try:
        return RELATIONS[rel]
    except KeyError:
        raise DomainError(f"unknown relation {rel!r}; expected one of {sorted(RELATIONS)}") from None


def prob_rel(psi, phi, rel="eq") -> float:
    """Probability that a draw from ``psi`` stands in ``rel`` to a draw from ``phi``."""
    psi, phi = as_superposition(psi), as_superposition(phi)
    psi.require_normalized("left state")
    phi.require_normalized("right state")
    test = _relation(rel)
    return math.fsum(p for x, y, p in tensor_pairs(psi, phi) if test(x, y))


def prob_eq(psi, phi) -> float:
    return prob_rel(psi, phi, "eq")


def prob_le(psi, phi) -> float:
    return prob_rel(psi, phi, "le")

