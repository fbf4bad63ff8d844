"""Gauge-invariant logical qubits from physical qubit pairs.

Logical qubit ``j`` lives on physical qubits ``2j-1, 2j``. Logical 0 is any
state of the isospin-1 triplet ``{|00>, |11>, (|01>+|10>)/sqrt2}``, logical
1 is the singlet ``(|01>-|10>)/sqrt2``. Applying the same SU(2) matrix to
both qubits of a pair never mixes the two subspaces, so the logical
content survives global gauges and local gauges with ``U_{2j-1} = U_{2j}``.

Physical states are superpositions keyed by bit strings, qubit 1 first.
"""
from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
import math

import numpy as np

from .gauge import SU2_TOL, GaugeTransform, random_su2
from .states import PLUS, MINUS, StringRational
from .superpose import Superposition

_R = 1 / math.sqrt(2)
KET00 = np.array([1, 0, 0, 0], dtype=complex)
KET11 = np.array([0, 0, 0, 1], dtype=complex)
TRIPLET_0 = np.array([0, _R, _R, 0], dtype=complex)
SINGLET = np.array([0, _R, -_R, 0], dtype=complex)
TRIPLET = np.stack([KET00, KET11, TRIPLET_0])


class PreconditionError(ValueError):
    pass


class DecodeError(ValueError):
    def __init__(self, pairs: list[int], probs):
        super().__init__(f"cannot decide logical value of pair(s) {pairs}: {probs}")
        self.pairs = pairs


@dataclass(frozen=True)
class LogicalEncoding:
    """Representatives for logical 0 (a triplet state) and logical 1 (the singlet)."""

    zero: tuple = tuple(KET00)

    def __post_init__(self):
        z = np.asarray(self.zero, dtype=complex)
        if z.shape != (4,) or abs(np.vdot(z, z).real - 1) > 1e-12:
            raise ValueError("logical-0 representative must be a normalized 4-vector")
        if abs(np.vdot(SINGLET, z)) > 1e-12:
            raise ValueError("logical-0 representative must lie in the triplet subspace")

    @property
    def zero_vec(self) -> np.ndarray:
        return np.asarray(self.zero, dtype=complex)

    def pair_vector(self, bit: str) -> np.ndarray:
        if bit == "0":
            return self.zero_vec
        if bit == "1":
            return SINGLET
        raise ValueError(f"logical bit must be 0 or 1, got {bit!r}")


DEFAULT_ENCODING = LogicalEncoding()


def _check_bits(bits: str) -> str:
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"logical bits {bits!r} must be a nonempty 0/1 string")
    return bits


def encode_dense(bits: str, encoding: LogicalEncoding = DEFAULT_ENCODING) -> np.ndarray:
    vec = np.ones(1, dtype=complex)
    for b in _check_bits(bits):
        vec = np.kron(vec, encoding.pair_vector(b))
    return vec


def encode(bits: str, encoding: LogicalEncoding = DEFAULT_ENCODING) -> Superposition:
    """Tensor product of per-pair representatives on ``2 * len(bits)`` qubits."""
    return from_dense(encode_dense(bits, encoding))


def from_dense(vec: np.ndarray) -> Superposition:
    nq = int(round(math.log2(len(vec))))
    return Superposition((format(i, f"0{nq}b"), a) for i, a in enumerate(vec) if a != 0)


def to_dense(psi: Superposition) -> np.ndarray:
    keys = list(psi)
    if not keys:
        raise ValueError("empty physical state")
    nq = len(keys[0])
    if any(len(k) != nq or set(k) - {"0", "1"} for k in keys):
        raise ValueError("physical keys must be equal-length bit strings")
    vec = np.zeros(1 << nq, dtype=complex)
    for k, a in psi.items():
        vec[int(k, 2)] = a
    return vec


def _pair_count(vec: np.ndarray) -> int:
    nq = int(round(math.log2(len(vec))))
    if (1 << nq) != len(vec):
        raise ValueError("state length is not a power of two")
    if nq % 2:
        raise ValueError(f"odd number of physical qubits ({nq})")
    return nq // 2


def logical_probs_dense(vec: np.ndarray) -> list[tuple[float, float]]:
    n = _pair_count(vec)
    t = vec.reshape((4,) * n) if n else vec
    out = []
    for j in range(n):
        pair = np.moveaxis(t, j, 0).reshape(4, -1)
        p_trip = float(np.sum(np.abs(TRIPLET.conj() @ pair) ** 2))
        p_sing = float(np.sum(np.abs(SINGLET.conj() @ pair) ** 2))
        out.append((p_trip, p_sing))
    return out


def logical_probs(physical) -> list[tuple[float, float]]:
    """Per pair, the probabilities of the triplet span and of the singlet."""
    vec = physical if isinstance(physical, np.ndarray) else to_dense(physical)
    return logical_probs_dense(vec)


def apply_physical(U: GaugeTransform, vec: np.ndarray) -> np.ndarray:
    """Apply ``U`` sitewise to physical qubits numbered ``1..2n``."""
    nq = 2 * _pair_count(vec)
    t = vec.reshape((2,) * nq)
    for q in range(nq):
        t = np.moveaxis(np.tensordot(U.matrix(q + 1), t, axes=([1], [q])), 0, q)
    return t.reshape(-1)


def satisfies_pairing(U: GaugeTransform, n_pairs: int, tol: float = SU2_TOL) -> bool:
    return all(np.abs(U.matrix(2 * j - 1) - U.matrix(2 * j)).max() <= tol
               for j in range(1, n_pairs + 1))


def random_gauge(rng: np.random.Generator, n_pairs: int, mode: str = "global") -> GaugeTransform:
    """Random gauge on physical sites ``1..2n``: ``global``, ``local-paired`` or ``local-unpaired``."""
    if mode == "global":
        return GaugeTransform.global_(random_su2(rng))
    if mode == "local-paired":
        sites = {}
        for j in range(1, n_pairs + 1):
            m = random_su2(rng)
            sites[2 * j - 1] = sites[2 * j] = m
        return GaugeTransform.local(sites)
    if mode == "local-unpaired":
        return GaugeTransform.random_local(rng, range(1, 2 * n_pairs + 1))
    raise ValueError(f"unknown gauge mode {mode!r}")


@dataclass
class InvarianceReport:
    max_deviation: float
    trials: int
    seed: int | None
    mode: str
    deviations: list[float]

    def to_json(self) -> dict:
        return {"max_deviation": self.max_deviation, "trials": self.trials,
                "seed": self.seed, "mode": self.mode}


def check_invariance(gauge: GaugeTransform | str | Callable, bits: str, trials: int = 1,
                     seed: int | None = None, *, require_paired: bool = True,
                     encoding: LogicalEncoding = DEFAULT_ENCODING) -> InvarianceReport:
    """Largest change of any pair's logical probabilities under the gauge(s).

    ``gauge`` is a fixed transform, a mode name for :func:`random_gauge`,
    or a callable ``rng -> GaugeTransform``. With ``require_paired`` set a
    local gauge that breaks ``U_{2j-1} = U_{2j}`` is rejected.
    """
    n = len(_check_bits(bits))
    vec = encode_dense(bits, encoding)
    before = np.array(logical_probs_dense(vec))
    rng = np.random.default_rng(seed)
    if isinstance(gauge, str):
        mode = gauge
        draw = lambda r: random_gauge(r, n, mode)
    elif isinstance(gauge, GaugeTransform):
        mode = "fixed"
        draw = lambda r: gauge
    else:
        mode = "custom"
        draw = gauge
    deviations = []
    for _ in range(trials):
        U = draw(rng)
        if require_paired and not U.is_global and not satisfies_pairing(U, n):
            raise PreconditionError("local gauge violates U_{2j-1} = U_{2j}")
        after = np.array(logical_probs_dense(apply_physical(U, vec)))
        deviations.append(float(np.abs(after - before).max()))
    return InvarianceReport(max(deviations, default=0.0), trials, seed, mode, deviations)


def decode(physical, threshold: float = 1e-6) -> str:
    """Logical bits by dominant projector; ambiguous pairs raise :class:`DecodeError`."""
    probs = logical_probs(physical)
    out, bad = [], []
    for j, (p_t, p_s) in enumerate(probs, start=1):
        if p_t >= 1 - threshold:
            out.append("0")
        elif p_s >= 1 - threshold:
            out.append("1")
        else:
            bad.append(j)
    if bad:
        raise DecodeError(bad, [probs[j - 1] for j in bad])
    return "".join(out)


def logical_to_state(bits: str, point: int | None = None, sign: str = "+") -> StringRational:
    """Read logical bits as string-state content, most significant first.

    ``point`` is the number of integer bits (default: all of them).
    """
    _check_bits(bits)
    point = len(bits) if point is None else point
    if not 0 <= point <= len(bits):
        raise ValueError("binal point outside the bit string")
    whole = bits[:point] or "0"
    frac = bits[point:]
    return StringRational(PLUS if sign == "+" else MINUS, -len(frac), len(whole) - 1,
                          int(whole + frac, 2)).canonical()
