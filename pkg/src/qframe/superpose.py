"""Finite sparse superpositions of basis states with complex amplitudes."""
from __future__ import annotations

from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping
import inspect
import json
import math

from .states import StringRational

PRUNE_EPS = 1e-15
NORM_TOL = 1e-9


class ContractViolation(ValueError):
    """An operation was handed a state outside its declared domain."""


def _key_order(key):
    if isinstance(key, StringRational):
        return (0, key.sort_key())
    return (1, str(key))


class Superposition(Mapping):
    """Immutable map from basis state to complex amplitude.

    Keys are usually :class:`StringRational` instances; any hashable key
    works (the DFS encoder uses physical bit strings). Amplitudes with
    magnitude below ``eps`` are dropped on construction.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | Iterable[tuple] = (), *, eps: float = PRUNE_EPS):
        merged: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for key, amp in items:
            merged[key] = merged.get(key, 0j) + complex(amp)
        self._terms = {k: a for k, a in merged.items() if abs(a) >= eps}

    @classmethod
    def basis(cls, key: Hashable) -> "Superposition":
        return cls({key: 1.0})

    @classmethod
    def uniform(cls, keys: Iterable[Hashable]) -> "Superposition":
        keys = list(keys)
        amp = 1 / math.sqrt(len(keys))
        return cls((k, amp) for k in keys)

    def __getitem__(self, key) -> complex:
        return self._terms[key]

    def amplitude(self, key) -> complex:
        return self._terms.get(key, 0j)

    def __iter__(self) -> Iterator:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {a:.6g}" for k, a in self.sorted_items()[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"Superposition({{{body}{more}}})"

    def sorted_items(self) -> list[tuple]:
        return sorted(self._terms.items(), key=lambda kv: _key_order(kv[0]))

    def norm_squared(self) -> float:
        return math.fsum(abs(a) ** 2 for _, a in self.sorted_items())

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    @property
    def normalized(self) -> bool:
        return abs(self.norm_squared() - 1.0) <= NORM_TOL

    def require_normalized(self, what: str = "state") -> None:
        if not self.normalized:
            raise ContractViolation(f"{what} is not normalized (|psi|^2 = {self.norm_squared():.12g})")

    def probabilities(self) -> dict:
        return {k: abs(a) ** 2 for k, a in self._terms.items()}

    def scale(self, c: complex) -> "Superposition":
        return Superposition({k: c * a for k, a in self._terms.items()})

    def __add__(self, other: "Superposition") -> "Superposition":
        if not isinstance(other, Superposition):
            return NotImplemented
        return Superposition(list(self._terms.items()) + list(other._terms.items()))

    def __sub__(self, other: "Superposition") -> "Superposition":
        if not isinstance(other, Superposition):
            return NotImplemented
        return self + other.scale(-1)

    def distance(self, other: "Superposition") -> float:
        """Largest amplitude difference over the union of supports."""
        keys = set(self._terms) | set(other._terms)
        return max((abs(self.amplitude(k) - other.amplitude(k)) for k in keys), default=0.0)

    def to_jsonl(self) -> str:
        lines = [json.dumps({"state": str(k), "re": a.real, "im": a.imag})
                 for k, a in self.sorted_items()]
        return "\n".join(lines)

    @classmethod
    def from_jsonl(cls, text: str, *, keep_interval: bool = True) -> "Superposition":
        terms = []
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            key = StringRational.parse(rec["state"], keep_interval=keep_interval)
            terms.append((key, complex(rec["re"], rec.get("im", 0.0))))
        return cls(terms)


def as_superposition(x) -> Superposition:
    if isinstance(x, Superposition):
        return x
    return Superposition.basis(x)


def inner_product(psi, phi) -> complex:
    """<psi|phi>, conjugate-linear in ``psi``; basis states are orthonormal."""
    psi, phi = as_superposition(psi), as_superposition(phi)
    if len(psi) > len(phi):
        shared = [k for k in phi if k in psi]
    else:
        shared = [k for k in psi if k in phi]
    shared.sort(key=_key_order)
    terms = [psi[k].conjugate() * phi[k] for k in shared]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def lift(f: Callable, arity: int | None = None) -> Callable:
    """Extend a map on basis states linearly to superpositions.

    ``f`` of one argument maps a basis state to a basis state; ``f`` of two
    arguments acts on the product ``psi (x) phi`` and the lifted operator is
    called with two superpositions. Colliding images add their amplitudes.
    """

    def unary(psi):
        psi = as_superposition(psi)
        return Superposition((f(k), a) for k, a in psi.sorted_items())

    def binary(psi, phi):
        psi, phi = as_superposition(psi), as_superposition(phi)
        right = phi.sorted_items()
        return Superposition((f(x, y), a * b) for x, a in psi.sorted_items() for y, b in right)

    if arity is None:
        try:
            arity = len(inspect.signature(f).parameters)
        except (TypeError, ValueError):
            arity = 1
    return binary if arity >= 2 else unary


def tensor_pairs(psi, phi) -> Iterator[tuple]:
    """Yield ``(x, y, p)`` with ``p = |<x|psi><y|phi>|^2`` in deterministic order."""
    psi, phi = as_superposition(psi), as_superposition(phi)
    right = [(y, abs(b) ** 2) for y, b in phi.sorted_items()]
    for x, a in psi.sorted_items():
        pa = abs(a) ** 2
        for y, pb in right:
            yield x, y, pa * pb
