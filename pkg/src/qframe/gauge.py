"""SU(2) gauge transformations of qubit strings.

A gauge assigns a 2x2 special unitary to every lattice site. Matrices act
on column vectors in the ordered basis ``(|0>, |1>)``: a site in state
``s`` goes to ``sum_t U[t, s] |t>``. The sign qubit uses the same matrix in
the ordered basis ``(+, -)``, pairing ``+`` with ``0``; by default it is
rotated by the site-0 matrix, but a separate sign matrix may be given.

Gauge images of basis states are product states. :class:`ProductState`
keeps them factored so long strings stay cheap; :func:`apply_gauge`
expands into a :class:`Superposition` subject to a support cap.
"""
from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
import hashlib
import json
import math
import os

import numpy as np

from . import arithmetic
from .states import MINUS, PLUS, RawStringState, StringRational
from .superpose import PRUNE_EPS, Superposition, as_superposition, lift

SU2_TOL = 1e-12
DEFAULT_SUPPORT_CAP = 1 << 20
CAP_ENV = "QFRAME_SUPPORT_CAP"

IDENTITY = np.eye(2, dtype=complex)
# i*H is the SU(2) member of the Hadamard class: |0> -> i|+>, |1> -> i|->.
HADAMARD = 1j * np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


class SupportCapExceeded(RuntimeError):
    def __init__(self, needed: int, cap: int):
        super().__init__(f"gauge expansion needs {needed} terms, above the support cap of {cap} "
                         f"(raise it with {CAP_ENV} or --support-cap)")
        self.needed = needed
        self.cap = cap


class NotSU2(ValueError):
    pass


def support_cap(cap: int | None = None) -> int:
    if cap is None:
        cap = int(os.environ.get(CAP_ENV, DEFAULT_SUPPORT_CAP))
    if cap <= 0:
        raise ValueError("support cap must be positive")
    return cap


def check_su2(m, tol: float = SU2_TOL) -> np.ndarray:
    m = np.array(m, dtype=complex)
    if m.shape != (2, 2):
        raise NotSU2(f"expected a 2x2 matrix, got shape {m.shape}")
    err = np.abs(m.conj().T @ m - IDENTITY).max()
    if err > tol:
        raise NotSU2(f"matrix not unitary (deviation {err:.3g})")
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det - 1) > tol:
        raise NotSU2(f"determinant {det:.6g} is not 1")
    m.setflags(write=False)
    return m


def su2_from_quaternion(a: float, b: float, c: float, d: float) -> np.ndarray:
    n = math.sqrt(a * a + b * b + c * c + d * d)
    a, b, c, d = a / n, b / n, c / n, d / n
    return np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]], dtype=complex)


def random_su2(rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed SU(2) element."""
    return su2_from_quaternion(*rng.standard_normal(4))


def rotation(theta: float, axis: str = "y") -> np.ndarray:
    """``exp(-i theta sigma_axis / 2)``."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if axis == "y":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if axis == "z":
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]], dtype=complex)
    raise ValueError(f"unknown axis {axis!r}")


@dataclass(frozen=True, eq=False)
class GaugeTransform:
    """SU(2)-valued map on the integer lattice.

    ``default`` applies to every site not listed in ``sites``. A transform
    with no per-site overrides is global; identity is the global transform
    with ``default == I``. ``sign`` overrides the matrix used on the sign
    qubit (``None`` means use the site-0 matrix).
    """

    default: np.ndarray = field(default_factory=lambda: IDENTITY)
    sites: Mapping[int, np.ndarray] = field(default_factory=dict)
    sign: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "default", check_su2(self.default))
        object.__setattr__(self, "sites", {int(j): check_su2(m) for j, m in sorted(self.sites.items())})
        if self.sign is not None:
            object.__setattr__(self, "sign", check_su2(self.sign))

    @classmethod
    def identity(cls) -> "GaugeTransform":
        return cls()

    @classmethod
    def global_(cls, matrix, *, sign=None) -> "GaugeTransform":
        return cls(default=matrix, sign=sign)

    @classmethod
    def local(cls, sites: Mapping[int, np.ndarray], *, default=IDENTITY, sign=None) -> "GaugeTransform":
        return cls(default=default, sites=sites, sign=sign)

    @classmethod
    def random_global(cls, rng: np.random.Generator, *, sign="same") -> "GaugeTransform":
        m = random_su2(rng)
        return cls(default=m, sign=_sign_option(sign, rng))

    @classmethod
    def random_local(cls, rng: np.random.Generator, sites, *, sign="same") -> "GaugeTransform":
        return cls(sites={j: random_su2(rng) for j in sites}, sign=_sign_option(sign, rng))

    @property
    def is_global(self) -> bool:
        return not self.sites

    def matrix(self, j: int) -> np.ndarray:
        return self.sites.get(j, self.default)

    def sign_matrix(self) -> np.ndarray:
        return self.matrix(0) if self.sign is None else self.sign

    def is_identity(self, tol: float = SU2_TOL) -> bool:
        mats = [self.default, *self.sites.values(), self.sign_matrix()]
        return all(np.abs(m - IDENTITY).max() <= tol for m in mats)

    def compose_after(self, first: "GaugeTransform") -> "GaugeTransform":
        """The transform applying ``first`` and then ``self``."""
        return compose(self, first)

    def fingerprint(self) -> str:
        """Stable digest of the sitewise matrices on a 1e-12 grid."""
        def grid(m):
            return [int(round(v * 1e12)) for z in np.asarray(m).ravel() for v in (z.real, z.imag)]
        payload = {
            "default": grid(self.default),
            "sites": [[j, grid(m)] for j, m in sorted(self.sites.items())],
            "sign": None if self.sign is None else grid(self.sign),
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()

    def to_json(self) -> dict:
        def enc(m):
            return [[[z.real, z.imag] for z in row] for row in np.asarray(m)]
        out = {"global": self.is_global,
               "sites": [{"site": j, "matrix": enc(m)} for j, m in sorted(self.sites.items())],
               "default": "identity" if np.array_equal(self.default, IDENTITY) else enc(self.default)}
        if self.sign is not None:
            out["sign"] = enc(self.sign)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "GaugeTransform":
        def dec(m):
            if isinstance(m, str):
                named = {"identity": IDENTITY, "hadamard": HADAMARD}
                try:
                    return named[m]
                except KeyError:
                    raise ValueError(f"unknown named matrix {m!r}") from None
            return np.array([[complex(*z) if isinstance(z, list) else complex(z) for z in row] for row in m])
        default = dec(obj.get("default", "identity"))
        sites = {int(e["site"]): dec(e["matrix"]) for e in obj.get("sites", [])}
        if obj.get("global") and sites:
            mats = list(sites.values())
            if any(np.abs(m - mats[0]).max() > SU2_TOL for m in mats):
                raise ValueError("global gauge must use one matrix on every site")
            default, sites = mats[0], {}
        sign = dec(obj["sign"]) if obj.get("sign") is not None else None
        return cls(default=default, sites=sites, sign=sign)

    @classmethod
    def load(cls, path) -> "GaugeTransform":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _sign_option(sign, rng):
    if isinstance(sign, str):
        if sign == "same":
            return None
        if sign == "identity":
            return IDENTITY
        if sign == "random":
            return random_su2(rng)
        raise ValueError(f"unknown sign option {sign!r}")
    return sign


def compose(second: GaugeTransform, first: GaugeTransform) -> GaugeTransform:
    """Sitewise product ``second @ first``: apply ``first``, then ``second``."""
    keys = set(second.sites) | set(first.sites)
    sites = {j: second.matrix(j) @ first.matrix(j) for j in keys}
    if second.sign is None and first.sign is None:
        sign = None
    else:
        sign = second.sign_matrix() @ first.sign_matrix()
    return GaugeTransform(default=second.default @ first.default, sites=sites, sign=sign)


def inverse(U: GaugeTransform) -> GaugeTransform:
    """Sitewise adjoint, cached on ``U`` (transforms are immutable)."""
    inv = U.__dict__.get("_inverse")
    if inv is None:
        sign = None if U.sign is None else U.sign.conj().T
        inv = GaugeTransform(default=U.default.conj().T,
                             sites={j: m.conj().T for j, m in U.sites.items()}, sign=sign)
        object.__setattr__(U, "_inverse", inv)
        object.__setattr__(inv, "_inverse", U)
    return inv


def max_deviation(a: GaugeTransform, b: GaugeTransform) -> float:
    keys = set(a.sites) | set(b.sites) | {0}
    diffs = [np.abs(a.matrix(j) - b.matrix(j)).max() for j in keys]
    diffs.append(np.abs(a.default - b.default).max())
    diffs.append(np.abs(a.sign_matrix() - b.sign_matrix()).max())
    return float(max(diffs))


class ProductState:
    """Factored state ``coeff * (sign vector) (x) (site vectors on [l, u])``."""

    __slots__ = ("l", "u", "sign_vec", "site_vecs", "coeff")

    def __init__(self, l: int, u: int, sign_vec, site_vecs, coeff: complex = 1.0):
        self.l, self.u = l, u
        self.sign_vec = np.asarray(sign_vec, dtype=complex)
        self.site_vecs = np.asarray(site_vecs, dtype=complex).reshape(u - l + 1, 2)
        self.coeff = complex(coeff)

    @classmethod
    def from_basis(cls, x: StringRational, coeff: complex = 1.0) -> "ProductState":
        sign_vec = np.array([1, 0] if x.sign == PLUS else [0, 1], dtype=complex)
        n = x.width
        vecs = np.zeros((n, 2), dtype=complex)
        bits = np.array([(x.bits >> i) & 1 for i in range(n)], dtype=int)
        vecs[np.arange(n), bits] = 1
        return cls(x.l, x.u, sign_vec, vecs, coeff)

    def apply(self, U: GaugeTransform) -> "ProductState":
        mats = np.stack([U.matrix(j) for j in range(self.l, self.u + 1)])
        vecs = np.einsum("nij,nj->ni", mats, self.site_vecs)
        return ProductState(self.l, self.u, U.sign_matrix() @ self.sign_vec, vecs, self.coeff)

    def amplitude(self, x: StringRational) -> complex:
        if (x.l, x.u) != (self.l, self.u):
            return 0j
        amp = self.coeff * self.sign_vec[0 if x.sign == PLUS else 1]
        for i in range(self.u - self.l + 1):
            amp *= self.site_vecs[i, (x.bits >> i) & 1]
        return complex(amp)

    def branch_count(self, eps: float = PRUNE_EPS) -> int:
        count = int((np.abs(self.sign_vec) >= eps).sum())
        for n in (np.abs(self.site_vecs) >= eps).sum(axis=1):
            count *= int(n)
        return count

    def expand(self, cap: int | None = None, eps: float = PRUNE_EPS) -> Superposition:
        cap = support_cap(cap)
        needed = self.branch_count(eps)
        if needed > cap:
            raise SupportCapExceeded(needed, cap)
        terms = [(0, self.coeff)]
        for i in range(self.u - self.l + 1):
            opts = [(t << i, a) for t, a in enumerate(self.site_vecs[i]) if abs(a) >= eps]
            terms = [(b + tb, amp * a) for b, amp in terms for tb, a in opts]
        signs = [(s, a) for s, a in zip((PLUS, MINUS), self.sign_vec) if abs(a) >= eps]
        return Superposition((StringRational(s, self.l, self.u, b), sa * amp)
                             for s, sa in signs for b, amp in terms)

    def single(self, eps: float = PRUNE_EPS) -> tuple[StringRational, complex] | None:
        """The basis state and amplitude if this is (numerically) one basis state."""
        if self.branch_count(eps) != 1:
            return None
        [(key, amp)] = self.expand(cap=1, eps=eps).items()
        return key, amp

    def norm_squared(self) -> float:
        prod = abs(self.coeff) ** 2 * float(np.vdot(self.sign_vec, self.sign_vec).real)
        for v in self.site_vecs:
            prod *= float(np.vdot(v, v).real)
        return prod


def gauge_product(U: GaugeTransform, x) -> ProductState:
    """``U x`` for a basis state (or product state) without expanding."""
    if isinstance(x, ProductState):
        return x.apply(U)
    if isinstance(x, RawStringState):
        x = x.canonical()
    return ProductState.from_basis(x).apply(U)


def apply_gauge(U: GaugeTransform, x, cap: int | None = None) -> Superposition:
    """``U x`` as an explicit superposition over the fixed interval of each input key."""
    if isinstance(x, ProductState):
        return x.apply(U).expand(cap)
    if isinstance(x, (StringRational, RawStringState)):
        return gauge_product(U, x).expand(cap)
    cap = support_cap(cap)
    products = [(gauge_product(U, key), amp) for key, amp in as_superposition(x).sorted_items()]
    needed = sum(p.branch_count() for p, _ in products)
    if needed > cap:
        raise SupportCapExceeded(needed, cap)
    terms = []
    for p, amp in products:
        terms.extend((k, amp * a) for k, a in p.expand(cap).items())
    return Superposition(terms)


def overlap_after_gauge(U: GaugeTransform, x: StringRational) -> complex:
    """``<x| U x>``: product of the diagonal matrix entries picked out by ``x``."""
    s = U.sign_matrix()
    amp = s[0, 0] if x.sign == PLUS else s[1, 1]
    for j in x.sites():
        b = x.bit(j)
        amp *= U.matrix(j)[b, b]
    return complex(amp)


def pull_back(U: GaugeTransform, state, cap: int | None = None) -> Superposition:
    """``U^dagger state`` expanded; the frame-``U`` state seen in the original basis."""
    Uinv = inverse(U)
    if isinstance(state, ProductState):
        return state.apply(Uinv).expand(cap)
    return apply_gauge(Uinv, state, cap)


def conjugated_rel(U: GaugeTransform, rel) -> Callable:
    """``R_{A,U} = U R_A U^dagger``: probability that two frame-``U`` states stand in ``rel``."""

    def prob(psi, phi, cap: int | None = None) -> float:
        return arithmetic.prob_rel(pull_back(U, psi, cap), pull_back(U, phi, cap), rel)

    return prob


def _push(U, result: Superposition, lazy: bool):
    if lazy and len(result) == 1:
        [(key, amp)] = result.items()
        return ProductState.from_basis(key, amp).apply(U)
    return apply_gauge(U, result)


def conjugated_op(U: GaugeTransform, op) -> Callable:
    """``op_{A,U} = (U x U) op_A (U^dagger x U^dagger)`` on the output register.

    Product-state inputs that pull back to single basis states give a
    product-state result; everything else is expanded.
    """
    if isinstance(op, str):
        op = arithmetic.OPERATIONS[op]
    binary = lift(op, arity=2)

    def apply(psi, phi, cap: int | None = None):
        lazy = isinstance(psi, ProductState) and isinstance(phi, ProductState)
        return _push(U, binary(pull_back(U, psi, cap), pull_back(U, phi, cap)), lazy)

    return apply


def conjugated_unary(U: GaugeTransform, op) -> Callable:
    """``U op_A U^dagger`` for a one-argument operation such as ``abs_A``."""
    unary = lift(op, arity=1)

    def apply(psi, cap: int | None = None):
        return _push(U, unary(pull_back(U, psi, cap)), isinstance(psi, ProductState))

    return apply
