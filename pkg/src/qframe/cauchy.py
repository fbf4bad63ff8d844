"""Cauchy conditions on sequences of string states and superpositions.

The limits in the Cauchy conditions cannot be evaluated, so everything
here works on a finite probe horizon and reports its full evidence:

* :func:`check_cauchy_basis` finds, for each accuracy ``ell``, the smallest
  ``h`` such that every probed pair ``j, k > h`` differs by at most
  ``2**-ell``. It refutes only when the sequence carries a checkable
  certificate (a period, or a closed-form divergence hook); otherwise an
  unfinished search is reported as inconclusive.
* :func:`prob_cauchy` evaluates the probabilistic condition as a
  min over ``ell`` / max over ``h`` / min over pairs table.
* :func:`check_cauchy_gauged` judges a gauged sequence with conjugated
  relations and, independently, the original sequence with plain
  relations, and insists the two agree.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
import itertools
import json
import math
import os
import threading

from .arithmetic import abs_A, accuracy_state, le_A, prob_rel, sub_A
from .gauge import (GaugeTransform, ProductState, apply_gauge, conjugated_op,
                    conjugated_unary, gauge_product, pull_back)
from .states import PLUS, RawStringState, StringRational, is_natural, nat_state
from .superpose import ContractViolation, Superposition

CAUCHY, NOT_CAUCHY, INCONCLUSIVE = "cauchy", "not-cauchy", "inconclusive"
PROB_TOL = 1e-9


class InternalConsistencyError(AssertionError):
    """The conjugated-relation and pull-back judgements of a gauged sequence disagree."""


class StateSequence:
    """Memoized 1-based sequence of basis states, superpositions or product states.

    ``period``/``offset`` declare that ``term(n + period) == term(n)`` for
    ``n >= offset``; ``divergence(ell, h)`` may return a pair ``(j, k)``
    with ``j, k > h`` whose terms differ by more than ``2**-ell`` for every
    ``h``. Either one lets a failed search be certified as a refutation.
    ``frame`` records the gauge path under which the terms are expressed.
    """

    def __init__(self, generator: Callable[[int], object], *, length: int | None = None,
                 name: str = "", period: int | None = None, offset: int = 1,
                 divergence: Callable[[int, int], tuple[int, int]] | None = None,
                 frame: tuple[GaugeTransform, ...] = ()):
        self._generator = generator
        self._memo: dict[int, object] = {}
        self._lock = threading.Lock()
        self.length = length
        self.name = name
        self.period = period
        self.offset = offset
        self.divergence = divergence
        self.frame = tuple(frame)

    def __repr__(self) -> str:
        return f"StateSequence({self.name or 'anonymous'}, length={self.length})"

    def term(self, n: int):
        if n < 1 or (self.length is not None and n > self.length):
            raise IndexError(f"term {n} outside sequence of length {self.length}")
        try:
            return self._memo[n]
        except KeyError:
            pass
        t = self._generator(n)
        if isinstance(t, RawStringState):
            t = t.canonical()
        elif isinstance(t, Superposition):
            t.require_normalized(f"term {n}")
        with self._lock:
            return self._memo.setdefault(n, t)

    __getitem__ = term

    def terms(self, stop: int) -> list:
        return [self.term(n) for n in range(1, stop + 1)]

    def horizon(self, wanted: int) -> int:
        return wanted if self.length is None else min(wanted, self.length)

    def derive(self, generator, *, name=None, shift=0, frame=None, length="same") -> "StateSequence":
        if length == "same":
            length = None if self.length is None else self.length - shift
        div = self.divergence
        if div is not None and shift:
            div = (lambda ell, h, d=self.divergence: tuple(i - shift for i in d(ell, h + shift)))
        return StateSequence(generator, length=length, name=name or self.name,
                             period=self.period, offset=max(1, self.offset - shift),
                             divergence=div, frame=self.frame if frame is None else frame)

    def shift(self, d: int) -> "StateSequence":
        """The sequence ``n -> term(n + d)``."""
        return self.derive(lambda n: self.term(n + d), name=f"{self.name}>>{d}", shift=d)

    def truncate(self, length: int) -> "StateSequence":
        if self.length is not None:
            length = min(length, self.length)
        return self.derive(self.term, name=f"{self.name}[:{length}]", length=length)

    def gauged(self, U: GaugeTransform, *, lazy: bool = True) -> "StateSequence":
        """Termwise ``U term``; basis terms stay factored when ``lazy``."""
        def gen(n):
            t = self.term(n)
            if lazy and isinstance(t, (StringRational, ProductState)):
                return gauge_product(U, t)
            return apply_gauge(U, t)
        return self.derive(gen, name=f"U.{self.name}", frame=self.frame + (U,))

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, x) -> "StateSequence":
        return cls(lambda n: x, name=f"constant({x})", period=1)

    @classmethod
    def naturals(cls) -> "StateSequence":
        return cls(nat_state, name="naturals", divergence=lambda ell, h: (h + 1, h + 2))

    @classmethod
    def explicit(cls, terms: Sequence, *, cycle: bool = False, name: str = "explicit") -> "StateSequence":
        terms = list(terms)
        if not terms:
            raise ValueError("explicit sequence needs at least one term")
        if cycle:
            return cls(lambda n: terms[(n - 1) % len(terms)], name=name, period=len(terms))
        return cls(lambda n: terms[n - 1], name=name, length=len(terms))

    @classmethod
    def fseq(cls, pattern: str | None = "1", *, top: int = 0, bits: str | None = None) -> "StateSequence":
        """Truncations of a 0-1 function ``f`` on the sites ``<= top``.

        Term ``m`` holds ``f`` on ``[-m, top]``. ``f(top - i)`` is
        ``pattern[i % len(pattern)]``, or ``bits[i]`` (zero past the end)
        when an explicit list is given. ``f(top)`` must be 1.
        """
        if top < 0:
            raise ValueError("top site must be >= 0")
        if bits is not None:
            source = bits
            f = lambda i: source[i] if i < len(source) else "0"
            label = f"fseq(bits={bits},top={top})"
        else:
            source = pattern
            f = lambda i: source[i % len(source)]
            label = f"fseq({pattern},top={top})"
        if not source or set(source) - {"0", "1"}:
            raise ValueError(f"bit pattern {source!r} must be a nonempty 0/1 string")
        if source[0] != "1":
            raise ValueError("f(top) must be 1")

        def gen(m):
            text = "".join(f(i) for i in range(top + m + 1))
            return StringRational(PLUS, -m, top, int(text, 2)).canonical()

        return cls(gen, name=label)

    @classmethod
    def from_spec(cls, spec: dict, *, base_dir: str | None = None) -> "StateSequence":
        """Build from the JSON sequence description used by the CLI."""
        kind = spec.get("kind")
        if kind == "constant":
            seq = cls.constant(_term_from_json(spec["state"]))
        elif kind == "naturals":
            seq = cls.naturals()
        elif kind == "fseq":
            seq = cls.fseq(spec.get("pattern", "1"), top=int(spec.get("top", 0)), bits=spec.get("bits"))
        elif kind == "explicit":
            seq = cls.explicit([_term_from_json(t) for t in spec["terms"]],
                               cycle=bool(spec.get("cycle", False)))
        elif kind == "file":
            path = spec["path"]
            if base_dir and not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            with open(path) as fh:
                terms = [_term_from_json(json.loads(line) if line.lstrip().startswith(("{", "["))
                                         else line.strip())
                         for line in fh if line.strip() and not line.startswith("#")]
            seq = cls.explicit(terms, cycle=bool(spec.get("cycle", False)), name=path)
        else:
            raise ValueError(f"unknown sequence kind {kind!r}")
        if "length" in spec:
            seq = seq.truncate(int(spec["length"]))
        return seq


def _term_from_json(obj):
    if isinstance(obj, str):
        return StringRational.parse(obj)
    if isinstance(obj, dict) and "terms" in obj:
        obj = obj["terms"]
    if isinstance(obj, list):
        return Superposition((StringRational.parse(t["state"]), complex(t["re"], t.get("im", 0.0)))
                             for t in obj)
    raise ValueError(f"cannot read sequence term {obj!r}")


def as_basis(t) -> StringRational:
    """The basis state of a term that is one (singleton superpositions included)."""
    if isinstance(t, (StringRational, RawStringState)):
        return t.canonical()
    if isinstance(t, Superposition) and len(t) == 1:
        [(key, amp)] = t.items()
        if abs(abs(amp) - 1) <= PROB_TOL:
            return key.canonical()
    if isinstance(t, ProductState):
        single = t.single()
        if single is not None and abs(abs(single[1]) - 1) <= PROB_TOL:
            return single[0].canonical()
    raise ContractViolation(f"term {t!r} is not a basis state")


def _as_superposition(t, cap=None) -> Superposition:
    if isinstance(t, ProductState):
        return t.expand(cap)
    if isinstance(t, Superposition):
        return t
    return Superposition.basis(t)


@dataclass
class CauchyReport:
    """Evidence for a (finite-horizon) Cauchy judgement.

    ``witnesses[ell]`` is the smallest ``h`` found, or ``None``.
    ``probabilities`` maps ``(ell, h)`` to the min over probed pairs of
    ``P_{j,k,ell}``; ``estimate`` is the min over ``ell`` of the max over
    ``h``. ``counterexample`` is a pair ``(j, k)`` when refuted.
    """

    verdict: str
    witnesses: dict[int, int | None]
    horizon: int
    counterexample: tuple[int, int] | None = None
    refuted_at: int | None = None
    certificate: str = ""
    probabilities: dict[tuple[int, int], float] = field(default_factory=dict)
    estimate: float | None = None

    @property
    def holds(self) -> bool:
        return self.verdict == CAUCHY

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "horizon": self.horizon,
               "witnesses": {str(k): v for k, v in sorted(self.witnesses.items())}}
        if self.counterexample is not None:
            out["counterexample"] = list(self.counterexample)
            out["refuted_at"] = self.refuted_at
            out["certificate"] = self.certificate
        if self.estimate is not None:
            out["estimate"] = self.estimate
            out["probabilities"] = [{"ell": l, "h": h, "p": p}
                                    for (l, h), p in sorted(self.probabilities.items())]
        return out


# -- exact basis-state judgement --------------------------------------

def _gap_exceeds(x: StringRational, y: StringRational, ell: int) -> bool:
    return not le_A(abs_A(sub_A(x, y)), accuracy_state(ell))


def _suffix_extremes(states: list[StringRational]):
    """``lo[h], hi[h]`` = arithmetic min/max of ``states[h:]``."""
    n = len(states)
    lo, hi = [None] * n, [None] * n
    lo[-1] = hi[-1] = states[-1]
    for i in range(n - 2, -1, -1):
        s = states[i]
        lo[i] = s if le_A(s, lo[i + 1]) else lo[i + 1]
        hi[i] = hi[i + 1] if le_A(s, hi[i + 1]) else s
    return lo, hi


def _minimal_witnesses(fits: Callable[[int, int], bool], ells, h_limit: int) -> dict[int, int | None]:
    # fits(ell, h) is monotone in h: once true it stays true for larger h.
    out = {}
    for ell in ells:
        h = next((h for h in range(h_limit + 1) if fits(ell, h)), None)
        out[ell] = h
    return out


def _certify(seq: StateSequence, ell: int, gap: Callable[[int, int], bool],
             horizon: int) -> tuple[tuple[int, int], str] | None:
    """A checked refutation at accuracy ``ell`` or ``None``."""
    if seq.divergence is not None:
        pair0 = seq.divergence(ell, 0)
        far = seq.divergence(ell, horizon)
        if (min(pair0) > 0 and min(far) > horizon and gap(*pair0) and gap(*far)):
            return pair0, f"closed-form divergence: pairs beyond every h (checked at h=0 and h={horizon})"
    if seq.period is not None:
        start = seq.offset
        idx = range(start, start + seq.period)
        for j, k in itertools.combinations_with_replacement(idx, 2):
            if gap(j, k):
                return (j, k), f"period {seq.period}: pair recurs at (j+t*{seq.period}, k+t*{seq.period})"
    return None


def _verdict(witnesses, seq, gap, horizon) -> tuple[str, tuple | None, int | None, str]:
    missing = [ell for ell, h in sorted(witnesses.items()) if h is None]
    if not missing:
        hs = [witnesses[ell] for ell in sorted(witnesses)]
        if all(a <= b for a, b in zip(hs, hs[1:])):
            return CAUCHY, None, None, ""
        return INCONCLUSIVE, None, None, "witnesses not monotone in ell"
    for ell in missing:
        cert = _certify(seq, ell, lambda j, k: gap(j, k, ell), horizon)
        if cert is not None:
            return NOT_CAUCHY, cert[0], ell, cert[1]
    return INCONCLUSIVE, None, missing[0], "no witness within budget and no divergence certificate"


def _default_horizon(seq, h_budget, horizon):
    horizon = 2 * h_budget if horizon is None else horizon
    horizon = seq.horizon(horizon)
    if horizon < 2:
        raise ValueError("probe horizon must cover at least two terms")
    return horizon


def check_cauchy_basis(seq: StateSequence, l_max: int, h_budget: int,
                       horizon: int | None = None) -> CauchyReport:
    """Exact Cauchy test for a basis-state sequence.

    Searches ``h <= h_budget`` for each ``1 <= ell <= l_max`` such that
    every pair ``j, k`` in ``(h, horizon]`` satisfies
    ``|x_j -_A x_k|_A <=_A |+,-ell>``. ``horizon`` defaults to
    ``2 * h_budget`` so a witness always faces a tail at least
    ``h_budget`` terms long.
    """
    N = _default_horizon(seq, h_budget, horizon)
    h_limit = min(h_budget, N - 2)
    states = [as_basis(t) for t in seq.terms(N)]
    lo, hi = _suffix_extremes(states)
    # spread over (h, N] is hi[h] - lo[h] (0-based suffix index h).
    spreads = [sub_A(hi[h], lo[h]) for h in range(N)]
    acc = {ell: accuracy_state(ell) for ell in range(1, l_max + 1)}
    witnesses = _minimal_witnesses(lambda ell, h: le_A(spreads[h], acc[ell]),
                                   range(1, l_max + 1), h_limit)

    def gap(j, k, ell):
        return _gap_exceeds(as_basis(seq.term(j)), as_basis(seq.term(k)), ell)

    verdict, pair, ell, why = _verdict(witnesses, seq, gap, N)
    return CauchyReport(verdict, witnesses, N, pair, ell, why)


# -- probabilistic judgement -------------------------------------------

def _value_table(psi: Superposition, scale: int) -> tuple[list[int], list[float]]:
    """Values as integers in units of ``2**-scale`` with their probabilities, sorted."""
    rows = sorted((k.sign * (k.bits << (k.l + scale)), abs(a) ** 2) for k, a in psi.items())
    return [v for v, _ in rows], [p for _, p in rows]


def prob_pair(psi_j, psi_m, ell: int, cap: int | None = None) -> float:
    """``P_{j,m,ell}``: probability that draws differ by at most ``2**-ell``.

    Exact dyadic comparisons; the pair sum is organized as a sorted sweep
    with cumulative masses rather than a full double loop.
    """
    psi_j, psi_m = _as_superposition(psi_j, cap), _as_superposition(psi_m, cap)
    psi_j.require_normalized("first state")
    psi_m.require_normalized("second state")
    scale = max([ell] + [-k.l for k in psi_j] + [-k.l for k in psi_m])
    eps = 1 << (scale - ell)
    xv, xp = _value_table(psi_j, scale)
    yv, yp = _value_table(psi_m, scale)
    cum = [0.0, *itertools.accumulate(yp)]
    total = [p * (cum[bisect_right(yv, v + eps)] - cum[bisect_left(yv, v - eps)])
             for v, p in zip(xv, xp)]
    return min(1.0, math.fsum(total))


def prob_cauchy(seq: StateSequence, l_max: int, window: int, h_max: int | None = None,
                cap: int | None = None) -> tuple[float, CauchyReport]:
    """Finite surrogate of ``liminf_ell limsup_h liminf_{j,k>h} P_{j,k,ell}``.

    For each ``ell``: for each ``h`` in ``0..h_max`` take the min of ``P``
    over ``j <= k`` in ``(h, h + window]``; then the max over ``h``; the
    estimate is the min of those over ``ell``.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if h_max is None:
        h_max = window if seq.length is None else seq.length - window
    if h_max < 0 or (seq.length is not None and h_max + window > seq.length):
        raise ValueError("window does not fit inside the sequence")
    terms = {n: _as_superposition(seq.term(n), cap) for n in range(1, h_max + window + 1)}
    cache: dict[tuple[int, int, int], float] = {}

    def P(j, k, ell):
        key = (j, k, ell)
        if key not in cache:
            cache[key] = prob_pair(terms[j], terms[k], ell)
        return cache[key]

    table: dict[tuple[int, int], float] = {}
    best: dict[int, float] = {}
    witnesses: dict[int, int | None] = {}
    for ell in range(1, l_max + 1):
        for h in range(h_max + 1):
            idx = range(h + 1, h + window + 1)
            table[ell, h] = min(P(j, k, ell) for j, k in itertools.combinations_with_replacement(idx, 2))
        best[ell] = max(table[ell, h] for h in range(h_max + 1))
        witnesses[ell] = next((h for h in range(h_max + 1) if table[ell, h] >= 1 - PROB_TOL), None)
    estimate = min(best.values())

    horizon = h_max + window
    if estimate >= 1 - PROB_TOL:
        verdict, pair, at, why = CAUCHY, None, None, ""
    else:
        verdict, pair, at, why = INCONCLUSIVE, None, None, "probabilistic estimate below 1"
        try:
            basis = all(as_basis(t) is not None for t in terms.values())
        except ContractViolation:
            basis = False
        if basis:
            def gap(j, k, ell):
                return _gap_exceeds(as_basis(seq.term(j)), as_basis(seq.term(k)), ell)
            for ell in sorted(l for l, w in witnesses.items() if w is None):
                cert = _certify(seq, ell, lambda j, k: gap(j, k, ell), horizon)
                if cert is not None:
                    verdict, pair, at, why = NOT_CAUCHY, cert[0], ell, cert[1]
                    break
    report = CauchyReport(verdict, witnesses, horizon, pair, at, why, table, estimate)
    return estimate, report


# -- equivalence --------------------------------------------------------

def equivalent(seq_a: StateSequence, seq_b: StateSequence, l_max: int, h_budget: int,
               horizon: int | None = None) -> CauchyReport:
    """Cauchy condition on cross differences ``|a_j -_A b_k|_A`` for basis sequences.

    Verdict ``cauchy`` means the sequences are equivalent.
    """
    N = min(_default_horizon(seq_a, h_budget, horizon), _default_horizon(seq_b, h_budget, horizon))
    h_limit = min(h_budget, N - 1)
    a = [as_basis(t) for t in seq_a.terms(N)]
    b = [as_basis(t) for t in seq_b.terms(N)]
    alo, ahi = _suffix_extremes(a)
    blo, bhi = _suffix_extremes(b)
    cross = []
    for h in range(N):
        d1, d2 = sub_A(ahi[h], blo[h]), sub_A(bhi[h], alo[h])
        cross.append(d2 if le_A(d1, d2) else d1)
    acc = {ell: accuracy_state(ell) for ell in range(1, l_max + 1)}
    witnesses = _minimal_witnesses(lambda ell, h: le_A(abs_A(cross[h]), acc[ell]),
                                   range(1, l_max + 1), h_limit)
    missing = [ell for ell, h in sorted(witnesses.items()) if h is None]
    if not missing:
        return CauchyReport(CAUCHY, witnesses, N)
    for ell in missing:
        if seq_a.period is not None and seq_b.period is not None:
            ia = range(seq_a.offset, seq_a.offset + seq_a.period)
            ib = range(seq_b.offset, seq_b.offset + seq_b.period)
            for j, k in itertools.product(ia, ib):
                if _gap_exceeds(as_basis(seq_a.term(j)), as_basis(seq_b.term(k)), ell):
                    return CauchyReport(NOT_CAUCHY, witnesses, N, (j, k), ell,
                                        "both sequences periodic: cross pair recurs")
        for seq in (seq_a, seq_b):
            own = check_cauchy_basis(seq, l_max, h_budget, horizon)
            if own.verdict == NOT_CAUCHY:
                return CauchyReport(NOT_CAUCHY, witnesses, N, own.counterexample, own.refuted_at,
                                    f"{seq.name} is not Cauchy, so no sequence is equivalent to it")
    return CauchyReport(INCONCLUSIVE, witnesses, N, None, missing[0],
                        "no witness within budget and no divergence certificate")


# -- Cauchy operators ---------------------------------------------------

class CauchyOperator:
    """Map from natural-number states ``|n>`` (``n >= 1``) to basis states."""

    def __init__(self, rule: Callable[[int], object], name: str = "O"):
        self._rule = rule
        self.name = name

    def __call__(self, n_state):
        if isinstance(n_state, int):
            n = n_state
        else:
            x = as_basis(n_state)
            if not is_natural(x):
                raise ContractViolation(f"{x} is not a natural-number state")
            n = x.bits
        if n < 1:
            raise ContractViolation("Cauchy operators are defined on |n> with n >= 1")
        return self._rule(n)

    def conjugate(self, U: GaugeTransform) -> "ConjugatedOperator":
        return ConjugatedOperator(self, U)


class ConjugatedOperator:
    """``O_U = U O U^dagger`` acting on frame-``U`` states."""

    def __init__(self, inner: CauchyOperator, U: GaugeTransform):
        self.inner = inner
        self.U = U

    def __call__(self, state):
        back = pull_back(self.U, state)
        x = as_basis(back)
        phase = next(iter(back.values()))
        return ProductState.from_basis(as_basis(self.inner(x)), phase).apply(self.U)

    def induced_sequence(self) -> StateSequence:
        """``n -> O_U (U |n>)``, a sequence expressed in frame ``U``."""
        return StateSequence(lambda n: self(gauge_product(self.U, nat_state(n))),
                             name=f"{self.inner.name}_U", frame=(self.U,))


def operator_from_sequence(seq: StateSequence) -> CauchyOperator:
    return CauchyOperator(seq.term, name=f"O[{seq.name}]")


def sequence_from_operator(op: CauchyOperator) -> StateSequence:
    return StateSequence(lambda n: op(nat_state(n)), name=f"seq[{op.name}]")


def is_cauchy_operator(op: CauchyOperator, l_max: int, h_budget: int) -> CauchyReport:
    return check_cauchy_basis(sequence_from_operator(op), l_max, h_budget)


# -- gauged judgement ----------------------------------------------------

def check_u_cauchy(gseq: StateSequence, U: GaugeTransform, l_max: int, h_budget: int,
                   horizon: int | None = None, source: StateSequence | None = None) -> CauchyReport:
    """Judge a frame-``U`` sequence with the conjugated relations and operations.

    Each pair is tested as ``|G_j -_{A,U} G_k|_{A,U} <=_{A,U} U|+,-ell>``.
    ``source`` supplies period/divergence metadata for certification.
    """
    N = _default_horizon(gseq, h_budget, horizon)
    h_limit = min(h_budget, N - 2)
    sub_U = conjugated_op(U, sub_A)
    abs_U = conjugated_unary(U, abs_A)
    # <=_{A,U} pulls both sides back with U^dagger; the accuracy side is fixed per ell.
    acc_back = {ell: pull_back(U, gauge_product(U, accuracy_state(ell))) for ell in range(1, l_max + 1)}
    terms = {n: gseq.term(n) for n in range(1, N + 1)}
    meta = source or gseq

    def term(n):
        return terms[n] if n <= N else gauge_product(U, as_basis(meta.term(n)))

    def close(j, k, ell_range):
        d_back = pull_back(U, abs_U(sub_U(term(j), term(k))))
        return {ell: prob_rel(d_back, acc_back.get(ell) or pull_back(U, gauge_product(U, accuracy_state(ell))),
                              "le") >= 1 - PROB_TOL
                for ell in ell_range}

    # A witness must reach the larger min(j, k) over failing pairs.
    worst = {ell: 0 for ell in acc_back}
    for j in range(1, N + 1):
        for k in range(j + 1, N + 1):
            for ell, ok in close(j, k, acc_back).items():
                if not ok:
                    worst[ell] = max(worst[ell], j)
    witnesses = {ell: (w if w <= h_limit else None) for ell, w in worst.items()}

    def gap(j, k, ell):
        return not close(j, k, [ell])[ell]

    verdict, pair, ell, why = _verdict(witnesses, meta, gap, N)
    return CauchyReport(verdict, witnesses, N, pair, ell, why)


def check_cauchy_gauged(seq: StateSequence, U: GaugeTransform, l_max: int, h_budget: int,
                        horizon: int | None = None) -> CauchyReport:
    """U-Cauchy judgement of ``{U term}``, cross-checked against the original frame.

    Raises :class:`InternalConsistencyError` if the conjugated-relation
    verdict or witness table differs from the plain judgement of ``seq``.
    """
    gauged = check_u_cauchy(seq.gauged(U), U, l_max, h_budget, horizon, source=seq)
    plain = check_cauchy_basis(seq, l_max, h_budget, horizon)
    if (gauged.verdict, gauged.witnesses) != (plain.verdict, plain.witnesses):
        raise InternalConsistencyError(
            f"gauged verdict {gauged.verdict} {gauged.witnesses} != plain {plain.verdict} {plain.witnesses}")
    if gauged.counterexample != plain.counterexample:
        raise InternalConsistencyError(
            f"counterexamples differ: {gauged.counterexample} vs {plain.counterexample}")
    return gauged


def consecutive_overlaps(seq: StateSequence, stop: int) -> list[float]:
    """``|<t_n | t_{n+1}>|`` for ``n < stop``: Hilbert-space (not arithmetic) closeness."""
    out = []
    for n in range(1, stop):
        a, b = _as_superposition(seq.term(n)), _as_superposition(seq.term(n + 1))
        out.append(abs(sum(a[k].conjugate() * b[k] for k in a if k in b)))
    return out
