import cmath
import json
import math

from hypothesis import given, strategies as st
import numpy as np
import pytest

from qframe.arithmetic import add_A, eq_A, le_A, sub_A, abs_A
from qframe.gauge import (CAP_ENV, HADAMARD, IDENTITY, GaugeTransform, NotSU2, ProductState,
                          SupportCapExceeded, apply_gauge, check_su2, compose, conjugated_op,
                          conjugated_rel, conjugated_unary, gauge_product, inverse, max_deviation,
                          overlap_after_gauge, pull_back, random_su2, rotation)
from qframe.states import MINUS, PLUS, StringRational, ZERO
from qframe.superpose import Superposition, lift

from conftest import states

S = StringRational.parse
R = 1 / math.sqrt(2)


def dense_oracle(U: GaugeTransform, x: StringRational) -> dict:
    """Amplitudes of U x by an explicit Kronecker product of matrix columns."""
    cols = [U.sign_matrix()[:, 0 if x.sign == PLUS else 1]]
    cols += [U.matrix(j)[:, x.bit(j)] for j in range(x.u, x.l - 1, -1)]
    vec = np.ones(1, dtype=complex)
    for c in cols:
        vec = np.kron(vec, c)
    n = x.width
    out = {}
    for idx, amp in enumerate(vec):
        sign = PLUS if idx >> n == 0 else MINUS
        out[StringRational(sign, x.l, x.u, idx & ((1 << n) - 1))] = amp
    return out


def random_gauge(rng, lo=-6, hi=6, local=True):
    if local:
        return GaugeTransform.random_local(rng, range(lo, hi + 1), sign="random")
    return GaugeTransform.random_global(rng)


def test_su2_checks():
    with pytest.raises(NotSU2):
        check_su2(np.array([[1, 1], [1, -1]]) / math.sqrt(2))  # det -1
    with pytest.raises(NotSU2):
        check_su2(2 * IDENTITY)
    assert abs(np.linalg.det(HADAMARD) - 1) < 1e-15
    rng = np.random.default_rng(1)
    for _ in range(20):
        check_su2(random_su2(rng))
    check_su2(rotation(0.3, "x"))


def test_identity_gauge_is_trivial():
    x = S("1001-0111")
    psi = apply_gauge(GaugeTransform.identity(), x)
    assert dict(psi) == {x: 1}
    assert overlap_after_gauge(GaugeTransform.identity(), x) == 1


def test_hadamard_on_site_zero_with_identity_sign():
    U = GaugeTransform.local({0: HADAMARD}, sign=IDENTITY)
    psi = apply_gauge(U, S("1+"))
    zero_form = StringRational(PLUS, 0, 0, 0)
    expected = {zero_form: R, S("1+"): -R}
    # i*H differs from H by the global phase i
    phase = psi.amplitude(zero_form) / R
    assert abs(abs(phase) - 1) < 1e-15
    assert all(abs(psi.amplitude(k) - phase * a) < 1e-15 for k, a in expected.items())
    assert len(psi) == 2


def test_outputs_keep_the_interval():
    psi = apply_gauge(GaugeTransform.global_(HADAMARD), S("10+1"))
    assert {(k.l, k.u) for k in psi} == {(-1, 1)}
    assert len(psi) == 16


def test_product_formula_two_sites(rng):
    for _ in range(25):
        U = random_gauge(rng, -1, 1)
        x = StringRational(int(rng.choice([PLUS, MINUS])), -1, 0, int(rng.integers(0, 4)))
        psi = apply_gauge(U, x)
        oracle = dense_oracle(U, x)
        assert max(abs(psi.amplitude(k) - a) for k, a in oracle.items()) < 1e-14


@given(states(-5, 5), st.integers(0, 10**6))
def test_unitarity_and_lazy_functoriality(x, seed):
    rng = np.random.default_rng(seed)
    U1, U2 = random_gauge(rng, -5, 5), random_gauge(rng, -5, 5)
    once = apply_gauge(U1, x)
    assert once.norm() == pytest.approx(1, abs=1e-12)
    direct = apply_gauge(compose(U2, U1), x)
    assert gauge_product(U2, gauge_product(U1, x)).expand().distance(direct) < 1e-12


@given(states(-2, 2), st.integers(0, 10**6))
def test_functoriality_through_expanded_superpositions(x, seed):
    rng = np.random.default_rng(seed)
    U1, U2 = random_gauge(rng, -2, 2), random_gauge(rng, -2, 2)
    twice = apply_gauge(U2, apply_gauge(U1, x))
    assert twice.distance(apply_gauge(compose(U2, U1), x)) < 1e-12
    assert twice.norm() == pytest.approx(1, abs=1e-12)


def test_compose_and_inverse(rng):
    for _ in range(20):
        U = random_gauge(rng)
        U1, U2 = random_gauge(rng), random_gauge(rng)
        assert max_deviation(compose(GaugeTransform.identity(), U), U) < 1e-15
        assert compose(inverse(U), U).is_identity(1e-14)
        # the second-stage gauge that carries U1 to U2
        Upp = compose(U2, inverse(U1))
        assert max_deviation(compose(Upp, U1), U2) < 1e-14


def test_sign_defaults_to_site_zero():
    U = GaugeTransform.local({0: HADAMARD})
    assert np.array_equal(U.sign_matrix(), U.matrix(0))
    V = GaugeTransform.local({0: HADAMARD}, sign=IDENTITY)
    assert np.array_equal(V.sign_matrix(), IDENTITY)
    assert compose(V, V).sign is not None and compose(U, U).sign is None


def test_overlap_examples():
    H = GaugeTransform.global_(HADAMARD, sign=IDENTITY)
    for n in range(1, 12):
        x = StringRational(PLUS, -(n - 1), 0, (1 << n) - 1)
        assert abs(overlap_after_gauge(H, x)) == pytest.approx(R ** n, abs=1e-15)
        assert cmath.isclose(overlap_after_gauge(H, x), apply_gauge(H, x).amplitude(x), abs_tol=1e-15)


def test_overlap_non_increasing_for_generic_global(rng):
    U = GaugeTransform.random_global(rng)
    assert max(abs(U.default[0, 0]), abs(U.default[1, 1])) < 1
    prev = 1.0
    for m in range(30):
        o = abs(overlap_after_gauge(U, StringRational(PLUS, -m, 0, (1 << (m + 1)) - 1)))
        assert o <= prev + 1e-15
        prev = o


def test_support_cap(monkeypatch):
    U = GaugeTransform.global_(HADAMARD)
    x = StringRational(PLUS, -9, 0, 1)
    with pytest.raises(SupportCapExceeded) as err:
        apply_gauge(U, x, cap=100)
    assert err.value.cap == 100 and "100" in str(err.value)
    monkeypatch.setenv(CAP_ENV, "64")
    with pytest.raises(SupportCapExceeded):
        apply_gauge(U, x)
    monkeypatch.setenv(CAP_ENV, "4096")
    assert len(apply_gauge(U, x)) == 2 ** 11


def test_product_state_is_lazy():
    U = GaugeTransform.global_(HADAMARD, sign=IDENTITY)
    x = StringRational(PLUS, -40, 0, (1 << 41) - 1)
    p = gauge_product(U, x)
    assert p.branch_count() == 2 ** 41
    assert p.norm_squared() == pytest.approx(1, abs=1e-12)
    assert abs(p.amplitude(x)) == pytest.approx(R ** 41, rel=1e-12)
    with pytest.raises(SupportCapExceeded):
        p.expand()


def test_conjugated_relations_match_originals(rng):
    for _ in range(30):
        U = random_gauge(rng, -3, 3)
        x, y = (StringRational(int(rng.choice([PLUS, MINUS])), -2, 2, int(rng.integers(0, 32))).canonical()
                for _ in range(2))
        for rel, f in (("eq", eq_A), ("le", le_A)):
            p = conjugated_rel(U, rel)(gauge_product(U, x), gauge_product(U, y))
            assert p == pytest.approx(float(f(x, y)), abs=1e-12)


def test_identity_conjugation_is_plain():
    x, y = S("1+1"), S("10-01")
    assert conjugated_rel(GaugeTransform.identity(), "le")(x, y) == float(le_A(x, y))
    out = conjugated_op(GaugeTransform.identity(), "add")(Superposition.basis(x), Superposition.basis(y))
    assert dict(out) == {add_A(x, y): 1}


def test_conjugated_addition_identity(rng):
    for _ in range(20):
        U = random_gauge(rng, -3, 3)
        x = StringRational(PLUS, -1, 1, int(rng.integers(0, 8))).canonical()
        y = StringRational(MINUS, -1, 1, int(rng.integers(0, 8))).canonical()
        lhs = conjugated_op(U, "add")(apply_gauge(U, x), apply_gauge(U, y))
        rhs = apply_gauge(U, lift(add_A)(x, y))
        assert lhs.distance(rhs) < 1e-12
        lazy = conjugated_op(U, add_A)(gauge_product(U, x), gauge_product(U, y))
        assert isinstance(lazy, ProductState)
        assert lazy.expand().distance(rhs) < 1e-12


def test_conjugated_unary_and_pull_back(rng):
    U = random_gauge(rng, -3, 3)
    x = S("11-1")
    assert pull_back(U, gauge_product(U, x)).distance(Superposition.basis(x)) < 1e-12
    out = conjugated_unary(U, abs_A)(gauge_product(U, x))
    assert out.expand().distance(apply_gauge(U, abs_A(x))) < 1e-12
    d = conjugated_op(U, sub_A)(gauge_product(U, x), gauge_product(U, x))
    assert pull_back(U, d).distance(Superposition.basis(ZERO)) < 1e-12


def test_json_round_trip_and_fingerprint(tmp_path, rng):
    U = random_gauge(rng, -2, 2)
    back = GaugeTransform.from_json(json.loads(json.dumps(U.to_json())))
    assert max_deviation(U, back) == 0
    assert back.fingerprint() == U.fingerprint()
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"global": False, "default": "identity",
                                "sites": [{"site": -2, "matrix": [[[0, 0], [-1, 0]], [[1, 0], [0, 0]]]}]}))
    V = GaugeTransform.load(path)
    assert not V.is_global and np.array_equal(V.matrix(-2), [[0, -1], [1, 0]])
    g = GaugeTransform.from_json({"global": True, "default": "hadamard"})
    assert g.is_global and np.allclose(g.matrix(17), HADAMARD)
    assert GaugeTransform.global_(HADAMARD).fingerprint() != GaugeTransform.identity().fingerprint()
    with pytest.raises(ValueError):
        GaugeTransform.from_json({"global": True, "sites": [
            {"site": 0, "matrix": "identity"}, {"site": 1, "matrix": "hadamard"}]})
