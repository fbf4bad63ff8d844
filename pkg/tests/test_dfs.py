import itertools
import math

import numpy as np
import pytest

from qframe import dfs
from qframe.dfs import (SINGLET, TRIPLET, DecodeError, LogicalEncoding, PreconditionError, apply_physical,
                        check_invariance, decode, encode, logical_probs, logical_to_state, random_gauge)
from qframe.gauge import GaugeTransform, random_su2
from qframe.states import StringRational
from qframe.superpose import Superposition

R = 1 / math.sqrt(2)


def test_encode_examples():
    assert dict(encode("0")) == {"00": 1}
    one = encode("1")
    assert one.amplitude("01") == pytest.approx(R) and one.amplitude("10") == pytest.approx(-R)
    assert len(one) == 2
    two = encode("10")
    assert set(two) == {"0100", "1000"}
    assert two.norm() == pytest.approx(1, abs=1e-15)


def test_logical_probs_examples():
    assert logical_probs(encode("0")) == [(1.0, 0.0)]
    assert logical_probs(encode("1"))[0] == pytest.approx((0.0, 1.0), abs=1e-15)
    mixed = Superposition({"00": R, "01": R * R, "10": -R * R})
    assert logical_probs(mixed)[0] == pytest.approx((0.5, 0.5), abs=1e-15)
    with pytest.raises(ValueError):
        logical_probs(Superposition({"010": 1}))


def test_probabilities_sum_to_one(rng):
    for _ in range(20):
        vec = rng.normal(size=16) + 1j * rng.normal(size=16)
        vec /= np.linalg.norm(vec)
        for p_t, p_s in logical_probs(vec):
            assert p_t + p_s == pytest.approx(1, abs=1e-12)


def test_encoding_representatives():
    t0 = LogicalEncoding(zero=tuple(TRIPLET[2]))
    assert logical_probs(encode("01", t0)) == [pytest.approx((1, 0)), pytest.approx((0, 1))]
    with pytest.raises(ValueError):
        LogicalEncoding(zero=tuple(SINGLET))
    with pytest.raises(ValueError):
        LogicalEncoding(zero=(1, 1, 0, 0))


def test_subspace_invariance(rng):
    for _ in range(200):
        U = random_su2(rng)
        UU = np.kron(U, U)
        for t in TRIPLET:
            out = UU @ t
            leak = abs(np.vdot(SINGLET, out))
            assert leak <= 1e-12
        assert abs(abs(np.vdot(SINGLET, UU @ SINGLET)) - 1) <= 1e-12


def test_identity_has_zero_deviation():
    assert check_invariance(GaugeTransform.identity(), "0110").max_deviation == 0


def test_random_global_gauges_preserve_logic():
    rep = check_invariance("global", "0110", trials=1000, seed=42)
    assert rep.max_deviation <= 1e-12 and rep.seed == 42 and rep.trials == 1000


def test_paired_local_gauges_preserve_logic():
    rep = check_invariance("local-paired", "101101", trials=100, seed=7)
    assert rep.max_deviation <= 1e-12


def test_unpaired_local_gauges_break_logic():
    rep = check_invariance("local-unpaired", "0110", trials=100, seed=3, require_paired=False)
    assert sum(d > 0.1 for d in rep.deviations) >= 95


def test_unpaired_gauge_rejected_when_pairing_required(rng):
    U = random_gauge(rng, 2, "local-unpaired")
    with pytest.raises(PreconditionError):
        check_invariance(U, "01")


def test_fuzz_is_reproducible():
    a = check_invariance("local-unpaired", "01", trials=5, seed=11, require_paired=False)
    b = check_invariance("local-unpaired", "01", trials=5, seed=11, require_paired=False)
    assert a.deviations == b.deviations


def test_decode_round_trip_all_short_words(rng):
    for n in range(1, 7):
        for word in map("".join, itertools.product("01", repeat=n)):
            assert decode(encode(word)) == word
    for _ in range(30):
        word = "".join(rng.choice(["0", "1"], size=int(rng.integers(1, 7))))
        U = random_gauge(rng, len(word), str(rng.choice(["global", "local-paired"])))
        physical = apply_physical(U, dfs.encode_dense(word))
        assert decode(physical) == word


def test_decode_failure_names_pair():
    half = Superposition({"00": R, "01": R * R, "10": -R * R})
    physical = dfs.from_dense(np.kron(dfs.to_dense(half), dfs.encode_dense("1")))
    with pytest.raises(DecodeError) as err:
        decode(physical)
    assert err.value.pairs == [1]


def test_logical_bits_as_string_state():
    assert logical_to_state("1011") == StringRational.parse("1011+")
    assert logical_to_state("1011", point=2) == StringRational.parse("10+11")
    assert logical_to_state("0010", point=1, sign="-") == StringRational.parse("0-01")
    with pytest.raises(ValueError):
        logical_to_state("10", point=3)
