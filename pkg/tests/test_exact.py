from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from graphrank.exact import I, INV_SQRT2, OMEGA, ONE, ZERO, ExactAmplitude, ExactVector, kron_all

small = st.integers(-50, 50)
amps = st.builds(ExactAmplitude, small, small, small, small, st.integers(0, 6))


def test_inv_sqrt2_squares_to_half():
    assert INV_SQRT2 * INV_SQRT2 == ExactAmplitude(1, k=1)
    assert float(INV_SQRT2) == pytest.approx(1 / math.sqrt(2), abs=1e-15)


def test_omega_is_eighth_root_of_unity():
    w = OMEGA
    for _ in range(3):
        w = w * OMEGA
    assert w * w == ONE
    assert w == -ONE
    assert complex(OMEGA) == pytest.approx(cmath.exp(1j * math.pi / 4))


@pytest.mark.parametrize("triple", [(1, 0, 0), (1, 0, 1), (-3, 2, 5), (0, 1, 3), (2, 2, 4)])
def test_triple_round_trip(triple):
    x = ExactAmplitude.from_triple(*triple)
    back = ExactAmplitude.from_triple(*x.to_triple())
    assert back == x
    re, im, h = triple
    assert complex(x) == pytest.approx(complex(re, im) * 2 ** (-h / 2))


def test_sum_leaving_triple_form_is_still_exact():
    x = ONE + INV_SQRT2
    assert complex(x) == pytest.approx(1 + 2 ** -0.5)
    with pytest.raises(ValueError):
        x.to_triple()
    assert ExactAmplitude.coerce(tuple(x.to_json())) == x


@given(amps, amps)
def test_arithmetic_matches_complex(x, y):
    assert complex(x + y) == pytest.approx(complex(x) + complex(y), abs=1e-9)
    assert complex(x * y) == pytest.approx(complex(x) * complex(y), abs=1e-6)
    assert complex(x - y) == pytest.approx(complex(x) - complex(y), abs=1e-9)


@given(amps)
def test_conjugate_and_modulus(x):
    assert x.conj().conj() == x
    assert (x * x.conj()).is_real()
    assert float(x.abs2()) == pytest.approx(abs(complex(x)) ** 2, rel=1e-9, abs=1e-12)


@given(amps)
def test_canonical_form_gives_equal_hashes(x):
    y = (x * INV_SQRT2) * (ONE + ONE) * INV_SQRT2
    assert y == x
    assert hash(y) == hash(x)


def test_vector_kron_and_vdot():
    plus = ExactVector([1, 1]) * INV_SQRT2
    v = kron_all([plus, plus, plus])
    assert v.norm2() == ONE
    assert np.allclose(v.to_complex(), np.full(8, 8 ** -0.5))
    r = ExactVector([1, 0], None, [0, 1]) * INV_SQRT2
    assert r.vdot(r.conj()) == ZERO


def test_vector_widening_survives_large_values():
    v = ExactVector([1 << 29, 3])
    w = v
    for _ in range(4):
        w = w + w
    assert w[0] == ExactAmplitude(1 << 33)
    assert w.sum() == ExactAmplitude((1 << 33) + 48)


def test_times_i_four_times_is_identity():
    v = ExactVector([1, -2], [0, 1], [3, 0], [0, 0], k=2)
    w = v
    for _ in range(4):
        w = w.times_i()
    assert w == v
    assert v.times_i()[0] == v[0] * I
