"""Exact arithmetic over the ring Z[i, 1/sqrt(2)].

Every element is stored as ``((a + b*sqrt2) + i*(c + d*sqrt2)) / 2**k`` with
integer ``a, b, c, d`` and ``k >= 0``.  The canonical form has the smallest
``k`` (all four integers not simultaneously even when ``k > 0``), so two
elements are equal iff their canonical tuples are equal.

The external serialization is the triple ``(re, im, h)`` meaning
``(re + i*im) * 2**(-h/2)``.  Products of graph-state amplitudes, Pauli phases
and the usual single-qubit vectors all have such a triple, but sums need not
(``1 + 1/sqrt2`` has none), which is why the internal form carries the extra
``sqrt2`` components.

:class:`ExactVector` is the vectorized counterpart used for dense states: four
integer numpy arrays sharing one power of two.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

SQRT2 = math.sqrt(2.0)

# int64 products stay exact while both factors are below this bound
_SAFE = 1 << 30


def _mul4(x, y):
    a1, b1, c1, d1 = x
    a2, b2, c2, d2 = y
    a = a1 * a2 + 2 * b1 * b2 - c1 * c2 - 2 * d1 * d2
    b = a1 * b2 + b1 * a2 - c1 * d2 - d1 * c2
    c = a1 * c2 + 2 * b1 * d2 + c1 * a2 + 2 * d1 * b2
    d = a1 * d2 + b1 * c2 + c1 * b2 + d1 * a2
    return a, b, c, d


def _ctz(v: int) -> int:
    return (v & -v).bit_length() - 1


class ExactAmplitude:
    """A single element of Z[i, 1/sqrt(2)]."""

    __slots__ = ("a", "b", "c", "d", "k")

    def __init__(self, a: int = 0, b: int = 0, c: int = 0, d: int = 0, k: int = 0):
        a, b, c, d, k = int(a), int(b), int(c), int(d), int(k)
        if k < 0:
            s = 1 << -k
            a, b, c, d, k = a * s, b * s, c * s, d * s, 0
        if a == b == c == d == 0:
            k = 0
        elif k:
            t = min(k, _ctz(a | b | c | d | (1 << k)))
            if t:
                a, b, c, d, k = a >> t, b >> t, c >> t, d >> t, k - t
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "k", k)

    def __setattr__(self, name, value):
        raise AttributeError("ExactAmplitude is immutable")

    # construction ------------------------------------------------------
    @classmethod
    def from_triple(cls, re: int, im: int, halfpow: int) -> ExactAmplitude:
        """Value ``(re + i*im) * 2**(-halfpow/2)``."""
        if halfpow < 0:
            raise ValueError("halfpow must be nonnegative")
        m, odd = divmod(halfpow, 2)
        if odd:
            # (re + i im) / (2**m sqrt2) = (re sqrt2 + i im sqrt2) / 2**(m+1)
            return cls(0, re, 0, im, m + 1)
        return cls(re, 0, im, 0, m)

    @classmethod
    def coerce(cls, x) -> ExactAmplitude:
        if isinstance(x, ExactAmplitude):
            return x
        if isinstance(x, (int, np.integer)):
            return cls(int(x))
        if isinstance(x, (tuple, list)) and len(x) == 3:
            return cls.from_triple(*x)
        if isinstance(x, (tuple, list)) and len(x) == 5:
            return cls(*x)
        raise TypeError(f"cannot interpret {x!r} as an exact amplitude")

    @property
    def parts(self) -> tuple[int, int, int, int, int]:
        return (self.a, self.b, self.c, self.d, self.k)

    def to_triple(self) -> tuple[int, int, int]:
        """Return ``(re, im, h)``; raises ValueError if no such triple exists."""
        a, b, c, d, k = self.parts
        if b == 0 and d == 0:
            return (a, c, 2 * k)
        if a == 0 and c == 0:
            # sqrt2 (b + i d) / 2**k = (b + i d) 2**(-(2k-1)/2)
            if k == 0:
                return (2 * b, 2 * d, 1)
            return (b, d, 2 * k - 1)
        raise ValueError(f"{self.parts} has no (re, im, halfpow) representation")

    def to_json(self) -> list[int]:
        try:
            return list(self.to_triple())
        except ValueError:
            return list(self.parts)

    # arithmetic --------------------------------------------------------
    def _aligned(self, other: ExactAmplitude):
        k = max(self.k, other.k)
        s1, s2 = 1 << (k - self.k), 1 << (k - other.k)
        x = (self.a * s1, self.b * s1, self.c * s1, self.d * s1)
        y = (other.a * s2, other.b * s2, other.c * s2, other.d * s2)
        return x, y, k

    def __add__(self, other):
        try:
            other = ExactAmplitude.coerce(other)
        except TypeError:
            return NotImplemented
        x, y, k = self._aligned(other)
        return ExactAmplitude(x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3], k)

    __radd__ = __add__

    def __neg__(self):
        return ExactAmplitude(-self.a, -self.b, -self.c, -self.d, self.k)

    def __sub__(self, other):
        try:
            other = ExactAmplitude.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return ExactAmplitude.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, ExactVector):
            return NotImplemented
        try:
            other = ExactAmplitude.coerce(other)
        except TypeError:
            return NotImplemented
        a, b, c, d = _mul4(self.parts[:4], other.parts[:4])
        return ExactAmplitude(a, b, c, d, self.k + other.k)

    __rmul__ = __mul__

    def conj(self) -> ExactAmplitude:
        return ExactAmplitude(self.a, self.b, -self.c, -self.d, self.k)

    def abs2(self) -> ExactAmplitude:
        return self * self.conj()

    def mul_sqrt2(self) -> ExactAmplitude:
        return ExactAmplitude(2 * self.b, self.a, 2 * self.d, self.c, self.k)

    def div_sqrt2(self) -> ExactAmplitude:
        return ExactAmplitude(2 * self.b, self.a, 2 * self.d, self.c, self.k + 1)

    # inspection --------------------------------------------------------
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0 and self.d == 0

    def is_real(self) -> bool:
        return self.c == 0 and self.d == 0

    def __complex__(self) -> complex:
        scale = 2.0 ** -self.k
        return complex((self.a + self.b * SQRT2) * scale, (self.c + self.d * SQRT2) * scale)

    def __float__(self) -> float:
        if not self.is_real():
            raise ValueError("complex amplitude")
        return (self.a + self.b * SQRT2) * 2.0 ** -self.k

    def __eq__(self, other) -> bool:
        try:
            other = ExactAmplitude.coerce(other)
        except TypeError:
            return NotImplemented
        return self.parts == other.parts

    def __hash__(self) -> int:
        return hash(self.parts)

    def __lt__(self, other) -> bool:
        # total order on canonical tuples, only used for sorting terms
        return self.parts < ExactAmplitude.coerce(other).parts

    def __repr__(self) -> str:
        try:
            re, im, h = self.to_triple()
            return f"ExactAmplitude.from_triple({re}, {im}, {h})"
        except ValueError:
            return "ExactAmplitude({}, {}, {}, {}, {})".format(*self.parts)


ZERO = ExactAmplitude(0)
ONE = ExactAmplitude(1)
I = ExactAmplitude(0, 0, 1, 0, 0)
INV_SQRT2 = ExactAmplitude.from_triple(1, 0, 1)
# e^{i pi/4} = (1 + i)/sqrt2
OMEGA = ExactAmplitude.from_triple(1, 1, 1)


def _as_int_array(x) -> np.ndarray:
    arr = np.asarray(x)
    if arr.dtype == object:
        return arr
    return arr.astype(np.int64, copy=False)


def _maxabs(arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    return int(np.abs(arr).max())


def _widen(parts: Sequence[np.ndarray]) -> list[np.ndarray]:
    if any(p.dtype == object for p in parts):
        if all(p.dtype == object for p in parts):
            return list(parts)
        return [p.astype(object) for p in parts]
    if _maxabs(np.concatenate(parts)) >= _SAFE:
        return [p.astype(object) for p in parts]
    return list(parts)


def _exact_sum(p: np.ndarray) -> int:
    if p.dtype == object or _maxabs(p) * max(len(p), 1) >= 1 << 62:
        return int(sum(int(v) for v in p.tolist()))
    return int(p.sum())


class ExactVector:
    """Dense 1-D array of exact amplitudes with a shared power of two.

    Instances are treated as immutable; every operation returns a new vector.
    """

    __slots__ = ("a", "b", "c", "d", "k")

    def __init__(self, a, b=None, c=None, d=None, k: int = 0):
        a = _as_int_array(a)
        zeros = np.zeros(a.shape, dtype=a.dtype)
        b = zeros if b is None else _as_int_array(b)
        c = zeros if c is None else _as_int_array(c)
        d = zeros if d is None else _as_int_array(d)
        if not (a.shape == b.shape == c.shape == d.shape) or a.ndim != 1:
            raise ValueError("component arrays must be 1-D and equally shaped")
        k = int(k)
        if k < 0:
            s = 1 << -k
            a, b, c, d, k = a * s, b * s, c * s, d * s, 0
        # canonical: strip common factors of two
        if k:
            acc = 0
            for p in (a, b, c, d):
                if p.size:
                    acc |= int(np.bitwise_or.reduce(np.abs(p)))
            if acc == 0:
                k = 0
            else:
                t = min(k, _ctz(acc))
                if t:
                    a, b, c, d, k = a >> t, b >> t, c >> t, d >> t, k - t
        self.a, self.b, self.c, self.d, self.k = a, b, c, d, k

    # construction ------------------------------------------------------
    @classmethod
    def zeros(cls, size: int) -> ExactVector:
        return cls(np.zeros(size, dtype=np.int64))

    @classmethod
    def from_amplitudes(cls, amps: Iterable) -> ExactVector:
        amps = [ExactAmplitude.coerce(x) for x in amps]
        k = max((x.k for x in amps), default=0)
        cols = [[], [], [], []]
        for x in amps:
            s = 1 << (k - x.k)
            for col, v in zip(cols, (x.a, x.b, x.c, x.d)):
                col.append(v * s)
        arrays = []
        for col in cols:
            if any(abs(v) >= 1 << 62 for v in col):
                arrays.append(np.array(col, dtype=object))
            else:
                arrays.append(np.array(col, dtype=np.int64))
        return cls(*arrays, k=k)

    @classmethod
    def signs(cls, negative: np.ndarray, halfpow: int) -> ExactVector:
        """Vector with entries ``(-1)**negative[j] * 2**(-halfpow/2)``."""
        s = 1 - 2 * np.asarray(negative, dtype=np.int64)
        m, odd = divmod(int(halfpow), 2)
        if odd:
            return cls(np.zeros_like(s), s, None, None, k=m + 1)
        return cls(s, None, None, None, k=m)

    # basic protocol ----------------------------------------------------
    def __len__(self) -> int:
        return self.a.shape[0]

    @property
    def parts(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def __getitem__(self, idx) -> ExactAmplitude | ExactVector:
        if isinstance(idx, (int, np.integer)):
            return ExactAmplitude(int(self.a[idx]), int(self.b[idx]), int(self.c[idx]), int(self.d[idx]), self.k)
        return ExactVector(self.a[idx], self.b[idx], self.c[idx], self.d[idx], k=self.k)

    def __iter__(self):
        for j in range(len(self)):
            yield self[j]

    def to_amplitudes(self) -> list[ExactAmplitude]:
        return list(self)

    def to_complex(self) -> np.ndarray:
        scale = 2.0 ** -self.k
        a, b, c, d = (np.asarray(p, dtype=np.float64) for p in self.parts)
        return (a + SQRT2 * b) * scale + 1j * ((c + SQRT2 * d) * scale)

    def is_real(self) -> bool:
        return not (np.any(self.c) or np.any(self.d))

    def is_zero(self) -> bool:
        return not any(np.any(p) for p in self.parts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactVector):
            return NotImplemented
        if len(self) != len(other) or self.k != other.k:
            return False
        return all(np.array_equal(p, q) for p, q in zip(self.parts, other.parts))

    __hash__ = None

    def key(self) -> tuple:
        """Hashable canonical key (used to sort and compare term sets)."""
        return (self.k,) + tuple(tuple(int(v) for v in p) for p in self.parts)

    def __repr__(self) -> str:
        return f"ExactVector(len={len(self)}, k={self.k})"

    # arithmetic --------------------------------------------------------
    def _scaled_to(self, k: int) -> list[np.ndarray]:
        s = 1 << (k - self.k)
        if s == 1:
            return list(self.parts)
        parts = _widen(self.parts) if s >= _SAFE else list(self.parts)
        return _widen([p * s for p in parts])

    def __add__(self, other: ExactVector) -> ExactVector:
        if not isinstance(other, ExactVector):
            return NotImplemented
        k = max(self.k, other.k)
        x, y = _widen(self._scaled_to(k)), _widen(other._scaled_to(k))
        if any(p.dtype == object for p in x + y):
            x = [p.astype(object) for p in x]
            y = [p.astype(object) for p in y]
        parts = _widen([p + q for p, q in zip(x, y)])
        return ExactVector(*parts, k=k)

    def __neg__(self) -> ExactVector:
        return ExactVector(-self.a, -self.b, -self.c, -self.d, k=self.k)

    def __sub__(self, other: ExactVector) -> ExactVector:
        return self + (-other)

    def __mul__(self, other) -> ExactVector:
        """Elementwise product with a vector, or scaling by a scalar."""
        if isinstance(other, ExactVector):
            if len(other) != len(self):
                raise ValueError("length mismatch")
            y = _widen(other.parts)
            k2 = other.k
        else:
            s = ExactAmplitude.coerce(other)
            y = [s.a, s.b, s.c, s.d]
            k2 = s.k
            if max(abs(v) for v in y) >= _SAFE:
                y = [np.array(v, dtype=object) for v in y]
        x = _widen(self.parts)
        if any(getattr(p, "dtype", None) == object for p in list(x) + list(y)):
            x = [np.asarray(p).astype(object) for p in x]
            y = [np.asarray(p).astype(object) if isinstance(p, np.ndarray) else p for p in y]
        a, b, c, d = _mul4(x, y)
        return ExactVector(*_widen([np.asarray(a), np.asarray(b), np.asarray(c), np.asarray(d)]), k=self.k + k2)

    __rmul__ = __mul__

    def conj(self) -> ExactVector:
        return ExactVector(self.a, self.b, -self.c, -self.d, k=self.k)

    def times_i(self) -> ExactVector:
        return ExactVector(-self.c, -self.d, self.a, self.b, k=self.k)

    def flip_signs(self, mask) -> ExactVector:
        """Negate the entries where ``mask`` is true."""
        s = 1 - 2 * np.asarray(mask, dtype=np.int64)
        return ExactVector(self.a * s, self.b * s, self.c * s, self.d * s, k=self.k)

    def take(self, index) -> ExactVector:
        index = np.asarray(index)
        return ExactVector(self.a[index], self.b[index], self.c[index], self.d[index], k=self.k)

    def kron(self, other: ExactVector) -> ExactVector:
        n1, n2 = len(self), len(other)
        x = [np.repeat(p, n2) for p in _widen(self.parts)]
        y = [np.tile(p, n1) for p in _widen(other.parts)]
        return ExactVector(*x, k=self.k).__mul__(ExactVector(*y, k=other.k))

    def sum(self) -> ExactAmplitude:
        return ExactAmplitude(*(_exact_sum(p) for p in self.parts), k=self.k)

    def vdot(self, other: ExactVector) -> ExactAmplitude:
        """Exact inner product, conjugating ``self``."""
        return (self.conj() * other).sum()

    def norm2(self) -> ExactAmplitude:
        return self.vdot(self)


def kron_all(vectors: Sequence[ExactVector]) -> ExactVector:
    out = vectors[0]
    for v in vectors[1:]:
        out = out.kron(v)
    return out
