"""Exact arithmetic for Cayley-Dickson loop elements.

The Cayley-Dickson loop Q_n is the set of 2^{n+1} signed products of the
canonical generators i_1, ..., i_n (real, complex, quaternion, octonion,
sedenion units for n = 0..4).  Every element is +/- i_1^{e_1} ... i_n^{e_n},
so it is stored as a sign bit plus an n-bit exponent mask, and the whole
product structure reduces to a sign function on pairs of exponent masks:

    i_u * i_v = sigma(u, v) * i_{u XOR v}

sigma comes from the four doubling cases, computed recursively and memoized
per dimension in a SignTable.  The generator added by the last doubling step
is e = i_n (top bit of the mask).

Element index = sign * 2^n + exps, so index 0 is 1 and index 2^n is -1.
"""

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_N = 16
MEMO_MAX_N = 12  # above this the (2^n)^2 sign matrix is not materialized


class DimensionMismatch(ValueError):
    pass


def sign_rule(n, u, v):
    """Sign of i_u * i_v in Q_n by direct recursion over the doubling cases.

    Cases for (x,a)(y,b) with a, b the top bits:
      (x,0)(y,0) = (xy, 0)      (x,0)(y,1) = (yx, 1)
      (x,1)(y,0) = (xy*, 1)     (x,1)(y,1) = (-y*x, 0)
    where conjugation contributes -1 exactly when the conjugated word is
    not 1.
    """
    if n == 0:
        return 1
    h = 1 << (n - 1)
    a, c = u & (h - 1), v & (h - 1)
    s, t = u & h, v & h
    if not s and not t:
        return sign_rule(n - 1, a, c)
    if not s and t:
        return sign_rule(n - 1, c, a)
    if s and not t:
        return sign_rule(n - 1, a, c) * (-1 if c else 1)
    return -sign_rule(n - 1, c, a) * (-1 if c else 1)


def _build_sign_matrix(n):
    # grow the (2^k, 2^k) matrix one doubling at a time; the four quadrants
    # are the four multiplication cases
    s = np.ones((1, 1), dtype=np.int8)
    for _ in range(n):
        h = s.shape[0]
        conj = np.full(h, -1, dtype=np.int8)
        conj[0] = 1
        t = np.empty((2 * h, 2 * h), dtype=np.int8)
        t[:h, :h] = s
        t[:h, h:] = s.T
        t[h:, :h] = s * conj[None, :]
        t[h:, h:] = -(s.T * conj[None, :])
        s = t
    return s


class SignTable:
    """Memoized sigma(u, v) for one dimension n."""

    def __init__(self, n):
        if not 0 <= n <= MAX_N:
            raise ValueError(f"n must be in [0, {MAX_N}], got {n}")
        self.n = n
        self.matrix = _build_sign_matrix(n) if n <= MEMO_MAX_N else None
        if self.matrix is not None:
            self.matrix.setflags(write=False)

    def sign(self, u, v):
        if self.matrix is not None:
            return int(self.matrix[u, v])
        return sign_rule(self.n, u, v)

    @property
    def neg(self):
        """Boolean matrix: neg[u, v] iff sigma(u, v) = -1."""
        if self.matrix is None:
            raise ValueError("sign matrix not materialized at this n")
        return self.matrix < 0


@lru_cache(maxsize=None)
def sign_table(n):
    return SignTable(n)


@dataclass(frozen=True)
class LoopElement:
    """A signed generator word: sign bit + exponent mask of length n."""

    n: int
    sign: int
    exps: int

    def __post_init__(self):
        if not 0 <= self.n <= MAX_N:
            raise ValueError(f"n must be in [0, {MAX_N}], got {self.n}")
        if self.sign not in (0, 1):
            raise ValueError("sign must be 0 or 1")
        if not 0 <= self.exps < (1 << self.n):
            raise ValueError("exponent mask out of range")

    def index(self):
        return (self.sign << self.n) | self.exps

    def __mul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return LoopElement(self.n, self.sign ^ 1, self.exps)

    def conj(self):
        return conj(self)

    def inv(self):
        return inv(self)

    def order(self):
        return elt_order(self)

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"LoopElement({self.n}, {format_element(self)!r})"


def one(n):
    return LoopElement(n, 0, 0)


def minus_one(n):
    return LoopElement(n, 1, 0)


def generator(n, j):
    """The canonical generator i_j (1-based); e = i_n."""
    if not 1 <= j <= n:
        raise ValueError(f"generator index {j} outside 1..{n}")
    return LoopElement(n, 0, 1 << (j - 1))


def elements(n):
    """All 2^{n+1} elements in index order."""
    return [from_index(n, k) for k in range(1 << (n + 1))]


def _check_dims(*xs):
    n = xs[0].n
    for x in xs[1:]:
        if x.n != n:
            raise DimensionMismatch(f"mixed dimensions {n} and {x.n}")
    return n


def mul(x, y):
    n = _check_dims(x, y)
    s = x.sign ^ y.sign ^ (sign_table(n).sign(x.exps, y.exps) < 0)
    return LoopElement(n, s, x.exps ^ y.exps)


def conj(x):
    # x* = -x except at +/-1
    return LoopElement(x.n, x.sign ^ (x.exps != 0), x.exps)


def inv(x):
    return conj(x)


def elt_order(x):
    if x.exps == 0:
        return 1 if x.sign == 0 else 2
    return 4


def comm_sign(n, u, v):
    """Commutator sign on exponent masks: xy = (yx) * comm_sign."""
    st = sign_table(n)
    return st.sign(u, v) * st.sign(v, u)


def assoc_sign(n, u, v, w):
    """Associator sign on exponent masks: (xy)z = (x(yz)) * assoc_sign."""
    st = sign_table(n)
    return st.sign(u, v) * st.sign(u ^ v, w) * st.sign(v, w) * st.sign(u, v ^ w)


def commutator(x, y):
    """The sign s with mul(x, y) = s * mul(y, x); signs of x, y drop out."""
    n = _check_dims(x, y)
    return comm_sign(n, x.exps, y.exps)


def associator(x, y, z):
    """The sign s with (xy)z = s * (x(yz)); signs of x, y, z drop out."""
    n = _check_dims(x, y, z)
    return assoc_sign(n, x.exps, y.exps, z.exps)


def index_of(x):
    return x.index()


def from_index(n, k):
    if not 0 <= k < (1 << (n + 1)):
        raise ValueError(f"index {k} out of range for Q_{n}")
    return LoopElement(n, k >> n, k & ((1 << n) - 1))


_ELEMENT_RE = re.compile(r"^(-?)(1|(?:i[1-9][0-9]*)+)$")


def format_element(x):
    """Text form: [-]1 or [-]i<j>i<k>... with increasing subscripts."""
    word = "1" if x.exps == 0 else "".join(
        f"i{j + 1}" for j in range(x.n) if x.exps >> j & 1
    )
    return ("-" if x.sign else "") + word


def parse_element(text, n=None):
    """Inverse of format_element.

    When n is omitted it is inferred from the largest subscript (0 for
    "1"/"-1").  Subscripts must be strictly increasing and at most n.
    """
    m = _ELEMENT_RE.match(text.strip())
    if m is None:
        raise ValueError(f"malformed element {text!r}")
    sign = 1 if m.group(1) else 0
    word = m.group(2)
    exps = 0
    top = 0
    if word != "1":
        prev = 0
        for sub in re.findall(r"i([0-9]+)", word):
            j = int(sub)
            if j <= prev:
                raise ValueError(f"subscripts must be strictly increasing in {text!r}")
            prev = j
            exps |= 1 << (j - 1)
        top = prev
    if n is None:
        n = top
    elif top > n:
        raise ValueError(f"subscript {top} exceeds dimension {n}")
    return LoopElement(n, sign, exps)
