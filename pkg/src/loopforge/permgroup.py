"""Permutations on loop-element indices, BFS closure, GF(2) flip algebra.

Permutations are flat image arrays (composition is the hot loop, array
gather is branch-free).  Group closure BFS-composes a frontier with the
generators, deduplicating on the full image array; the kernel lives in
_kernels with a numba and a numpy backend.  Inner mappings of Q_n only ever
flip signs, so they compress to GF(2) vectors over the 2^n sign-classes
{x, -x}; GF2Basis does the rank bookkeeping for the large-n path.
"""

from dataclasses import dataclass, field
from functools import cached_property, reduce
from math import gcd

import numpy as np

from . import _kernels

DEFAULT_CAP = 1 << 21


class NotFlipMapError(ValueError):
    """Raised when a permutation expected to be a sign flip moves a point
    outside {x, -x}; surfacing this means a structure theorem failed."""

    def __init__(self, point, image):
        self.point = point
        self.image = image
        super().__init__(f"point {point} maps to {image}, not to +/- itself")


def _dtype_for(m):
    if m <= 256:
        return np.uint8
    if m <= 65536:
        return np.uint16
    return np.uint32


class Permutation:
    """Bijection on range(m), stored as its image array."""

    __slots__ = ("images",)

    def __init__(self, images, validate=True):
        arr = np.asarray(images)
        arr = arr.astype(_dtype_for(arr.shape[0]), copy=True)
        if validate:
            if np.any(np.sort(arr) != np.arange(arr.shape[0])):
                raise ValueError("images are not a bijection")
        arr.setflags(write=False)
        self.images = arr

    @classmethod
    def identity(cls, m):
        return cls(np.arange(m), validate=False)

    @property
    def degree(self):
        return self.images.shape[0]

    def __call__(self, k):
        return int(self.images[k])

    def __mul__(self, other):
        return compose(self, other)

    def __invert__(self):
        return invert(self)

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(
            self.images, other.images
        )

    def __hash__(self):
        return hash(self.images.tobytes())

    def is_identity(self):
        return bool(np.all(self.images == np.arange(self.degree)))

    def cycles(self):
        seen = np.zeros(self.degree, dtype=bool)
        out = []
        for z in range(self.degree):
            if not seen[z]:
                orbit = [z]
                seen[z] = True
                w = int(self.images[z])
                while w != z:
                    orbit.append(w)
                    seen[w] = True
                    w = int(self.images[w])
                out.append(orbit)
        return out

    def to_line(self):
        return "[" + " ".join(str(int(k)) for k in self.images) + "]"

    @classmethod
    def from_line(cls, text):
        return cls([int(tok) for tok in text.strip().strip("[]").split()])

    def __repr__(self):
        if self.degree <= 16:
            return f"Permutation({self.to_line()})"
        return f"Permutation(degree={self.degree})"


def compose(p, q):
    """p after q: (p*q)(z) = p(q(z))."""
    if p.degree != q.degree:
        raise ValueError(f"degree mismatch {p.degree} != {q.degree}")
    r = Permutation.__new__(Permutation)
    arr = p.images[q.images]
    arr.setflags(write=False)
    r.images = arr
    return r


def invert(p):
    r = Permutation.__new__(Permutation)
    arr = np.empty_like(p.images)
    arr[p.images] = np.arange(p.degree, dtype=p.images.dtype)
    arr.setflags(write=False)
    r.images = arr
    return r


def parity(p):
    """'even' or 'odd', by cycle decomposition."""
    transpositions = sum(len(c) - 1 for c in p.cycles())
    return "even" if transpositions % 2 == 0 else "odd"


def perm_order(p):
    return reduce(lambda a, b: a * b // gcd(a, b), (len(c) for c in p.cycles()), 1)


# ---------------------------------------------------------------------------
# Closure.

def _canonical_rows(rows):
    rows = np.ascontiguousarray(rows, dtype=np.uint8)
    v = rows.view(np.dtype((np.void, rows.shape[1]))).ravel()
    return np.unique(v).view(np.uint8).reshape(-1, rows.shape[1])


@dataclass
class GroupClosure:
    """Element set of a generated permutation group (rows sorted
    lexicographically, so iteration order is backend independent)."""

    elements: np.ndarray
    generators: list = field(default_factory=list)
    truncated: bool = False

    def __post_init__(self):
        self.elements = np.ascontiguousarray(self.elements, dtype=np.uint8)
        self.elements.setflags(write=False)

    @property
    def degree(self):
        return self.elements.shape[1]

    def __len__(self):
        return self.elements.shape[0]

    @cached_property
    def _byteset(self):
        m = self.degree
        return frozenset(self.elements[i].tobytes() for i in range(len(self)))

    def __contains__(self, p):
        if isinstance(p, Permutation):
            return p.images.astype(np.uint8).tobytes() in self._byteset
        return np.asarray(p, dtype=np.uint8).tobytes() in self._byteset

    def perm_at(self, i):
        return Permutation(self.elements[i], validate=False)

    def __iter__(self):
        for i in range(len(self)):
            yield self.perm_at(i)

    def same_elements(self, other):
        return len(self) == len(other) and np.array_equal(
            self.elements, other.elements
        )


def closure(gens, cap=DEFAULT_CAP):
    """Breadth-first closure of nonempty gens under composition."""
    if not gens:
        raise ValueError("need at least one generator")
    m = gens[0].degree
    if any(g.degree != m for g in gens):
        raise ValueError("generators act on different domains")
    if m > 256:
        raise ValueError("closure supports degree <= 256")
    if cap < 1:
        raise ValueError("cap must be positive")
    garr = np.stack([g.images.astype(np.uint8) for g in gens])
    elems, truncated = _kernels.closure_images(garr, cap)
    return GroupClosure(_canonical_rows(elems), list(gens), truncated)


def _require_complete(*groups):
    for g in groups:
        if g.truncated:
            raise ValueError("operation undefined on a truncated closure")


def stabilizer_of_identity(g):
    """Subgroup fixing index 0; membership is verified by sampling."""
    _require_complete(g)
    sub = g.elements[g.elements[:, 0] == 0]
    out = GroupClosure(_canonical_rows(sub), [], False)
    _verify_subgroup(out)
    return out


def _verify_subgroup(g, samples=10_000, seed=0):
    n = len(g)
    assert Permutation.identity(g.degree) in g, "stabilizer lost the identity"
    if n <= 64:
        idx = np.stack(np.meshgrid(np.arange(n), np.arange(n))).reshape(2, -1).T
    else:
        rng = np.random.default_rng(seed)
        idx = rng.integers(0, n, size=(samples, 2))
    a = g.elements[idx[:, 0]]
    b = g.elements[idx[:, 1]]
    prod = np.take_along_axis(a, b, axis=1)
    for row in _canonical_rows(prod):
        assert row.tobytes() in g._byteset, "stabilizer is not closed"


def is_normal_in(h, g):
    """Literal check: p q p^{-1} in h for every p in g, q in h."""
    _require_complete(h, g)
    harr = h.elements
    hset = h._byteset
    for i in range(len(g)):
        p = g.elements[i]
        pinv = np.empty_like(p)
        pinv[p] = np.arange(p.shape[0], dtype=p.dtype)
        conj = p[harr[:, pinv]]
        for j in range(conj.shape[0]):
            if conj[j].tobytes() not in hset:
                return False
    return True


def intersection(h, k):
    _require_complete(h, k)
    keys = k._byteset
    rows = [h.elements[i] for i in range(len(h)) if h.elements[i].tobytes() in keys]
    return GroupClosure(_canonical_rows(np.array(rows)), [], False)


def conjugate_by(p, g):
    """The set {p q p^{-1} : q in g} as a closure."""
    _require_complete(g)
    pin = invert(p).images.astype(np.uint8)
    pim = p.images.astype(np.uint8)
    conj = pim[g.elements[:, pin]]
    return GroupClosure(_canonical_rows(conj), [], False)


def parity_all(g):
    """Vector of parities (0 even / 1 odd) for every element of a closure."""
    return _kernels.parity_many(g.elements)


# ---------------------------------------------------------------------------
# Sign-flip vectors over classes {x, -x}.

@dataclass(frozen=True)
class FlipVector:
    """Bit c set iff the permutation negates sign-class c."""

    nclasses: int
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.nclasses):
            raise ValueError("bits out of range")

    def __xor__(self, other):
        if self.nclasses != other.nclasses:
            raise ValueError("length mismatch")
        return FlipVector(self.nclasses, self.bits ^ other.bits)

    @property
    def weight(self):
        return bin(self.bits).count("1")

    def to_bitstring(self):
        """Class 0 (= {1,-1}) leftmost."""
        return "".join("1" if self.bits >> c & 1 else "0" for c in range(self.nclasses))

    @classmethod
    def from_bitstring(cls, text):
        bits = 0
        for c, ch in enumerate(text.strip()):
            if ch == "1":
                bits |= 1 << c
            elif ch != "0":
                raise ValueError(f"bad flip bitstring {text!r}")
        return cls(len(text.strip()), bits)


def flip_decompose(p):
    """FlipVector of a signed-flip permutation; NotFlipMapError otherwise."""
    m = p.degree
    if m % 2:
        raise ValueError("domain size must be even")
    half = m // 2
    a = p.images[:half]
    b = p.images[half:]
    ids = np.arange(half, dtype=p.images.dtype)
    fixed = (a == ids) & (b == ids + half)
    flip = (a == ids + half) & (b == ids)
    bad = ~(fixed | flip)
    if bad.any():
        z = int(np.argmax(bad))
        point = z if int(a[z]) not in (z, z + half) else z + half
        raise NotFlipMapError(point, int(p.images[point]))
    bits = 0
    for c in np.nonzero(flip)[0]:
        bits |= 1 << int(c)
    return FlipVector(half, bits)


def flip_permutation(v, degree=None):
    """Permutation realizing a FlipVector (inverse of flip_decompose)."""
    half = v.nclasses
    m = degree or 2 * half
    assert m == 2 * half
    imgs = np.arange(m)
    for c in range(half):
        if v.bits >> c & 1:
            imgs[c], imgs[c + half] = c + half, c
    return Permutation(imgs, validate=False)


# ---------------------------------------------------------------------------
# GF(2) elimination on int bitsets.

class GF2Basis:
    """Row-reduced basis of flip vectors; span size is 2^rank."""

    def __init__(self, nbits, vectors=()):
        self.nbits = nbits
        self._rows = {}  # leading bit -> row (mutually reduced)
        for v in vectors:
            self.insert(v)

    @property
    def rank(self):
        return len(self._rows)

    @property
    def order(self):
        return 1 << self.rank

    def _reduce(self, bits):
        while bits:
            lead = bits.bit_length() - 1
            row = self._rows.get(lead)
            if row is None:
                return bits
            bits ^= row
        return 0

    def insert(self, v):
        """Add a vector; returns True if it enlarged the span."""
        bits = self._coerce(v)
        residue = self._reduce(bits)
        if residue == 0:
            return False
        lead = residue.bit_length() - 1
        for other_lead, row in list(self._rows.items()):
            if row >> lead & 1:
                self._rows[other_lead] = row ^ residue
        self._rows[lead] = residue
        return True

    def contains(self, v):
        return self._reduce(self._coerce(v)) == 0

    def _coerce(self, v):
        if isinstance(v, FlipVector):
            if v.nclasses != self.nbits:
                raise ValueError("length mismatch")
            return v.bits
        bits = int(v)
        if not 0 <= bits < (1 << self.nbits):
            raise ValueError("vector out of range")
        return bits

    def canonical_rows(self):
        """Sorted reduced rows; equal spans give equal tuples."""
        return tuple(sorted(self._rows.values()))

    def spans_same(self, other):
        return self.nbits == other.nbits and self.canonical_rows() == other.canonical_rows()


def gf2_insert(basis, v):
    basis.insert(v)
    return basis


def gf2_rank(vectors, nbits=None):
    vectors = list(vectors)
    if nbits is None:
        if not vectors:
            raise ValueError("cannot infer vector length")
        first = vectors[0]
        nbits = first.nclasses if isinstance(first, FlipVector) else max(
            int(v).bit_length() for v in vectors
        )
    return GF2Basis(nbits, vectors).rank


def is_elem_abelian_2(gens):
    """True iff every generator squares to the identity and all pairs
    commute, which certifies an elementary abelian 2-group."""
    for g in gens:
        if perm_order(g) > 2:
            return False
    for i, g in enumerate(gens):
        for h in gens[i + 1 :]:
            if compose(g, h) != compose(h, g):
                return False
    return True
