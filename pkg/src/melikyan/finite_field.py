"""Exact arithmetic in GF(p) and its extensions GF(p^k).

Elements are stored in the polynomial basis 1, x, ..., x^{k-1} modulo a
fixed monic irreducible polynomial.  The polynomial is the lexicographically
smallest irreducible one of its degree, so a given ``(p, k)`` always yields
the same field and the same coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "FieldError",
    "CharacteristicError",
    "FieldTooSmall",
    "FieldDescriptor",
    "FieldElement",
    "Embedding",
    "make_field",
    "root_of_unity",
    "extend_field",
    "extend_degree",
    "binom_mod_p",
    "multi_binom",
    "is_prime",
    "prime_factors",
]


class FieldError(ValueError):
    pass


class CharacteristicError(FieldError):
    """Raised when an order divisible by the characteristic is requested."""


class FieldTooSmall(FieldError):
    """Raised when the working field lacks the requested roots of unity."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = 3
    while r * r <= n:
        if n % r == 0:
            return False
        r += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# polynomials over GF(p) as coefficient lists, lowest degree first
# ---------------------------------------------------------------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], g: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    while len(a) - 1 >= dg:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dg
        for i, gi in enumerate(g):
            a[shift + i] = (a[shift + i] - c * gi) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], g: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return _pmod(out, g, p)


def _ppowmod(a: list[int], e: int, g: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(a, g, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, g, p)
        base = _pmulmod(base, base, g, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim([c % p for c in a]), _trim([c % p for c in b])
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _irreducible(g: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial g over GF(p)."""
    k = len(g) - 1
    if k == 1:
        return True
    x = [0, 1]
    if _ppowmod(x, p**k, g, p) != x:
        return False
    for r in prime_factors(k):
        h = _ppowmod(x, p ** (k // r), g, p)
        h = h + [0] * (2 - len(h))
        h[1] = (h[1] - 1) % p
        if len(_pgcd(g, h, p)) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# field descriptor and elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldDescriptor:
    """GF(p^k) presented as GF(p)[x]/(modulus).

    ``modulus`` lists all k+1 coefficients, constant term first; the last
    one is 1.
    """

    p: int
    k: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p):
            raise FieldError(f"{self.p} is not prime")
        if self.k < 1:
            raise FieldError("extension degree must be positive")
        if len(self.modulus) != self.k + 1 or self.modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree k")
        if not _irreducible(list(self.modulus), self.p):
            raise FieldError(f"modulus {self.modulus} is reducible over GF({self.p})")

    def __repr__(self):
        return f"GF({self.p}^{self.k})" if self.k > 1 else f"GF({self.p})"

    @property
    def order(self) -> int:
        return self.p**self.k

    @cached_property
    def _reduction(self) -> np.ndarray:
        # row d - k holds the coordinates of x^d for k <= d <= 2k - 2
        p, k = self.p, self.k
        rows = []
        cur = [(-c) % p for c in self.modulus[:-1]]  # x^k
        for _ in range(max(k - 1, 0)):
            rows.append(list(cur))
            # multiply by x
            top = cur[-1]
            cur = [0] + cur[:-1]
            cur = [(c + top * (-m)) % p for c, m in zip(cur, self.modulus[:-1])]
        if not rows:
            return np.zeros((0, k), dtype=np.int64)
        return np.array(rows, dtype=np.int64)

    # -- construction helpers ------------------------------------------------

    def element(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldError("element belongs to a different field")
            return value
        if isinstance(value, (int, np.integer)):
            return FieldElement(self, (int(value) % self.p,) + (0,) * (self.k - 1))
        coords = tuple(int(c) % self.p for c in value)
        if len(coords) != self.k:
            raise FieldError(f"expected {self.k} coordinates, got {len(coords)}")
        return FieldElement(self, coords)

    @cached_property
    def zero(self) -> "FieldElement":
        return self.element(0)

    @cached_property
    def one(self) -> "FieldElement":
        return self.element(1)

    @cached_property
    def generator(self) -> "FieldElement":
        """The class of x (the adjoined root of the modulus)."""
        if self.k == 1:
            return self.element(-self.modulus[0])
        return self.element([0, 1] + [0] * (self.k - 2))

    def from_index(self, idx: int) -> "FieldElement":
        coords = []
        for _ in range(self.k):
            idx, r = divmod(idx, self.p)
            coords.append(r)
        return FieldElement(self, tuple(coords))

    def elements(self) -> Iterator["FieldElement"]:
        for i in range(self.order):
            yield self.from_index(i)

    def nonzero_elements(self) -> Iterator["FieldElement"]:
        for i in range(1, self.order):
            yield self.from_index(i)

    @cached_property
    def primitive_element(self) -> "FieldElement":
        """First element in index order generating the multiplicative group."""
        for x in self.nonzero_elements():
            if x.multiplicative_order() == self.order - 1:
                return x
        raise AssertionError("multiplicative group is cyclic")

    # -- vectorised coordinate arithmetic (last axis holds coordinates) -------

    def mul_arrays(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        k, p = self.k, self.p
        if k == 1:
            return (a * b) % p
        shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
        out = np.zeros(shape + (2 * k - 1,), dtype=np.int64)
        for r in range(k):
            for s in range(k):
                out[..., r + s] += a[..., r] * b[..., s]
        return self.reduce_conv(out)

    def reduce_conv(self, conv: np.ndarray) -> np.ndarray:
        """Reduce a length-(2k-1) coordinate convolution to k coordinates."""
        k, p = self.k, self.p
        conv = conv % p
        res = conv[..., :k].copy()
        red = self._reduction
        for d in range(k, conv.shape[-1]):
            res += conv[..., d, None] * red[d - k]
        return res % p

    def inv_coords(self, c: np.ndarray) -> np.ndarray:
        return np.array(FieldElement(self, tuple(int(v) for v in c)).inverse().coords, dtype=np.int64)


@lru_cache(maxsize=None)
def make_field(p: int, k: int = 1) -> FieldDescriptor:
    """GF(p^k) with the lexicographically smallest monic irreducible modulus.

    Coefficients are compared from x^{k-1} down to the constant term.
    """
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if k < 1:
        raise FieldError("extension degree must be positive")
    for idx in range(p**k):
        low = []
        v = idx
        for _ in range(k):
            v, r = divmod(v, p)
            low.append(r)
        g = low + [1]
        if _irreducible(g, p):
            return FieldDescriptor(p, k, tuple(g))
    raise AssertionError("irreducible polynomials exist in every degree")


@dataclass(frozen=True, slots=True)
class FieldElement:
    field: FieldDescriptor
    coords: tuple[int, ...]

    def _coerce(self, other) -> "FieldElement | None":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError(
                    f"mixed-field arithmetic {self.field!r} vs {other.field!r}; embed explicitly"
                )
            return other
        if isinstance(other, (int, np.integer)):
            return self.field.element(int(other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.field.p
        return FieldElement(self.field, tuple((a + b) % p for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, tuple((-a) % p for a in self.coords))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.field.p
        return FieldElement(self.field, tuple((a - b) % p for a, b in zip(self.coords, o.coords)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        f = self.field
        p, k = f.p, f.k
        if k == 1:
            return FieldElement(f, (self.coords[0] * o.coords[0] % p,))
        conv = [0] * (2 * k - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o.coords):
                    conv[i + j] += a * b
        res = conv[:k]
        red = f._reduction
        for d in range(k, 2 * k - 1):
            c = conv[d] % p
            if c:
                row = red[d - k]
                for i in range(k):
                    res[i] += c * int(row[i])
        return FieldElement(f, tuple(r % p for r in res))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("zero has no inverse in a field")
        if self.field.k == 1:
            return FieldElement(self.field, (pow(self.coords[0], -1, self.field.p),))
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.coords == other.coords
        if isinstance(other, (int, np.integer)):
            return self == self.field.element(int(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.coords))

    def index(self) -> int:
        p = self.field.p
        return sum(c * p**i for i, c in enumerate(self.coords))

    def in_prime_field(self) -> bool:
        return not any(self.coords[1:])

    def __int__(self):
        if not self.in_prime_field():
            raise FieldError("element is not in the prime field")
        return self.coords[0]

    def multiplicative_order(self) -> int:
        if self.is_zero():
            raise ZeroDivisionError("zero has no multiplicative order")
        n = self.field.order - 1
        order = n
        for r in prime_factors(n):
            while order % r == 0 and self ** (order // r) == self.field.one:
                order //= r
        return order

    def __repr__(self):
        if self.field.k == 1:
            return str(self.coords[0])
        terms = []
        for i, c in enumerate(self.coords):
            if c:
                mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
                terms.append(f"{c}{mono}" if c != 1 or i == 0 else mono)
        return "+".join(terms) if terms else "0"


def root_of_unity(f: FieldDescriptor, m: int) -> FieldElement:
    """Deterministic element of exact multiplicative order m."""
    if m < 1:
        raise FieldError("order must be positive")
    if m % f.p == 0:
        raise CharacteristicError(
            f"no element of order {m} exists in characteristic {f.p}"
        )
    if (f.order - 1) % m:
        raise FieldTooSmall(f"{m} does not divide {f.order - 1}; extend the field")
    return f.primitive_element ** ((f.order - 1) // m)


# ---------------------------------------------------------------------------
# extensions and embeddings
# ---------------------------------------------------------------------------

def _poly_trim(a: list[FieldElement]) -> list[FieldElement]:
    while a and a[-1].is_zero():
        a.pop()
    return a


def _poly_mod(a: list[FieldElement], g: list[FieldElement]) -> list[FieldElement]:
    a = _poly_trim(list(a))
    dg = len(g) - 1
    lead_inv = g[-1].inverse()
    while len(a) - 1 >= dg:
        c = a[-1] * lead_inv
        shift = len(a) - 1 - dg
        for i, gi in enumerate(g):
            a[shift + i] = a[shift + i] - c * gi
        _poly_trim(a)
    return a


def _poly_mulmod(a, b, g):
    if not a or not b:
        return []
    zero = g[0].field.zero
    out = [zero] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
    return _poly_mod(out, g)


def _poly_gcd(a, b):
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        a, b = b, _poly_mod(a, b)
    inv = a[-1].inverse()
    return [c * inv for c in a]


def _split_off_root(g: list[FieldElement]) -> FieldElement:
    """A root of a monic g that splits into distinct linear factors."""
    F = g[0].field
    if F.order <= 1 << 16 or F.p == 2:
        for z in F.elements():
            acc = F.zero
            for c in reversed(g):
                acc = acc * z + c
            if acc.is_zero():
                return z
        raise FieldError("polynomial has no root in the target field")
    e = (F.order - 1) // 2
    c_idx = 0
    while len(g) > 2:
        c_idx += 1
        h = [F.one]
        base = [F.from_index(c_idx), F.one]
        n = e
        while n:
            if n & 1:
                h = _poly_mulmod(h, base, g)
            base = _poly_mulmod(base, base, g)
            n >>= 1
        h = h + [F.zero] * max(0, 1 - len(h))
        h[0] = h[0] - F.one
        d = _poly_gcd(g, h) if _poly_trim(list(h)) else g
        if 1 < len(d) < len(g):
            g = d if len(d) <= len(g) - len(d) + 1 else _poly_divexact(g, d)
    return -g[0] / g[1]


def _poly_divexact(a, d):
    F = d[0].field
    a = list(a)
    q = [F.zero] * (len(a) - len(d) + 1)
    inv = d[-1].inverse()
    for shift in range(len(a) - len(d), -1, -1):
        c = a[shift + len(d) - 1] * inv
        q[shift] = c
        for i, di in enumerate(d):
            a[shift + i] = a[shift + i] - c * di
    inv_q = q[-1].inverse()
    return [c * inv_q for c in q]


@dataclass(frozen=True)
class Embedding:
    """Field homomorphism GF(p^k) -> GF(p^K) fixed by the image of x."""

    source: FieldDescriptor
    target: FieldDescriptor
    image_of_generator: FieldElement

    @cached_property
    def _powers(self) -> list[FieldElement]:
        out = [self.target.one]
        for _ in range(1, self.source.k):
            out.append(out[-1] * self.image_of_generator)
        return out

    def __call__(self, x: FieldElement) -> FieldElement:
        if x.field != self.source:
            raise FieldError("element is not in the embedding's source field")
        acc = self.target.zero
        for c, pw in zip(x.coords, self._powers):
            if c:
                acc = acc + pw * c
        return acc

    def coords_array(self, arr: np.ndarray) -> np.ndarray:
        """Embed an array of source coordinates (last axis) into the target."""
        basis = np.array([pw.coords for pw in self._powers], dtype=np.int64)
        return (arr @ basis) % self.target.p


@lru_cache(maxsize=None)
def _embedding(source: FieldDescriptor, target: FieldDescriptor) -> Embedding:
    if source.p != target.p or target.k % source.k:
        raise FieldError(f"{source!r} does not embed in {target!r}")
    if source.k == 1:
        return Embedding(source, target, target.element(-source.modulus[0]))
    g = [target.element(c) for c in source.modulus]
    return Embedding(source, target, _split_off_root(g))


def extend_degree(f: FieldDescriptor, d: int) -> tuple[FieldDescriptor, Embedding]:
    """GF(p^{kd}) together with the embedding of f into it."""
    big = make_field(f.p, f.k * d)
    return big, _embedding(f, big)


def extend_field(f: FieldDescriptor, m: int) -> tuple[FieldDescriptor, Embedding]:
    """Smallest GF(p^j), k | j, containing the m-th roots of unity."""
    if m % f.p == 0:
        raise CharacteristicError(
            f"roots of unity of order {m} do not exist in characteristic {f.p}"
        )
    j = f.k
    while (f.p**j - 1) % m:
        j += f.k
    return extend_degree(f, j // f.k)


def embedding(source: FieldDescriptor, target: FieldDescriptor) -> Embedding:
    return _embedding(source, target)


# ---------------------------------------------------------------------------
# binomial coefficients modulo p
# ---------------------------------------------------------------------------

def binom_mod_p(a: int, b: int, p: int) -> int:
    """binomial(a, b) mod p by Lucas' theorem (0 when b > a)."""
    if b < 0 or a < 0 or b > a:
        return 0
    res = 1
    while a or b:
        a, ad = divmod(a, p)
        b, bd = divmod(b, p)
        if bd > ad:
            return 0
        res = res * math.comb(ad, bd) % p
    return res


def multi_binom(a: Sequence[int], b: Sequence[int], p: int) -> int:
    """prod_i binomial(a_i + b_i, a_i) mod p."""
    if len(a) != len(b):
        raise ValueError("multi-indices of different length")
    res = 1
    for ai, bi in zip(a, b):
        res = res * binom_mod_p(ai + bi, ai, p) % p
        if not res:
            return 0
    return res
