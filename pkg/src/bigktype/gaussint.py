"""Exact arithmetic in the Gaussian integers Z[i].

Everything here works with Python ints, so there is no overflow at any
scale; the 64-bit bound only matters for the compiled counting kernel.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import total_ordering


@total_ordering
@dataclass(frozen=True, slots=True)
class GaussInt:
    re: int
    im: int = 0

    @classmethod
    def of(cls, z) -> "GaussInt":
        if isinstance(z, GaussInt):
            return z
        if isinstance(z, complex):
            if z.real != int(z.real) or z.imag != int(z.imag):
                raise ValueError(f"{z!r} is not a Gaussian integer")
            return cls(int(z.real), int(z.imag))
        if isinstance(z, (tuple, list)):
            return cls(int(z[0]), int(z[1]))
        return cls(int(z), 0)

    def __add__(self, o):
        o = GaussInt.of(o)
        return GaussInt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = GaussInt.of(o)
        return GaussInt(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return GaussInt.of(o) - self

    def __neg__(self):
        return GaussInt(-self.re, -self.im)

    def __mul__(self, o):
        o = GaussInt.of(o)
        return GaussInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = GaussInt(1, 0)
        for _ in range(k):
            out = out * self
        return out

    def conj(self) -> "GaussInt":
        return GaussInt(self.re, -self.im)

    def __complex__(self):
        return complex(self.re, self.im)

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __lt__(self, o):
        return (self.re, self.im) < (o.re, o.im)

    def __repr__(self):
        return f"GaussInt({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        return f"{self.re}{'+' if self.im > 0 else '-'}{abs(self.im)}i"

    def divmod(self, d: "GaussInt"):
        """Euclidean division with the quotient rounded to the nearest lattice point."""
        d = GaussInt.of(d)
        nd = norm(d)
        if nd == 0:
            raise ZeroDivisionError("division by zero in Z[i]")
        num = self * d.conj()
        q = GaussInt(_round_div(num.re, nd), _round_div(num.im, nd))
        return q, self - q * d

    def exact_div(self, d: "GaussInt") -> "GaussInt | None":
        """Quotient self/d if d divides self, else None."""
        d = GaussInt.of(d)
        nd = norm(d)
        num = self * d.conj()
        if num.re % nd or num.im % nd:
            return None
        return GaussInt(num.re // nd, num.im // nd)


def _round_div(a: int, b: int) -> int:
    # nearest integer to a/b for b > 0, ties rounded down
    return (2 * a + b) // (2 * b)


UNITS = (GaussInt(1, 0), GaussInt(0, 1), GaussInt(-1, 0), GaussInt(0, -1))


def norm(z) -> int:
    z = GaussInt.of(z)
    return z.re * z.re + z.im * z.im


def is_unit(z) -> bool:
    return norm(z) == 1


def normalize(z) -> GaussInt:
    """Associate of z with re > 0 and im >= 0 (0 maps to 0)."""
    z = GaussInt.of(z)
    if not z:
        return z
    for u in UNITS:
        w = z * u
        if w.re > 0 and w.im >= 0:
            return w
    raise AssertionError("unreachable")


def gcd(a, b) -> GaussInt:
    a, b = GaussInt.of(a), GaussInt.of(b)
    while b:
        a, b = b, a.divmod(b)[1]
    return normalize(a)


def _is_rational_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % f for f in range(3, math.isqrt(n) + 1, 2))


def is_prime(z) -> bool:
    z = GaussInt.of(z)
    n = norm(z)
    if n <= 1:
        raise ValueError("primality is undefined for 0 and units")
    if z.re == 0 or z.im == 0:
        m = abs(z.re) + abs(z.im)
        return _is_rational_prime(m) and m % 4 == 3
    return _is_rational_prime(n)


def _int_divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _elements_of_norm(m: int) -> list[GaussInt]:
    out = []
    r = math.isqrt(m)
    for x in range(-r, r + 1):
        y2 = m - x * x
        y = math.isqrt(y2)
        if y * y == y2:
            out.append(GaussInt(x, y))
            if y:
                out.append(GaussInt(x, -y))
    return sorted(out)


def divisors(n) -> list[GaussInt]:
    """All divisors of n, units included (so every class appears four times)."""
    n = GaussInt.of(n)
    if not n:
        raise ValueError("0 has infinitely many divisors")
    out = []
    for m in _int_divisors(norm(n)):
        out.extend(a for a in _elements_of_norm(m) if n.exact_div(a) is not None)
    return sorted(out)


def divisor_pairs(n, unit_reduced: bool = False) -> list[tuple[GaussInt, GaussInt]]:
    """Factorizations a*d = n, sorted by a.

    The raw list contains each unit orbit (u*a, d/u) four times; with
    unit_reduced=True only the pair with a normalized is kept.
    """
    n = GaussInt.of(n)
    pairs = [(a, n.exact_div(a)) for a in divisors(n)]
    if unit_reduced:
        pairs = [(a, d) for a, d in pairs if normalize(a) == a]
    return pairs


def _hnf_basis(d: GaussInt) -> tuple[int, int, int]:
    """Basis (A, 0), (t, G) of the lattice dZ[i] viewed in Z^2."""
    x, y = d.re, d.im
    g = math.gcd(x, y)
    # s*y + r*x = g
    _, s, r = _ext_gcd(y, x)
    t = s * x - r * y
    return norm(d) // g, t, g


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, s, t = _ext_gcd(b, a % b)
    return g, t, s - (a // b) * t


def residues_mod(d) -> list[GaussInt]:
    """Representatives x + yi of Z[i]/(d) with 0 <= x < N(d)/g, 0 <= y < g, g = gcd(re, im)."""
    d = GaussInt.of(d)
    if not d:
        raise ValueError("modulus must be nonzero")
    A, _, g = _hnf_basis(d)
    return [GaussInt(x, y) for x in range(A) for y in range(g)]


def reduce_mod(z, d) -> GaussInt:
    """The element of residues_mod(d) congruent to z."""
    z, d = GaussInt.of(z), GaussInt.of(d)
    A, t, g = _hnf_basis(d)
    k = z.im // g
    x = z.re - k * t
    return GaussInt(x % A, z.im - k * g)


def arg(z) -> float:
    z = GaussInt.of(z)
    return math.atan2(z.im, z.re)


@dataclass
class AmplifierSet:
    L: float
    primes: list[GaussInt]
    y: list[int]
    z: list[int]
    x: dict[GaussInt, float] = field(default_factory=dict)

    def support(self) -> list[GaussInt]:
        return sorted(n for n, v in self.x.items() if v != 0)

    def to_json(self) -> str:
        return json.dumps({
            "L": self.L,
            "primes": [[p.re, p.im] for p in self.primes],
            "x": [[[n.re, n.im], v] for n, v in sorted(self.x.items())],
        })


def amplifier_primes(L: float) -> list[GaussInt]:
    """Primes with 0 < arg < pi/4 and L <= norm <= 2L, sorted by (norm, re)."""
    out = []
    hi = math.isqrt(int(2 * L))
    for a in range(1, hi + 1):
        for b in range(1, a):  # 0 < b < a  <=>  0 < arg < pi/4
            n = a * a + b * b
            if L <= n <= 2 * L and _is_rational_prime(n):
                out.append(GaussInt(a, b))
    return sorted(out, key=lambda p: (norm(p), p.re))


def amplifier_set(L: float, y_signs=None, z_signs=None) -> AmplifierSet:
    if L < 7:
        raise ValueError("amplifier needs L >= 7")
    primes = amplifier_primes(L)
    if not primes:
        raise ValueError(f"no amplifier primes with norm in [{L}, {2 * L}]")
    y = list(y_signs) if y_signs is not None else [1] * len(primes)
    z = list(z_signs) if z_signs is not None else [1] * len(primes)
    if len(y) != len(primes) or len(z) != len(primes):
        raise ValueError(f"sign vectors must have length {len(primes)}")

    x: dict[GaussInt, float] = {GaussInt(1): float(sum(a * a + b * b for a, b in zip(y, z)))}
    for i, l1 in enumerate(primes):
        for j, l2 in enumerate(primes):
            if j < i:
                continue
            same = i == j
            n = l1 * l2
            x[n] = x.get(n, 0.0) + (1 if same else 2) * y[i] * y[j] + (z[i] * z[j] if same else 0)
            n2 = n * n
            x[n2] = x.get(n2, 0.0) + (1 if same else 2) * z[i] * z[j]
    return AmplifierSet(L=L, primes=primes, y=y, z=z, x=x)
