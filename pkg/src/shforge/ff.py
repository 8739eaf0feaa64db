"""Prime-field arithmetic and polynomials of bounded degree.

Elements and polynomials are immutable; a polynomial stores its
coefficients lowest degree first, trimmed of trailing zeros.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

# Witness set that makes Miller-Rabin deterministic for n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

NEG_INF = float("-inf")


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin test (exact for every n < 2**64)."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"field modulus must be prime, got {self.p}")

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(value % self.p, self)

    def __len__(self) -> int:
        return self.p

    def elements(self) -> Iterator[FieldElement]:
        return (FieldElement(a, self) for a in range(self.p))

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, self.p - 2, self.p)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def __post_init__(self):
        if not 0 <= self.value < self.field.p:
            raise ValueError(f"{self.value} is not a canonical element of GF({self.field.p})")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("operands live in different fields")
            return other.value
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement((self.value + b) % self.field.p, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement((self.value - b) % self.field.p, self.field)

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement((b - self.value) % self.field.p, self.field)

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value * b % self.field.p, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value % self.field.p, self.field)

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self * self.field.inv(b)

    def __pow__(self, e: int):
        if e < 0:
            return ff_inv(self) ** (-e)
        return FieldElement(pow(self.value, e, self.field.p), self.field)

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.p})"


def ff_inv(a: FieldElement) -> FieldElement:
    """Multiplicative inverse; raises ZeroDivisionError on zero."""
    return FieldElement(a.field.inv(a.value), a.field)


def _trim(coeffs: Iterable[int], p: int) -> tuple[int, ...]:
    out = [c % p for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class Polynomial:
    """Polynomial over GF(p), coefficients lowest degree first."""

    coeffs: tuple[int, ...]
    field: PrimeField

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs, self.field.p))

    @classmethod
    def zero(cls, field: PrimeField) -> Polynomial:
        return cls((), field)

    @classmethod
    def one(cls, field: PrimeField) -> Polynomial:
        return cls((1,), field)

    @classmethod
    def x(cls, field: PrimeField) -> Polynomial:
        return cls((0, 1), field)

    @property
    def degree(self):
        """Degree, with ``NEG_INF`` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: Polynomial):
        if other.field != self.field:
            raise ValueError("polynomials over different fields")

    def __add__(self, other: Polynomial) -> Polynomial:
        self._check(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Polynomial(
            tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)),
            self.field,
        )

    def __neg__(self) -> Polynomial:
        return Polynomial(tuple(-c for c in self.coeffs), self.field)

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other) -> Polynomial:
        if isinstance(other, (int, FieldElement)):
            s = int(other)
            return Polynomial(tuple(c * s for c in self.coeffs), self.field)
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Polynomial.zero(self.field)
        p = self.field.p
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] = (out[i + j] + a * b) % p
        return Polynomial(tuple(out), self.field)

    __rmul__ = __mul__

    def __divmod__(self, divisor: Polynomial) -> tuple[Polynomial, Polynomial]:
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.field.p
        rem = list(self.coeffs)
        d = len(divisor.coeffs) - 1
        lead_inv = self.field.inv(divisor.coeffs[-1])
        quot = [0] * max(len(rem) - d, 0)
        for shift in range(len(rem) - d - 1, -1, -1):
            c = rem[shift + d] * lead_inv % p
            quot[shift] = c
            if c:
                for i, b in enumerate(divisor.coeffs):
                    rem[shift + i] = (rem[shift + i] - c * b) % p
        return Polynomial(tuple(quot), self.field), Polynomial(tuple(rem[:d]), self.field)

    def __call__(self, alpha: int) -> int:
        p = self.field.p
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * alpha + c) % p
        return acc

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if i == 0:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(terms)


def poly_eval(f: Polynomial, alpha: FieldElement) -> FieldElement:
    """Horner evaluation of ``f`` at ``alpha``."""
    if alpha.field != f.field:
        raise ValueError("evaluation point is not in the polynomial's field")
    return FieldElement(f(alpha.value), f.field)


def polys_below(field: PrimeField, k: int) -> Iterator[Polynomial]:
    """All q**k polynomials of degree < k, constant coefficient most significant."""
    for coeffs in itertools.product(range(field.p), repeat=k):
        yield Polynomial(coeffs, field)


def annihilator(X: Iterable[int], alphas: Sequence[int], field: PrimeField) -> Polynomial:
    """Product of (x - alphas[i]) over the 0-based indices i in X.

    The empty product is the constant 1.
    """
    out = Polynomial.one(field)
    for i in sorted(set(X)):
        out = out * Polynomial((-alphas[i], 1), field)
    return out


def divides(g: Polynomial, f: Polynomial) -> bool:
    if g.is_zero():
        raise ZeroDivisionError("the zero polynomial divides nothing")
    return divmod(f, g)[1].is_zero()


def independence_check(
    p1: Polynomial,
    p2: Polynomial,
    p3: Polynomial,
    k1: int,
    k2: int,
    k3: int,
    k: int,
) -> bool:
    """Exhaustive (k1,k2,k3)-independence test.

    True iff the only triple (q1, q2, q3) with deg(q_i) < k_i and
    q1*p1 + q2*p2 + q3*p3 == 0 is the zero triple. Enumerates all
    q**(k1+k2+k3) multiplier tuples, so only desk-scale inputs are sane.
    """
    polys = (p1, p2, p3)
    budgets = (k1, k2, k3)
    field = p1.field
    if any(p.field != field for p in polys):
        raise ValueError("polynomials over different fields")
    if any(b < 1 for b in budgets):
        raise ValueError("every degree budget must be at least 1")
    if sum(budgets) > k:
        raise ValueError(f"budgets sum to {sum(budgets)} > k={k}")
    for p, b in zip(polys, budgets):
        if p.is_zero() or b > k - p.degree:
            raise ValueError(f"budget {b} exceeds k - deg({p})")

    q = field.p
    # Shifted copies x^j * p_i, as dense length-k coefficient vectors.
    basis = []
    for p, b in zip(polys, budgets):
        for j in range(b):
            vec = [0] * k
            for i, c in enumerate(p.coeffs):
                vec[i + j] = c
            basis.append(vec)
    total = len(basis)
    for combo in itertools.product(range(q), repeat=total):
        if not any(combo):
            continue
        acc = [0] * k
        for c, vec in zip(combo, basis):
            if c:
                for i in range(k):
                    acc[i] += c * vec[i]
        if all(a % q == 0 for a in acc):
            return False
    return True
