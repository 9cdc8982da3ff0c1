"""Exact arithmetic over Z_d: scalars, 2-vectors and 2x2 matrices.

Every value carries its modulus d. Operations between values with different
moduli raise ModulusMismatch; nothing is ever silently coerced. All entries
are stored as canonical representatives in {0, ..., d-1}.
"""

from __future__ import annotations

from dataclasses import dataclass


class ModulusMismatch(ValueError):
    """Operands live over different moduli."""


class NotInvertible(ValueError):
    """Matrix or scalar has no inverse mod d (determinant divides d)."""


class NonPrimeModulus(ValueError):
    """Operation requires a prime modulus."""


def is_prime(d: int) -> bool:
    if d < 2:
        return False
    f = 2
    while f * f <= d:
        if d % f == 0:
            return False
        f += 1
    return True


def _check_d(d: int) -> None:
    if not isinstance(d, int) or d < 2:
        raise ValueError(f"modulus must be an integer >= 2, got {d!r}")


def _same_d(a, b) -> int:
    if a.d != b.d:
        raise ModulusMismatch(f"moduli differ: {a.d} vs {b.d}")
    return a.d


@dataclass(frozen=True)
class ModScalar:
    value: int
    d: int

    def __post_init__(self):
        _check_d(self.d)
        # int() guards against numpy integers sneaking in from array code
        object.__setattr__(self, "value", int(self.value) % self.d)

    def __add__(self, other: "ModScalar") -> "ModScalar":
        return ModScalar(self.value + other.value, _same_d(self, other))

    def __sub__(self, other: "ModScalar") -> "ModScalar":
        return ModScalar(self.value - other.value, _same_d(self, other))

    def __mul__(self, other: "ModScalar") -> "ModScalar":
        return ModScalar(self.value * other.value, _same_d(self, other))

    def __neg__(self) -> "ModScalar":
        return ModScalar(-self.value, self.d)

    def inverse(self) -> "ModScalar":
        try:
            return ModScalar(pow(self.value, -1, self.d), self.d)
        except ValueError:
            raise NotInvertible(f"{self.value} has no inverse mod {self.d}") from None


@dataclass(frozen=True)
class ModVec2:
    k1: int
    k2: int
    d: int

    def __post_init__(self):
        _check_d(self.d)
        object.__setattr__(self, "k1", int(self.k1) % self.d)
        object.__setattr__(self, "k2", int(self.k2) % self.d)

    def __add__(self, other: "ModVec2") -> "ModVec2":
        return ModVec2(self.k1 + other.k1, self.k2 + other.k2, _same_d(self, other))

    def __neg__(self) -> "ModVec2":
        return ModVec2(-self.k1, -self.k2, self.d)

    def is_zero(self) -> bool:
        return self.k1 == 0 and self.k2 == 0

    def as_tuple(self) -> tuple[int, int]:
        return (self.k1, self.k2)


@dataclass(frozen=True)
class ModMat2:
    """2x2 matrix over Z_d, entries [[a11, a12], [a21, a22]]."""

    a11: int
    a12: int
    a21: int
    a22: int
    d: int

    def __post_init__(self):
        _check_d(self.d)
        for name in ("a11", "a12", "a21", "a22"):
            object.__setattr__(self, name, int(getattr(self, name)) % self.d)

    @classmethod
    def from_rows(cls, rows, d: int) -> "ModMat2":
        (a, b), (c, e) = rows
        return cls(a, b, c, e, d)

    @classmethod
    def identity(cls, d: int) -> "ModMat2":
        return cls(1, 0, 0, 1, d)

    @classmethod
    def zero(cls, d: int) -> "ModMat2":
        return cls(0, 0, 0, 0, d)

    def rows(self) -> list[list[int]]:
        return [[self.a11, self.a12], [self.a21, self.a22]]

    def __matmul__(self, other):
        if isinstance(other, ModVec2):
            d = _same_d(self, other)
            return ModVec2(
                self.a11 * other.k1 + self.a12 * other.k2,
                self.a21 * other.k1 + self.a22 * other.k2,
                d,
            )
        d = _same_d(self, other)
        return ModMat2(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
            d,
        )

    def __add__(self, other: "ModMat2") -> "ModMat2":
        d = _same_d(self, other)
        return ModMat2(self.a11 + other.a11, self.a12 + other.a12,
                       self.a21 + other.a21, self.a22 + other.a22, d)

    def __sub__(self, other: "ModMat2") -> "ModMat2":
        d = _same_d(self, other)
        return ModMat2(self.a11 - other.a11, self.a12 - other.a12,
                       self.a21 - other.a21, self.a22 - other.a22, d)


def symplectic(k: ModVec2, m: ModVec2) -> ModScalar:
    """sigma(k, m) = k1*m2 - k2*m1 mod d, the symplectic form on Z_d^2."""
    d = _same_d(k, m)
    return ModScalar(k.k1 * m.k2 - k.k2 * m.k1, d)


def det(a: ModMat2) -> ModScalar:
    return ModScalar(a.a11 * a.a22 - a.a12 * a.a21, a.d)


def hat(a: ModMat2) -> ModMat2:
    """The involution [[a11,a12],[a21,a22]] -> [[a22,-a12],[a21,a11]].

    Coincides with adjugate() mod 2 but differs in the sign of the lower-left
    entry for odd d (and then does not preserve the determinant).
    """
    return ModMat2(a.a22, -a.a12, a.a21, a.a11, a.d)


def adjugate(a: ModMat2) -> ModMat2:
    """adj(A) with A @ adj(A) = det(A) * identity; satisfies
    symplectic(A @ k, m) == symplectic(k, adj(A) @ m)."""
    return ModMat2(a.a22, -a.a12, -a.a21, a.a11, a.d)


def inv(a: ModMat2) -> ModMat2:
    """Inverse mod d; raises NotInvertible when det(A) is not a unit."""
    dt = det(a)
    try:
        w = pow(dt.value, -1, a.d)
    except ValueError:
        raise NotInvertible(f"matrix {a.rows()} not invertible mod {a.d}") from None
    adj = adjugate(a)
    return ModMat2(w * adj.a11, w * adj.a12, w * adj.a21, w * adj.a22, a.d)
