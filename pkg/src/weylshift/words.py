"""Words of twisted Weyl letters and their exact phase arithmetic.

A word is a finitely supported multi-index: one vector k in Z_d^2 per
occupied lattice site, letters kept in site-increasing order. Products are
normal-ordered back into that form; the price is a phase in the cyclic
group Z_{2d} (a 2d-th root of unity zeta = e^{i pi / d}), tracked as an
exact integer so the cocycle identity holds with no rounding at all.

Two phase sources appear when normal ordering:
  * moving a letter past one at another site costs the twisted commutation
    phase 2*sigma(k, A_m l) (numerator doubled: it is a d-th root), and
  * fusing two letters at the same site costs the section cocycle
    c(k, l) = sigma(k, l) + d*(e1*r2 + e2*r1 + d*e1*e2) mod 2d,
    with r the reduced sum and e the mod-d carries. The carry term is what
    the concrete clock/shift realization W_k = zeta^{-k1 k2} Z^{k1} X^{k2}
    produces when the label k+l wraps around; dropping it breaks
    associativity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .zmod import ModScalar, ModVec2, ModulusMismatch, _check_d

Vec = tuple[int, int]


@dataclass(frozen=True)
class MultiIndex:
    """Finitely supported map site -> Z_d^2 \\ {0}, sites strictly increasing."""

    d: int
    letters: tuple[tuple[int, Vec], ...]

    def __post_init__(self):
        _check_d(self.d)
        sites = [s for s, _ in self.letters]
        if sites != sorted(set(sites)):
            raise ValueError("letter sites must be strictly increasing")
        norm = []
        for s, (k1, k2) in self.letters:
            k = (k1 % self.d, k2 % self.d)
            if k != (0, 0):
                norm.append((int(s), k))
        object.__setattr__(self, "letters", tuple(norm))

    @classmethod
    def empty(cls, d: int) -> "MultiIndex":
        return cls(d, ())

    @classmethod
    def singleton(cls, d: int, site: int, k: Vec) -> "MultiIndex":
        return cls(d, ((site, k),))

    @classmethod
    def from_dict(cls, d: int, support: dict[int, Vec]) -> "MultiIndex":
        return cls(d, tuple(sorted(support.items())))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.letters)

    def vec(self, site: int) -> ModVec2:
        for s, k in self.letters:
            if s == site:
                return ModVec2(k[0], k[1], self.d)
        return ModVec2(0, 0, self.d)

    def is_empty(self) -> bool:
        return not self.letters

    def width(self) -> int:
        return len(self.letters)

    def shift(self, n: int) -> "MultiIndex":
        return MultiIndex(self.d, tuple((s + n, k) for s, k in self.letters))

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        if self.d != other.d:
            raise ModulusMismatch(f"moduli differ: {self.d} vs {other.d}")
        acc = {s: k for s, k in self.letters}
        for s, (l1, l2) in other.letters:
            k1, k2 = acc.get(s, (0, 0))
            acc[s] = ((k1 + l1) % self.d, (k2 + l2) % self.d)
        return MultiIndex(self.d, tuple(sorted((s, k) for s, k in acc.items())))

    def __neg__(self) -> "MultiIndex":
        return MultiIndex(self.d, tuple((s, (-k1 % self.d, -k2 % self.d))
                                        for s, (k1, k2) in self.letters))

    def to_json(self) -> str:
        return json.dumps({"d": self.d,
                           "support": [[s, k[0], k[1]] for s, k in self.letters]})

    @classmethod
    def from_json(cls, text: str) -> "MultiIndex":
        obj = json.loads(text)
        return cls(int(obj["d"]),
                   tuple((int(s), (int(k1), int(k2))) for s, k1, k2 in obj["support"]))

    def label(self) -> str:
        return ";".join(f"{s}:{k[0]},{k[1]}" for s, k in self.letters) or "1"


def parse_word(spec: str, d: int) -> MultiIndex:
    """Parse 'site:k1,k2[;site:k1,k2...]'; '1' or '' is the empty word."""
    spec = spec.strip()
    if spec in ("", "1"):
        return MultiIndex.empty(d)
    letters = []
    for part in spec.split(";"):
        site, _, vec = part.partition(":")
        k1, _, k2 = vec.partition(",")
        letters.append((int(site), (int(k1), int(k2))))
    return MultiIndex(d, tuple(sorted(letters)))


@dataclass(frozen=True)
class Phase:
    """Element of Z_{2d}: the phase zeta^numerator, zeta = e^{i pi/d}."""

    numerator: int
    d: int

    def __post_init__(self):
        _check_d(self.d)
        object.__setattr__(self, "numerator", self.numerator % (2 * self.d))

    def __add__(self, other: "Phase") -> "Phase":
        if self.d != other.d:
            raise ModulusMismatch(f"moduli differ: {self.d} vs {other.d}")
        return Phase(self.numerator + other.numerator, self.d)

    def __neg__(self) -> "Phase":
        return Phase(-self.numerator, self.d)

    def to_complex(self) -> complex:
        return complex(np.exp(1j * np.pi * self.numerator / self.d))


# ---------------------------------------------------------------------------
# twists

def twist_u(I: MultiIndex, J: MultiIndex, n: int, seq) -> ModScalar:
    """d * u_n(I;J) mod d: numerator of the commutation exponent between
    W_I and the n-shifted W_J, sum of sigma(k_a, A_{b+n-a} l_b) over letters."""
    if I.d != J.d or I.d != seq.d:
        raise ModulusMismatch("word/sequence moduli differ")
    d = I.d
    tot = 0
    for a, (k1, k2) in I.letters:
        for b, (l1, l2) in J.letters:
            m = seq.matrix(b + n - a)
            i1 = m.a11 * l1 + m.a12 * l2
            i2 = m.a21 * l1 + m.a22 * l2
            tot += k1 * i2 - k2 * i1
    return ModScalar(tot, d)


def twist_profile(word: MultiIndex, seq, n_samples: int) -> np.ndarray:
    """Vector of numerators d*u_n(word) mod d for n = 0 .. n_samples-1.

    u_n(word) = u_n(word; word) drives the phase process v_n studied by the
    spectral layer; this is the batched version of twist_u for I = J.
    """
    if word.d != seq.d:
        raise ModulusMismatch("word/sequence moduli differ")
    d = word.d
    tau = np.zeros(n_samples, dtype=np.int64)
    for sa, (k1, k2) in word.letters:
        for sb, (l1, l2) in word.letters:
            delta = sb - sa
            a = seq.array(delta, delta + n_samples)
            i1 = a[:, 0, 0] * l1 + a[:, 0, 1] * l2
            i2 = a[:, 1, 0] * l1 + a[:, 1, 1] * l2
            tau += k1 * i2 - k2 * i1
    return tau % d


def commutation_phase(I: MultiIndex, J: MultiIndex, n: int, seq) -> Phase:
    """Phase of W_I alpha^n(W_J) relative to alpha^n(W_J) W_I, as a Z_{2d}
    element (numerator 2 * d * u_n(I;J))."""
    return Phase(2 * twist_u(I, J, n, seq).value, I.d)


# ---------------------------------------------------------------------------
# group elements and the exact product

@dataclass(frozen=True)
class GroupElement:
    """zeta^phase * W_index over a fixed defining sequence."""

    phase: Phase
    index: MultiIndex
    seq: object

    def __post_init__(self):
        if self.phase.d != self.index.d or self.index.d != self.seq.d:
            raise ModulusMismatch("phase/index/sequence moduli differ")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)


def identity(seq) -> GroupElement:
    return GroupElement(Phase(0, seq.d), MultiIndex.empty(seq.d), seq)


def letter(seq, site: int, k: Vec) -> GroupElement:
    return GroupElement(Phase(0, seq.d), MultiIndex.singleton(seq.d, site, k), seq)


def element(seq, index: MultiIndex, numerator: int = 0) -> GroupElement:
    return GroupElement(Phase(numerator, seq.d), index, seq)


def _fuse(k: Vec, l: Vec, d: int) -> tuple[int, Vec]:
    """Same-site fusion W_k W_l = zeta^c W_r; returns (c mod 2d, r).

    Mirrors the concrete section of spinchain.weyl_matrix exactly: for odd d
    the section is label-periodic and c = (d+1)*sigma(k,l); for even d the
    zeta^{-k1 k2} section picks up carry signs when the label sum wraps.
    """
    s1, s2 = k[0] + l[0], k[1] + l[1]
    r = (s1 % d, s2 % d)
    sig = k[0] * l[1] - k[1] * l[0]
    if d % 2:
        return ((d + 1) * sig) % (2 * d), r
    e1, e2 = s1 // d, s2 // d
    return (sig + d * (e1 * r[1] + e2 * r[0] + d * e1 * e2)) % (2 * d), r


def _swap(k: Vec, l: Vec, m: int, seq) -> int:
    """Phase numerator (mod 2d) for W^{(p)}_k W^{(q)}_l -> W^{(q)}_l W^{(p)}_k,
    m = q - p."""
    a = seq.matrix(m)
    i1 = a.a11 * l[0] + a.a12 * l[1]
    i2 = a.a21 * l[0] + a.a22 * l[1]
    return (2 * (k[0] * i2 - k[1] * i1)) % (2 * seq.d)


def multiply(x: GroupElement, y: GroupElement) -> GroupElement:
    """Normal-ordered product. Exact in Z_{2d}; same defining sequence required."""
    if x.seq != y.seq:
        raise ModulusMismatch("elements live over different defining sequences")
    seq, d = x.seq, x.index.d
    two_d = 2 * d
    letters: list[tuple[int, Vec]] = list(x.index.letters)
    num = x.phase.numerator + y.phase.numerator
    for site_q, l in y.index.letters:
        i = len(letters)
        while i > 0 and letters[i - 1][0] > site_q:
            p, k = letters[i - 1]
            num += _swap(k, l, site_q - p, seq)
            i -= 1
        if i > 0 and letters[i - 1][0] == site_q:
            _, k = letters.pop(i - 1)
            c, r = _fuse(k, l, d)
            num += c
            if r != (0, 0):
                letters.insert(i - 1, (site_q, r))
        else:
            letters.insert(i, (site_q, l))
        num %= two_d
    return GroupElement(Phase(num, d), MultiIndex(d, tuple(letters)), seq)


def cocycle(I: MultiIndex, J: MultiIndex, seq) -> Phase:
    """omega(I;J): phase of W_I W_J relative to W_{I+J}. Satisfies the
    2-cocycle identity (additively, exactly in Z_{2d}):
    omega(I1,I2+I3) + omega(I2,I3) = omega(I1+I2,I3) + omega(I1,I2)."""
    return multiply(element(seq, I), element(seq, J)).phase


def shift(x: GroupElement, n: int) -> GroupElement:
    """The lattice-translation automorphism alpha^n."""
    return GroupElement(x.phase, x.index.shift(n), x.seq)


def inverse(x: GroupElement) -> GroupElement:
    """Group inverse; equals the adjoint since the letters are unitary."""
    neg = -x.index
    w = -(x.phase + cocycle(x.index, neg, x.seq))
    return GroupElement(w, neg, x.seq)


def trace(x: GroupElement) -> complex:
    """The canonical tracial state: zeta^phase on the empty word, else 0."""
    return x.phase.to_complex() if x.index.is_empty() else 0.0
