"""Doubled-chain embedding of the twisted letters with commuting tails.

A letter at lattice point m becomes a tensor product over chain sites: two
core factors at sites 2m and 2m+1 carrying the label k, and a left tail of
shift-type factors (labels of the form (0, .)) at sites 2m-2n, 2m-2n+1 for
n = 1..T built from A_n k. Tails of distinct letters commute among
themselves by construction, so all cross-letter twists come from core/tail
overlaps. The lattice shift acts as translation by 2 chain sites.

Two label conventions are provided. "symplectic" places (k2, -k1) on the
odd core site and (0, a_n), (0, -b_n) on the tail pair, which makes the
dense commutation phases reproduce the algebraic twists exactly.
"direct" places (k2, k1) and (0, b_n), (0, a_n) instead; it fails the
phase oracle (it produces k.(A_m l) where the twist is the symplectic
form) and is kept only so the mismatch stays measurable in tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import seqgen
from .spinchain import (DimensionCapExceeded, sitewise_commutation_phase,
                        weyl_matrix)

JW_DENSE_CAP = 4096  # 2**12: twelve d=2 chain sites

CONVENTIONS = ("symplectic", "direct")


@dataclass(frozen=True)
class JWEmbedding:
    """Finite tensor-product operator: site -> Weyl label, zeros omitted."""

    d: int
    factors: tuple  # ((site, (k1, k2)), ...) site-ascending, labels nonzero
    T: int
    step: int = 2  # chain sites per lattice step

    def __post_init__(self):
        sites = [s for s, _ in self.factors]
        if sites != sorted(set(sites)):
            raise ValueError("factor sites must be strictly increasing")

    @property
    def window(self) -> tuple[int, int]:
        """Smallest site interval containing every factor (identity if empty)."""
        if not self.factors:
            return (0, 0)
        return (self.factors[0][0], self.factors[-1][0])

    def label(self, site: int) -> tuple[int, int]:
        for s, k in self.factors:
            if s == site:
                return k
        return (0, 0)

    def shift(self, n: int) -> "JWEmbedding":
        """Lattice translation by n points (n*step chain sites)."""
        moved = tuple((s + n * self.step, k) for s, k in self.factors)
        return JWEmbedding(self.d, moved, self.T, self.step)

    def to_json(self) -> str:
        return json.dumps({"d": self.d, "T": self.T, "step": self.step,
                           "factors": [[s, k[0], k[1]] for s, k in self.factors]})

    @classmethod
    def from_json(cls, text: str) -> "JWEmbedding":
        obj = json.loads(text)
        facs = tuple((int(s), (int(a), int(b))) for s, a, b in obj["factors"])
        return cls(int(obj["d"]), facs, int(obj["T"]), int(obj.get("step", 2)))


def jw_embed(m: int, k, seq: seqgen.DefiningSequence, T: int,
             convention: str = "symplectic") -> JWEmbedding:
    """Embed the letter with label k at lattice point m, tail depth T.

    Phases between embeddings are exact for any pair of words whose
    lattice separations do not exceed T; deeper tails only add factors
    that commute with everything tested.
    """
    if T < 0:
        raise ValueError(f"tail depth must be nonnegative, got {T}")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}, want one of {CONVENTIONS}")
    d = seq.d
    k1, k2 = (k.as_tuple() if hasattr(k, "as_tuple") else (k[0] % d, k[1] % d))
    if (k1, k2) == (0, 0):
        return JWEmbedding(d, (), T)
    facs = []
    if T > 0:
        mats = seq.array(1, T + 1)  # A_1..A_T
        b = (mats[:, 0, 0] * k1 + mats[:, 0, 1] * k2) % d
        a = (mats[:, 1, 0] * k1 + mats[:, 1, 1] * k2) % d
        for n in range(T, 0, -1):
            if convention == "symplectic":
                even, odd = (0, int(a[n - 1])), (0, (-int(b[n - 1])) % d)
            else:
                even, odd = (0, int(b[n - 1])), (0, int(a[n - 1]))
            if even != (0, 0):
                facs.append((2 * m - 2 * n, even))
            if odd != (0, 0):
                facs.append((2 * m - 2 * n + 1, odd))
    facs.append((2 * m, (k1, 0)))
    core_odd = (k2, (-k1) % d) if convention == "symplectic" else (k2, k1)
    if core_odd != (0, 0):
        facs.append((2 * m + 1, core_odd))
    facs = [(s, k_) for s, k_ in facs if k_ != (0, 0)]
    return JWEmbedding(d, tuple(facs), T)


def jw_word(word, seq: seqgen.DefiningSequence, T: int,
            convention: str = "symplectic") -> list[JWEmbedding]:
    """One embedding per letter, in site order; evaluate products densely."""
    return [jw_embed(m, k, seq, T, convention) for m, k in word.letters]


def price_powers_letter(m: int, bits: seqgen.Bitstream, T: int) -> JWEmbedding:
    """Single-chain binary letter: Z at site m, X at site m-n wherever the
    bit g(n) is 1, n = 1..T.

    This is the doubled-chain embedding of the (0,1) letter after deleting
    the sites whose factors are shift-type for every generator (they cannot
    influence any commutation relation) and relabeling. Letters satisfy
    e_m = e_m*, e_m^2 = 1 and e_k e_p = (-1)^{g(|p-k|)} e_p e_k.
    """
    if T < 0:
        raise ValueError(f"tail depth must be nonnegative, got {T}")
    g = bits.bits(1, T + 1)
    facs = [(m - n, (0, 1)) for n in range(T, 0, -1) if g[n - 1]]
    facs.append((m, (1, 0)))
    return JWEmbedding(2, tuple(facs), T, step=1)


# ---------------------------------------------------------------------------
# dense evaluation on a finite window

def union_window(embs: list[JWEmbedding]) -> tuple[int, int]:
    los = [e.window[0] for e in embs if e.factors]
    his = [e.window[1] for e in embs if e.factors]
    if not los:
        return (0, 0)
    return (min(los), max(his))


def site_factors(embs: list[JWEmbedding], window: tuple[int, int] | None = None
                 ) -> tuple[list[np.ndarray], tuple[int, int]]:
    """Per-site d x d factors of the ordered product of the embeddings."""
    if not embs:
        raise ValueError("need at least one embedding")
    d = embs[0].d
    if any(e.d != d for e in embs):
        raise ValueError("mixed moduli")
    lo, hi = union_window(embs) if window is None else window
    factors = [np.eye(d, dtype=complex) for _ in range(lo, hi + 1)]
    for e in embs:
        for s, k in e.factors:
            if not lo <= s <= hi:
                raise ValueError(f"factor at site {s} outside window [{lo},{hi}]")
            factors[s - lo] = factors[s - lo] @ weyl_matrix(k[0], k[1], d)
    return factors, (lo, hi)


def dense(embs: list[JWEmbedding], window: tuple[int, int] | None = None,
          cap: int = JW_DENSE_CAP) -> np.ndarray:
    """Dense matrix of the ordered product on the window (default: union)."""
    factors, (lo, hi) = site_factors(embs, window)
    d = embs[0].d
    if d ** (hi - lo + 1) > cap:
        raise DimensionCapExceeded(
            f"window [{lo},{hi}] gives dense dimension {d ** (hi - lo + 1)} > cap {cap}")
    return reduce(np.kron, factors)


def commutation_phase(x: list[JWEmbedding], y: list[JWEmbedding]):
    """Phase c with X Y = c Y X for the two embedded words, plus the worst
    per-site proportionality residual. Exact for any window size."""
    lo, hi = union_window(list(x) + list(y))
    fx, _ = site_factors(x, (lo, hi))
    fy, _ = site_factors(y, (lo, hi))
    return sitewise_commutation_phase(fx, fy)


def product_state_expectation(embs: list[JWEmbedding], psi: np.ndarray):
    """<psi x psi x ...| product of embeddings |psi x psi x ...> on the
    union window, together with the per-site factor magnitudes.

    The state is the same unit vector psi at every chain site, so the
    expectation factorizes; the magnitude list makes tail decay visible.
    """
    psi = np.asarray(psi, dtype=complex)
    d = embs[0].d
    if psi.shape != (d,):
        raise ValueError(f"state must have shape ({d},), got {psi.shape}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise ValueError("state vector must have unit norm")
    factors, (lo, hi) = site_factors(embs)
    value = 1.0 + 0j
    mags = []
    for f in factors:
        amp = complex(psi.conj() @ f @ psi)
        value *= amp
        mags.append(abs(amp))
    return value, mags


def shift_eigenvector(d: int) -> np.ndarray:
    """Unit eigenvector of the shift-type Weyl matrix W_{(0,1)} (eigenvalue 1).

    Every nontrivial embedded word has some site whose factor is clock-type
    there, so the product state built from this vector kills it: the
    expectation functional is already tracial.
    """
    return np.ones(d, dtype=complex) / np.sqrt(d)
