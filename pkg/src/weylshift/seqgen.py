"""Defining sequences {A_n} of 2x2 matrices over Z_d.

A DefiningSequence fixes the cross-site twists of the chain: A_0 is always
the identity (enforced here, whatever the generator says) and negative
indices are served as A_{-n} = adjugate(A_n), which is what makes the twist
antisymmetric. Randomness is drawn from numpy's Philox counter-based
generator keyed by (seed, block) over fixed blocks of 4096 entries, so any
entry can be generated without touching the rest of the stream and results
are independent of access order.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field

import numpy as np

from .zmod import ModMat2, _check_d

BLOCK = 4096

_PP_FLIP = ((0, 1), (1, 0))  # the d=2 letter-swap matrix


def _philox(seed: int, block: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, block], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _adjugate_stack(mats: np.ndarray, d: int) -> np.ndarray:
    out = np.empty_like(mats)
    out[:, 0, 0] = mats[:, 1, 1]
    out[:, 0, 1] = -mats[:, 0, 1]
    out[:, 1, 0] = -mats[:, 1, 0]
    out[:, 1, 1] = mats[:, 0, 0]
    return out % d


class DefiningSequence:
    """Random-access view of {A_n}, n in Z, with block caching.

    block_fn(b) must return an int array of shape (BLOCK, 2, 2) holding
    A_{b*BLOCK} ... A_{(b+1)*BLOCK - 1} already reduced mod d; entry 0 of
    block 0 is overwritten with the identity. length, when not None, bounds
    the usable |n|.
    """

    def __init__(self, d: int, spec: str, block_fn, length: int | None = None):
        _check_d(d)
        self.d = d
        self.spec = spec
        self.length = length
        self._block_fn = block_fn
        self._blocks: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    def __eq__(self, other):
        return (isinstance(other, DefiningSequence)
                and self.d == other.d and self.spec == other.spec)

    def __hash__(self):
        return hash((self.d, self.spec))

    def __repr__(self):
        return f"DefiningSequence({self.spec!r})"

    def _block(self, b: int) -> np.ndarray:
        blk = self._blocks.get(b)
        if blk is None:
            with self._lock:
                blk = self._blocks.get(b)
                if blk is None:
                    blk = np.asarray(self._block_fn(b), dtype=np.int64) % self.d
                    if blk.shape != (BLOCK, 2, 2):
                        raise ValueError(f"block {b} has shape {blk.shape}")
                    if b == 0:
                        blk[0] = np.eye(2, dtype=np.int64)
                    blk.setflags(write=False)
                    self._blocks[b] = blk
        return blk

    def _positive(self, lo: int, hi: int) -> np.ndarray:
        """Entries A_lo .. A_{hi-1} for 0 <= lo <= hi."""
        if self.length is not None and hi - 1 > self.length:
            raise IndexError(
                f"sequence {self.spec} defined up to n={self.length}, asked for {hi - 1}")
        out = np.empty((hi - lo, 2, 2), dtype=np.int64)
        n = lo
        while n < hi:
            b, off = divmod(n, BLOCK)
            take = min(BLOCK - off, hi - n)
            out[n - lo:n - lo + take] = self._block(b)[off:off + take]
            n += take
        return out

    def array(self, lo: int, hi: int) -> np.ndarray:
        """Stacked entries A_n for n in [lo, hi), shape (hi-lo, 2, 2)."""
        if lo >= hi:
            return np.empty((0, 2, 2), dtype=np.int64)
        parts = []
        if lo < 0:
            # negative indices served as adjugates: need A_m for m in [max(1,1-hi), -lo]
            neg = self._positive(max(1, 1 - hi), -lo + 1)
            parts.append(_adjugate_stack(neg, self.d)[::-1])
        if hi > 0:
            parts.append(self._positive(max(lo, 0), hi))
        return np.concatenate(parts) if len(parts) > 1 else parts[0]

    def matrix(self, n: int) -> ModMat2:
        a = self.array(n, n + 1)[0]
        return ModMat2(int(a[0, 0]), int(a[0, 1]), int(a[1, 0]), int(a[1, 1]), self.d)


# ---------------------------------------------------------------------------
# generators

def constant(d: int, mat=None) -> DefiningSequence:
    """A_n = mat for all n >= 1 (identity when mat is None)."""
    m = np.eye(2, dtype=np.int64) if mat is None else np.asarray(mat, dtype=np.int64) % d
    tag = ".".join(str(int(x)) for x in m.ravel())
    return DefiningSequence(
        d, f"constant:d={d},mat={tag}",
        lambda b: np.broadcast_to(m, (BLOCK, 2, 2)).copy())


def zero(d: int) -> DefiningSequence:
    """The all-commuting sequence: A_n = 0 for n >= 1."""
    return DefiningSequence(
        d, f"zero:d={d}", lambda b: np.zeros((BLOCK, 2, 2), dtype=np.int64))


def periodic(d: int, mats) -> DefiningSequence:
    """A_n cycles through mats (A_1 = mats[0], ...)."""
    stack = np.asarray(mats, dtype=np.int64).reshape(-1, 2, 2) % d
    p = len(stack)
    tag = ";".join(".".join(str(int(x)) for x in m.ravel()) for m in stack)

    def block_fn(b):
        n = np.arange(b * BLOCK, (b + 1) * BLOCK)
        return stack[(n - 1) % p]

    return DefiningSequence(d, f"periodic:d={d},mats={tag}", block_fn)


def explicit(d: int, mats, spec: str | None = None) -> DefiningSequence:
    """A_1..A_N given explicitly (A_0 forced to identity); finite length."""
    stack = np.asarray(mats, dtype=np.int64).reshape(-1, 2, 2) % d
    n_max = len(stack)
    if spec is None:
        tag = ";".join(".".join(str(int(x)) for x in m.ravel()) for m in stack)
        spec = f"explicit:d={d},mats={tag}"

    def block_fn(b):
        out = np.zeros((BLOCK, 2, 2), dtype=np.int64)
        n = np.arange(b * BLOCK, (b + 1) * BLOCK)
        valid = (n >= 1) & (n <= n_max)
        out[valid] = stack[n[valid] - 1]
        return out

    return DefiningSequence(d, spec, block_fn, length=n_max)


def bernoulli(d: int, seed: int) -> DefiningSequence:
    """All four entries of A_n i.i.d. uniform on Z_d."""
    return DefiningSequence(
        d, f"bernoulli:d={d},seed={seed}",
        lambda b: _philox(seed, b).integers(0, d, size=(BLOCK, 2, 2), dtype=np.int64))


def bernoulli_constrained(d: int, seed: int) -> DefiningSequence:
    """Top row of A_n i.i.d. uniform, bottom row fixed to (0, 0).

    Keeps det(A_n) = 0, so the spin-chain determinant constraint holds at
    every column however long the chain is.
    """
    def block_fn(b):
        out = np.zeros((BLOCK, 2, 2), dtype=np.int64)
        out[:, 0, :] = _philox(seed, b).integers(0, d, size=(BLOCK, 2), dtype=np.int64)
        return out

    return DefiningSequence(d, f"bernoulli-constrained:d={d},seed={seed}", block_fn)


# ---------------------------------------------------------------------------
# d=2 bitstreams (Price-Powers)

def thue_morse_bits(lo: int, hi: int) -> np.ndarray:
    """t_n = parity of the binary digit sum of n, for n in [lo, hi)."""
    return np.array([int(n).bit_count() & 1 for n in range(lo, hi)], dtype=np.int64)


class Bitstream:
    """g: {1, 2, ...} -> {0, 1}; g(0) is fixed to 0 by convention."""

    def __init__(self, tag: str, fn):
        self.tag = tag
        self._fn = fn

    def bits(self, lo: int, hi: int) -> np.ndarray:
        out = np.asarray(self._fn(lo, hi), dtype=np.int64)
        if lo <= 0 < hi:
            out[-lo] = 0
        return out

    @classmethod
    def thue_morse(cls):
        return cls("thue-morse", thue_morse_bits)

    @classmethod
    def random(cls, seed: int):
        def fn(lo, hi):
            out = np.empty(hi - lo, dtype=np.int64)
            n = lo
            while n < hi:
                b, off = divmod(n, BLOCK)
                take = min(BLOCK - off, hi - n)
                blk = _philox(seed, b).integers(0, 2, size=BLOCK, dtype=np.int64)
                out[n - lo:n - lo + take] = blk[off:off + take]
                n += take
            return out
        return cls(f"random,seed={seed}", fn)

    @classmethod
    def cycle(cls, pattern: str):
        pat = np.array([int(c) for c in pattern], dtype=np.int64)
        if not len(pat) or set(pattern) - {"0", "1"}:
            raise ValueError(f"bad bit pattern {pattern!r}")

        def fn(lo, hi):
            n = np.arange(lo, hi)
            out = pat[(n - 1) % len(pat)]
            out = out.copy()
            out[n < 1] = 0
            return out
        return cls(f"cycle={pattern}", fn)

    @classmethod
    def explicit(cls, pattern: str):
        pat = np.array([int(c) for c in pattern], dtype=np.int64)
        if set(pattern) - {"0", "1"}:
            raise ValueError(f"bad bit pattern {pattern!r}")

        def fn(lo, hi):
            n = np.arange(lo, hi)
            out = np.zeros(hi - lo, dtype=np.int64)
            sel = (n >= 1) & (n <= len(pat))
            out[sel] = pat[n[sel] - 1]
            return out
        return cls(f"bits={pattern}", fn)


def price_powers(bitstream: Bitstream) -> DefiningSequence:
    """d=2 sequence A_n = identity when g(n) = 0, the swap matrix when g(n) = 1."""
    flip = np.array(_PP_FLIP, dtype=np.int64)
    eye = np.eye(2, dtype=np.int64)

    def block_fn(b):
        g = bitstream.bits(b * BLOCK, (b + 1) * BLOCK)
        return np.where(g[:, None, None] == 1, flip, eye)

    return DefiningSequence(2, f"pp:{bitstream.tag}", block_fn)


# ---------------------------------------------------------------------------
# spec grammar and file I/O

def parse_spec(spec: str) -> DefiningSequence:
    """Parse a sequence spec string.

    Grammar: 'bernoulli:d=3,seed=42' | 'bernoulli-constrained:d=3,seed=1'
    | 'pp:thue-morse' | 'pp:random,seed=7' | 'pp:cycle=10' | 'pp:bits=1101'
    | 'constant:d=3[,mat=a.b.c.e]' | 'periodic:d=3,mats=a.b.c.e;...'
    | 'zero:d=2' | 'file:path.jsonl'.
    """
    kind, _, rest = spec.partition(":")
    kind = kind.strip()
    if kind == "file":
        return load_jsonl(rest)
    if kind == "pp":
        if rest == "thue-morse":
            return price_powers(Bitstream.thue_morse())
        if rest.startswith("random"):
            opts = _parse_opts(rest.partition(",")[2])
            return price_powers(Bitstream.random(int(opts["seed"])))
        sub, _, arg = rest.partition("=")
        if sub == "cycle":
            return price_powers(Bitstream.cycle(arg))
        if sub == "bits":
            return price_powers(Bitstream.explicit(arg))
        raise ValueError(f"unknown pp bitstream {rest!r}")
    opts = _parse_opts(rest)
    if kind == "bernoulli":
        return bernoulli(int(opts["d"]), int(opts["seed"]))
    if kind in ("bernoulli-constrained", "bc"):
        return bernoulli_constrained(int(opts["d"]), int(opts["seed"]))
    if kind == "constant":
        mat = _parse_mat(opts["mat"]) if "mat" in opts else None
        return constant(int(opts["d"]), mat)
    if kind == "periodic":
        mats = [_parse_mat(m) for m in opts["mats"].split(";")]
        return periodic(int(opts["d"]), mats)
    if kind == "zero":
        return zero(int(opts["d"]))
    raise ValueError(f"unknown sequence kind {kind!r}")


def _parse_opts(rest: str) -> dict:
    opts = {}
    for part in filter(None, rest.split(",")):
        key, _, val = part.partition("=")
        opts[key.strip()] = val.strip()
    return opts


def _parse_mat(tag: str):
    vals = [int(x) for x in tag.split(".")]
    if len(vals) != 4:
        raise ValueError(f"matrix tag needs 4 entries, got {tag!r}")
    return np.array(vals, dtype=np.int64).reshape(2, 2)


def write_jsonl(seq: DefiningSequence, n_max: int, path: str) -> None:
    """Serialize A_1..A_{n_max} as JSON lines under a {'d': d} header."""
    mats = seq.array(1, n_max + 1)
    with open(path, "w") as fh:
        fh.write(json.dumps({"d": seq.d}) + "\n")
        for n in range(1, n_max + 1):
            fh.write(json.dumps({"n": n, "A": mats[n - 1].tolist()}) + "\n")


def load_jsonl(path: str) -> DefiningSequence:
    cache_dir = os.environ.get("WEYLSHIFT_CACHE_DIR")
    if not os.path.exists(path) and cache_dir:
        alt = os.path.join(cache_dir, path)
        if os.path.exists(alt):
            path = alt
    with open(path) as fh:
        header = json.loads(fh.readline())
        d = int(header["d"])
        entries = {}
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            entries[int(rec["n"])] = rec["A"]
    n_max = max(entries, default=0)
    mats = np.zeros((n_max, 2, 2), dtype=np.int64)
    for n, a in entries.items():
        if n >= 1:
            mats[n - 1] = np.asarray(a, dtype=np.int64)
    return explicit(d, mats, spec=f"file:{path}")


# ---------------------------------------------------------------------------
# typicality diagnostics

@dataclass
class TypicalityReport:
    word: "object"
    seq_spec: str
    n_samples: int
    mean: complex
    pair_means: np.ndarray = field(repr=False)
    gaps: np.ndarray = field(repr=False)

    @property
    def max_gap(self) -> float:
        return float(np.max(self.gaps)) if len(self.gaps) else 0.0


def typicality_test(seq: DefiningSequence, word, n_samples: int, max_lag: int) -> TypicalityReport:
    """Empirical Cesaro self-averaging and mixing of the word's phase process.

    mean = (1/N) sum v_n; for each lag 1 <= k <= max_lag the mixing gap is
    |(1/N) sum conj(v_n) v_{n+k} - |mean|^2|. Small gaps at all tested lags
    are the checkable shadow of the mean/mixing assumptions behind the
    spectral verdict. pair_means[0] is kept for reference (it is always 1)
    but excluded from the gaps: at lag zero the difference is the variance,
    not a mixing defect.
    """
    from .words import twist_profile

    tau = twist_profile(word, seq, n_samples + max_lag)
    v = np.exp(2j * np.pi * tau / seq.d)
    mean = complex(np.mean(v[:n_samples]))
    pair_means = np.empty(max_lag + 1, dtype=complex)
    for k in range(max_lag + 1):
        pair_means[k] = np.mean(np.conj(v[:n_samples]) * v[k:k + n_samples])
    gaps = np.abs(pair_means[1:] - abs(mean) ** 2)
    return TypicalityReport(word=word, seq_spec=seq.spec, n_samples=n_samples,
                            mean=mean, pair_means=pair_means, gaps=gaps)
