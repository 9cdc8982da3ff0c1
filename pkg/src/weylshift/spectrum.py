"""Spectral analysis of the phase sequences attached to words.

For a word I the sequence v_n = e^{2 pi i u_n(I)/d} collects the exact
self-twists along the shift orbit. The tracial state is the only
shift-invariant state when, for every word, the Fourier-Bohr spectrum of
v(I) is empty or {0} with the zero-frequency mass not concentrated on the
trivial root. Everything here works from the exact integer phases; floats
enter only when forming averages.

Scalar ergodic sums use compensated summation (math.fsum); grid-wide
amplitude scans use the FFT, whose fixed butterfly order makes results
schedule-independent.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import seqgen
from .words import MultiIndex, twist_profile

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _csum(x: np.ndarray) -> complex:
    """Compensated sum of a complex array."""
    return complex(math.fsum(x.real), math.fsum(x.imag))


@dataclass
class PhaseSeq:
    """v_n = e^{2 pi i tau_n/d} with tau_n kept as exact integers mod d."""

    word: MultiIndex
    d: int
    N: int
    tau: np.ndarray = field(repr=False)      # int64, shape (N,)
    values: np.ndarray = field(repr=False)   # complex, shape (N,)
    seq_spec: str = ""


def phase_sequence(word: MultiIndex, seq: seqgen.DefiningSequence, N: int) -> PhaseSeq:
    if N < 1:
        raise ValueError(f"need N >= 1, got {N}")
    if word.d != seq.d:
        raise ValueError(f"word modulus {word.d} != sequence modulus {seq.d}")
    tau = twist_profile(word, seq, N)
    values = np.exp(2j * np.pi * tau / seq.d)
    return PhaseSeq(word=word, d=seq.d, N=N, tau=tau, values=values,
                    seq_spec=seq.spec)


# ---------------------------------------------------------------------------
# correlations

@dataclass
class CorrelationSeq:
    """s_k for 0 <= k <= K, averaged over in-range pairs; s_{-k} = s_k*."""

    s: np.ndarray  # complex, shape (K+1,)
    K: int
    N: int

    def at(self, k: int) -> complex:
        return complex(self.s[k]) if k >= 0 else complex(np.conj(self.s[-k]))


def partial_corr(v: PhaseSeq, K: int) -> CorrelationSeq:
    """s_k = (1/(N-k)) sum_{n<N-k} conj(v_n) v_{n+k}.

    Averaging over the in-range pairs only keeps pure-frequency sequences
    exact (v_n = e^{2 pi i n lambda} gives s_k = e^{2 pi i k lambda} with no
    edge bias); the O(k/N) departure from the zero-padded convention is far
    below the positive-definiteness tolerances used downstream.
    """
    N = v.N
    if K >= N:
        raise ValueError(f"need K < N, got K={K}, N={N}")
    vals = v.values
    s = np.empty(K + 1, dtype=complex)
    for k in range(K + 1):
        s[k] = _csum(np.conj(vals[:N - k]) * vals[k:]) / (N - k)
    return CorrelationSeq(s=s, K=K, N=N)


@dataclass
class DiagnosticsReport:
    """Partial averages at increasing cutoffs, with their oscillations.

    Row k = 0 tracks the running mean (1/N_j) sum v_n, the quantity whose
    Cesaro convergence can genuinely fail; rows k >= 1 track the lag-k
    partial correlations. flagged marks rows whose swing between some pair
    of successive checkpoints exceeds threshold_factor/sqrt(earlier N).
    """

    checkpoints: list[int]
    table: np.ndarray            # complex, shape (len(checkpoints), K+1)
    oscillation: np.ndarray      # float, shape (K+1,)
    flagged: np.ndarray          # bool, shape (K+1,)
    threshold_factor: float


def subsequence_diagnostics(v: PhaseSeq, K: int, checkpoints,
                            threshold_factor: float = 8.0) -> DiagnosticsReport:
    cps = sorted(int(c) for c in checkpoints)
    if not cps or cps[0] < K + 1 or cps[-1] > v.N:
        raise ValueError(f"checkpoints must lie in [{K + 1}, {v.N}]")
    rows = []
    for N in cps:
        row = np.empty(K + 1, dtype=complex)
        row[0] = _csum(v.values[:N]) / N
        for k in range(1, K + 1):
            row[k] = _csum(np.conj(v.values[:N - k]) * v.values[k:N]) / (N - k)
        rows.append(row)
    table = np.array(rows)
    if len(cps) > 1:
        swings = np.abs(np.diff(table, axis=0))
        oscillation = swings.max(axis=0)
        bounds = threshold_factor / np.sqrt(np.array(cps[:-1], dtype=float))
        flagged = (swings > bounds[:, None]).any(axis=0)
    else:
        oscillation = np.zeros(K + 1)
        flagged = np.zeros(K + 1, dtype=bool)
    return DiagnosticsReport(checkpoints=cps, table=table, oscillation=oscillation,
                             flagged=flagged, threshold_factor=threshold_factor)


def positive_definite_check(s: CorrelationSeq, M: int = 32, tol: float = 1e-8) -> bool:
    """Minimum eigenvalue of the (M+1) x (M+1) Hermitian Toeplitz matrix
    [s_{i-j}] is >= -tol."""
    if M > s.K:
        raise ValueError(f"need M <= K, got M={M}, K={s.K}")
    idx = np.subtract.outer(np.arange(M + 1), np.arange(M + 1))
    mat = np.where(idx >= 0, s.s[np.abs(idx)], np.conj(s.s[np.abs(idx)]))
    eigs = np.linalg.eigvalsh(mat)
    return bool(eigs[0] >= -tol)


@dataclass
class BochnerMeasure:
    """Smoothed correlation measure on [0,1), reduced to bin masses."""

    bins: int
    masses: np.ndarray       # float, shape (bins,), sums to ~1
    grid: np.ndarray = field(repr=False)      # fine density samples
    clipped_mass: float = 0.0                 # total negative lobe removed
    window: int = 0

    def bin_edges(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.bins + 1)

    def mass_near(self, x: float, radius: float) -> float:
        """Measure of the modular interval [x - radius, x + radius]."""
        g = np.arange(len(self.grid)) / len(self.grid)
        dist = np.minimum(np.abs(g - x % 1.0), 1.0 - np.abs(g - x % 1.0))
        return float(self.grid[dist <= radius].sum() / len(self.grid))


def bochner_measure(s: CorrelationSeq, window: int | None = None,
                    bins: int = 16, grid_size: int = 1024) -> BochnerMeasure:
    """Density estimate f(x) = sum_{|k|<=L} (1 - |k|/(L+1)) s_k e^{2 pi i k x}.

    The triangular taper keeps the estimate nonnegative up to finite-sample
    noise; whatever negative mass remains is clipped and reported, then the
    bin masses are renormalized to total s_0 = 1.
    """
    L = s.K if window is None else int(window)
    if L > s.K:
        raise ValueError(f"window {L} exceeds available lags {s.K}")
    k = np.arange(-L, L + 1)
    w = 1.0 - np.abs(k) / (L + 1.0)
    sk = np.concatenate([np.conj(s.s[L:0:-1]), s.s[:L + 1]])
    x = np.arange(grid_size) / grid_size
    # inversion of s_k = integral e^{2 pi i k x} dmu(x)
    f = (w * sk * np.exp(-2j * np.pi * np.outer(x, k))).sum(axis=1).real
    clipped = float(-f[f < 0].sum() / grid_size)
    f = np.clip(f, 0.0, None)
    total = f.sum() / grid_size
    if total > 0:
        f = f / total
    masses = f.reshape(bins, grid_size // bins).sum(axis=1) / grid_size
    return BochnerMeasure(bins=bins, masses=masses, grid=f,
                          clipped_mass=clipped, window=L)


# ---------------------------------------------------------------------------
# Fourier-Bohr spectrum and the invariant-state verdict

def amplitude(v: PhaseSeq, lam: float) -> float:
    """a_N(lambda) = |(1/N) sum v_n e^{-2 pi i n lambda}|."""
    n = np.arange(v.N)
    return abs(_csum(v.values * np.exp(-2j * np.pi * lam * n))) / v.N


def _refine(v: PhaseSeq, lam0: float, half_width: float, resolution: float):
    """Golden-section maximization of the amplitude near a grid candidate."""
    a, b = lam0 - half_width, lam0 + half_width
    c = b - GOLDEN * (b - a)
    d_ = a + GOLDEN * (b - a)
    fc, fd = amplitude(v, c), amplitude(v, d_)
    while b - a > resolution:
        if fc >= fd:
            b, d_, fd = d_, c, fc
            c = b - GOLDEN * (b - a)
            fc = amplitude(v, c)
        else:
            a, c, fc = c, d_, fd
            d_ = a + GOLDEN * (b - a)
            fd = amplitude(v, d_)
    lam = (a + b) / 2.0
    return lam % 1.0, amplitude(v, lam)


def default_threshold(N: int, c: float = 4.0) -> float:
    """Peak detection level c*sqrt(log N / N): the scale of the largest
    N-term average of bounded centered noise over N grid frequencies."""
    return c * math.sqrt(math.log(N) / N)


@dataclass
class SpectralReport:
    word_label: str
    seq_spec: str
    N: int
    threshold: float
    c: float
    peaks: list            # [(lambda, amplitude)], amplitude > threshold
    nu: complex            # empirical mean of v
    p: np.ndarray          # root-of-unity frequencies, shape (d,)
    counts: np.ndarray     # integer root counts, sums to N
    d: int
    grid_amp: np.ndarray = field(default=None, repr=False)  # |FFT|/N

    def zero_peak(self):
        """The detected peak at frequency 0, if any."""
        for lam, amp in self.peaks:
            if min(lam, 1.0 - lam) <= 0.5 / self.N:
                return (lam, amp)
        return None

    def offzero_peaks(self) -> list:
        return [p for p in self.peaks if min(p[0], 1.0 - p[0]) > 0.5 / self.N]

    def to_dict(self) -> dict:
        return {
            "word": self.word_label, "seq": self.seq_spec, "N": self.N,
            "d": self.d, "c": self.c, "threshold": round(self.threshold, 12),
            "peaks": [[round(l, 12), round(a, 12)] for l, a in self.peaks],
            "nu": [round(self.nu.real, 12), round(self.nu.imag, 12)],
            "p": [round(float(x), 12) for x in self.p],
            "counts": [int(x) for x in self.counts],
        }


def mean_nu(v: PhaseSeq):
    """Empirical mean as a combination of exact d-th roots.

    p_j is the frequency of tau_n = j among the integer phases, so sum p_j
    is exactly 1; nu = sum_j p_j e^{2 pi i j/d}.
    """
    counts = np.bincount(v.tau, minlength=v.d)
    p = counts / v.N
    nu = complex((p * np.exp(2j * np.pi * np.arange(v.d) / v.d)).sum())
    return nu, p, counts


def fourier_bohr(v: PhaseSeq, c: float = 4.0, refine_top: int = 5,
                 keep_grid: bool = False) -> SpectralReport:
    """Scan the Fourier grid, refine the leading candidates off-grid, and
    report every frequency whose amplitude clears the threshold."""
    if v.N < 64:
        raise ValueError(f"need N >= 64 for a meaningful grid, got {v.N}")
    N = v.N
    grid_amp = np.abs(np.fft.fft(v.values)) / N
    threshold = default_threshold(N, c)
    order = np.argsort(grid_amp)[::-1][:refine_top]
    resolution = 1.0 / (8.0 * N)
    candidates = [_refine(v, j / N, 1.0 / N, resolution) for j in order]
    peaks = []
    for lam, amp in sorted(candidates, key=lambda t: -t[1]):
        if amp <= threshold:
            continue
        if any(min(abs(lam - l0), 1.0 - abs(lam - l0)) < 0.5 / N for l0, _ in peaks):
            continue  # same peak found from a neighboring grid candidate
        peaks.append((lam, amp))
    peaks.sort()
    nu, p, counts = mean_nu(v)
    return SpectralReport(
        word_label=v.word.label(), seq_spec=v.seq_spec, N=N,
        threshold=threshold, c=c, peaks=peaks, nu=nu, p=p, counts=counts,
        d=v.d, grid_amp=grid_amp if keep_grid else None)


@dataclass
class WordEvidence:
    word_label: str
    ok: bool
    reason: str
    peaks: list
    p0: float


@dataclass
class Verdict:
    """Finite-N evidence for or against 'the trace is the only invariant
    state'; never a proof."""

    status: str              # "TracialOnly" | "Inconclusive"
    evidence: list           # [WordEvidence]
    N: int
    p0_margin: float

    @property
    def note(self) -> str:
        return f"evidence at N={self.N}, not a proof"

    def to_dict(self) -> dict:
        return {
            "status": self.status, "N": self.N, "p0_margin": self.p0_margin,
            "note": self.note,
            "evidence": [{
                "word": e.word_label, "ok": e.ok, "reason": e.reason,
                "peaks": [[round(l, 12), round(a, 12)] for l, a in e.peaks],
                "p0": round(e.p0, 12),
            } for e in self.evidence],
        }


def verdict(reports: list[SpectralReport], p0_margin: float = 0.05) -> Verdict:
    """TracialOnly iff every word shows an empty spectrum, or only the zero
    frequency with the trivial-root mass p_0 at most 1 - p0_margin."""
    if not reports:
        raise ValueError("need at least one spectral report")
    evidence = []
    for r in reports:
        p0 = float(r.p[0])
        off = r.offzero_peaks()
        if off:
            lam, amp = off[0]
            ev = WordEvidence(r.word_label, False,
                              f"peak at lambda={lam:.6f} (amplitude {amp:.4f})",
                              r.peaks, p0)
        elif not r.peaks:
            ev = WordEvidence(r.word_label, True, "empty spectrum", r.peaks, p0)
        elif p0 <= 1.0 - p0_margin:
            ev = WordEvidence(r.word_label, True,
                              f"only the zero frequency, p0={p0:.4f}", r.peaks, p0)
        else:
            ev = WordEvidence(r.word_label, False,
                              f"zero-frequency peak with p0={p0:.4f} > {1 - p0_margin}",
                              r.peaks, p0)
        evidence.append(ev)
    status = "TracialOnly" if all(e.ok for e in evidence) else "Inconclusive"
    return Verdict(status=status, evidence=evidence, N=reports[0].N,
                   p0_margin=p0_margin)


def spectral_reports(seq: seqgen.DefiningSequence, word_list: list[MultiIndex],
                     N: int, c: float = 4.0, threads: int = 1,
                     keep_grid: bool = False) -> list[SpectralReport]:
    """One report per word; word order is preserved, so results do not
    depend on the thread schedule."""
    def run(w):
        return fourier_bohr(phase_sequence(w, seq, N), c=c, keep_grid=keep_grid)
    if threads <= 1:
        return [run(w) for w in word_list]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(run, word_list))


def singleton_family(d: int, site: int = 0) -> list[MultiIndex]:
    """Every nonzero single-letter word at one site (d*d - 1 words)."""
    return [MultiIndex.singleton(d, site, (a, b))
            for a in range(d) for b in range(d) if (a, b) != (0, 0)]


def random_word_family(d: int, count: int, width: int = 2, n_sites: int = 4,
                       seed: int = 0) -> list[MultiIndex]:
    """Random distinct-site words of the given width on sites 0..n_sites-1."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        sites = sorted(int(s) for s in rng.choice(n_sites, size=width, replace=False))
        letters = []
        for s in sites:
            k = (int(rng.integers(0, d)), int(rng.integers(0, d)))
            if k == (0, 0):
                k = (1, 0)
            letters.append((s, k))
        out.append(MultiIndex(d, tuple(letters)))
    return out


def double_average(v: PhaseSeq, lam: float, K: int, N: int) -> complex:
    """(1/K) sum_{k<K} e^{2 pi i lam k} S_N(k): the two-scale average whose
    large-(N,K) behavior separates lambda = 0 from the rest."""
    if N > v.N or K > N:
        raise ValueError(f"need K <= N <= {v.N}")
    out = []
    for k in range(K):
        s_k = _csum(np.conj(v.values[:N - k]) * v.values[k:N]) / (N - k)
        out.append(np.exp(2j * np.pi * lam * k) * s_k)
    return complex(math.fsum(x.real for x in out) / K,
                   math.fsum(x.imag for x in out) / K)


def double_average_table(v: PhaseSeq, lam: float, Ks, Ns) -> np.ndarray:
    """|double_average| on a (K, N) checkpoint grid, rows K, columns N."""
    return np.array([[abs(double_average(v, lam, K, N)) for N in Ns] for K in Ks])
