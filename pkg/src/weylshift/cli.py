"""Command-line front end.

Subcommands: gen, table, verify, jw, spectrum, verdict, trace. Outputs are
machine-first (JSONL/JSON/CSV); the spectral commands also render PNG
figures next to the delimited files. Exit codes: 0 success, 1 failed
verification, 2 configuration error, 3 mathematical-constraint violation,
4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import jordanwigner, report, seqgen, spectrum, spinchain, words
from .zmod import NonPrimeModulus

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_CONSTRAINT = 3
EXIT_CAP = 4


def _load_seq(spec: str) -> seqgen.DefiningSequence:
    return seqgen.parse_spec(spec)


def parse_word_family(spec: str, d: int, seed: int,
                      n_random_sites: int = 4) -> list[words.MultiIndex]:
    """'auto:singletons[+random:N[:WIDTH]]' or 'file:PATH' (one word per line)
    or an explicit word in the 'site:k1,k2;...' grammar."""
    if spec.startswith("auto:"):
        fam: list[words.MultiIndex] = []
        for part in spec[len("auto:"):].split("+"):
            if part == "singletons":
                fam.extend(spectrum.singleton_family(d))
            elif part.startswith("random:"):
                fields = part.split(":")
                count = int(fields[1])
                width = int(fields[2]) if len(fields) > 2 else 2
                fam.extend(spectrum.random_word_family(
                    d, count, width=width, n_sites=n_random_sites, seed=seed))
            else:
                raise ValueError(f"unknown family component {part!r}")
        return fam
    if spec.startswith("file:"):
        path = spec[len("file:"):]
        cache = os.environ.get("WEYLSHIFT_CACHE_DIR")
        if not os.path.exists(path) and cache:
            alt = os.path.join(cache, path)
            if os.path.exists(alt):
                path = alt
        with open(path) as fh:
            return [words.parse_word(line.strip(), d)
                    for line in fh if line.strip()]
    return [words.parse_word(spec, d)]


# ---------------------------------------------------------------------------
# subcommands

def cmd_gen(args) -> int:
    seq = _load_seq(args.seq)
    seqgen.write_jsonl(seq, args.N, args.out)
    print(f"wrote {args.N} matrices (d={seq.d}) to {args.out}")
    return EXIT_OK


def cmd_table(args) -> int:
    seq = _load_seq(args.seq)
    table = spinchain.build_rep_table(seq, args.sites)
    with open(args.out, "w") as fh:
        fh.write(table.to_json() + "\n")
    print(f"wrote table d={table.d} sites=0..{table.N} to {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    seq = _load_seq(args.seq)
    table = spinchain.build_rep_table(seq, args.sites)
    if not spinchain.check_sympl_sum(table):
        print("symplectic sum identity FAILED", file=sys.stderr)
        return EXIT_FAILED
    rep = spinchain.verify_relations(table, samples=args.samples,
                                     seed=args.seed, cap=args.cap, seq=seq)
    jw_dev = _verify_jw(seq, args.samples // 2, args.seed)
    config = report.RunConfig(
        command="verify", seq=args.seq, N=args.sites, tol=args.tol,
        cap=args.cap, seed=args.seed,
        extra={"samples": args.samples})
    body = {
        "table": {"d": table.d, "sites": table.N + 1,
                  "det_sums": table.det_sums()},
        "chain_max_deviation": round(rep.max_deviation, 15),
        "chain_max_residual": round(rep.max_residual, 15),
        "jw_max_deviation": round(jw_dev, 15),
        "passed": bool(rep.ok(args.tol) and jw_dev <= args.tol),
    }
    if args.out:
        report.dump_json(args.out, report.sidecar(config, body))
    print(f"chain deviation {rep.max_deviation:.3e}, "
          f"jw deviation {jw_dev:.3e} (tol {args.tol:g})")
    return EXIT_OK if body["passed"] else EXIT_FAILED


def _verify_jw(seq, samples: int, seed: int) -> float:
    """Worst phase deviation of the doubled-chain route on random word pairs."""
    rng = np.random.default_rng(seed)
    d = seq.d
    worst = 0.0
    for _ in range(max(1, samples)):
        def rand_word():
            width = int(rng.integers(1, 3))
            sites = sorted(int(s) for s in rng.choice(4, size=width, replace=False))
            ls = []
            for s in sites:
                k = (int(rng.integers(0, d)), int(rng.integers(0, d)))
                ls.append((s, k if k != (0, 0) else (0, 1)))
            return words.MultiIndex(d, tuple(ls))
        I, J = rand_word(), rand_word()
        x = jordanwigner.jw_word(I, seq, T=4)
        y = jordanwigner.jw_word(J, seq, T=4)
        phase, res = jordanwigner.commutation_phase(x, y)
        expected = words.commutation_phase(I, J, 0, seq).to_complex()
        worst = max(worst, abs(phase - expected), res)
    return worst


def cmd_jw(args) -> int:
    seq = _load_seq(args.seq)
    try:
        m_s, k1_s, k2_s = args.letter.split(",")
    except ValueError:
        raise ValueError(f"--letter wants 'm,k1,k2', got {args.letter!r}")
    emb = jordanwigner.jw_embed(int(m_s), (int(k1_s), int(k2_s)), seq,
                                args.tail, convention=args.convention)
    with open(args.out, "w") as fh:
        fh.write(emb.to_json() + "\n")
    print(f"wrote embedding with {len(emb.factors)} factors on "
          f"window {emb.window} to {args.out}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    seq = _load_seq(args.seq)
    word = words.parse_word(args.word, seq.d)
    v = spectrum.phase_sequence(word, seq, args.N)
    rep = spectrum.fourier_bohr(v, c=args.c, keep_grid=True)
    corr = spectrum.partial_corr(v, args.K)
    psd = spectrum.positive_definite_check(corr, M=min(32, args.K))
    config = report.RunConfig(command="spectrum", seq=args.seq, N=args.N,
                              words=args.word, c=args.c, seed=args.seed,
                              K=args.K)
    base, _ = os.path.splitext(args.out)
    report.write_spectrum_csv(args.out, rep)
    body = rep.to_dict()
    body["positive_definite"] = bool(psd)
    if args.double_avg is not None:
        Ns = [args.N // 4, args.N // 2, args.N]
        Ks = [args.K // 2, args.K]
        table = spectrum.double_average_table(v, args.double_avg, Ks, Ns)
        body["double_average"] = {
            "lambda": args.double_avg, "Ks": Ks, "Ns": Ns,
            "table": [[round(float(x), 12) for x in row] for row in table],
        }
    report.dump_json(base + ".json", report.sidecar(config, body))
    report.render_spectrum_png(base + ".png", rep)
    peaks = ", ".join(f"{l:.6f} ({a:.4f})" for l, a in rep.peaks) or "none"
    print(f"N={args.N} threshold={rep.threshold:.4f} peaks: {peaks}")
    print(f"wrote {args.out}, {base}.json, {base}.png")
    return EXIT_OK


def cmd_verdict(args) -> int:
    seq = _load_seq(args.seq)
    family = parse_word_family(args.words, seq.d, args.seed)
    if not family:
        raise ValueError("word family is empty")
    reports = spectrum.spectral_reports(seq, family, args.N, c=args.c,
                                        threads=args.threads)
    vd = spectrum.verdict(reports, p0_margin=args.delta)
    config = report.RunConfig(command="verdict", seq=args.seq, N=args.N,
                              words=args.words, c=args.c, delta=args.delta,
                              seed=args.seed, threads=args.threads)
    base, _ = os.path.splitext(args.out)
    body = vd.to_dict()
    body["reports"] = [r.to_dict() for r in reports]
    report.dump_json(args.out, report.sidecar(config, body))
    report.write_verdict_csv(base + ".csv", reports)
    report.render_verdict_png(base + ".png", reports, vd)
    print(f"{vd.status} over {len(family)} words ({vd.note})")
    for e in vd.evidence:
        if not e.ok:
            print(f"  {e.word_label}: {e.reason}")
    print(f"wrote {args.out}, {base}.csv, {base}.png")
    return EXIT_OK


def cmd_trace(args) -> int:
    seq = _load_seq(args.seq)
    element = words.identity(seq)
    for spec in args.word:
        w = words.parse_word(spec, seq.d)
        element = words.multiply(element, words.element(seq, w))
    tr = words.trace(element)
    payload = {
        "words": args.word,
        "product": element.index.label(),
        "phase_numerator": element.phase.numerator,
        "phase_denominator": 2 * seq.d,
        "trace": [round(tr.real, 15), round(tr.imag, 15)],
    }
    if args.out:
        report.dump_json(args.out, payload)
    print(json.dumps(payload))
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="weylshift",
        description="Twisted shift algebras on a lattice: defining sequences, "
                    "finite representations, and spectral invariant-state tests.")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--seq", required=True,
                        help="sequence spec, e.g. bernoulli:d=3,seed=7 or file:seq.jsonl")
        sp.add_argument("--seed", type=int, default=0)

    g = sub.add_parser("gen", help="write a defining sequence to JSONL")
    add_common(g)
    g.add_argument("--N", type=int, required=True, help="entries A_1..A_N")
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_gen)

    t = sub.add_parser("table", help="solve the spin-chain label table")
    add_common(t)
    t.add_argument("--sites", type=int, required=True)
    t.add_argument("--out", required=True)
    t.set_defaults(fn=cmd_table)

    v = sub.add_parser("verify", help="dense oracle checks of the twists")
    add_common(v)
    v.add_argument("--sites", type=int, default=4)
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--tol", type=float, default=1e-9)
    v.add_argument("--cap", type=int, default=spinchain.DENSE_CAP)
    v.add_argument("--threads", type=int, default=1)
    v.add_argument("--out", default="")
    v.set_defaults(fn=cmd_verify)

    j = sub.add_parser("jw", help="write a doubled-chain letter embedding")
    add_common(j)
    j.add_argument("--letter", required=True, help="m,k1,k2")
    j.add_argument("--tail", type=int, default=4)
    j.add_argument("--convention", choices=jordanwigner.CONVENTIONS,
                   default="symplectic")
    j.add_argument("--out", required=True)
    j.set_defaults(fn=cmd_jw)

    s = sub.add_parser("spectrum", help="Fourier amplitudes of a word's phases")
    add_common(s)
    s.add_argument("--word", required=True, help="site:k1,k2;... ('1' = empty)")
    s.add_argument("--N", type=int, default=16384)
    s.add_argument("--K", type=int, default=64)
    s.add_argument("--c", type=float, default=4.0)
    s.add_argument("--double-avg", type=float, default=None,
                   help="also tabulate the two-scale average at this frequency")
    s.add_argument("--out", required=True, help="CSV path; .json/.png land beside it")
    s.set_defaults(fn=cmd_spectrum)

    w = sub.add_parser("verdict", help="invariant-state evidence over a word family")
    add_common(w)
    w.add_argument("--words", default="auto:singletons+random:20")
    w.add_argument("--N", type=int, default=16384)
    w.add_argument("--c", type=float, default=4.0)
    w.add_argument("--delta", type=float, default=0.05)
    w.add_argument("--threads", type=int, default=1)
    w.add_argument("--out", required=True, help="JSON path; .csv/.png land beside it")
    w.set_defaults(fn=cmd_verdict)

    tr = sub.add_parser("trace", help="exact trace of a product of words")
    add_common(tr)
    tr.add_argument("--word", action="append", required=True)
    tr.add_argument("--out", default="")
    tr.set_defaults(fn=cmd_trace)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad usage already; normalize other codes
        return int(e.code) if e.code else EXIT_OK
    try:
        return args.fn(args)
    except spinchain.ConditionViolated as e:
        print(f"constraint violation: {e}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except spinchain.DimensionCapExceeded as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return EXIT_CAP
    except (NonPrimeModulus, ValueError, KeyError, IndexError, OSError,
            json.JSONDecodeError) as e:
        # IndexError covers finite file: sequences asked past their length
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
