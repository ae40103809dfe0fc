"""Command line front end.

One subcommand per task: exact run counting (two independent methods, both
printed), prefix probabilities, run and shape sampling, level profiles,
explicit computation trees, the counting sequences, and an embedded
selftest.  Output is deterministic byte for byte given the same arguments
and seeds; all diagnostics go to stderr.

Exit codes: 0 ok, 1 usage or parse problem, 2 size budget exceeded,
3 selftest failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal
from fractions import Fraction

import mpmath as mp

from . import __version__
from . import counts, profiles, sampling, trees

SCI_SUFFIX_THRESHOLD = 10 ** 9
DEFAULT_SEED = 1

# sequences dumped by `seq`: first defined index, and whether an
# asymptotic-ratio column exists
SEQ_TABLE = {
    "catalan": (1, False),
    "increasing": (1, False),
    "mean_width": (1, True),
    "mean_size": (0, True),
    "m_cuts": (4, False),
    "r_seq": (3, False),
    "nonplane": (1, False),
    "geomean": (2, False),
}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; this tool reserves 2 for budget
    # overruns, so usage problems are remapped to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    p = _Parser(prog="mergeruns",
                description="Exact counting, profiling and sampling of interleaved runs.")
    p.add_argument("--version", action="version",
                   version=f"mergeruns {__version__} (rng {sampling.RNG_ALGORITHM})")
    sub = p.add_subparsers(dest="command", required=True)

    def term_args(sp):
        sp.add_argument("term", nargs="?", help="process term, e.g. 'a.(b || c.d)'")
        sp.add_argument("--input", metavar="PATH",
                        help="read the term from a file instead")
        sp.add_argument("--forest", action="store_true",
                        help="allow '||' at top level under a synthetic root")

    sp = sub.add_parser("count", help="number of complete runs, two methods")
    term_args(sp)
    sp.add_argument("--format", choices=["text", "json"], default="text")

    sp = sub.add_parser("prob", help="probability of a run prefix under uniform-run sampling")
    term_args(sp)
    sp.add_argument("--prefix", required=True, metavar="A,B,...",
                    help="comma-separated actions: label, label#id, or #id")
    sp.add_argument("--format", choices=["text", "json"], default="text")

    sp = sub.add_parser("sample", help="draw uniform complete runs")
    term_args(sp)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--samples", type=int, default=1, metavar="K")
    sp.add_argument("--freq", action="store_true",
                    help="append an empirical frequency table")
    sp.add_argument("--format", choices=["text", "json"], default="text")

    sp = sub.add_parser("profile", help="run prefix counts per level")
    term_args(sp)
    sp.add_argument("--oracle", action="store_true",
                    help="force the admissible-cut enumeration route")
    sp.add_argument("--format", choices=["csv", "json", "text"], default="csv")

    sp = sub.add_parser("semantic", help="expand the explicit computation tree")
    term_args(sp)
    sp.add_argument("--budget", type=int, default=trees.SEMANTIC_NODE_BUDGET,
                    help="maximum node count to materialize")
    sp.add_argument("--format", choices=["dot", "json", "text"], default="dot")

    sp = sub.add_parser("seq", help="counting sequences up to an index")
    sp.add_argument("name", choices=sorted(SEQ_TABLE))
    sp.add_argument("--to", type=int, required=True, metavar="N")
    sp.add_argument("--format", choices=["text", "json", "csv"], default="text")

    sp = sub.add_parser("gen", help="draw uniform random shapes")
    sp.add_argument("--size", type=int, required=True, metavar="N")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--count", type=int, default=1, metavar="K")
    sp.add_argument("--format", choices=["term", "dot", "json"], default="term")

    sub.add_parser("selftest", help="run the built-in consistency checks")
    return p


def _fmt_count(x: int) -> str:
    if x < SCI_SUFFIX_THRESHOLD:
        return str(x)
    return f"{x} (~{Decimal(x):.6e})"


def _fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _log10(x: int) -> float:
    # float(x) overflows beyond 1e308; mpf carries any magnitude
    return float(mp.log10(mp.mpf(x)))


def _parse_term(args) -> trees.SyntaxTree:
    if args.input is not None:
        if args.term is not None:
            raise ValueError("give a term or --input, not both")
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    elif args.term is not None:
        text = args.term
    else:
        raise ValueError("a term is required (positional or --input)")
    return trees.parse_process(text, allow_forest=args.forest)


def _resolve_action(t: trees.SyntaxTree, token: str) -> int:
    """label, label#id or #id -> node id."""
    token = token.strip()
    if "#" in token:
        label, _, raw = token.rpartition("#")
        try:
            v = int(raw)
        except ValueError:
            raise KeyError(f"bad node id in {token!r}")
        if not 1 <= v <= t.size:
            raise KeyError(f"node id {v} out of range 1..{t.size}")
        if label and t.label(v) != label:
            raise KeyError(f"node {v} is labelled {t.label(v)!r}, not {label!r}")
        return v
    return t.node_by_label(token)


def _cmd_count(args) -> int:
    t = _parse_term(args)
    hook = counts.hook_count(t)
    check = sampling.count_runs_via_probability(t)
    if hook != check:
        # both methods are exact; disagreement means a broken build
        raise RuntimeError(f"count methods disagree: {hook} vs {check}")
    if args.format == "json":
        print(json.dumps({"actions": t.size, "runs": hook,
                          "runs_via_probability": check, "agree": True},
                         sort_keys=True))
    else:
        print(_fmt_count(hook))
        print(f"cross-check (run probability method): {_fmt_count(check)}, agree")
    return 0


def _cmd_prob(args) -> int:
    t = _parse_term(args)
    sigma = [_resolve_action(t, tok) for tok in args.prefix.split(",")]
    rho = sampling.prefix_probability(t, sigma)
    if args.format == "json":
        print(json.dumps({"prefix": sigma,
                          "probability": [rho.numerator, rho.denominator],
                          "approx": float(rho)}, sort_keys=True))
    else:
        print(f"{_fmt_fraction(rho)} (~{float(rho):.6g})")
    return 0


def _run_tokens(t: trees.SyntaxTree, run) -> str:
    return " ".join(f"{t.label(v)}#{v}" for v in run)


def _cmd_sample(args) -> int:
    t = _parse_term(args)
    if args.samples < 1:
        raise ValueError("--samples must be at least 1")
    w = trees.annotate_weights(t)
    n = t.size
    rng = sampling.Rng(args.seed)
    runs = [sampling.sample_run(w, rng) for _ in range(args.samples)]
    if args.format == "json":
        payload = []
        for run in runs:
            ratios = [Fraction(w.weight(v), n - k) for k, v in enumerate(run)]
            payload.append({
                "actions": [f"{t.label(v)}#{v}" for v in run],
                "step_probabilities": [[q.numerator, q.denominator] for q in ratios],
            })
        doc = {"seed": args.seed, "runs": payload}
        if args.freq:
            freq: dict[str, int] = {}
            for run in runs:
                key = _run_tokens(t, run)
                freq[key] = freq.get(key, 0) + 1
            doc["frequency"] = dict(sorted(freq.items()))
        print(json.dumps(doc, sort_keys=True))
        return 0
    for run in runs:
        print(_run_tokens(t, run))
    if args.freq:
        freq = {}
        for run in runs:
            key = _run_tokens(t, run)
            freq[key] = freq.get(key, 0) + 1
        for key in sorted(freq):
            print(f"freq {freq[key]} {key}")
    return 0


def _cmd_profile(args) -> int:
    t = _parse_term(args)
    prof = profiles.level_profile(t, method="oracle" if args.oracle else "fast")
    if args.format == "json":
        print(json.dumps({"levels": list(prof),
                          "log10": [round(_log10(c), 6) for c in prof]}))
    elif args.format == "text":
        for level, c in enumerate(prof):
            print(f"{level} {_fmt_count(c)}")
    else:
        print("level,count")
        for level, c in enumerate(prof):
            print(f"{level},{c}")
    return 0


def _cmd_semantic(args) -> int:
    t = _parse_term(args)
    sem = trees.build_semantic_tree(t, node_budget=args.budget)
    if args.format == "json":
        print(json.dumps({"nodes": sem.node_count,
                          "branches": sem.leaf_count(),
                          "levels": list(sem.level_counts()),
                          "labels": list(sem.labels),
                          "parents": list(sem.parents)}, sort_keys=True))
    elif args.format == "text":
        print(f"nodes {sem.node_count}")
        print(f"branches {sem.leaf_count()}")
        print("levels " + " ".join(map(str, sem.level_counts())))
    else:
        print(sem.to_dot())
    return 0


def _seq_values(name: str, N: int):
    first, _ = SEQ_TABLE[name]
    if N < first:
        raise ValueError(f"{name} needs --to at least {first}")
    idx = range(first, N + 1)
    if name == "catalan":
        return idx, [counts.catalan(n) for n in idx]
    if name == "increasing":
        return idx, [counts.increasing_count(n) for n in idx]
    if name == "mean_width":
        return idx, [counts.mean_width(n) for n in idx]
    if name == "mean_size":
        return idx, [counts.mean_size(n) for n in idx]
    if name == "m_cuts":
        return idx, profiles.cut_count_sequence(N)[first:]
    if name == "r_seq":
        return idx, counts.r_sequence(N)[first:]
    if name == "nonplane":
        return idx, [counts.nonplane_count(n) for n in idx]
    if name == "geomean":
        return idx, [counts.geometric_mean_width(n) for n in idx]
    raise AssertionError(name)


def _seq_ratio(name: str, n: int, value) -> float | None:
    """value / asymptotic estimate, for the sequences that have one."""
    if name == "mean_width":
        est = counts.mean_width_asymptotic(n)
    elif name == "mean_size":
        if n == 0:
            return None
        est = counts.asymptotic_size(n)
    else:
        return None
    exact = mp.mpf(value.numerator) / value.denominator
    return float(exact / mp.mpf(est.value))


def _cmd_seq(args) -> int:
    name, N = args.name, args.to
    idx, values = _seq_values(name, N)
    _, has_ratio = SEQ_TABLE[name]
    rows = []
    for n, v in zip(idx, values):
        if isinstance(v, Fraction):
            num, den = v.numerator, v.denominator
        elif isinstance(v, int):
            num, den = v, 1
        else:  # high-precision float (geometric mean)
            num, den = f"{float(v):.12g}", 1
        ratio = _seq_ratio(name, n, v) if has_ratio else None
        rows.append((n, num, den, ratio))
    if args.format == "json":
        doc = {"name": name,
               "values": [{"n": n, "numerator": str(num), "denominator": str(den),
                           **({"asymptotic_ratio": ratio} if ratio is not None else {})}
                          for n, num, den, ratio in rows]}
        print(json.dumps(doc, sort_keys=True))
    elif args.format == "csv":
        header = "n,value_numerator,value_denominator"
        print(header + ",asymptotic_ratio" if has_ratio else header)
        for n, num, den, ratio in rows:
            tail = f",{ratio:.9f}" if ratio is not None else ("," if has_ratio else "")
            print(f"{n},{num},{den}{tail}")
    else:
        for n, num, den, ratio in rows:
            val = str(num) if den == 1 else f"{num}/{den}"
            tail = f"  ratio {ratio:.9f}" if ratio is not None else ""
            print(f"{n} {val}{tail}")
    return 0


def _cmd_gen(args) -> int:
    if args.count < 1:
        raise ValueError("--count must be at least 1")
    rng = sampling.Rng(args.seed)
    out = [sampling.uniform_random_tree(args.size, rng) for _ in range(args.count)]
    if args.format == "json":
        print(json.dumps({"seed": args.seed,
                          "trees": [t.to_nested() for t in out]}, sort_keys=True))
    elif args.format == "dot":
        for t in out:
            print(t.to_dot())
    else:
        for t in out:
            print(t.to_term())
    return 0


# -- selftest -----------------------------------------------------------------

CHI2_Q999_DF7 = 24.3219
CHI2_Q999_DF13 = 34.5282
REFERENCE_TERM = "a.b.(c || d.(e || f))"


def _check_reference_term():
    t = trees.parse_process(REFERENCE_TERM)
    assert t.size == 6
    assert counts.hook_count(t) == 8
    assert sampling.count_runs_via_probability(t) == 8
    assert profiles.level_profile(t) == (1, 1, 2, 4, 8, 8)
    assert profiles.semantic_size(t) == 24
    assert len(profiles.enumerate_admissible_cuts(t)) == 11
    assert sampling.prefix_probability(t, (1, 2, 4)) == Fraction(3, 4)
    sem = trees.build_semantic_tree(t)
    assert sem.node_count == 24
    assert sem.leaf_count() == 8
    assert sem.level_counts() == (1, 1, 2, 4, 8, 8)


def _check_profile_routes():
    for n in range(1, 6):
        for t in trees.enumerate_trees(n):
            fast = profiles.level_profile(t, method="fast")
            assert fast == profiles.level_profile(t, method="oracle"), t.to_term()
            assert fast == trees.build_semantic_tree(t).level_counts(), t.to_term()


def _check_counting_identities():
    for n in range(1, 7):
        shapes = list(trees.enumerate_trees(n))
        assert len(shapes) == counts.catalan(n)
        assert sum(counts.hook_count(t) for t in shapes) == counts.increasing_count(n)
        total = sum(profiles.semantic_size(t) for t in shapes)
        assert total == counts.cumulative_size(n)


def _check_recurrences():
    for n in range(0, 12):
        assert counts.mean_size(n, "exact_sum") == counts.mean_size(n, "recurrence"), n
    assert profiles.cut_count_sequence(8, method="brute")[4:] == \
        profiles.cut_count_sequence(8, method="recurrence")[4:]
    r = counts.r_sequence(12)
    fact = 1
    for n in range(1, 13):
        fact *= n
        assert r[n] == counts.mean_size(n) * 2 ** (n - 1) / fact, n


def _check_round_trips():
    for n in range(1, 7):
        for t in trees.enumerate_trees(n):
            assert trees.parse_process(t.to_term()) == t
            u = trees.degree_sequence_of_tree(t)
            assert trees.tree_from_degree_sequence(u, t.labels) == t


def _check_pst():
    rng = sampling.Rng(99)
    pst = sampling.pst_build([("a", 2), ("b", 3), ("c", 1)])
    assert pst.total_weight == 6
    hits = {k: 0 for k in "abc"}
    for _ in range(6000):
        hits[sampling.pst_sample(pst, rng)] += 1
    assert abs(hits["a"] / 6000 - 1 / 3) < 0.05
    assert abs(hits["b"] / 6000 - 1 / 2) < 0.05
    pst2 = sampling.pst_build([("a", 8), ("b", 4), ("c", 9), ("d", 4), ("f", 1), ("e", 8)])
    assert pst2.total_weight == 34
    assert pst2.left_sum() == 9 and pst2.right_sum() == 17
    assert pst2.audit()
    touched = pst2.update("e", 0)
    assert touched <= pst2.depth()
    assert pst2.total_weight == 26 and pst2.audit()


def _check_run_sampling_uniform():
    w = trees.annotate_weights(trees.parse_process(REFERENCE_TERM))
    rng = sampling.Rng(2024)
    hits: dict = {}
    draws = 400
    for _ in range(draws):
        run = sampling.sample_run(w, rng)
        hits[run] = hits.get(run, 0) + 1
    assert len(hits) == 8
    expected = draws / 8
    stat = sum((c - expected) ** 2 / expected for c in hits.values())
    assert stat < CHI2_Q999_DF7, stat


def _check_tree_sampling_uniform():
    rng = sampling.Rng(2024)
    hits: dict = {}
    draws = 700
    for _ in range(draws):
        key = sampling.uniform_random_tree(5, rng).structural_key()
        hits[key] = hits.get(key, 0) + 1
    assert len(hits) == counts.catalan(5) == 14
    expected = draws / 14
    stat = sum((c - expected) ** 2 / expected for c in hits.values())
    assert stat < CHI2_Q999_DF13, stat


SELFTEST_CHECKS = [
    ("reference-term", _check_reference_term),
    ("profile-routes", _check_profile_routes),
    ("counting-identities", _check_counting_identities),
    ("recurrences", _check_recurrences),
    ("round-trips", _check_round_trips),
    ("partial-sum-tree", _check_pst),
    ("run-sampling-uniformity", _check_run_sampling_uniform),
    ("shape-sampling-uniformity", _check_tree_sampling_uniform),
]


def _cmd_selftest(args) -> int:
    failed = 0
    for name, check in SELFTEST_CHECKS:
        try:
            check()
        except Exception as exc:  # noqa: BLE001 - report and keep going
            failed += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"ok {name}")
    if failed:
        print(f"{failed} of {len(SELFTEST_CHECKS)} checks failed", file=sys.stderr)
        return 3
    print(f"all {len(SELFTEST_CHECKS)} checks passed")
    return 0


_COMMANDS = {
    "count": _cmd_count,
    "prob": _cmd_prob,
    "sample": _cmd_sample,
    "profile": _cmd_profile,
    "semantic": _cmd_semantic,
    "seq": _cmd_seq,
    "gen": _cmd_gen,
    "selftest": _cmd_selftest,
}


def run_cli(argv) -> int:
    """Run one command; returns the exit code instead of calling sys.exit."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse handles --version/--help by exiting 0; usage errors are 1
        return int(e.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except trees.BudgetError as exc:
        print(f"mergeruns: budget exceeded: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"mergeruns: error: {exc}", file=sys.stderr)
        return 1
    except (trees.ParseError, KeyError, ValueError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"mergeruns: error: {msg}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
