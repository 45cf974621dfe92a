"""Command line: ``analyze``, ``enumerate``, ``cross-check``, ``verify``.

Exit codes: 0 success, 1 I/O or parse error, 2 invalid group (or a
refused resource request), 3 a failed cross-check or replay.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

from . import hw_catalog
from .crystal import (
    BieberbachGroup,
    GroupValidationError,
    betti,
    betti_profile,
    build_group,
    h1_elementary_divisors,
    holonomy_characters,
    is_hw,
    is_torsion_free,
)
from .hw_catalog import HwSpec, ResourceGuardError
from .lifting import (
    Answer,
    HolonomyTooLargeError,
    Kind,
    NonOrientableError,
    cocycle_oracle_decide,
    decide_spin,
    decide_spinc,
    verify_certificate,
    verify_witness,
)
from .serialize import (
    GroupFileError,
    element_to_dict,
    group_from_dict,
    group_to_dict,
    load_group,
    verdict_from_dict,
    verdict_to_dict,
)

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_MISMATCH = 0, 1, 2, 3
ALL_CHECKS = ("spin", "spinc", "betti", "h1", "torsion", "characters")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def resolve_group(source: str) -> BieberbachGroup:
    """``catalog:<name>`` or a path to a group file."""
    try:
        if source.startswith("catalog:"):
            return hw_catalog.from_catalog(source[len("catalog:"):])
        return load_group(source)
    except KeyError as exc:
        raise CliError(str(exc.args[0]), EXIT_IO) from exc
    except (OSError, GroupFileError) as exc:
        raise CliError(f"{source}: {exc}", EXIT_IO) from exc
    except (GroupValidationError, ValueError) as exc:
        raise CliError(f"{source}: invalid group: {exc}", EXIT_INVALID) from exc


def build_report(G: BieberbachGroup, checks: Sequence[str]) -> dict:
    """Run the requested analyses.  Torsion is always checked first."""
    start = time.perf_counter()
    tf = is_torsion_free(G)
    report: dict = {
        "group": group_to_dict(G),
        "labels": hw_catalog.labels(G),
        "checks": list(checks),
        "invariants": {
            "orientable": G.orientable,
            "holonomy_order": G.holonomy_order,
            "torsion_free": tf.torsion_free,
            "torsion_witness": element_to_dict(tf.witness) if tf.witness else None,
        },
        "verdicts": {},
    }
    inv = report["invariants"]
    if not tf:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
        return report
    inv["is_hw"] = is_hw(G)
    if "betti" in checks:
        inv["betti"] = betti_profile(G)
    if "h1" in checks:
        inv["h1"] = h1_elementary_divisors(G)
    if "characters" in checks:
        inv["characters"] = [list(c.basis_values) for c in holonomy_characters(G)]
    if "spin" in checks:
        report["verdicts"]["spin"] = verdict_to_dict(decide_spin(G))
    if "spinc" in checks:
        report["verdicts"]["spinc"] = verdict_to_dict(decide_spinc(G))
    report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    return report


def render_text(report: dict) -> str:
    """Human-readable view of a report dict (same facts as the JSON)."""
    g = report["group"]
    lines = [f"group: {g.get('name', '(unnamed)')}  dimension {g['dimension']}"]
    for lab in report.get("labels", []):
        lines.append(f"  label: {lab}")
    for k, gen in enumerate(g["generators"]):
        lines.append(f"  generator {k + 1}: signs {gen['signs']} translation ({', '.join(gen['translation'])})")
    inv = report["invariants"]
    for key in ("orientable", "holonomy_order", "torsion_free", "is_hw", "betti", "h1"):
        if key in inv:
            lines.append(f"{key}: {inv[key]}")
    if inv.get("torsion_witness"):
        w = inv["torsion_witness"]
        lines.append(f"torsion_witness: signs {w['signs']} translation ({', '.join(w['translation'])})")
    if "characters" in inv:
        for k, vals in enumerate(inv["characters"]):
            lines.append(f"character {k + 1}: {vals}")
    for kind, v in report.get("verdicts", {}).items():
        lines.append(f"{kind}: {v['answer']}")
        if v.get("witness"):
            for name, vals in v["witness"].items():
                lines.append(f"  witness {name}: ({', '.join(map(str, vals))})")
        if v.get("obstruction"):
            terms = " + ".join(f"{c}*{name}" for name, c in v["obstruction"]["relations"])
            lines.append(f"  obstruction: {terms}  (right-hand sides pair to {v['obstruction']['parity']})")
        if "betti2" in v:
            lines.append(f"  betti2: {v['betti2']}")
    if "timing" in report:
        lines.append(f"time: {report['timing']['seconds']}s")
    return "\n".join(lines)


def _emit(obj: dict, fmt: str, text: Optional[str] = None) -> None:
    if fmt == "json":
        print(json.dumps(obj, indent=2))
    else:
        print(text if text is not None else render_text(obj))


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> int:
    checks = ALL_CHECKS if args.checks == "all" else tuple(c.strip() for c in args.checks.split(",") if c.strip())
    unknown = [c for c in checks if c not in ALL_CHECKS]
    if unknown:
        raise CliError(f"unknown checks: {', '.join(unknown)} (choose from {', '.join(ALL_CHECKS)})", EXIT_IO)
    G = resolve_group(args.source)
    if not G.orientable and ("spin" in checks or "spinc" in checks):
        raise CliError(f"{args.source}: group is not orientable; Spin/Spin^C checks need an oriented manifold",
                       EXIT_INVALID)
    report = build_report(G, checks)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    _emit(report, args.format)
    if not report["invariants"]["torsion_free"]:
        print("invalid group: not torsion-free (see torsion_witness)", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def _record_for_masks(n: int, rows: tuple[int, ...]) -> dict:
    spec = HwSpec.from_masks(n, rows)
    G = hw_catalog.hw_from_spec(spec, name=hw_catalog.spec_name(spec))
    return {
        "name": G.name,
        "translations": [[str(x) if x else "0" for x in r] for r in spec.b_rows],
        "spin": decide_spin(G).answer.value,
        "spinc": decide_spinc(G).answer.value,
    }


def _records_chunk(args) -> list[dict]:
    n, chunk = args
    return [_record_for_masks(n, rows) for rows in chunk]


def run_enumeration(n: int, mode: str, count: int = 0, seed: int = 0, workers: int = 1):
    """Yield one verdict record per enumerated group, in deterministic order."""
    if mode == "exhaustive":
        source = hw_catalog.exhaustive_masks(n, workers=workers)
    else:
        source = iter(hw_catalog.sample_masks(n, count, seed))
    if workers > 1:
        rows = list(source)
        size = max(1, len(rows) // (workers * 8))
        chunks = [(n, rows[i:i + size]) for i in range(0, len(rows), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_records_chunk, chunks):
                yield from part
    else:
        for r in source:
            yield _record_for_masks(n, r)


def cmd_enumerate(args) -> int:
    if args.exhaustive == (args.sample is not None):
        raise CliError("choose exactly one of --exhaustive or --sample COUNT", EXIT_IO)
    mode = "exhaustive" if args.exhaustive else "sample"
    start = time.perf_counter()
    spin, spinc = Counter(), Counter()
    total = 0
    out = open(args.output, "w", encoding="utf-8") if args.output else None
    try:
        for k, rec in enumerate(run_enumeration(args.n, mode, args.sample or 0, args.seed, args.workers)):
            rec = {"index": k, **rec}
            total += 1
            spin[rec["spin"]] += 1
            spinc[rec["spinc"]] += 1
            if out:
                out.write(json.dumps(rec) + "\n")
    except ResourceGuardError as exc:
        raise CliError(str(exc), EXIT_INVALID) from exc
    finally:
        if out:
            out.close()
    summary = {
        "n": args.n,
        "mode": mode,
        "seed": args.seed if mode == "sample" else None,
        "candidates": (2 ** (args.n * (args.n - 1))) if mode == "exhaustive" else None,
        "groups": total,
        "spin": dict(sorted(spin.items())),
        "spinc": dict(sorted(spinc.items())),
        "spinc_yes": spinc.get(Answer.YES.value, 0),
        "note": "groups are distinct as generator data mod Z^n; affinely equivalent groups are counted separately",
        "seconds": round(time.perf_counter() - start, 3),
    }
    text = "\n".join(f"{k}: {v}" for k, v in summary.items())
    _emit(summary, args.format, text)
    return EXIT_OK


def cmd_cross_check(args) -> int:
    G = resolve_group(args.source)
    result: dict = {"group": G.name or args.source, "checks": {}}
    ok = True
    try:
        for kind, fast in ((Kind.SPIN, decide_spin), (Kind.SPINC, decide_spinc)):
            a = fast(G)
            b = cocycle_oracle_decide(G, kind)
            match = a.answer == b.answer
            ok = ok and match
            result["checks"][kind.value] = {"presentation": a.answer.value, "cocycle": b.answer.value, "match": match}
    except HolonomyTooLargeError as exc:
        raise CliError(str(exc), EXIT_INVALID) from exc
    except NonOrientableError as exc:
        raise CliError(str(exc), EXIT_INVALID) from exc
    result["match"] = ok
    text = "\n".join(
        f"{k}: presentation {v['presentation']}, cocycle {v['cocycle']}, {'match' if v['match'] else 'MISMATCH'}"
        for k, v in result["checks"].items()
    )
    _emit(result, args.format, text)
    return EXIT_OK if ok else EXIT_MISMATCH


def replay_report(report: dict) -> dict[str, bool]:
    """Re-check every witness and obstruction stored in a report."""
    n, gens, name = group_from_dict(report["group"])
    G = build_group(n, gens, name=name)
    out = {}
    for kind, vd in report.get("verdicts", {}).items():
        v = verdict_from_dict(kind, vd)
        try:
            if v.answer is Answer.YES:
                out[kind] = verify_witness(G, v)
            else:
                out[kind] = verify_certificate(G, v)
                # a definite NO for Spin^C also needs b_2 = 0
                if v.answer is Answer.NO and v.kind is Kind.SPINC and G.n >= 2:
                    out[kind] = out[kind] and betti(G, 2) == 0
        except ValueError:
            out[kind] = False
    return out


def cmd_verify(args) -> int:
    try:
        with open(args.report, encoding="utf-8") as fh:
            report = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"{args.report}: {exc}", EXIT_IO) from exc
    try:
        results = replay_report(report)
    except (GroupFileError, KeyError, TypeError) as exc:
        raise CliError(f"{args.report}: malformed report: {exc}", EXIT_IO) from exc
    except GroupValidationError as exc:
        raise CliError(f"{args.report}: invalid group: {exc}", EXIT_INVALID) from exc
    ok = all(results.values())
    text = "\n".join(f"{k}: {'verified' if v else 'FAILED'}" for k, v in results.items()) or "nothing to verify"
    _emit({"verified": results, "ok": ok}, args.format, text)
    return EXIT_OK if ok else EXIT_MISMATCH


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hwspin", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="invariants and Spin/Spin^C verdicts for one group")
    a.add_argument("source", help="group file or catalog:<name> (cyclic-hw-<n>, hw-5-1, hw-5-2, torus-<n>)")
    a.add_argument("--checks", default="all", help=f"comma list from {','.join(ALL_CHECKS)} (default all)")
    a.add_argument("--format", choices=("json", "text"), default="text")
    a.add_argument("--output", help="also write the JSON report here")
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("enumerate", help="scan HW candidates")
    e.add_argument("n", type=int)
    e.add_argument("--exhaustive", action="store_true")
    e.add_argument("--sample", type=int, metavar="COUNT")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--output", help="write one JSON record per group here")
    e.add_argument("--format", choices=("json", "text"), default="text")
    e.set_defaults(func=cmd_enumerate)

    c = sub.add_parser("cross-check", help="compare the presentation and pairwise-cocycle decisions")
    c.add_argument("source")
    c.add_argument("--format", choices=("json", "text"), default="text")
    c.set_defaults(func=cmd_cross_check)

    v = sub.add_parser("verify", help="replay witnesses and certificates in a JSON report")
    v.add_argument("report")
    v.add_argument("--format", choices=("json", "text"), default="text")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
