"""Group files and analysis reports.

A group file is JSON::

    {
      "dimension": 3,
      "name": "optional label",
      "generators": [
        {"signs": [1, -1, -1], "translation": ["1/2", "1/2", "0"]},
        ...
      ]
    }

Rationals are strings ``"p/q"`` in lowest terms (or plain integers); floats
are rejected.  A generator may give its rotation as a full ``"matrix"``
instead of ``"signs"``, but only diagonal +-1 matrices are accepted.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any, Optional

from .crystal import AffineElement, BieberbachGroup, build_group
from .lifting import Answer, Kind, StructureVerdict

_RATIONAL = re.compile(r"-?\d+(/\d+)?")


class GroupFileError(ValueError):
    """Malformed group file; the message carries the position."""


def _line_of(text: str, needle: str, occurrence: int) -> Optional[int]:
    pos = -1
    for _ in range(occurrence + 1):
        pos = text.find(needle, pos + 1)
        if pos < 0:
            return None
    return text.count("\n", 0, pos) + 1


def _where(text: Optional[str], path: str, gen_index: Optional[int]) -> str:
    # generator i opens with the (i + 2)-th "{" of the file
    if text is not None and gen_index is not None:
        line = _line_of(text, "{", gen_index + 1)
        if line is not None:
            return f"line {line}, {path}"
    return path


def parse_rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise GroupFileError(f"{where}: {value!r} is not an exact rational (use a string like \"1/2\")")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str) or not _RATIONAL.fullmatch(value.strip()):
        raise GroupFileError(f"{where}: {value!r} is not a rational of the form \"p/q\"")
    s = value.strip()
    if "/" in s:
        p, q = s.split("/")
        if int(q) == 0:
            raise GroupFileError(f"{where}: zero denominator")
        q_ = Fraction(int(p), int(q))
        if q_.denominator != int(q) or (int(p) < 0) != (q_ < 0):
            raise GroupFileError(f"{where}: {value!r} is not in lowest terms (expected {format_rational(q_)!r})")
        return q_
    return Fraction(int(s))


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def group_from_dict(data: Any, text: Optional[str] = None) -> tuple[int, list[AffineElement], Optional[str]]:
    if not isinstance(data, dict):
        raise GroupFileError("top level must be an object")
    n = data.get("dimension")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise GroupFileError(f"dimension: expected a positive integer, got {n!r}")
    gens_raw = data.get("generators", [])
    if not isinstance(gens_raw, list):
        raise GroupFileError("generators: expected a list")
    gens = []
    for i, g in enumerate(gens_raw):
        path = f"generators[{i}]"
        if not isinstance(g, dict):
            raise GroupFileError(f"{_where(text, path, i)}: expected an object")
        if "signs" in g:
            signs = g["signs"]
            if not isinstance(signs, list) or len(signs) != n:
                raise GroupFileError(f"{_where(text, path + '.signs', i)}: expected a list of {n} entries")
            for k, s in enumerate(signs):
                if s not in (1, -1) or isinstance(s, bool):
                    raise GroupFileError(
                        f"{_where(text, f'{path}.signs[{k}]', i)}: expected +1 or -1, got {s!r} "
                        "(only diagonal holonomy is supported)"
                    )
        elif "matrix" in g:
            mat = g["matrix"]
            if not isinstance(mat, list) or len(mat) != n or any(not isinstance(r, list) or len(r) != n for r in mat):
                raise GroupFileError(f"{_where(text, path + '.matrix', i)}: expected a {n}x{n} matrix")
            signs = []
            for r in range(n):
                for c in range(n):
                    v = mat[r][c]
                    if r != c and v != 0:
                        raise GroupFileError(
                            f"{_where(text, f'{path}.matrix[{r}][{c}]', i)}: off-diagonal entry {v!r} "
                            "(only diagonal holonomy is supported)"
                        )
                if mat[r][r] not in (1, -1):
                    raise GroupFileError(f"{_where(text, f'{path}.matrix[{r}][{r}]', i)}: expected +1 or -1")
                signs.append(mat[r][r])
        else:
            raise GroupFileError(f"{_where(text, path, i)}: missing \"signs\"")
        trans = g.get("translation")
        if not isinstance(trans, list) or len(trans) != n:
            raise GroupFileError(f"{_where(text, path + '.translation', i)}: expected a list of {n} rationals")
        vec = tuple(parse_rational(v, _where(text, f"{path}.translation[{k}]", i)) for k, v in enumerate(trans))
        gens.append(AffineElement(tuple(signs), vec))
    name = data.get("name")
    return n, gens, name if isinstance(name, str) else None


def parse_group_text(text: str) -> BieberbachGroup:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GroupFileError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    n, gens, name = group_from_dict(data, text)
    return build_group(n, gens, name=name)


def load_group(path: str) -> BieberbachGroup:
    with open(path, encoding="utf-8") as fh:
        return parse_group_text(fh.read())


def element_to_dict(g: AffineElement) -> dict:
    return {"signs": list(g.signs), "translation": [format_rational(c) for c in g.translation]}


def group_to_dict(G: BieberbachGroup) -> dict:
    out: dict = {"dimension": G.n}
    if G.name:
        out["name"] = G.name
    out["generators"] = [element_to_dict(g) for g in G.generators]
    return out


def dump_group(G: BieberbachGroup) -> str:
    """Canonical text: one generator per line, trailing newline."""
    d = group_to_dict(G)
    lines = ["{", f'  "dimension": {d["dimension"]},']
    if "name" in d:
        lines.append(f'  "name": {json.dumps(d["name"])},')
    gens = d["generators"]
    if not gens:
        lines.append('  "generators": []')
    else:
        lines.append('  "generators": [')
        for k, g in enumerate(gens):
            sep = "," if k + 1 < len(gens) else ""
            lines.append(f"    {json.dumps(g)}{sep}")
        lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# verdicts


def verdict_to_dict(v: StructureVerdict) -> dict:
    out: dict = {"answer": v.answer.value, "method": v.method}
    if v.witness is not None:
        out["witness"] = {
            k: [format_rational(x) if isinstance(x, Fraction) else x for x in vals]
            for k, vals in v.witness.items()
        }
    else:
        out["witness"] = None
    if v.obstruction is not None:
        out["obstruction"] = {
            "relations": [[name, coef] for name, coef in v.obstruction],
            "parity": format_rational(v.pairing),
        }
    else:
        out["obstruction"] = None
    if v.betti2 is not None:
        out["betti2"] = v.betti2
    return out


def verdict_from_dict(kind: str, d: dict) -> StructureVerdict:
    kind_ = Kind(kind)
    witness = None
    if d.get("witness") is not None:
        witness = {}
        for k, vals in d["witness"].items():
            if kind_ is Kind.SPINC:
                witness[k] = [parse_rational(x, f"witness.{k}") for x in vals]
            else:
                witness[k] = [int(x) for x in vals]
    obstruction = pairing = None
    if d.get("obstruction") is not None:
        obstruction = [(str(name), int(coef)) for name, coef in d["obstruction"]["relations"]]
        pairing = parse_rational(d["obstruction"]["parity"], "obstruction.parity")
    return StructureVerdict(
        kind_,
        Answer(d["answer"]),
        method=d.get("method", "presentation"),
        witness=witness,
        obstruction=obstruction,
        pairing=pairing,
        betti2=d.get("betti2"),
    )
