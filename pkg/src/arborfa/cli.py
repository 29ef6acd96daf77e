"""``arbor-fa`` command-line front end.

Presentations are read in the group DSL.  Commands that need more than one
group take a JSON spec file whose presentation fields hold either DSL text
or a path (relative to the spec file) to a DSL file.  Every command prints
one JSON document tagged ``"schema": "arbor-fa/1"``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from .abelianization import abelian_invariants
from .bass_serre import Amalgam, NoAxis, NotNontrivialAmalgam, axis_segment, ball, is_degenerate, normal_form, translation_length
from .constructions import (
    ConstructionError,
    CoverSpec,
    GammaSpec,
    cover_presentation_k,
    fpgroup_export,
    gamma_presentation,
)
from .fa_engine import (
    Certificate,
    CoxeterMatrix,
    EngineError,
    GroupDescriptor,
    OrbitSummary,
    assert_certificate,
    certify_finite,
    certify_infinite,
    coxeter_fa_certificate,
    coxeter_presentation,
    decide_fa_wreath,
    decide_hereditary_fa_wreath,
)
from .permgroups import DEFAULT_CAP, CapExceeded, FiniteBSet, Permutation, PermGroup
from .presentations import DSLSyntaxError, GeneratorAssignment, Presentation, evaluate_word, format_presentation, parse_presentation, parse_word
from .subgroup_tools import WitnessError, free_quotient_witness
from .trees import ActionError, format_tree, run_lemma_suite

SCHEMA = "arbor-fa/1"
EXPECT = {"has-fa": "HasFA", "no-fa": "NoFA", "unknown": "Unknown"}


class InputError(Exception):
    pass


# input helpers ------------------------------------------------------------


def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _load_spec(path: str) -> tuple[dict, Path]:
    text = _read(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: spec must be a JSON object")
    return data, Path(path).resolve().parent


def _presentation(value, base: Path) -> Presentation:
    if not isinstance(value, str):
        raise InputError(f"expected DSL text or a file path, got {value!r}")
    text = value if value.lstrip().startswith("group") else _read(base / value)
    return parse_presentation(text)


def _require(data: dict, key: str, where: str = "spec"):
    if key not in data:
        raise InputError(f"{where}: missing field {key!r}")
    return data[key]


def _perm_group(data, name: str) -> PermGroup:
    """``{"degree": n, "generators": ["(0 1)", ...]}``."""
    if not isinstance(data, dict):
        raise InputError(f"{name}: expected a permutation group object")
    degree = int(_require(data, "degree", name))
    gens = tuple(Permutation.from_cycles(c, degree) for c in data.get("generators", []))
    return PermGroup(degree, gens, name)


def _descriptor(data, base: Path, name: str, cap: int) -> GroupDescriptor:
    """Build a descriptor; checkable certificates are verified here."""
    if isinstance(data, str):
        data = {"presentation": data}
    if not isinstance(data, dict):
        raise InputError(f"{name}: expected a group object")
    pres = None
    certs: list[Certificate] = []
    if "coxeter" in data:
        m = CoxeterMatrix(tuple(tuple(r) for r in data["coxeter"]))
        pres = coxeter_presentation(m, data.get("name", name))
        c = coxeter_fa_certificate(m)
        if c is not None:
            certs.append(c)
    if "presentation" in data:
        pres = _presentation(data["presentation"], base)
    for entry in data.get("certificates", []):
        if isinstance(entry, str):
            entry = {"claim": entry}
        claim = _require(entry, "claim", f"{name} certificate")
        if "provenance" in entry:
            certs.append(assert_certificate(claim, entry["provenance"]) if claim != "asserted" else Certificate(claim, (), entry["provenance"]))
            continue
        if pres is None:
            raise InputError(f"{name}: certificate {claim!r} needs a presentation or a provenance")
        if claim == "is-finite":
            certs.append(certify_finite(pres, min(cap, 200_000)))
        elif claim == "is-infinite":
            certs.append(certify_infinite(pres))
        else:
            raise InputError(f"{name}: certificate {claim!r} cannot be verified; supply a provenance")
    label = data.get("name") or (pres.name if pres is not None else name)
    return GroupDescriptor(label, pres, certs)


def _orbits(data, b: GroupDescriptor, bpres: Presentation | None) -> FiniteBSet | OrbitSummary:
    if data is None or data == "regular":
        order = b.finite_order()
        return OrbitSummary((order,))
    if isinstance(data, dict) and "orbit_sizes" in data:
        return OrbitSummary(tuple(None if s is None else int(s) for s in data["orbit_sizes"]))
    if isinstance(data, dict) and "action" in data:
        return _bset(data, bpres)
    raise InputError("x: expected \"regular\", {\"orbit_sizes\": [...]} or {\"points\": n, \"action\": [...]}")


def _bset(data: dict, bpres: Presentation | None) -> FiniteBSet:
    points = int(_require(data, "points", "x"))
    action = tuple(Permutation.from_cycles(c, points) for c in data["action"])
    x = FiniteBSet(points, action)
    if bpres is not None:
        x.check_against(bpres)
    return x


# commands ---------------------------------------------------------------------


def cmd_abelianize(args) -> tuple[dict, int]:
    p = parse_presentation(_read(args.presentation))
    return {"command": "abelianize", "group": p.name, "result": abelian_invariants(p).to_json()}, 0


def _verdict_exit(status: str, expect: str | None) -> int:
    if expect is None:
        return 0
    return 0 if EXPECT[expect] == status else 1


def cmd_decide_fa(args) -> tuple[dict, int]:
    spec, base = _load_spec(args.spec)
    a = _descriptor(_require(spec, "a"), base, "A", args.cap)
    b = _descriptor(_require(spec, "b"), base, "B", args.cap)
    x = _orbits(spec.get("x"), b, b.presentation)
    v = decide_fa_wreath(a, b, x)
    doc = {"command": "decide-fa", "a": a.describe(), "b": b.describe(), "verdict": v.to_json()}
    return doc, _verdict_exit(v.status, args.expect)


def cmd_decide_hfa(args) -> tuple[dict, int]:
    spec, base = _load_spec(args.spec)
    a = _descriptor(_require(spec, "a"), base, "A", args.cap)
    b = _descriptor(_require(spec, "b"), base, "B", args.cap)
    v = decide_hereditary_fa_wreath(a, b)
    doc = {"command": "decide-hfa", "a": a.describe(), "b": b.describe(), "verdict": v.to_json()}
    return doc, _verdict_exit(v.status, args.expect)


def _emit_presentation(command: str, p: Presentation, args, extra: dict | None = None) -> dict:
    doc: dict[str, Any] = {"command": command}
    if extra:
        doc.update(extra)
    doc["generators"] = len(p.generators)
    doc["relators"] = len(p.relators)
    doc["presentation"] = format_presentation(p)
    if args.export:
        doc["fpgroup"] = fpgroup_export(p)
    return doc


def cmd_build_gamma(args) -> tuple[dict, int]:
    spec, base = _load_spec(args.spec)
    a = _presentation(_require(spec, "a"), base)
    b = _presentation(_require(spec, "b"), base)
    f = tuple(parse_word(w, b.generators) for w in _require(spec, "f"))
    witness = None
    if "witness" in spec:
        w = spec["witness"]
        g = _perm_group({"degree": _require(w, "degree", "witness"), "generators": _require(w, "images", "witness")}, "witness")
        if len(g.generators) != b.ngens:
            raise InputError("witness: need one image per generator of B")
        witness = GeneratorAssignment("permutation", dict(enumerate(g.generators)), g.identity)
        for r in b.relators:
            if not evaluate_word(r, witness).is_identity:
                raise InputError("witness: images do not satisfy B's relators")
    p = gamma_presentation(GammaSpec(a, b, f, spec.get("k"), witness), symmetrize=args.symmetrize)
    return _emit_presentation("build-gamma", p, args, {"symmetrized": bool(args.symmetrize)}), 0


def cmd_build_k(args) -> tuple[dict, int]:
    spec, base = _load_spec(args.spec)
    a = _presentation(_require(spec, "a"), base)
    b = _presentation(_require(spec, "b"), base)
    if "sb_in_c" in spec:
        fs = CoverSpec(a, b, tuple(spec["sb_in_c"]))
    else:
        x = _bset(_require(spec, "x"), b)
        fs = CoverSpec.from_bset(a, b, x, int(spec.get("basepoint", 0)))
    p = cover_presentation_k(fs)
    return _emit_presentation("build-k", p, args, {"sb_in_c": list(fs.sb_in_c)}), 0


def _amalgam(spec: dict, cap: int) -> Amalgam:
    h = _perm_group(_require(spec, "h"), "H")
    l = _perm_group(_require(spec, "l"), "L")
    k = _perm_group(_require(spec, "k"), "K")
    kh = [Permutation.from_cycles(c, h.degree) for c in spec.get("k_into_h", [])]
    kl = [Permutation.from_cycles(c, l.degree) for c in spec.get("k_into_l", [])]
    return Amalgam(h, l, k, kh, kl, spec["h"].get("symbols"), spec["l"].get("symbols"), cap)


def cmd_ball(args) -> tuple[dict, int]:
    spec, _ = _load_spec(args.spec)
    if args.radius < 0:
        raise InputError("radius must be non-negative")
    am = _amalgam(spec, args.cap)
    bl = ball(am, args.radius)
    doc: dict[str, Any] = {"command": "ball", "index_h": am.index_h, "index_l": am.index_l}
    try:
        doc["degenerate"] = is_degenerate(am)
    except NotNontrivialAmalgam:
        doc["degenerate"] = None
    doc["ball"] = bl.to_json()
    doc["tree"] = format_tree(bl.to_tree())
    doc["sidecar"] = bl.sidecar()
    elements = []
    for text in spec.get("words", []):
        w = am.word(text)
        entry: dict[str, Any] = {"word": text, "syllables": len(normal_form(am, w))}
        entry["translation_length"] = translation_length(am, w)
        if entry["translation_length"] > 0:
            entry["axis"] = [am.label(v) for v in axis_segment(am, w, args.radius)]
        elements.append(entry)
    if elements:
        doc["elements"] = elements
    return doc, 0


def cmd_free_quotient(args) -> tuple[dict, int]:
    spec, base = _load_spec(args.spec)
    a = _presentation(_require(spec, "a"), base)
    a1 = _perm_group(_require(spec, "a1"), "A1")
    bp = _perm_group(_require(spec, "b_prime"), "B'")
    w = free_quotient_witness(a, a1, bp, _require(spec, "f"), _require(spec, "c"), _require(spec, "d"), args.cap)
    return {"command": "free-quotient", "witness": w.to_json()}, 0


def cmd_verify_lemmas(args) -> tuple[dict, int]:
    if args.cases < 0:
        raise InputError("--cases must be non-negative")
    res = run_lemma_suite(args.seed, args.cases)
    ok = res["helly_violations"] == 0 and res["commuting_violations"] == 0
    return {"command": "verify-lemmas", "seed": args.seed, "cases": args.cases, "result": res}, 0 if ok else 1


# entry point ---------------------------------------------------------------------


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arbor-fa", description="Property (FA) toolkit for wreath products and tree actions.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=_positive, default=DEFAULT_CAP, help="enumeration cap (default %(default)s)")
    common.add_argument("--out", help="write JSON here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("abelianize", parents=[common], help="abelian invariants of a DSL presentation")
    p.add_argument("presentation")
    p.set_defaults(func=cmd_abelianize)

    for name, func, helptext in (
        ("decide-fa", cmd_decide_fa, "Property (FA) for A wr_X B"),
        ("decide-hfa", cmd_decide_hfa, "hereditary (FA) for A wr B, B infinite"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("spec")
        p.add_argument("--expect", choices=sorted(EXPECT), help="exit 1 unless the verdict matches")
        p.set_defaults(func=func)

    p = sub.add_parser("build-gamma", parents=[common], help="presentation of Gamma(A, B, F)")
    p.add_argument("spec")
    p.add_argument("--symmetrize", action="store_true", help="close F under inverses")
    p.add_argument("--export", action="store_true", help="also emit FpGroup text")
    p.set_defaults(func=cmd_build_gamma)

    p = sub.add_parser("build-k", parents=[common], help="finitely presented cover K")
    p.add_argument("spec")
    p.add_argument("--export", action="store_true", help="also emit FpGroup text")
    p.set_defaults(func=cmd_build_k)

    p = sub.add_parser("ball", parents=[common], help="ball in the Bass-Serre tree of an amalgam")
    p.add_argument("spec")
    p.add_argument("radius", type=int)
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("free-quotient", parents=[common], help="finite-index subgroup mapping onto a free group")
    p.add_argument("spec")
    p.set_defaults(func=cmd_free_quotient)

    p = sub.add_parser("verify-lemmas", parents=[common], help="seeded Helly and commuting-fixed-set checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=1000)
    p.set_defaults(func=cmd_verify_lemmas)
    return parser


INPUT_ERRORS = (
    InputError,
    DSLSyntaxError,
    ConstructionError,
    EngineError,
    WitnessError,
    NotNontrivialAmalgam,
    NoAxis,
    ActionError,
    CapExceeded,
    ValueError,
    KeyError,
    TypeError,
)


def render(doc: dict) -> str:
    return json.dumps({"schema": SCHEMA, **doc}, indent=2, ensure_ascii=False) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc, code = args.func(args)
    except INPUT_ERRORS as exc:
        msg = f"{type(exc).__name__}: {exc}"
        if isinstance(exc, DSLSyntaxError):
            msg = f"syntax error: {exc}"
        print(f"arbor-fa {args.command}: {msg}", file=sys.stderr)
        return 2
    text = render(doc)
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"arbor-fa: cannot write {args.out}: {exc.strerror or exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
