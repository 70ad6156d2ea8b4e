"""Command-line front end: ``tempobridge {check,map,paths,dot,xcheck,fmt}``.

Exit status: 0 true/success, 1 false (or bot), 2 usage or input error,
3 xcheck found disagreements.
"""
from __future__ import annotations

import argparse
import sys

from .checker2 import CARRIERS, CheckConfig, Checker
from .checker3 import eval_upml
from .formulas import Logic
from .mappings import MAPPINGS, bundle
from .parser import (
    FormulaError, InvariantError, ParseError, SchemaError, load_structure,
    parse_formula, render_formula, save_structure,
)
from .structures import Truth3, mu_paths
from .testkit import GenParams, xcheck

OK, FALSE, USAGE, DISAGREE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read_structure(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return load_structure(text)


def _state(structure, name: str) -> int:
    try:
        return structure.state(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_check(args) -> int:
    logic = Logic.parse(args.logic)
    st = _read_structure(args.structure)
    carrier = CARRIERS[logic]
    if type(st) is not carrier:
        raise UsageError(f"{logic.value} is interpreted over {carrier.kind.upper()}, "
                         f"but the structure is a {st.kind.upper()}")
    s = _state(st, args.state)
    phi = parse_formula(args.formula, logic)
    if logic is Logic.UPML:
        v = eval_upml(st, s, phi)
        print(v)
        return OK if v is Truth3.TRUE else FALSE
    config = CheckConfig.from_env(args.bound)
    engine = "enumerate" if args.bound else args.engine
    checker = Checker(st, config, engine=engine)
    v = checker.holds(s, phi)
    print(("true" if v else "false") + (" (bounded)" if checker.bounded else ""))
    return OK if v else FALSE


def cmd_map(args) -> int:
    spec = MAPPINGS.get(args.mapping.replace("′", "'"))
    if spec is None:
        raise UsageError(f"unknown mapping {args.mapping!r}; choose from {', '.join(MAPPINGS)}")
    st = _read_structure(args.structure)
    if type(st) is not spec.source_kind:
        raise UsageError(f"mapping {spec.name} takes a {spec.source_kind.kind.upper()} source, "
                         f"not a {st.kind.upper()}")
    try:
        b = bundle(spec.name, st)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = save_structure(b.target)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.formula:
        phi = parse_formula(args.formula, spec.source_logic)
        try:
            image = b.formula(phi)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        print(render_formula(image, spec.target_logic))
    return OK


def cmd_paths(args) -> int:
    st = _read_structure(args.structure)
    s = _state(st, args.state)
    if args.bound < 0:
        raise UsageError("--bound must be non-negative")
    for sigma in mu_paths(st, s, args.bound):
        print(sigma.render(st))
    return OK


def _dot_id(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(st) -> str:
    lines = ["digraph structure {"]
    for s in st.states:
        attrs = []
        label = st.names[s]
        if st.has_props:
            vals = ", ".join(f"{p}={str(st.labeling[s][p]).lower()}" for p in st.props)
            label += "\\n" + vals
        attrs.append(f"label={_dot_id(label)}")
        if st.is_deadlocked(s):
            attrs.append("peripheries=2")
        lines.append(f"  {_dot_id(st.names[s])} [{', '.join(attrs)}];")
    for t in st.transitions:
        edge = f"  {_dot_id(st.names[t.src])} -> {_dot_id(st.names[t.dst])}"
        if st.has_actions:
            lab = "{" + ",".join(sorted(map(str, t.labels))) + "}" if t.labels else "tau"
            edge += f" [label={_dot_id(lab)}]"
        lines.append(edge + ";")
    lines.append("}")
    return "\n".join(lines)


def cmd_dot(args) -> int:
    print(to_dot(_read_structure(args.structure)))
    return OK


def cmd_xcheck(args) -> int:
    mapping = args.mapping.replace("′", "'")
    if mapping not in MAPPINGS:
        raise UsageError(f"unknown mapping {args.mapping!r}; choose from {', '.join(MAPPINGS)}")
    params = GenParams(seed=args.seed, trials=args.trials, max_states=args.max_states,
                       max_actions=args.max_actions, max_props=args.max_props,
                       max_formula_depth=args.depth)
    report = xcheck(mapping, params, mutant=args.mutant)
    print(report.to_json())
    return OK if report.ok else DISAGREE


def cmd_fmt(args) -> int:
    logic = Logic.parse(args.logic)
    print(render_formula(parse_formula(args.formula, logic), logic))
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tempobridge", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide a formula at a state")
    p.add_argument("--structure", required=True)
    p.add_argument("--logic", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--bound", type=int, help="lasso length bound (switches star checking to enumeration)")
    p.add_argument("--engine", choices=("tableau", "enumerate"), default="tableau")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("map", help="apply a mapping to a structure (and a formula)")
    p.add_argument("--mapping", required=True)
    p.add_argument("--structure", required=True)
    p.add_argument("--formula")
    p.add_argument("--out")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("paths", help="list the maximal paths from a state")
    p.add_argument("--structure", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--bound", type=int, required=True)
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("dot", help="export a structure as a DOT graph")
    p.add_argument("--structure", required=True)
    p.set_defaults(func=cmd_dot)

    p = sub.add_parser("xcheck", help="differential test of a mapping")
    p.add_argument("--mapping", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-states", type=int, default=5)
    p.add_argument("--max-actions", type=int, default=3)
    p.add_argument("--max-props", type=int, default=3)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--mutant", action="store_true", help="run the documented broken translator")
    p.set_defaults(func=cmd_xcheck)

    p = sub.add_parser("fmt", help="print a formula in canonical syntax")
    p.add_argument("--logic", required=True)
    p.add_argument("--formula", required=True)
    p.set_defaults(func=cmd_fmt)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except (UsageError, ParseError, FormulaError, SchemaError, InvariantError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
