"""Command-line surface.

Subcommands: verify (run a congruence battery), act (apply a stabilizer
element to an expression), detect (locate one alpha class), chart (emit the
family chart), fixture (solve and store the action data of a named element).
Exit codes: 0 success, 1 verification failure, 2 usage or engine error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import action, adss, anss_chart
from .config import Config
from .errors import WindowOverflow
from .rings import MODULAR_TAGS, modular
from .series import GradedElem, USeries, monomial_v
from .stabilizer import StabElem, named
from .witt import womega

_NAMED_GAMMAS = ("alpha", "pi", "omega", "minus1", "minus_one")


def _parse_gamma(text: str, cfg: Config) -> StabElem:
    if text in _NAMED_GAMMAS:
        return named("minus_one" if text == "minus1" else text, cfg.prec2)
    return StabElem.from_literal(text, precT=2 * cfg.prec2)


_FACTOR_RE = re.compile(r"^(c4|c6|delta|j|u1|v1|v2|w)(?:\^(-?\d+))?$")


def _parse_element(text: str, cfg: Config) -> GradedElem:
    """Products of named constants, v-monomials, integer scalars and w."""
    n, m = cfg.prec2, cfg.precu1
    acc = GradedElem(USeries.one(n, m), 0)
    for raw in text.replace("*", " ").split():
        if re.fullmatch(r"-?\d+", raw):
            acc = acc * int(raw)
            continue
        mt = _FACTOR_RE.match(raw)
        if not mt:
            raise ValueError(f"cannot parse factor {raw!r}")
        name, exp = mt.group(1), int(mt.group(2) or 1)
        if name == "w":
            acc = acc * (womega(n) ** exp)
        elif name == "u1":
            if exp < 0:
                raise ValueError("u1 is not invertible in W[[u1]]")
            acc = acc * GradedElem(USeries.u1_power(1, n, m), 0) ** exp
        elif name == "v1":
            if exp < 0:
                raise WindowOverflow("v1 is not invertible in E_*")
            acc = acc * monomial_v(exp, 0, n, m)
        elif name == "v2":
            acc = acc * monomial_v(0, exp, n, m)
        else:
            acc = acc * modular(name, n, m) ** exp
    return acc


def _get_iso(gamma: StabElem, tag: str | None, cfg: Config):
    prec = (cfg.prec2, cfg.precu1, cfg.xdeg)
    if tag and cfg.fixtures and cfg.use_fixtures:
        path = action.fixture_path(cfg.fixtures, tag, prec)
        if path.exists():
            return action.load_fixture(path)
    return action.lift_action(gamma, *prec)


def cmd_verify(args, cfg: Config) -> int:
    report = adss.verify_suite(args.suite, seed=cfg.seed)
    text = json.dumps(report, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0 if report["passed"] else 1


def cmd_act(args, cfg: Config) -> int:
    gamma = _parse_gamma(args.gamma, cfg)
    tag = args.gamma if args.gamma in _NAMED_GAMMAS else None
    iso = _get_iso(gamma, tag, cfg)
    elem = _parse_element(args.element, cfg)
    print(json.dumps(action.act_on(iso, elem).to_json(), indent=1))
    return 0


def cmd_detect(args, cfg: Config) -> int:
    rec = adss.bockstein_detect(args.i, args.j)
    print(json.dumps(rec.to_json(), indent=1))
    return 0


def cmd_chart(args, cfg: Config) -> int:
    page = anss_chart.build_e2(args.max_stem)
    if args.page == "einf":
        page = anss_chart.apply_d3(page)
    fmt = args.format or cfg.fmt
    sys.stdout.write(anss_chart.emit_chart(page, "tsv" if fmt == "tsv" else fmt))
    return 0


def cmd_fixture(args, cfg: Config) -> int:
    prec = (cfg.prec2, cfg.precu1, cfg.xdeg)
    iso = action.named_iso(args.gamma, *prec)
    root = Path(cfg.fixtures or ".")
    root.mkdir(parents=True, exist_ok=True)
    path = action.fixture_path(root, args.gamma, prec)
    action.save_fixture(iso, path)
    print(str(path))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="k2alpha",
        description="exact computations around the height-2 stabilizer action",
    )
    p.add_argument("--prec2", type=int, default=9, help="2-adic precision N")
    p.add_argument("--precu1", type=int, default=24, help="u1-window M")
    p.add_argument("--xdeg", type=int, default=17, help="formal-degree window D")
    p.add_argument("--window", type=int, default=96, help="degree bound |t|")
    p.add_argument("--format", choices=["json", "tsv", "svg"], default=None)
    p.add_argument("--fixtures", default=None, help="directory of StarIso fixtures")
    p.add_argument("--no-fixtures", action="store_true", help="force recomputation")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled batteries")
    sub = p.add_subparsers(dest="command", required=True)

    sv = sub.add_parser("verify", help="run a verification suite")
    sv.add_argument("--suite", required=True)
    sv.add_argument("--out", default=None)
    sv.set_defaults(fn=cmd_verify)

    sa = sub.add_parser("act", help="apply gamma_* to an element expression")
    sa.add_argument("--gamma", required=True, help="named element or digit literal")
    sa.add_argument("--element", required=True, help="e.g. 'c4', 'v1^2', '16 v1 v2'")
    sa.set_defaults(fn=cmd_act)

    sd = sub.add_parser("detect", help="detection record of alpha_{i/j}")
    sd.add_argument("--i", type=int, required=True)
    sd.add_argument("--j", type=int, required=True)
    sd.set_defaults(fn=cmd_detect)

    sc = sub.add_parser("chart", help="emit the family chart")
    sc.add_argument("--max-stem", type=int, default=25)
    sc.add_argument("--page", choices=["e2", "einf"], default="e2")
    sc.set_defaults(fn=cmd_chart)

    sf = sub.add_parser("fixture", help="solve and store a named action fixture")
    sf.add_argument("--gamma", choices=["alpha", "pi", "omega", "minus_one"], required=True)
    sf.set_defaults(fn=cmd_fixture)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = Config(
            prec2=args.prec2,
            precu1=args.precu1,
            xdeg=args.xdeg,
            window=args.window,
            fixtures=args.fixtures,
            use_fixtures=not args.no_fixtures,
            fmt=args.format or "json",
            seed=args.seed,
        ).validate()
        return args.fn(args, cfg)
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
