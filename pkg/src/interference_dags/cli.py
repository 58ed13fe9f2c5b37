"""Command-line front end: ``interference-dags <subcommand> ...``.

Exit codes: 0 on success, 1 on a domain error (bad graph, failed check,
positivity violation, ...), 2 on a usage error.
"""

import argparse
import contextlib
import json
import sys
from fractions import Fraction

import numpy as np

from . import builders, dag as dag_mod, estimands as est, identification as ident
from .dot import parse_dot, to_dot
from .errors import InterferenceDagError
from .scm import counterfactual_expectation, joint_distribution, random_scm
from .scm_io import load_scm

DECIMALS = 12


def format_rational(value) -> str:
    """``p/q (0.xxxxxxxxxxxx)`` with an exactly rounded 12-digit decimal."""
    if value is None:
        return "n/a"
    return f"{Fraction(value)} ({decimal(value)})"


def decimal(value) -> str:
    q = Fraction(value)
    scaled = round(abs(q) * 10 ** DECIMALS)
    whole, frac = divmod(scaled, 10 ** DECIMALS)
    sign = "-" if q < 0 and scaled else ""
    return f"{sign}{whole}.{frac:0{DECIMALS}d}"


def _rational_json(value):
    if value is None:
        return None
    return {"exact": str(Fraction(value)), "decimal": decimal(value)}


def _names(text):
    if text is None:
        return []
    return [t.strip() for t in text.split(",") if t.strip()]


def _read_text(path):
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _read_json(path):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise InterferenceDagError(f"{path}: not valid JSON ({exc})") from None


class Report:
    """Collects key/value lines and renders them as text or JSON."""

    def __init__(self):
        self.items = []

    def add(self, key, value, json_value=None):
        self.items.append((key, value, value if json_value is None else json_value))

    def render(self, fmt):
        if fmt == "json":
            return json.dumps({k: j for k, _, j in self.items}, indent=2, sort_keys=True)
        lines = []
        for key, value, _ in self.items:
            if isinstance(value, list):
                lines.append(f"{key}:")
                lines.extend(f"  {v}" for v in value)
            else:
                lines.append(f"{key}: {value}")
        return "\n".join(lines)


# -- subcommands -----------------------------------------------------------------

def _graph_from_args(args):
    if getattr(args, "dag", None):
        return parse_dot(_read_text(args.dag))
    if getattr(args, "figure", None):
        return builders.build_figure(args.figure, m=args.m, T=args.T)
    raise _Usage("one of --dag or --figure is required")


def cmd_build(args):
    if args.spec:
        dag = builders.build_from_spec(_read_json(args.spec))
    elif args.figure:
        dag = builders.build_figure(args.figure, m=args.m, T=args.T, timesteps=args.timesteps)
    else:
        raise _Usage("build needs --figure or --spec")
    if args.format == "json":
        return json.dumps(
            {"nodes": {n: k.value for n, k in dag.kinds.items()}, "edges": [list(e) for e in dag.edges]},
            indent=2, sort_keys=True,
        )
    return to_dot(dag)


def cmd_export_dot(args):
    return to_dot(parse_dot(_read_text(args.dag)))


def cmd_dsep(args):
    dag = _graph_from_args(args)
    x, y, z = _names(args.x), _names(args.y), _names(args.given)
    if not x or not y:
        raise _Usage("--x and --y need at least one node each")
    separated = dag_mod.d_separated(dag, x, y, z)
    report = Report()
    report.add("query", f"{','.join(x)} _||_ {','.join(y)} | {','.join(z) or '{}'}")
    report.add("result", "separated" if separated else "connected")
    if not separated:
        report.add("open path", str(dag_mod.first_open_path(dag, x, y, z)))
    return report.render(args.format)


def cmd_adjust(args):
    dag = _graph_from_args(args)
    treatments = _names(args.treatments)
    if not treatments or not args.outcome:
        raise _Usage("--treatments and --outcome are required")
    candidates = _names(args.candidates) if args.candidates is not None else None
    sets = ident.minimal_adjustment_sets(dag, treatments, args.outcome, candidates)
    report = Report()
    report.add("treatments", ",".join(treatments))
    report.add("outcome", args.outcome)
    shown = ["{" + ", ".join(sorted(s)) + "}" for s in sets]
    report.add("minimal adjustment sets", shown or ["none"], [sorted(s) for s in sets])
    return report.render(args.format)


def cmd_identify(args):
    dag = _graph_from_args(args)
    q = _read_json(args.query) if args.query else {}
    treatments = q.get("treatments", _names(args.treatments))
    outcome = q.get("outcome", args.outcome)
    mediators = q.get("mediators", _names(args.mediators))
    conditioning = q.get("conditioning", _names(args.given))
    effect = q.get("effect", args.effect or ("natural" if mediators else "block"))
    if not treatments or not outcome:
        raise _Usage("identify needs treatments and an outcome (--query or --treatments/--outcome)")
    query = ident.EffectQuery(frozenset(treatments), outcome, frozenset(mediators), frozenset(conditioning))
    if effect == "block":
        holds, witness = ident.check_block_exchangeability(dag, query)
        result = ident.IdentReport({"Exch-AY": ident.AssumptionResult(holds, witness)},
                                   ident._flags(dag, query.conditioning))
    elif effect == "natural":
        result = ident.check_natural_effects(dag, query)
    elif effect == "controlled":
        result = ident.check_controlled_direct(dag, query)
    else:
        raise _Usage(f"unknown effect {effect!r}; use block, natural or controlled")
    if args.format == "json":
        return json.dumps(result.to_dict(), indent=2, sort_keys=True)
    report = Report()
    report.add("effect", effect)
    for tag, r in result.results.items():
        report.add(tag, r.describe())
    report.add("identifiable", "yes" if result.identifiable else "no")
    if result.flags:
        report.add("flags", list(result.flags))
    return report.render(args.format)


def _load_model(args):
    if args.scm:
        return load_scm(args.scm)
    if args.figure:
        if args.seed is None:
            raise _Usage("--figure needs --seed to draw a random SCM")
        return random_scm(builders.build_figure(args.figure, m=args.m, T=args.T), np.random.default_rng(args.seed))
    raise _Usage("one of --scm or --figure is required")


def _oracle_value(scm, spec):
    kind = spec.kind
    if kind in est.BLOCK_KINDS:
        return est.block_effect(scm, spec)
    if kind in est.MEDIATED_KINDS:
        return est.path_specific_effect(scm, spec)
    variant = (est.ContagionVariant.CONTROLLED_AT_INFECTED if kind is est.EffectKind.CONTROLLED_INFECTIOUSNESS
               else est.ContagionVariant.NATURAL)
    res = est.contagion_infectiousness(scm, variant, spec.treatments[0], spec.mediators[0], spec.outcomes[0],
                                       spec.scale)
    return res.contagion if kind is est.EffectKind.CONTAGION else res.infectiousness


def _formula_value(joint, spec, formula):
    name = formula.get("name")
    params = {k: v for k, v in formula.items() if k != "name"}
    if name == "MediationFormula":
        return est.natural_effect_formula(
            joint, spec.kind, spec.a, spec.a_prime, spec.treatments, spec.mediators,
            spec.outcomes[(spec.unit or 1) - 1], params.get("conditioning", ()), spec.scale,
        )
    if name == "BackdoorStandardization" and spec.kind is est.EffectKind.OVERALL and "treatments" not in params:
        y = spec.outcomes[(spec.unit or 1) - 1]
        adj = params.get("adjustment", ())
        return est.contrast(
            est.standardize(joint, y, dict(zip(spec.treatments, spec.a)), adj),
            est.standardize(joint, y, dict(zip(spec.treatments, spec.a_prime)), adj),
            spec.scale,
        )
    return est.observational_identification(joint, name, **params)


def cmd_eval(args):
    scm = _load_model(args)
    if not args.query:
        raise _Usage("eval needs --query")
    data = _read_json(args.query)
    formula = data.pop("formula", None)
    spec = est.EstimandSpec.from_dict(data)
    value = _oracle_value(scm, spec)
    report = Report()
    report.add("estimand", spec.kind.value)
    report.add("scale", spec.scale.value)
    report.add("value", format_rational(value), _rational_json(value))
    if formula is not None:
        fval = _formula_value(joint_distribution(scm), spec, formula)
        report.add("formula", formula.get("name"))
        report.add("formula value", format_rational(fval), _rational_json(fval))
        report.add("exact match", "yes" if fval == value else "no", fval == value)
    return report.render(args.format)


_CHECK_DEFAULTS = {
    "contagion": {"treatment": "A1", "mediator": "Y1_T0", "outcome": "Y2_T", "conditioning": []},
    "mediation": {"treatments": ["A"], "mediators": ["M"], "outcome": "Y", "conditioning": ["C"],
                  "a": [1], "a_prime": [0]},
    "backdoor": {"treatments": {"A": 1}, "outcome": "Y", "adjustment": ["C"]},
    "bystander": {"outcome": "Y1", "treatment": "A2", "value": 1, "own_treatment": "A1", "covariates": ["C1"]},
    "appendix": {"outcome": "Y2", "treatment": "A1", "value": 1, "others": ["A2"],
                 "other_covariates": ["C2"], "standardize": ["C1"]},
}


def _checks(scm, effect, p):
    """Yield ``(name, oracle value, formula value, identified)`` rows."""
    dag = scm.dag
    joint = joint_distribution(scm)
    if effect == "contagion":
        q = ident.EffectQuery(frozenset([p["treatment"]]), p["outcome"], frozenset([p["mediator"]]),
                              frozenset(p["conditioning"]))
        identified = ident.check_natural_effects(dag, q).identifiable
        res = est.contagion_infectiousness(scm, "Natural", p["treatment"], p["mediator"], p["outcome"])
        args = ((1,), (0,), (p["treatment"],), (p["mediator"],), p["outcome"], p["conditioning"])
        yield "contagion", res.contagion, est.natural_effect_formula(joint, "Contagion", *args), identified
        yield "infectiousness", res.infectiousness, est.natural_effect_formula(joint, "Infectiousness", *args), identified
        yield "contagion + infectiousness = spillover", res.spillover, res.contagion + res.infectiousness, True
    elif effect == "mediation":
        q = ident.EffectQuery(frozenset(p["treatments"]), p["outcome"], frozenset(p["mediators"]),
                              frozenset(p["conditioning"]))
        identified = ident.check_natural_effects(dag, q).identifiable
        for kind in ("NaturalDirect", "NaturalIndirect"):
            spec = est.EstimandSpec(kind, p["treatments"], (p["outcome"],), a=p["a"], a_prime=p["a_prime"],
                                    mediators=p["mediators"])
            formula = est.natural_effect_formula(joint, kind, p["a"], p["a_prime"], p["treatments"],
                                                 p["mediators"], p["outcome"], p["conditioning"])
            yield kind, est.path_specific_effect(scm, spec), formula, identified
    elif effect == "backdoor":
        identified = ident.satisfies_backdoor(dag, list(p["treatments"]), p["outcome"], p["adjustment"])
        oracle = counterfactual_expectation(scm, p["outcome"], p["treatments"])
        formula = est.observational_identification(joint, "BackdoorStandardization", **p)
        yield "BackdoorStandardization", oracle, formula, identified
    elif effect == "bystander":
        oracle = est.bystander_expansion(scm, p["outcome"], p["treatment"], p["value"], p["own_treatment"],
                                         p["covariates"])
        formula = est.observational_identification(joint, "BystanderConditional", outcome=p["outcome"],
                                                   treatment=p["treatment"], value=p["value"])
        yield "BystanderConditional", oracle, formula, True
    elif effect == "appendix":
        oracle = est.appendix_expansion(scm, p["outcome"], p["treatment"], p["value"], p["others"],
                                        p["other_covariates"], p["standardize"])
        formula = est.observational_identification(joint, "AppendixAiOnYj", outcome=p["outcome"],
                                                   treatment=p["treatment"], value=p["value"],
                                                   standardize=p["standardize"])
        yield "Appendix standardization", oracle, formula, True


def cmd_oracle_check(args):
    scm = _load_model(args)
    params = dict(_CHECK_DEFAULTS[args.effect])
    if args.query:
        params.update(_read_json(args.query))
    rows = list(_checks(scm, args.effect, params))
    failures = 0
    report = Report()
    report.add("effect", args.effect)
    for name, oracle, formula, identified in rows:
        ok = oracle == formula
        status = "PASS" if ok else ("FAIL" if identified else "FAIL (not identified)")
        failures += not ok and identified
        report.add(name, f"{status} oracle={format_rational(oracle)} formula={format_rational(formula)}",
                   {"status": status, "oracle": _rational_json(oracle), "formula": _rational_json(formula),
                    "identified": identified})
    return report.render(args.format), (1 if failures else 0)


# -- parser --------------------------------------------------------------------------

class _Usage(Exception):
    pass


def build_parser():
    parser = argparse.ArgumentParser(prog="interference-dags", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, graph=False, model=False):
        p.add_argument("--format", choices=("text", "json"), default="text")
        if graph or model:
            p.add_argument("--figure", help="builder alias such as fig5a")
            p.add_argument("--m", type=int, help="block size for builder aliases")
            p.add_argument("--T", type=int, help="time horizon for contagion aliases")
        if graph:
            p.add_argument("--dag", help="DOT file")
        if model:
            p.add_argument("--scm", help="SCM JSON file")
            p.add_argument("--seed", type=int, help="seed for a random SCM on --figure")
            p.add_argument("--query", help="query JSON file")
        return p

    p = common(sub.add_parser("build", help="emit DOT for a figure alias or builder spec"))
    p.add_argument("--figure")
    p.add_argument("--spec", help="builder spec JSON file")
    p.add_argument("--m", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--timesteps", type=int)
    p.set_defaults(func=cmd_build)

    p = common(sub.add_parser("export-dot", help="canonicalize a DOT file"))
    p.add_argument("--dag", required=True)
    p.set_defaults(func=cmd_export_dot)

    p = common(sub.add_parser("dsep", help="d-separation query"), graph=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--given", default="")
    p.set_defaults(func=cmd_dsep)

    p = common(sub.add_parser("adjust", help="minimal backdoor adjustment sets"), graph=True)
    p.add_argument("--treatments", required=True)
    p.add_argument("--outcome", required=True)
    p.add_argument("--candidates")
    p.set_defaults(func=cmd_adjust)

    p = common(sub.add_parser("identify", help="graphical identification report"), graph=True)
    p.add_argument("--query")
    p.add_argument("--treatments")
    p.add_argument("--outcome")
    p.add_argument("--mediators")
    p.add_argument("--given")
    p.add_argument("--effect", choices=("block", "natural", "controlled"))
    p.set_defaults(func=cmd_identify)

    p = common(sub.add_parser("eval", help="evaluate an estimand on an SCM"), model=True)
    p.set_defaults(func=cmd_eval)

    p = common(sub.add_parser("oracle-check", help="formula-vs-oracle equality"), model=True)
    p.add_argument("--effect", required=True, choices=sorted(_CHECK_DEFAULTS))
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        out = args.func(args)
    except _Usage as exc:
        parser.print_usage(stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=stderr)
        return 2
    except (InterferenceDagError, OSError, ZeroDivisionError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    code = 0
    if isinstance(out, tuple):
        out, code = out
    print(out, file=stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
