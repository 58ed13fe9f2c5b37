"""Causal contrasts under interference, from the oracle and from formulas.

Two kinds of functions live here:

* oracle evaluators take an :class:`~interference_dags.scm.Scm` and compute
  counterfactual contrasts exactly by enumeration;
* formula evaluators take only a :class:`~interference_dags.scm.JointTable`,
  so they can use nothing but the observational law.

Units in a block are numbered ``1..m`` and listed in a fixed order;
treatment and outcome tuples must follow that order.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Mapping, Optional, Sequence

from .errors import IncompleteSpec, OverlappingTargets, PositivityViolation
from .scm import (
    CounterfactualQuery,
    JointTable,
    Scm,
    counterfactual_expectation,
    enumerate_worlds,
    nested_counterfactual_expectation,
)


class EffectKind(str, Enum):
    OVERALL = "Overall"
    UNIT_LEVEL = "UnitLevel"
    SPILLOVER = "Spillover"
    TOTAL = "Total"
    NATURAL_DIRECT = "NaturalDirect"
    NATURAL_INDIRECT = "NaturalIndirect"
    CONTROLLED_DIRECT = "ControlledDirect"
    CONTAGION = "Contagion"
    INFECTIOUSNESS = "Infectiousness"
    CONTROLLED_INFECTIOUSNESS = "ControlledInfectiousness"


class Scale(str, Enum):
    ADDITIVE = "additive"
    RATIO = "ratio"


class Formula(str, Enum):
    BYSTANDER_CONDITIONAL = "BystanderConditional"
    APPENDIX_AI_ON_YJ = "AppendixAiOnYj"
    APPENDIX_AI_ON_YI = "AppendixAiOnYi"
    BACKDOOR_STANDARDIZATION = "BackdoorStandardization"


class ContagionVariant(str, Enum):
    NATURAL = "Natural"
    CONTROLLED_AT_INFECTED = "ControlledAtInfected"


BLOCK_KINDS = (EffectKind.OVERALL, EffectKind.UNIT_LEVEL, EffectKind.SPILLOVER, EffectKind.TOTAL)
MEDIATED_KINDS = (EffectKind.NATURAL_DIRECT, EffectKind.NATURAL_INDIRECT, EffectKind.CONTROLLED_DIRECT)


def _tuple(value):
    if value is None:
        return None
    if isinstance(value, (str, int)):
        return (value,)
    return tuple(value)


@dataclass(frozen=True)
class BlockInterventionVector:
    """A block assignment ``a`` with unit ``i``'s own entry optionally overridden."""

    base: tuple
    unit: Optional[int] = None
    value: object = None

    def resolve(self, treatments):
        base = tuple(self.base)
        if len(base) != len(treatments):
            raise IncompleteSpec(
                f"assignment {base} does not cover the {len(treatments)} treatments {tuple(treatments)}"
            )
        values = dict(zip(treatments, base))
        if self.unit is not None:
            if not 1 <= self.unit <= len(treatments):
                raise IncompleteSpec(f"unit index {self.unit} is outside 1..{len(treatments)}")
            values[treatments[self.unit - 1]] = self.value
        return values


@dataclass(frozen=True)
class EstimandSpec:
    """What to compute.

    Parameters
    ----------
    kind : EffectKind or str
    treatments : sequence of treatment nodes ``A1..Am`` in unit order
    outcomes : sequence of outcome nodes ``Y1..Ym`` in the same order
    unit : int or None
        1-based unit index; ``None`` averages over all units of the block.
    a, a_prime : treatment assignments (tuples aligned with ``treatments``)
    a_tilde, a_bar : unit-level values of the unit's own treatment
    mediators : mediator nodes for the mediated kinds
    mediator_values : values the controlled direct effect holds mediators at
    scale : "additive" (differences) or "ratio"
    """

    kind: EffectKind
    treatments: tuple
    outcomes: tuple
    unit: Optional[int] = 1
    a: Optional[tuple] = None
    a_prime: Optional[tuple] = None
    a_tilde: object = None
    a_bar: object = None
    mediators: tuple = ()
    mediator_values: Optional[tuple] = None
    scale: Scale = Scale.ADDITIVE

    def __post_init__(self):
        object.__setattr__(self, "kind", EffectKind(self.kind))
        object.__setattr__(self, "scale", Scale(self.scale))
        for name in ("treatments", "outcomes", "mediators", "a", "a_prime", "mediator_values"):
            object.__setattr__(self, name, _tuple(getattr(self, name)))

    @classmethod
    def from_dict(cls, data: Mapping) -> "EstimandSpec":
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise IncompleteSpec(f"unknown estimand fields {unknown}")
        if "kind" not in data or "treatments" not in data or "outcomes" not in data:
            raise IncompleteSpec("an estimand needs 'kind', 'treatments' and 'outcomes'")
        try:
            return cls(**data)
        except ValueError as exc:
            raise IncompleteSpec(str(exc)) from None

    def units(self):
        if self.unit is None:
            return range(1, len(self.outcomes) + 1)
        if not 1 <= self.unit <= len(self.outcomes):
            raise IncompleteSpec(f"unit {self.unit} is outside 1..{len(self.outcomes)}")
        return (self.unit,)

    def require(self, *names):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise IncompleteSpec(f"{self.kind.value} needs {', '.join(missing)}")


def contrast(first: Fraction, second: Fraction, scale=Scale.ADDITIVE) -> Fraction:
    if Scale(scale) is Scale.RATIO:
        if second == 0:
            raise ZeroDivisionError("ratio contrast with a zero reference expectation")
        return Fraction(first) / second
    return Fraction(first) - second


def _block_mean(scm, spec, intervention_for_unit):
    units = spec.units()
    total = Fraction(0)
    for i in units:
        total += counterfactual_expectation(scm, spec.outcomes[i - 1], intervention_for_unit(i))
    return total / len(units)


def block_effect(scm: Scm, spec: EstimandSpec) -> Fraction:
    """Overall, unit-level, spillover or total effect.

    For unit i, with a~ and a- the unit's own treatment values:

    * Overall    = E[Y_i(a)] - E[Y_i(a')]
    * UnitLevel  = E[Y_i(a_-i, a~)] - E[Y_i(a_-i, a-)]
    * Spillover  = E[Y_i(a_-i, a~)] - E[Y_i(a'_-i, a~)]
    * Total      = E[Y_i(a_-i, a~)] - E[Y_i(a'_-i, a-)]

    Block averages average each expectation over units before contrasting.
    """
    if spec.kind not in BLOCK_KINDS:
        raise IncompleteSpec(f"{spec.kind.value} is not a block effect")
    if len(spec.treatments) != len(spec.outcomes):
        raise IncompleteSpec("block effects need one outcome per treatment")
    t = spec.treatments

    def vec(base, override=None):
        if override is None:
            return lambda i: BlockInterventionVector(base).resolve(t)
        return lambda i: BlockInterventionVector(base, i, override).resolve(t)

    kind = spec.kind
    if kind is EffectKind.OVERALL:
        spec.require("a", "a_prime")
        first, second = vec(spec.a), vec(spec.a_prime)
    elif kind is EffectKind.UNIT_LEVEL:
        spec.require("a", "a_tilde", "a_bar")
        first, second = vec(spec.a, spec.a_tilde), vec(spec.a, spec.a_bar)
    elif kind is EffectKind.SPILLOVER:
        spec.require("a", "a_prime", "a_tilde")
        first, second = vec(spec.a, spec.a_tilde), vec(spec.a_prime, spec.a_tilde)
    else:
        spec.require("a", "a_prime", "a_tilde", "a_bar")
        first, second = vec(spec.a, spec.a_tilde), vec(spec.a_prime, spec.a_bar)
    return contrast(_block_mean(scm, spec, first), _block_mean(scm, spec, second), spec.scale)


def path_specific_effect(scm: Scm, spec: EstimandSpec, mediators=None) -> Fraction:
    """Natural direct, natural indirect or controlled direct effect.

    * NaturalDirect    = E[Y(a, M(a))] - E[Y(a', M(a))]
    * NaturalIndirect  = E[Y(a', M(a))] - E[Y(a', M(a'))]
    * ControlledDirect = E[Y(a, m)] - E[Y(a', m)]

    On the additive scale NaturalDirect + NaturalIndirect is the total
    contrast E[Y(a)] - E[Y(a')]; on the ratio scale their product is.
    """
    if spec.kind not in MEDIATED_KINDS:
        raise IncompleteSpec(f"{spec.kind.value} is not a mediated effect")
    mediators = _tuple(mediators) if mediators is not None else spec.mediators
    if not mediators:
        raise IncompleteSpec(f"{spec.kind.value} needs at least one mediator")
    spec.require("a", "a_prime")
    a = BlockInterventionVector(spec.a).resolve(spec.treatments)
    a_prime = BlockInterventionVector(spec.a_prime).resolve(spec.treatments)
    overlap = sorted(set(mediators) & set(spec.treatments))
    if overlap:
        raise OverlappingTargets(f"mediators {overlap} are also treatments")

    if spec.kind is EffectKind.CONTROLLED_DIRECT:
        spec.require("mediator_values")
        if len(spec.mediator_values) != len(mediators):
            raise IncompleteSpec("one mediator value per mediator is required")
        fixed = dict(zip(mediators, spec.mediator_values))

        def term(outer, inner, y):
            return counterfactual_expectation(scm, y, {**outer, **fixed})
    else:
        def term(outer, inner, y):
            return nested_counterfactual_expectation(
                scm, CounterfactualQuery(y, outer, frozenset(mediators), inner)
            )

    units = spec.units()
    if spec.kind is EffectKind.NATURAL_INDIRECT:
        pairs = ((a_prime, a), (a_prime, a_prime))
    else:
        pairs = ((a, a), (a_prime, a))
    first = sum((term(*pairs[0], spec.outcomes[i - 1]) for i in units), Fraction(0)) / len(units)
    second = sum((term(*pairs[1], spec.outcomes[i - 1]) for i in units), Fraction(0)) / len(units)
    return contrast(first, second, spec.scale)


@dataclass(frozen=True)
class ContagionResult:
    contagion: Optional[Fraction]
    infectiousness: Fraction
    spillover: Fraction

    def as_dict(self):
        return {"contagion": self.contagion, "infectiousness": self.infectiousness, "spillover": self.spillover}


def contagion_infectiousness(scm: Scm, variant=ContagionVariant.NATURAL, treatment="A1",
                             mediator="Y1_T0", outcome="Y2_T", scale=Scale.ADDITIVE) -> ContagionResult:
    """Split the effect of one person's vaccine on the other's infection.

    * contagion      = E[Y2(0, M(1))] - E[Y2(0, M(0))]
    * infectiousness = E[Y2(1, M(1))] - E[Y2(0, M(1))]
    * spillover      = E[Y2(1)] - E[Y2(0)]

    ``M`` is the vaccinated person's early infection status.  The controlled
    variant reports infectiousness with the mediator held at 1 and no
    contagion component.  Node names default to the vaccine-trial builder's.
    """
    variant = ContagionVariant(variant)
    base = dict(treatments=(treatment,), outcomes=(outcome,), a=(1,), a_prime=(0,),
                mediators=(mediator,), scale=scale)
    spill = contrast(
        counterfactual_expectation(scm, outcome, {treatment: 1}),
        counterfactual_expectation(scm, outcome, {treatment: 0}),
        scale,
    )
    if variant is ContagionVariant.CONTROLLED_AT_INFECTED:
        cde = path_specific_effect(
            scm, EstimandSpec(EffectKind.CONTROLLED_DIRECT, mediator_values=(1,), **base)
        )
        return ContagionResult(None, cde, spill)
    nie = path_specific_effect(scm, EstimandSpec(EffectKind.NATURAL_INDIRECT, **base))
    nde = path_specific_effect(scm, EstimandSpec(EffectKind.NATURAL_DIRECT, **base))
    return ContagionResult(nie, nde, spill)


# -- formula evaluators (observational law only) --------------------------------------

def _assignment(values, nodes):
    if isinstance(values, Mapping):
        return {n: values[n] for n in nodes}
    values = _tuple(values)
    if len(values) != len(nodes):
        raise IncompleteSpec(f"assignment {values} does not match nodes {tuple(nodes)}")
    return dict(zip(nodes, values))


def _stratum(joint, names):
    return [(dict(zip(names, key)), p) for key, p in sorted(joint.marginal(names).items(), key=lambda kv: repr(kv[0])) if p]


def _conditional_mean(joint, outcome, given):
    try:
        return joint.expectation(outcome, given)
    except ZeroDivisionError:
        raise PositivityViolation(f"empty stratum {given}", stratum=dict(given)) from None


def mediation_formula(joint: JointTable, a, a_prime, A: Sequence[str], M: Sequence[str], Y: str,
                      C: Sequence[str] = ()) -> Fraction:
    """Observational expression for E[Y(a', M(a))].

    sum_c sum_m E[Y | A=a', M=m, C=c] P(M=m | A=a, C=c) P(C=c)

    Strata are skipped only when their weight is zero; a needed conditional
    with an empty conditioning event raises :class:`PositivityViolation`.
    """
    A, M, C = _tuple(A), _tuple(M), _tuple(C) or ()
    a, a_prime = _assignment(a, A), _assignment(a_prime, A)
    total = Fraction(0)
    for c, pc in _stratum(joint, C):
        p_ac = joint.probability({**a, **c})
        if p_ac == 0:
            raise PositivityViolation(f"P(A={a}, C={c}) = 0", stratum={**a, **c})
        for mval in product(*(joint.domains[n] for n in M)):
            mm = dict(zip(M, mval))
            weight = joint.probability({**mm, **a, **c}) / p_ac
            if weight == 0:
                continue
            total += _conditional_mean(joint, Y, {**a_prime, **mm, **c}) * weight * pc
    return total


def natural_effect_formula(joint: JointTable, kind, a, a_prime, A, M, Y, C=(), scale=Scale.ADDITIVE) -> Fraction:
    """Natural direct or indirect effect assembled from :func:`mediation_formula`."""
    kind = EffectKind(kind)

    def nested(outer, inner):
        return mediation_formula(joint, inner, outer, A, M, Y, C)

    if kind in (EffectKind.NATURAL_DIRECT, EffectKind.INFECTIOUSNESS):
        return contrast(nested(a, a), nested(a_prime, a), scale)
    if kind in (EffectKind.NATURAL_INDIRECT, EffectKind.CONTAGION):
        return contrast(nested(a_prime, a), nested(a_prime, a_prime), scale)
    raise IncompleteSpec(f"no mediation-formula expression for {kind.value}")


def standardize(joint: JointTable, outcome: str, treatment: Mapping, adjustment: Sequence[str] = ()) -> Fraction:
    """sum_z E[Y | A=a, Z=z] P(Z=z)."""
    total = Fraction(0)
    for z, pz in _stratum(joint, _tuple(adjustment) or ()):
        total += _conditional_mean(joint, outcome, {**treatment, **z}) * pz
    return total


def observational_identification(joint: JointTable, formula, **params) -> Fraction:
    """Evaluate one identifying expression on an observational joint table.

    Parameters by formula:

    * ``BystanderConditional``: ``outcome``, ``treatment``, ``value``;
      returns E[Y_i | A_j = a_j].
    * ``AppendixAiOnYj`` / ``AppendixAiOnYi``: ``outcome``, ``treatment``,
      ``value`` and ``standardize`` (the covariates summed over, e.g. C_i or
      D); returns sum_s E[Y | A_i=a_i, S=s] P(S=s).
    * ``BackdoorStandardization``: ``outcome``, ``treatments`` (mapping node ->
      value) and ``adjustment``.
    """
    formula = Formula(formula)
    try:
        if formula is Formula.BYSTANDER_CONDITIONAL:
            return _conditional_mean(joint, params["outcome"], {params["treatment"]: params["value"]})
        if formula in (Formula.APPENDIX_AI_ON_YJ, Formula.APPENDIX_AI_ON_YI):
            return standardize(joint, params["outcome"], {params["treatment"]: params["value"]},
                               params["standardize"])
        return standardize(joint, params["outcome"], dict(params["treatments"]), params.get("adjustment", ()))
    except KeyError as exc:
        raise IncompleteSpec(f"{formula.value} needs parameter {exc.args[0]!r}") from None


# -- oracle-side expansions --------------------------------------------------------------

def _law(scm, nodes):
    """Observational law of any nodes, latent ones included."""
    nodes = tuple(nodes)
    return JointTable(nodes, enumerate_worlds(scm, [{}], [(0, n) for n in nodes]),
                      {n: scm.domains[n] for n in nodes})


def bystander_expansion(scm: Scm, outcome: str, treatment: str, value, own_treatment: str,
                        covariates: Sequence[str]) -> Fraction:
    """sum_{a_i} sum_c E[Y_i(a_i, a_j) | C_i=c] P(A_i=a_i | C_i=c) P(C_i=c).

    Counterfactual terms come from the SCM; the covariates may be latent.
    """
    covariates = _tuple(covariates)
    law = _law(scm, (own_treatment,) + covariates)
    total = Fraction(0)
    for c, pc in _stratum(law, covariates):
        p_c = law.probability(c)
        for ai in scm.domains[own_treatment]:
            weight = law.probability({own_treatment: ai, **c}) / p_c
            if weight:
                y = counterfactual_expectation(scm, outcome, {own_treatment: ai, treatment: value}, given=c)
                total += y * weight * pc
    return total


def appendix_expansion(scm: Scm, outcome: str, treatment: str, value, others: Sequence[str],
                       other_covariates: Sequence[str], standardize_by: Sequence[str]) -> Fraction:
    """Weighted average of covariate-specific counterfactuals.

    sum_{a_j, c_j, s} E[Y(a_i, a_j) | S=s, C_j=c_j]
                      P(A_j=a_j, C_j=c_j | A_i=a_i, S=s) P(S=s)

    where ``others`` are the remaining treatments A_j, ``other_covariates``
    the C_j and ``standardize_by`` the set S.
    """
    others, cj, s_nodes = _tuple(others), _tuple(other_covariates) or (), _tuple(standardize_by)
    cj = tuple(n for n in cj if n not in s_nodes)
    law = _law(scm, (treatment,) + others + cj + s_nodes)
    total = Fraction(0)
    for s, ps in _stratum(law, s_nodes):
        p_as = law.probability({treatment: value, **s})
        if p_as == 0:
            raise PositivityViolation(f"P({treatment}={value}, {s}) = 0", stratum=s)
        for aj in product(*(scm.domains[n] for n in others)):
            aj = dict(zip(others, aj))
            for cval in product(*(scm.domains[n] for n in cj)):
                c = dict(zip(cj, cval))
                weight = law.probability({treatment: value, **aj, **c, **s}) / p_as
                if weight:
                    y = counterfactual_expectation(scm, outcome, {treatment: value, **aj}, given={**s, **c})
                    total += y * weight * ps
    return total
