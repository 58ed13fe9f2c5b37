"""Graphical identification checks.

Counterfactual independence assumptions are checked through their usual
backdoor-path surrogates, which are sufficient rather than necessary
conditions.  Vector treatments are handled jointly: the backdoor paths of one
treatment node that run through another treatment node are ignored, which is
the same as d-separation in the graph with every edge out of a treatment
removed.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Union

from .dag import (
    Dag,
    NodeKind,
    Path,
    _as_set,
    d_separated,
    descendants,
    directed_reach,
    first_open_path,
)
from .errors import InadmissibleNode, OverlappingSets, SearchLimitExceeded

MAX_ADJUSTMENT_CANDIDATES = 20

EXCH_AY = "Exch-AY"
EXCH_MY = "Exch-MY"
EXCH_AM = "Exch-AM"
RECANTING_WITNESS = "RecantingWitness"

DETERMINISTIC_FLAG = (
    "conditioning on deterministic node {node} may block part of the effect of "
    "interest, because it lies on a causal pathway from the treatments to the outcome"
)


@dataclass(frozen=True)
class ActivationSpec:
    """Edges whose tail takes the same value in both terms of a contrast."""

    deactivated_edges: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "deactivated_edges", frozenset(map(tuple, self.deactivated_edges)))

    def validate(self, dag: Dag):
        missing = [e for e in sorted(self.deactivated_edges) if not dag.has_edge(*e)]
        if missing:
            raise ValueError(f"deactivated edges not in graph: {missing}")


@dataclass(frozen=True)
class EffectQuery:
    treatments: frozenset
    outcome: str
    mediators: frozenset = frozenset()
    conditioning: frozenset = frozenset()

    def __post_init__(self):
        for name in ("treatments", "mediators", "conditioning"):
            value = getattr(self, name)
            object.__setattr__(self, name, frozenset([value] if isinstance(value, str) else value))
        groups = [self.treatments, frozenset([self.outcome]), self.mediators, self.conditioning]
        for i, g in enumerate(groups):
            for h in groups[i + 1:]:
                if g & h:
                    raise OverlappingSets(f"query roles overlap on {sorted(g & h)}")
        if not self.treatments:
            raise ValueError("an effect query needs at least one treatment")


@dataclass(frozen=True)
class AssumptionResult:
    holds: bool
    witness: Union[Path, str, None] = None

    def describe(self):
        if self.holds:
            return "holds"
        return f"fails (witness: {self.witness})"


@dataclass(frozen=True)
class IdentReport:
    """Per-assumption verdicts.

    Every verdict is a graphical sufficient condition; a failing one carries
    either an open path or an offending node as witness.
    """

    results: dict
    flags: tuple = field(default=())

    @property
    def identifiable(self) -> bool:
        return all(r.holds for r in self.results.values())

    def __getitem__(self, tag):
        return self.results[tag]

    def to_dict(self):
        return {
            "identifiable": self.identifiable,
            "assumptions": {
                tag: {"holds": r.holds, "witness": None if r.witness is None else str(r.witness)}
                for tag, r in self.results.items()
            },
            "flags": list(self.flags),
        }


def _check_admissible(dag, nodes, role):
    for node in sorted(nodes):
        if dag.kind(node) is NodeKind.LATENT:
            raise InadmissibleNode(f"latent node {node!r} cannot be used as {role}")


def _flags(dag, nodes):
    return tuple(
        DETERMINISTIC_FLAG.format(node=n)
        for n in sorted(nodes)
        if dag.kind(n) is NodeKind.DETERMINISTIC
    )


def _backdoor_witness(dag, sources, targets, z, cut_in=()):
    """First open backdoor path from ``sources`` to ``targets`` given ``z``.

    Edges out of every source are cut (plus edges into ``cut_in``), so only
    backdoor paths avoiding the other sources remain.
    """
    mutilated = dag.mutilate(cut_out=sources, cut_in=cut_in)
    if d_separated(mutilated, sources, targets, z):
        return None
    return first_open_path(mutilated, sources, targets, z, backdoor_only=True)


def _exchangeability(dag, sources, targets, z, cut_in=()):
    sources, targets, z = frozenset(sources), frozenset(targets), frozenset(z)
    bad = sorted(descendants(dag, sources) & z)
    if bad:
        return AssumptionResult(False, bad[0])
    witness = _backdoor_witness(dag, sources, targets, z, cut_in=cut_in)
    return AssumptionResult(witness is None, witness)


def satisfies_backdoor(dag: Dag, treatments, outcome: str, z=()) -> bool:
    """Backdoor criterion for a (possibly vector) treatment.

    ``z`` must hold no descendant of any treatment and must block every
    backdoor path from each treatment to ``outcome``.
    """
    treatments = _as_set(dag, treatments)
    z = _as_set(dag, z)
    dag._check(outcome)
    if z & (treatments | {outcome}):
        raise OverlappingSets("adjustment set overlaps treatments or outcome")
    if outcome in treatments:
        raise OverlappingSets("outcome is also a treatment")
    _check_admissible(dag, z, "an adjustment variable")
    return _exchangeability(dag, treatments, {outcome}, z).holds


def check_block_exchangeability(dag: Dag, q: EffectQuery):
    """Joint exchangeability of the outcome's counterfactuals and the treatments.

    Returns ``(holds, witness)`` where the witness is an open backdoor path,
    or a conditioning node that descends from a treatment.
    """
    if q.mediators:
        raise ValueError("block exchangeability is defined for queries without mediators")
    treatments = _as_set(dag, q.treatments)
    conditioning = _as_set(dag, q.conditioning)
    dag._check(q.outcome)
    _check_admissible(dag, conditioning, "a conditioning variable")
    result = _exchangeability(dag, treatments, {q.outcome}, conditioning)
    return result.holds, result.witness


def minimal_adjustment_sets(dag: Dag, treatments, outcome: str, candidates=None):
    """All inclusion-minimal backdoor adjustment sets drawn from ``candidates``.

    Subsets are searched smallest first.  The result is ordered by size and
    then lexicographically; an empty list means no subset of the candidates
    works.  When ``candidates`` is omitted, every non-latent non-descendant of
    the treatments is a candidate.
    """
    treatments = _as_set(dag, treatments)
    dag._check(outcome)
    banned = descendants(dag, treatments) | treatments | {outcome}
    if candidates is None:
        candidates = [n for n in dag.observed() if n not in banned]
    candidates = sorted(_as_set(dag, candidates))
    _check_admissible(dag, candidates, "an adjustment candidate")
    offending = [c for c in candidates if c in banned]
    if offending:
        raise InadmissibleNode(
            f"candidates must be non-descendants of the treatments, not {offending}"
        )
    if len(candidates) > MAX_ADJUSTMENT_CANDIDATES:
        raise SearchLimitExceeded(
            f"{len(candidates)} candidates exceeds the exhaustive-search bound of "
            f"{MAX_ADJUSTMENT_CANDIDATES}"
        )
    found = []
    for size in range(len(candidates) + 1):
        for subset in combinations(candidates, size):
            s = frozenset(subset)
            if any(f <= s for f in found):
                continue
            if satisfies_backdoor(dag, treatments, outcome, s):
                found.append(s)
    return found


def natural_effect_activation(dag: Dag, treatments, mediators) -> ActivationSpec:
    """Activation spec of a natural direct effect.

    The mediators are evaluated under the same treatment value in both terms,
    so every edge into a mediator whose tail is a treatment, or a descendant of
    one, is deactivated.
    """
    treatments = _as_set(dag, treatments)
    mediators = _as_set(dag, mediators)
    affected = treatments | descendants(dag, treatments)
    return ActivationSpec(
        frozenset((p, m) for m in mediators for p in dag.parents(m) if p in affected)
    )


def find_recanting_witness(dag: Dag, treatments, outcome: str, spec: ActivationSpec) -> Optional[str]:
    """Return the lexicographically first recanting witness, or ``None``.

    A witness W has an activated directed path from a treatment to W, and
    both a deactivated and an activated directed path from W to the outcome.
    A directed path is deactivated when any one of its edges is.
    """
    treatments = _as_set(dag, treatments)
    dag._check(outcome)
    spec.validate(dag)
    if not spec.deactivated_edges:
        return None
    active = [e for e in dag.edges if e not in spec.deactivated_edges]
    from_treatment = directed_reach(dag, treatments, edges=active)
    to_outcome_active = directed_reach(dag, [outcome], edges=active, reverse=True)
    to_outcome_any = directed_reach(dag, [outcome], reverse=True) | {outcome}
    for w in sorted(from_treatment & to_outcome_active):
        if w in treatments or w == outcome:
            continue
        downstream = directed_reach(dag, [w]) | {w}
        if any(u in downstream and v in to_outcome_any for u, v in spec.deactivated_edges):
            return w
    return None


def _query_sets(dag, q):
    treatments = _as_set(dag, q.treatments)
    mediators = _as_set(dag, q.mediators)
    conditioning = _as_set(dag, q.conditioning)
    dag._check(q.outcome)
    if not mediators:
        raise ValueError("mediated-effect checks need at least one mediator")
    _check_admissible(dag, conditioning, "a conditioning variable")
    return treatments, mediators, conditioning


def _mediator_outcome(dag, treatments, mediators, outcome, conditioning):
    bad = sorted(descendants(dag, mediators) & conditioning)
    if bad:
        return AssumptionResult(False, bad[0])
    witness = _backdoor_witness(dag, mediators, {outcome}, treatments | conditioning)
    return AssumptionResult(witness is None, witness)


def check_natural_effects(dag: Dag, q: EffectQuery) -> IdentReport:
    """Graphical checks for natural direct and indirect effects.

    * Exch-AY: no open backdoor path from the treatments to the outcome
      given the conditioning set, ignoring paths that enter a mediator.
    * Exch-MY: no open backdoor path from the mediators to the outcome given
      treatments and conditioning set.
    * Exch-AM: no open backdoor path from the treatments to the mediators.
    * RecantingWitness: no recanting witness once the treatment-side edges
      into the mediators are deactivated.
    """
    treatments, mediators, conditioning = _query_sets(dag, q)
    witness = find_recanting_witness(
        dag, treatments, q.outcome, natural_effect_activation(dag, treatments, mediators)
    )
    results = {
        EXCH_AY: _exchangeability(dag, treatments, {q.outcome}, conditioning, cut_in=mediators),
        EXCH_MY: _mediator_outcome(dag, treatments, mediators, q.outcome, conditioning),
        EXCH_AM: _exchangeability(dag, treatments, mediators, conditioning),
        RECANTING_WITNESS: AssumptionResult(witness is None, witness),
    }
    return IdentReport(results, _flags(dag, conditioning))


def check_controlled_direct(dag: Dag, q: EffectQuery) -> IdentReport:
    """Graphical checks for the controlled direct effect.

    Only Exch-AY and Exch-MY are needed.  Exch-AY uses the part of the
    conditioning set that is not caused by treatment; Exch-MY uses all of it,
    so post-treatment confounders of the mediator-outcome relation may be
    listed in the query.
    """
    treatments, mediators, conditioning = _query_sets(dag, q)
    pretreatment = conditioning - descendants(dag, treatments)
    results = {
        EXCH_AY: _exchangeability(dag, treatments, {q.outcome}, pretreatment, cut_in=mediators),
        EXCH_MY: _mediator_outcome(dag, treatments, mediators, q.outcome, conditioning),
    }
    return IdentReport(results, _flags(dag, conditioning))
