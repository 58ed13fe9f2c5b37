"""Constructors for the interference diagram families.

Node naming is uniform across builders so queries can be written by hand:

* block designs: ``A1..Am``, ``C1..Cm``, ``Y1..Ym``, plus ``hC`` (a
  deterministic summary of the covariates), ``D`` (block-level covariate)
  and ``W`` (latent common cause of the covariates);
* contagion panels: ``Y{i}_{t}`` for day ``t < T``, ``Y{i}_T`` for the end of
  follow-up, ``T0`` for the day of the first case, ``Y{i}_T0`` for status at
  that day and a latent ``U`` for unobserved outcome history;
* allocation: ``Z{i}``, ``A{i}``, ``Z*_{i}`` (deterministic), ``T{i}``,
  ``Y{i}``;
* social contagion: ``O{i}_{t}`` (observed trait) and ``B{i}_{t}`` (belief).
"""

from dataclasses import dataclass
from enum import Enum
from itertools import permutations

from .dag import Dag, NodeKind
from .errors import InvalidSize, InvalidSpec

OBS, LAT, DET = NodeKind.OBSERVED, NodeKind.LATENT, NodeKind.DETERMINISTIC


class CovariateScenario(str, Enum):
    NO_INTERFERENCE = "NoInterference"
    INDEPENDENT_C = "IndependentC"
    CJ_TO_YI = "CjToYi"
    CJ_TO_AI = "CjToAi"
    H_OF_C_TO_Y = "HOfC_toY"
    H_OF_C_TO_A = "HOfC_toA"
    BLOCK_LEVEL_D = "BlockLevelD"
    COMMON_CAUSE_OF_C = "CommonCauseOfC"
    COVARIATE_INTERFERENCE_ONLY = "CovariateInterferenceOnly"


class Observation(str, Enum):
    FULL_PANEL = "FullPanel"
    ENDPOINT_ONLY = "EndpointOnly"
    FIRST_CASE = "FirstCase"
    COUNT_OUTCOME = "CountOutcome"


class Followup(str, Enum):
    FIXED_SEASON_END = "FixedSeasonEnd"
    TRUNCATED = "TruncatedT0PlusS"


class GroupProperties(str, Enum):
    NONE = "None"
    PREALLOCATION = "Preallocation"
    COMPOSITION_DEPENDENT = "CompositionDependent"
    Z_DEPENDENT = "ZDependent"


class SocialStructure(str, Enum):
    LATENT_BELIEF_BACKDOOR = "LatentBeliefBackdoor"
    BELIEF_MEDIATED = "BeliefMediated"


@dataclass(frozen=True)
class ContagionSpec:
    m: int = 2
    T: int = 4
    observation: Observation = Observation.FULL_PANEL
    with_confounders: bool = False

    def __post_init__(self):
        object.__setattr__(self, "observation", Observation(self.observation))
        if self.m < 2 or self.T < 2:
            raise InvalidSpec(f"contagion needs m >= 2 and T >= 2, got m={self.m}, T={self.T}")


@dataclass(frozen=True)
class VaccineTrialSpec:
    one_event_only: bool = True
    partner_only_source: bool = True
    followup: Followup = Followup.FIXED_SEASON_END
    s: int = 0
    both_randomized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "followup", Followup(self.followup))
        if self.followup is Followup.TRUNCATED and self.s < 1:
            raise InvalidSpec("a truncated follow-up needs s >= 1 days")


@dataclass(frozen=True)
class AllocationSpec:
    m: int = 3
    L: int = 2
    group_props: GroupProperties = GroupProperties.NONE
    randomized: bool = True

    def __post_init__(self):
        object.__setattr__(self, "group_props", GroupProperties(self.group_props))
        if self.m < 2 or not 2 <= self.L <= self.m:
            raise InvalidSpec(f"allocation needs m >= 2 and 2 <= L <= m, got m={self.m}, L={self.L}")


@dataclass(frozen=True)
class SocialContagionSpec:
    structure: SocialStructure = SocialStructure.LATENT_BELIEF_BACKDOOR
    timesteps: int = 3
    m: int = 2

    def __post_init__(self):
        object.__setattr__(self, "structure", SocialStructure(self.structure))
        if self.timesteps < 2 or self.m < 2:
            raise InvalidSpec("social contagion needs timesteps >= 2 and m >= 2")


class _Graph:
    """Ordered node/edge accumulator used by the builders."""

    def __init__(self):
        self.nodes = {}
        self.edges = []

    def node(self, name, kind=OBS):
        self.nodes.setdefault(name, kind)
        return name

    def edge(self, parent, child):
        self.edges.append((parent, child))

    def build(self):
        return Dag(self.nodes, self.edges)


def build_fig1() -> Dag:
    """Single confounder ``C`` of ``A`` and ``Y``."""
    return Dag(["C", "A", "Y"], [("C", "A"), ("C", "Y"), ("A", "Y")])


def build_fig2() -> Dag:
    """Figure-1 graph with mediator ``M`` on a second path from ``A`` to ``Y``."""
    return Dag(
        ["C", "A", "M", "Y"],
        [("C", "A"), ("C", "Y"), ("A", "M"), ("M", "Y"), ("A", "Y")],
    )


def build_block_dag(scenario, m: int = 2) -> Dag:
    """Block of ``m`` individuals under one covariate-control scenario."""
    scenario = CovariateScenario(scenario)
    if m < 1 or (m == 1 and scenario is not CovariateScenario.NO_INTERFERENCE):
        raise InvalidSize(f"block size {m} is too small for {scenario.value}")
    S = CovariateScenario
    g = _Graph()
    units = range(1, m + 1)
    for i in units:
        g.node(f"C{i}"), g.node(f"A{i}"), g.node(f"Y{i}")
        g.edge(f"C{i}", f"A{i}")
        g.edge(f"C{i}", f"Y{i}")
        g.edge(f"A{i}", f"Y{i}")
    pairs = list(permutations(units, 2))
    if scenario not in (S.NO_INTERFERENCE, S.COVARIATE_INTERFERENCE_ONLY):
        for i, j in pairs:
            g.edge(f"A{i}", f"Y{j}")
    if scenario is S.CJ_TO_YI:
        for i, j in pairs:
            g.edge(f"C{j}", f"Y{i}")
    elif scenario is S.CJ_TO_AI:
        for i, j in pairs:
            g.edge(f"C{j}", f"A{i}")
    elif scenario in (S.H_OF_C_TO_Y, S.H_OF_C_TO_A):
        g.node("hC", DET)
        target = "Y" if scenario is S.H_OF_C_TO_Y else "A"
        for i in units:
            g.edge(f"C{i}", "hC")
            g.edge("hC", f"{target}{i}")
    elif scenario is S.BLOCK_LEVEL_D:
        g.node("D")
        for i in units:
            g.edge("D", f"A{i}")
            g.edge("D", f"Y{i}")
    elif scenario is S.COMMON_CAUSE_OF_C:
        g.node("W", LAT)
        for i in units:
            g.edge("W", f"C{i}")
    elif scenario is S.COVARIATE_INTERFERENCE_ONLY:
        for i, j in pairs:
            g.edge(f"C{i}", f"A{j}")
            g.edge(f"C{i}", f"Y{j}")
    return g.build()


def build_contagion_dag(spec: ContagionSpec) -> Dag:
    """Contagion over a follow-up period, at one of four levels of observation.

    The full panel keeps every day; the other variants project the unobserved
    days onto a latent ``U``.  With confounders, ``C{i}`` points at ``A{i}``
    and at every observed outcome node of individual ``i``.
    """
    if not isinstance(spec, ContagionSpec):
        raise InvalidSpec(f"expected a ContagionSpec, got {type(spec).__name__}")
    O = Observation
    g = _Graph()
    units = range(1, spec.m + 1)
    pairs = list(permutations(units, 2))
    outcome_nodes = {i: [] for i in units}
    for i in units:
        g.node(f"A{i}")

    if spec.observation is O.FULL_PANEL:
        def name(i, t):
            return f"Y{i}_T" if t == spec.T else f"Y{i}_{t}"
        for t in range(1, spec.T + 1):
            for i in units:
                outcome_nodes[i].append(g.node(name(i, t)))
                g.edge(f"A{i}", name(i, t))
        for t in range(1, spec.T):
            for i in units:
                g.edge(name(i, t), name(i, t + 1))
            for i, j in pairs:
                g.edge(name(i, t), name(j, t + 1))
    else:
        g.node("U", LAT)
        if spec.observation is not O.ENDPOINT_ONLY:
            g.node("T0")
        for i in units:
            end = g.node(f"Y{i}_T")
            outcome_nodes[i].append(end)
            g.edge(f"A{i}", "U")
            g.edge("U", end)
            g.edge(f"A{i}", end)
            if spec.observation is O.ENDPOINT_ONLY:
                continue
            first = g.node(f"Y{i}_T0")
            outcome_nodes[i].insert(0, first)
            g.edge(f"A{i}", "T0")
            g.edge("T0", first)
            g.edge(f"A{i}", first)
            g.edge(first, "U")
            g.edge(first, end)
        if spec.observation is not O.ENDPOINT_ONLY:
            g.edge("T0", "U")
        if spec.observation is O.COUNT_OUTCOME:
            for i, j in pairs:
                g.edge(f"A{i}", f"Y{j}_T0")
                g.edge(f"A{i}", f"Y{j}_T")

    if spec.with_confounders:
        for i in units:
            g.node(f"C{i}")
            g.edge(f"C{i}", f"A{i}")
            for y in outcome_nodes[i]:
                g.edge(f"C{i}", y)
    return g.build()


def build_vaccine_dag(spec: VaccineTrialSpec) -> Dag:
    """Household of two in which individual 1 is randomized to vaccine.

    * Without the one-event assumption the unobserved history of both
      individuals is a latent ``U`` between ``A1`` and both end-of-follow-up
      outcomes.
    * With one event per person and individual 1 as the only source of
      infection for individual 2, ``Y1_T0`` (equal to ``Y1_T``) mediates
      ``A1 -> Y2_T`` alongside the direct infectiousness arrow.
    * Dropping the single-source assumption adds ``T0``, caused by ``A1`` and
      causing ``Y1_T0``; ``T0 -> Y2_T`` is present only when follow-up ends at
      a fixed date.  With ``T = T0 + s`` the outcome node ``Y2_T`` stands for
      status at ``T0 + s``.
    """
    if not isinstance(spec, VaccineTrialSpec):
        raise InvalidSpec(f"expected a VaccineTrialSpec, got {type(spec).__name__}")
    g = _Graph()
    g.node("A1")
    if not spec.one_event_only:
        g.node("U", LAT)
        g.node("Y1_T"), g.node("Y2_T")
        g.edge("A1", "U")
        g.edge("A1", "Y1_T")
        g.edge("U", "Y1_T")
        g.edge("U", "Y2_T")
        if spec.both_randomized:
            g.node("A2")
            g.edge("A2", "U")
            g.edge("A2", "Y2_T")
        return g.build()

    g.node("Y1_T0"), g.node("Y2_T")
    g.edge("A1", "Y1_T0")
    g.edge("Y1_T0", "Y2_T")
    g.edge("A1", "Y2_T")
    if not spec.partner_only_source:
        g.node("T0")
        g.edge("A1", "T0")
        g.edge("T0", "Y1_T0")
        if spec.followup is Followup.FIXED_SEASON_END:
            g.edge("T0", "Y2_T")
    if spec.both_randomized:
        g.node("A2")
        g.edge("A2", "Y2_T")
        if not spec.partner_only_source:
            g.edge("A2", "Y1_T0")
            g.edge("A2", "T0")
    return g.build()


def build_allocation_dag(spec: AllocationSpec) -> Dag:
    """Allocation of ``m`` individuals to ``L`` groups within one block.

    ``Z*_i`` holds the baseline covariates of the individuals who share
    ``i``'s group, so it depends on every assignment and on every other
    individual's covariates.
    """
    if not isinstance(spec, AllocationSpec):
        raise InvalidSpec(f"expected an AllocationSpec, got {type(spec).__name__}")
    G = GroupProperties
    g = _Graph()
    units = range(1, spec.m + 1)
    for i in units:
        g.node(f"Z{i}"), g.node(f"A{i}"), g.node(f"Z*_{i}", DET), g.node(f"Y{i}")
        g.edge(f"Z{i}", f"Y{i}")
        g.edge(f"Z*_{i}", f"Y{i}")
        g.edge(f"A{i}", f"Z*_{i}")
    for i, j in permutations(units, 2):
        g.edge(f"Z{i}", f"Z*_{j}")
        g.edge(f"A{i}", f"Z*_{j}")
    if not spec.randomized:
        for i in units:
            for j in units:
                g.edge(f"Z{j}", f"A{i}")
    if spec.group_props is not G.NONE:
        for i in units:
            g.node(f"T{i}")
            g.edge(f"A{i}", f"T{i}")
            g.edge(f"T{i}", f"Y{i}")
        if spec.group_props in (G.COMPOSITION_DEPENDENT, G.Z_DEPENDENT):
            for i, j in permutations(units, 2):
                g.edge(f"A{j}", f"T{i}")
        if spec.group_props is G.Z_DEPENDENT:
            for i in units:
                for j in units:
                    g.edge(f"Z{j}", f"T{i}")
    return g.build()


def build_social_contagion_dag(spec: SocialContagionSpec) -> Dag:
    """Observed traits driven by latent, socially transmitted beliefs.

    Beliefs persist and spread (``B{i}_{t} -> B{i}_{t+1}``, ``B{j}_{t+1}``)
    and shape next-period traits.  In the belief-mediated structure a trait
    also shapes other individuals' contemporaneous beliefs, which opens a
    directed trait-to-trait path.
    """
    if not isinstance(spec, SocialContagionSpec):
        raise InvalidSpec(f"expected a SocialContagionSpec, got {type(spec).__name__}")
    g = _Graph()
    units = range(1, spec.m + 1)
    steps = range(1, spec.timesteps + 1)
    for t in steps:
        for i in units:
            g.node(f"O{i}_{t}")
            g.node(f"B{i}_{t}", LAT)
    for t in steps:
        for i in units:
            if t < spec.timesteps:
                g.edge(f"B{i}_{t}", f"O{i}_{t + 1}")
                g.edge(f"B{i}_{t}", f"B{i}_{t + 1}")
                for j in units:
                    if j != i:
                        g.edge(f"B{i}_{t}", f"B{j}_{t + 1}")
            if spec.structure is SocialStructure.BELIEF_MEDIATED:
                for j in units:
                    if j != i:
                        g.edge(f"O{i}_{t}", f"B{j}_{t}")
    return g.build()


_BLOCK_FIGURES = {
    "fig3": CovariateScenario.NO_INTERFERENCE,
    "fig4": CovariateScenario.INDEPENDENT_C,
    "fig5a": CovariateScenario.CJ_TO_YI,
    "fig5b": CovariateScenario.CJ_TO_AI,
    "fig5c": CovariateScenario.H_OF_C_TO_Y,
    "fig5d": CovariateScenario.H_OF_C_TO_A,
    "fig5e": CovariateScenario.BLOCK_LEVEL_D,
    "fig5f": CovariateScenario.COMMON_CAUSE_OF_C,
    "fig5g": CovariateScenario.COVARIATE_INTERFERENCE_ONLY,
}

_CONTAGION_FIGURES = {
    "fig6": (Observation.FULL_PANEL, False),
    "fig7": (Observation.ENDPOINT_ONLY, False),
    "fig8": (Observation.FIRST_CASE, False),
    "fig9": (Observation.COUNT_OUTCOME, False),
    "fig10": (Observation.ENDPOINT_ONLY, True),
}

_VACCINE_FIGURES = {
    "fig11": VaccineTrialSpec(one_event_only=False, partner_only_source=False),
    "fig12": VaccineTrialSpec(one_event_only=True, partner_only_source=True),
    "fig13": VaccineTrialSpec(one_event_only=True, partner_only_source=False),
    "fig13s": VaccineTrialSpec(
        one_event_only=True, partner_only_source=False, followup=Followup.TRUNCATED, s=7
    ),
}

_ALLOCATION_FIGURES = {
    "fig14": GroupProperties.NONE,
    "fig15": GroupProperties.PREALLOCATION,
    "fig15dashed": GroupProperties.COMPOSITION_DEPENDENT,
    "fig16": GroupProperties.Z_DEPENDENT,
}

_SOCIAL_FIGURES = {
    "fig17": SocialStructure.LATENT_BELIEF_BACKDOOR,
    "fig18": SocialStructure.BELIEF_MEDIATED,
}

FIGURES = (
    ("fig1", "fig2")
    + tuple(_BLOCK_FIGURES)
    + tuple(_CONTAGION_FIGURES)
    + tuple(_VACCINE_FIGURES)
    + tuple(_ALLOCATION_FIGURES)
    + tuple(_SOCIAL_FIGURES)
)


def normalize_figure(name: str) -> str:
    key = str(name).strip().lower().replace("_", "").replace("-", "")
    if not key.startswith("fig"):
        key = "fig" + key
    if key not in FIGURES:
        raise InvalidSpec(f"unknown figure {name!r}; known: {', '.join(FIGURES)}")
    return key


def build_figure(name: str, m=None, T=None, timesteps=None, randomized=True) -> Dag:
    """Build a figure by alias (``fig1`` ... ``fig18``, ``5a`` also accepted).

    ``m`` sets the block size, ``T`` the contagion horizon and ``timesteps``
    the social-contagion horizon; unset values take the defaults used in the
    figures (blocks of two, three for allocation).
    """
    key = normalize_figure(name)
    if key == "fig1":
        return build_fig1()
    if key == "fig2":
        return build_fig2()
    if key in _BLOCK_FIGURES:
        return build_block_dag(_BLOCK_FIGURES[key], 2 if m is None else m)
    if key in _CONTAGION_FIGURES:
        observation, confounders = _CONTAGION_FIGURES[key]
        return build_contagion_dag(
            ContagionSpec(2 if m is None else m, 4 if T is None else T, observation, confounders)
        )
    if key in _VACCINE_FIGURES:
        return build_vaccine_dag(_VACCINE_FIGURES[key])
    if key in _ALLOCATION_FIGURES:
        return build_allocation_dag(
            AllocationSpec(3 if m is None else m, 2, _ALLOCATION_FIGURES[key], randomized)
        )
    return build_social_contagion_dag(
        SocialContagionSpec(_SOCIAL_FIGURES[key], 3 if timesteps is None else timesteps, 2 if m is None else m)
    )


def build_from_spec(spec: dict) -> Dag:
    """Build from a JSON-style mapping with a ``family`` key.

    Families: ``figure`` (``name``, optional ``m``/``T``/``timesteps``),
    ``block`` (``scenario``, ``m``), ``contagion``, ``vaccine``,
    ``allocation`` and ``social``, whose remaining keys are the fields of the
    corresponding spec class.
    """
    spec = dict(spec)
    family = spec.pop("family", None)
    try:
        if family == "figure":
            return build_figure(spec.pop("name"), **spec)
        if family == "block":
            return build_block_dag(spec["scenario"], spec.get("m", 2))
        if family == "contagion":
            return build_contagion_dag(ContagionSpec(**spec))
        if family == "vaccine":
            return build_vaccine_dag(VaccineTrialSpec(**spec))
        if family == "allocation":
            return build_allocation_dag(AllocationSpec(**spec))
        if family == "social":
            return build_social_contagion_dag(SocialContagionSpec(**spec))
    except (TypeError, KeyError, ValueError) as exc:
        raise InvalidSpec(f"bad {family} spec: {exc}") from exc
    raise InvalidSpec(f"unknown builder family {family!r}")
