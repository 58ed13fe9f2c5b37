"""Exact discrete structural causal models.

Every node has a finite ordered domain, a private noise variable with an exact
rational distribution, and a deterministic mechanism ``f(parents, u)`` where
``parents`` maps parent names to values.  All probabilities are
:class:`fractions.Fraction`; nothing in this module uses floating point except
:func:`sample`.

Counterfactuals are computed by propagating several "worlds" through the
graph at once, drawing each node's noise once and sharing it across worlds.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .dag import Dag, NodeKind, _as_set
from .errors import (
    DomainViolation,
    OverlappingSets,
    OverlappingTargets,
    ScmError,
    StateSpaceTooLarge,
    UnknownNode,
)

DEFAULT_MAX_NOISE_STATES = 2 ** 20


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError(f"refusing inexact float {value!r}; pass a Fraction or a 'p/q' string")
    return Fraction(value)


@dataclass(frozen=True)
class Noise:
    """Finite noise distribution; ``probs`` are exact rationals."""

    values: tuple
    probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "probs", tuple(as_fraction(p) for p in self.probs))

    @classmethod
    def point(cls, value=0):
        return cls((value,), (Fraction(1),))

    @classmethod
    def uniform(cls, values):
        values = tuple(values)
        return cls(values, (Fraction(1, len(values)),) * len(values))

    @classmethod
    def bernoulli(cls, p):
        p = as_fraction(p)
        return cls((0, 1), (1 - p, p))

    def __len__(self):
        return len(self.values)


class TableMechanism:
    """Mechanism given by an explicit ``(parent values, noise) -> value`` table."""

    def __init__(self, parents: Sequence[str], table: Mapping):
        self.parents = tuple(parents)
        self.table = dict(table)

    def __call__(self, pa, u):
        return self.table[(tuple(pa[p] for p in self.parents), u)]

    def __repr__(self):
        return f"TableMechanism(parents={self.parents}, rows={len(self.table)})"


class Constant:
    def __init__(self, value):
        self.value = value

    def __call__(self, pa, u):
        return self.value

    def __repr__(self):
        return f"Constant({self.value!r})"


class Scm:
    """A Markovian structural causal model over a :class:`Dag`.

    Parameters
    ----------
    dag : Dag
    domains : mapping node -> sequence of values
    mechanisms : mapping node -> callable ``(parents: dict, u) -> value``
    noise : mapping node -> Noise, optional
        Nodes without an entry get a single-point noise.

    Construction checks only that every node is covered; numeric defects are
    reported by :func:`validate_scm`.
    """

    def __init__(self, dag: Dag, domains: Mapping, mechanisms: Mapping[str, Callable], noise: Optional[Mapping] = None):
        noise = dict(noise or {})
        for label, mapping in (("domain", domains), ("mechanism", mechanisms)):
            missing = [n for n in dag.nodes if n not in mapping]
            if missing:
                raise ScmError(f"missing {label} for nodes {missing}")
        extra = [n for n in (*domains, *mechanisms, *noise) if n not in dag]
        if extra:
            raise UnknownNode(f"SCM mentions nodes not in the graph: {sorted(set(extra))}")
        self.dag = dag
        self.domains = {n: tuple(domains[n]) for n in dag.nodes}
        self.mechanisms = {n: mechanisms[n] for n in dag.nodes}
        self.noise = {n: noise.get(n, Noise.point()) for n in dag.nodes}

    def __repr__(self):
        return f"Scm({self.dag!r})"

    @property
    def noise_space_size(self) -> int:
        return math.prod(len(self.noise[n]) for n in self.dag.nodes)


@dataclass(frozen=True)
class Defect:
    kind: str
    node: str
    detail: str

    def __str__(self):
        return f"{self.kind} at {self.node}: {self.detail}"


def validate_scm(scm: Scm):
    """Return a list of :class:`Defect`; an empty list means the SCM is sound.

    Checks noise normalization, mechanism totality over the product of parent
    domains and noise values, domain membership of mechanism outputs, and
    single-point noise on deterministic nodes.  Never raises.
    """
    defects = []
    for node in scm.dag.nodes:
        nz = scm.noise[node]
        try:
            probs = [as_fraction(p) for p in nz.probs]
        except (TypeError, ValueError) as exc:
            defects.append(Defect("NormalizationDefect", node, f"unreadable probability: {exc}"))
            continue
        if len(probs) != len(nz.values):
            defects.append(Defect("NoiseShapeDefect", node, "noise values and probabilities differ in length"))
        if any(p < 0 for p in probs):
            defects.append(Defect("NegativeProbabilityDefect", node, "negative noise probability"))
        if sum(probs) != 1:
            defects.append(Defect("NormalizationDefect", node, f"noise probabilities sum to {sum(probs)}"))
        if scm.dag.kind(node) is NodeKind.DETERMINISTIC and len(nz.values) != 1:
            defects.append(Defect("DeterministicNoiseDefect", node, "deterministic node with non-degenerate noise"))
        if not scm.domains[node]:
            defects.append(Defect("DomainDefect", node, "empty domain"))
        parents = scm.dag.parents(node)
        mech = scm.mechanisms[node]
        for combo in product(*(scm.domains[p] for p in parents)):
            pa = dict(zip(parents, combo))
            for u in nz.values:
                try:
                    value = mech(pa, u)
                except Exception as exc:  # noqa: BLE001 - any failure is a totality defect
                    defects.append(Defect("TotalityDefect", node, f"undefined at parents={pa}, noise={u!r} ({type(exc).__name__})"))
                    continue
                if value not in scm.domains[node]:
                    defects.append(Defect("DomainDefect", node, f"value {value!r} at parents={pa}, noise={u!r} is outside the domain"))
    return defects


@dataclass(frozen=True)
class InterventionMap:
    assignments: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "assignments", dict(self.assignments))

    def validate(self, scm: Scm):
        for node, value in self.assignments.items():
            if node not in scm.dag:
                raise UnknownNode(f"intervention on unknown node {node!r}")
            if value not in scm.domains[node]:
                raise DomainViolation(f"do({node}={value!r}) is outside the domain {scm.domains[node]}")


def _as_intervention(m):
    if m is None:
        return {}
    if isinstance(m, InterventionMap):
        return m.assignments
    return dict(m)


def intervene(scm: Scm, m) -> Scm:
    """Graph surgery: cut edges into each target and make it a constant."""
    m = _as_intervention(m)
    InterventionMap(m).validate(scm)
    if not m:
        return scm
    dag = scm.dag.mutilate(cut_in=m)
    mechanisms = dict(scm.mechanisms)
    noise = dict(scm.noise)
    kinds = {}
    for node, value in m.items():
        mechanisms[node] = Constant(value)
        noise[node] = Noise.point()
        if dag.kind(node) is NodeKind.DETERMINISTIC:
            kinds[node] = NodeKind.OBSERVED
    if kinds:
        dag = dag.with_kinds(kinds)
    return Scm(dag, scm.domains, mechanisms, noise)


# -- multi-world enumeration -----------------------------------------------------

_SET, _COPY = "set", "copy"


def _check_size(scm, worlds, limit):
    # a node clamped in every world never reads its noise
    size = math.prod(len(scm.noise[n]) for n in scm.dag.nodes if not all(n in w for w in worlds))
    if limit is not None and size > limit:
        raise StateSpaceTooLarge(f"noise space of {size} assignments exceeds the bound {limit}")


def enumerate_worlds(scm: Scm, worlds, outputs, max_states=DEFAULT_MAX_NOISE_STATES):
    """Exact joint law of ``outputs`` across coupled counterfactual worlds.

    ``worlds`` is a list of clamp maps ``node -> ("set", value)`` or
    ``node -> ("copy", k)``; a copy clamp takes the value node has in world
    ``k < current`` under the same noise draw.  ``outputs`` lists
    ``(world index, node)`` pairs.  Returns ``{output values: probability}``.
    """
    order = scm.dag.topological_order
    index = {n: k for k, n in enumerate(order)}
    n_worlds = len(worlds)
    for w, world in enumerate(worlds):
        for node, (how, arg) in world.items():
            if node not in index:
                raise UnknownNode(f"unknown node {node!r}")
            if how == _COPY and not 0 <= arg < w:
                raise ScmError("copy clamps must refer to an earlier world")
            if how == _SET and arg not in scm.domains[node]:
                raise DomainViolation(f"{node}={arg!r} is outside the domain")
    _check_size(scm, worlds, max_states)

    # states: tuple over worlds of per-world value tuples in topological order
    states = {tuple(() for _ in range(n_worlds)): Fraction(1)}
    for node in order:
        parents = scm.dag.parents(node)
        pidx = [index[p] for p in parents]
        mech = scm.mechanisms[node]
        nz = scm.noise[node]
        clamps = [world.get(node) for world in worlds]
        nxt = {}
        for state, prob in states.items():
            for u, pu in zip(nz.values, nz.probs):
                if pu == 0:
                    continue
                new = []
                for w in range(n_worlds):
                    clamp = clamps[w]
                    if clamp is None:
                        vals = state[w]
                        value = mech({p: vals[k] for p, k in zip(parents, pidx)}, u)
                    elif clamp[0] == _SET:
                        value = clamp[1]
                    else:
                        value = new[clamp[1]][-1]
                    new.append(state[w] + (value,))
                key = tuple(new)
                nxt[key] = nxt.get(key, 0) + prob * pu
        states = nxt

    result = {}
    for state, prob in states.items():
        key = tuple(state[w][index[n]] for w, n in outputs)
        result[key] = result.get(key, 0) + prob
    return result


@dataclass(frozen=True)
class JointTable:
    """Exact joint probability table over observed variables.

    ``rows`` maps value tuples (aligned with ``variables``) to positive
    probabilities; absent rows have probability zero.
    """

    variables: tuple
    rows: Mapping
    domains: Mapping = field(default_factory=dict)

    def index(self, names):
        pos = {v: k for k, v in enumerate(self.variables)}
        try:
            return [pos[n] for n in names]
        except KeyError as exc:
            raise UnknownNode(f"{exc.args[0]!r} is not a variable of the joint table") from None

    def marginal(self, names) -> dict:
        names = tuple(names)
        idx = self.index(names)
        out = {}
        for row, p in self.rows.items():
            key = tuple(row[k] for k in idx)
            out[key] = out.get(key, 0) + p
        return out

    def probability(self, event: Mapping = None) -> Fraction:
        event = dict(event or {})
        idx = self.index(event)
        want = tuple(event.values())
        return sum(
            (p for row, p in self.rows.items() if tuple(row[k] for k in idx) == want),
            Fraction(0),
        )

    def expectation(self, outcome: str, given: Mapping = None) -> Fraction:
        """E[outcome | given]; raises ZeroDivisionError on an empty stratum."""
        given = dict(given or {})
        idx = self.index(given)
        (oi,) = self.index([outcome])
        want = tuple(given.values())
        num = den = Fraction(0)
        for row, p in self.rows.items():
            if tuple(row[k] for k in idx) == want:
                num += p * as_fraction(row[oi])
                den += p
        if den == 0:
            raise ZeroDivisionError(f"P({given}) = 0")
        return num / den

    def total(self) -> Fraction:
        return sum(self.rows.values(), Fraction(0))


def joint_distribution(scm: Scm, max_states=DEFAULT_MAX_NOISE_STATES) -> JointTable:
    """Observational joint law of every non-latent node."""
    variables = scm.dag.observed()
    law = enumerate_worlds(scm, [{}], [(0, n) for n in variables], max_states)
    rows = {k: p for k, p in sorted(law.items(), key=lambda kv: repr(kv[0])) if p}
    return JointTable(variables, rows, {n: scm.domains[n] for n in variables})


def _expectation_from_law(law):
    num = den = Fraction(0)
    for key, p in law.items():
        num += p * as_fraction(key[0])
        den += p
    if den == 0:
        raise ZeroDivisionError("conditioning event has probability zero")
    return num / den


def counterfactual_expectation(scm: Scm, outcome: str, m=None, given: Mapping = None,
                               max_states=DEFAULT_MAX_NOISE_STATES) -> Fraction:
    """E[outcome(m)], optionally conditional on ``given`` evaluated in the same world.

    Conditioning is meant for covariates that the intervention does not
    affect, e.g. E[Y(a) | C = c].
    """
    m = _as_intervention(m)
    scm.dag._check(outcome, *m)
    if outcome in m:
        raise OverlappingTargets(f"outcome {outcome!r} is also intervened on")
    InterventionMap(m).validate(scm)
    given = dict(given or {})
    world = {n: (_SET, v) for n, v in m.items()}
    law = enumerate_worlds(scm, [world], [(0, outcome)] + [(0, n) for n in given], max_states)
    want = tuple(given.values())
    law = {k: p for k, p in law.items() if k[1:] == want}
    return _expectation_from_law(law)


@dataclass(frozen=True)
class CounterfactualQuery:
    """``outcome(outer, mediators(inner))``."""

    outcome: str
    outer: Mapping = field(default_factory=dict)
    mediators: frozenset = frozenset()
    inner: Optional[Mapping] = None

    def __post_init__(self):
        object.__setattr__(self, "outer", _as_intervention(self.outer))
        med = self.mediators
        object.__setattr__(self, "mediators", frozenset([med] if isinstance(med, str) else med))
        if self.inner is not None:
            object.__setattr__(self, "inner", _as_intervention(self.inner))
        if bool(self.mediators) != (self.inner is not None):
            raise ValueError("mediators and an inner intervention must be given together")


def nested_counterfactual_expectation(scm: Scm, q: CounterfactualQuery,
                                      max_states=DEFAULT_MAX_NOISE_STATES) -> Fraction:
    """E[Y(outer, M(inner))] with one shared noise draw per unit.

    The mediators are first computed under ``inner``; the outcome is then
    computed under ``outer`` with the mediators clamped to those values.
    """
    scm.dag._check(q.outcome, *q.outer, *q.mediators, *(q.inner or {}))
    if not q.mediators:
        return counterfactual_expectation(scm, q.outcome, q.outer, max_states=max_states)
    targets = set(q.outer) | set(q.inner)
    if q.outcome in targets or q.outcome in q.mediators:
        raise OverlappingTargets(f"outcome {q.outcome!r} is intervened on or a mediator")
    overlap = q.mediators & set(q.outer)
    if overlap:
        raise OverlappingTargets(f"mediators {sorted(overlap)} are also outer targets")
    InterventionMap(q.outer).validate(scm)
    InterventionMap(q.inner).validate(scm)
    inner = {n: (_SET, v) for n, v in q.inner.items()}
    outer = {n: (_SET, v) for n, v in q.outer.items()}
    outer.update({med: (_COPY, 0) for med in q.mediators})
    law = enumerate_worlds(scm, [inner, outer], [(1, q.outcome)], max_states)
    return _expectation_from_law(law)


def conditionally_independent(scm: Scm, x, y, z=(), joint: JointTable = None) -> bool:
    """Exact test of X independent of Y given Z in the observational law.

    Checks P(x, y, z) P(z) = P(x, z) P(y, z) on every cell of every stratum
    with P(z) > 0.
    """
    dag = scm.dag
    x, y, z = _as_set(dag, x), _as_set(dag, y), _as_set(dag, z)
    if x & y or x & z or y & z:
        raise OverlappingSets("x, y and z must be disjoint")
    latent = sorted(n for n in x | y | z if dag.kind(n) is NodeKind.LATENT)
    if latent:
        raise ScmError(f"independence tests are over observed nodes only, got {latent}")
    joint = joint or joint_distribution(scm)
    xs, ys, zs = sorted(x), sorted(y), sorted(z)
    pxyz = joint.marginal(xs + ys + zs)
    pxz = joint.marginal(xs + zs)
    pyz = joint.marginal(ys + zs)
    pz = joint.marginal(zs)
    for zval, pzv in pz.items():
        if pzv == 0:
            continue
        for xval in product(*(scm.domains[n] for n in xs)):
            pxzv = pxz.get(xval + zval, 0)
            for yval in product(*(scm.domains[n] for n in ys)):
                lhs = pxyz.get(xval + yval + zval, 0) * pzv
                if lhs != pxzv * pyz.get(yval + zval, 0):
                    return False
    return True


# -- sampling ----------------------------------------------------------------------

@dataclass(frozen=True)
class Dataset:
    columns: tuple
    rows: tuple

    def column(self, name):
        k = self.columns.index(name)
        return [r[k] for r in self.rows]

    def to_csv(self, handle=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows(self.rows)
        text = buf.getvalue()
        if handle is not None:
            handle.write(text)
        return text


def sample(scm: Scm, n: int, seed: int, include_latent: bool = False) -> Dataset:
    """Draw ``n`` i.i.d. units; reproducible given ``(seed, n)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    order = scm.dag.topological_order
    draws = {}
    for node in order:
        nz = scm.noise[node]
        p = np.array([float(q) for q in nz.probs])
        draws[node] = rng.choice(len(nz.values), size=n, p=p / p.sum())
    columns = order if include_latent else tuple(v for v in order if scm.dag.kind(v) is not NodeKind.LATENT)
    rows = []
    for r in range(n):
        values = {}
        for node in order:
            pa = {p: values[p] for p in scm.dag.parents(node)}
            values[node] = scm.mechanisms[node](pa, scm.noise[node].values[draws[node][r]])
        rows.append(tuple(values[c] for c in columns))
    return Dataset(tuple(columns), tuple(rows))


# -- random models -------------------------------------------------------------------

def random_scm(dag: Dag, rng=None, domain_size=2, noise_size=3, positive=True, max_weight=9) -> Scm:
    """A random table-mechanism SCM with exact rational noise laws.

    With ``positive`` every value of a stochastic node has positive
    probability under every parent configuration (each table row is onto the
    domain), which guarantees positivity of the observational law up to the
    deterministic nodes.
    """
    rng = np.random.default_rng(rng)
    domains, mechanisms, noise = {}, {}, {}
    for node in dag.nodes:
        size = domain_size[node] if isinstance(domain_size, Mapping) else domain_size
        domains[node] = tuple(range(size))
    for node in dag.nodes:
        parents = dag.parents(node)
        deterministic = dag.kind(node) is NodeKind.DETERMINISTIC
        k = 1 if deterministic else max(noise_size, len(domains[node]) if positive else 1)
        weights = rng.integers(1, max_weight + 1, size=k)
        total = int(weights.sum())
        noise[node] = Noise(tuple(range(k)), tuple(Fraction(int(w), total) for w in weights))
        table = {}
        for combo in product(*(domains[p] for p in parents)):
            size = len(domains[node])
            if positive and not deterministic:
                row = list(range(size)) + list(rng.integers(0, size, size=k - size))
                rng.shuffle(row)
            else:
                row = rng.integers(0, size, size=k)
            for u in range(k):
                table[(combo, u)] = int(row[u])
        mechanisms[node] = TableMechanism(parents, table)
    return Scm(dag, domains, mechanisms, noise)


def binary_scm(dag: Dag, cpts: Mapping) -> Scm:
    """Binary SCM from conditional probability tables.

    ``cpts[node]`` maps a tuple of parent values (in ``dag.parents(node)``
    order) to P(node = 1 | parents), or is a single number for root nodes.
    The noise of each node is the partition of [0, 1] cut at every
    probability in its table, so the mechanism is a threshold rule.
    Deterministic nodes must use probabilities 0 or 1 only.
    """
    mechanisms, noise = {}, {}
    for node in dag.nodes:
        parents = dag.parents(node)
        table = cpts[node]
        if not isinstance(table, Mapping):
            table = {(): table}
        table = {tuple(k) if isinstance(k, tuple) else (k,): as_fraction(v) for k, v in table.items()}
        cuts = sorted({Fraction(0), Fraction(1), *table.values()})
        widths = [hi - lo for lo, hi in zip(cuts, cuts[1:])]
        uppers = cuts[1:]
        rows = {}
        for combo in product((0, 1), repeat=len(parents)):
            p = table[combo]
            for k, upper in enumerate(uppers):
                rows[(combo, k)] = int(upper <= p)
        noise[node] = Noise(tuple(range(len(widths))), tuple(widths))
        mechanisms[node] = TableMechanism(parents, rows)
        if dag.kind(node) is NodeKind.DETERMINISTIC and len(widths) != 1:
            raise ScmError(f"deterministic node {node!r} needs a 0/1 table")
    return Scm(dag, {n: (0, 1) for n in dag.nodes}, mechanisms, noise)
