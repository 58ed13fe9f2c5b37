"""Directed acyclic graphs with typed nodes, path machinery and d-separation.

A :class:`Dag` is immutable once built.  Node names are plain strings and all
orderings exposed by this module are lexicographic by name, so every query is
reproducible.
"""

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Optional

from .errors import (
    CycleDetected,
    DanglingEdge,
    DuplicateNode,
    InvalidNode,
    InvalidPath,
    OverlappingSets,
    PathLimitExceeded,
    UnknownNode,
)

DEFAULT_PATH_NODE_LIMIT = 16


class NodeKind(str, Enum):
    OBSERVED = "observed"
    LATENT = "latent"
    DETERMINISTIC = "deterministic"


class Relation(str, Enum):
    PARENTS = "parents"
    CHILDREN = "children"
    ANCESTORS = "ancestors"
    DESCENDANTS = "descendants"


class Orientation(str, Enum):
    FORWARD = "->"
    BACKWARD = "<-"


class Dag:
    """A validated directed acyclic graph whose nodes carry a :class:`NodeKind`.

    Parameters
    ----------
    nodes : mapping of str to NodeKind, or iterable of names / (name, kind)
        Declared nodes.  Bare names are observed.
    edges : iterable of (parent, child) pairs

    Raises
    ------
    DuplicateNode, DanglingEdge, CycleDetected, InvalidNode
    """

    __slots__ = ("_kinds", "_edges", "_parents", "_children", "_order")

    def __init__(self, nodes=(), edges=()):
        kinds = {}
        items = nodes.items() if isinstance(nodes, Mapping) else nodes
        for item in items:
            name, kind = (item, NodeKind.OBSERVED) if isinstance(item, str) else item
            if not isinstance(name, str) or not name:
                raise InvalidNode(f"node names must be nonempty strings, got {name!r}")
            if name in kinds:
                raise DuplicateNode(f"node {name!r} declared twice")
            kinds[name] = NodeKind(kind)

        edge_set = set()
        for parent, child in edges:
            for end in (parent, child):
                if end not in kinds:
                    raise DanglingEdge(f"edge {parent} -> {child} names undeclared node {end!r}")
            if parent == child:
                raise CycleDetected([parent, parent])
            edge_set.add((parent, child))

        parents = {n: set() for n in kinds}
        children = {n: set() for n in kinds}
        for parent, child in edge_set:
            parents[child].add(parent)
            children[parent].add(child)

        self._kinds = dict(sorted(kinds.items()))
        self._edges = frozenset(edge_set)
        self._parents = {n: tuple(sorted(p)) for n, p in parents.items()}
        self._children = {n: tuple(sorted(c)) for n, c in children.items()}
        self._order = self._toposort()

        for name, kind in self._kinds.items():
            if kind is NodeKind.DETERMINISTIC and not self._parents[name]:
                raise InvalidNode(f"deterministic node {name!r} has no parents")

    def _toposort(self):
        # Kahn's algorithm with a sorted ready-queue for a canonical order.
        indegree = {n: len(p) for n, p in self._parents.items()}
        ready = sorted(n for n, d in indegree.items() if d == 0)
        order = []
        while ready:
            node = ready.pop(0)
            order.append(node)
            for child in self._children[node]:
                indegree[child] -= 1
                if indegree[child] == 0:
                    ready.append(child)
            ready.sort()
        if len(order) < len(self._kinds):
            raise CycleDetected(self._find_cycle(set(self._kinds) - set(order)))
        return tuple(order)

    def _find_cycle(self, remaining):
        start = min(remaining)
        seen = [start]
        node = start
        while True:
            node = next(p for p in self._parents[node] if p in remaining)
            if node in seen:
                cycle = seen[seen.index(node):]
                cycle.reverse()
                return cycle + [cycle[0]]
            seen.append(node)

    # -- basic accessors -----------------------------------------------------

    @property
    def nodes(self):
        """Node names in lexicographic order."""
        return tuple(self._kinds)

    @property
    def edges(self):
        """Edges as sorted (parent, child) pairs."""
        return tuple(sorted(self._edges))

    @property
    def kinds(self):
        return dict(self._kinds)

    @property
    def topological_order(self):
        return self._order

    def kind(self, node) -> NodeKind:
        self._check(node)
        return self._kinds[node]

    def parents(self, node):
        self._check(node)
        return self._parents[node]

    def children(self, node):
        self._check(node)
        return self._children[node]

    def has_edge(self, parent, child) -> bool:
        return (parent, child) in self._edges

    def observed(self):
        """Names of all non-latent nodes."""
        return tuple(n for n, k in self._kinds.items() if k is not NodeKind.LATENT)

    def latent(self):
        return tuple(n for n, k in self._kinds.items() if k is NodeKind.LATENT)

    def __contains__(self, node):
        return node in self._kinds

    def __len__(self):
        return len(self._kinds)

    def __eq__(self, other):
        if not isinstance(other, Dag):
            return NotImplemented
        return self._kinds == other._kinds and self._edges == other._edges

    def __hash__(self):
        return hash((tuple(self._kinds.items()), self._edges))

    def __repr__(self):
        return f"Dag(nodes={len(self._kinds)}, edges={self.edges})"

    def _check(self, *nodes):
        for node in nodes:
            if node not in self._kinds:
                raise UnknownNode(f"unknown node {node!r}")

    # -- derived graphs --------------------------------------------------------

    def without_edges(self, edges) -> "Dag":
        drop = set(edges)
        return Dag(self._kinds, (e for e in self._edges if e not in drop))

    def with_kinds(self, kinds: Mapping[str, NodeKind]) -> "Dag":
        """Return a copy with some node kinds replaced."""
        self._check(*kinds)
        merged = dict(self._kinds)
        merged.update({n: NodeKind(k) for n, k in kinds.items()})
        return Dag(merged, self._edges)

    def mutilate(self, cut_out=(), cut_in=()) -> "Dag":
        """Remove all edges leaving ``cut_out`` and all edges entering ``cut_in``."""
        cut_out, cut_in = set(cut_out), set(cut_in)
        self._check(*cut_out, *cut_in)
        keep = [(p, c) for p, c in self._edges if p not in cut_out and c not in cut_in]
        return Dag(self._kinds, keep)


def build_dag(nodes, edges) -> Dag:
    """Validate a node list and an edge list into a :class:`Dag`.

    >>> build_dag(["C", "A", "Y"], [("C", "A"), ("C", "Y"), ("A", "Y")]).edges
    (('A', 'Y'), ('C', 'A'), ('C', 'Y'))
    """
    return Dag(list(nodes), list(edges))


def _as_set(dag, members):
    if isinstance(members, str):
        members = (members,)
    result = frozenset(members)
    dag._check(*result)
    return result


def relatives(dag: Dag, seed, relation) -> frozenset:
    """One-step or transitive relatives of a node set.

    Ancestors and descendants never include members of ``seed``.
    """
    seed = _as_set(dag, seed)
    relation = Relation(relation)
    step = dag._parents if relation in (Relation.PARENTS, Relation.ANCESTORS) else dag._children
    if relation in (Relation.PARENTS, Relation.CHILDREN):
        return frozenset(n for s in seed for n in step[s])
    found = set()
    stack = list(seed)
    while stack:
        for nxt in step[stack.pop()]:
            if nxt not in found:
                found.add(nxt)
                stack.append(nxt)
    return frozenset(found - seed)


def ancestors(dag, seed):
    return relatives(dag, seed, Relation.ANCESTORS)


def descendants(dag, seed):
    return relatives(dag, seed, Relation.DESCENDANTS)


# -- paths ---------------------------------------------------------------------

@dataclass(frozen=True)
class Path:
    """A simple path; ``orientations[k]`` relates ``nodes[k]`` to ``nodes[k+1]``."""

    nodes: tuple
    orientations: tuple

    def __post_init__(self):
        if len(self.nodes) < 2 or len(self.orientations) != len(self.nodes) - 1:
            raise InvalidPath("a path needs at least two nodes and one orientation per step")
        if len(set(self.nodes)) != len(self.nodes):
            raise InvalidPath(f"path repeats a node: {self.nodes}")
        object.__setattr__(self, "orientations", tuple(Orientation(o) for o in self.orientations))

    def __len__(self):
        return len(self.nodes)

    def __str__(self):
        parts = [self.nodes[0]]
        for o, node in zip(self.orientations, self.nodes[1:]):
            parts.append(f" {o.value} {node}")
        return "".join(parts)

    @property
    def is_backdoor(self) -> bool:
        return self.orientations[0] is Orientation.BACKWARD

    @property
    def is_directed(self) -> bool:
        return all(o is Orientation.FORWARD for o in self.orientations)

    def edges(self):
        """The underlying (parent, child) edges of the path in order."""
        out = []
        for (u, v), o in zip(zip(self.nodes, self.nodes[1:]), self.orientations):
            out.append((u, v) if o is Orientation.FORWARD else (v, u))
        return tuple(out)

    def colliders(self):
        return tuple(
            self.nodes[k]
            for k in range(1, len(self.nodes) - 1)
            if self.orientations[k - 1] is Orientation.FORWARD
            and self.orientations[k] is Orientation.BACKWARD
        )

    @classmethod
    def parse(cls, text: str) -> "Path":
        """Parse ``"A <- C -> Y"`` style notation."""
        tokens = text.split()
        return cls(tuple(tokens[0::2]), tuple(Orientation(t) for t in tokens[1::2]))


def _neighbours(dag, node):
    steps = [(c, Orientation.FORWARD) for c in dag._children[node]]
    steps += [(p, Orientation.BACKWARD) for p in dag._parents[node]]
    steps.sort()
    return steps


def enumerate_paths(dag: Dag, x, y, max_nodes: int = DEFAULT_PATH_NODE_LIMIT):
    """All simple paths between ``x`` and ``y``, ignoring edge direction.

    Enumeration is exponential in general, so graphs with more than
    ``max_nodes`` nodes are refused with :class:`PathLimitExceeded`.
    """
    dag._check(x, y)
    if x == y:
        raise InvalidPath("path endpoints must differ")
    if max_nodes is not None and len(dag) > max_nodes:
        raise PathLimitExceeded(
            f"path enumeration refused on {len(dag)} nodes (limit {max_nodes})"
        )
    found = []
    nodes, orients, on_path = [x], [], {x}

    def extend(node):
        for nxt, o in _neighbours(dag, node):
            if nxt in on_path:
                continue
            nodes.append(nxt)
            orients.append(o)
            if nxt == y:
                found.append(Path(tuple(nodes), tuple(orients)))
            else:
                on_path.add(nxt)
                extend(nxt)
                on_path.discard(nxt)
            nodes.pop()
            orients.pop()

    extend(x)
    found.sort(key=lambda p: p.nodes)
    return found


def validate_path(dag: Dag, path: Path):
    dag._check(*path.nodes)
    for (u, v), o in zip(zip(path.nodes, path.nodes[1:]), path.orientations):
        edge = (u, v) if o is Orientation.FORWARD else (v, u)
        if edge not in dag._edges:
            raise InvalidPath(f"{edge[0]} -> {edge[1]} is not an edge of the graph")


def path_blocked(dag: Dag, path: Path, z) -> bool:
    """True iff ``z`` blocks ``path``.

    A path is blocked when one of its non-colliders is in ``z`` or one of its
    colliders has neither itself nor any descendant in ``z``.
    """
    validate_path(dag, path)
    z = _as_set(dag, z)
    colliders = set(path.colliders())
    for node in path.nodes[1:-1]:
        if node in colliders:
            if node not in z and not (descendants(dag, node) & z):
                return True
        elif node in z:
            return True
    return False


def _disjoint(dag, x, y, z):
    x, y, z = _as_set(dag, x), _as_set(dag, y), _as_set(dag, z)
    if x & y or x & z or y & z:
        raise OverlappingSets(
            f"query sets overlap: x={sorted(x)}, y={sorted(y)}, z={sorted(z)}"
        )
    return x, y, z


def d_separated(dag: Dag, x, y, z=()) -> bool:
    """Whether ``z`` d-separates ``x`` from ``y``.

    Uses the linear-time reachability procedure over (node, direction) states,
    so it has no size limit; it agrees with checking every path from
    :func:`enumerate_paths` with :func:`path_blocked`.
    """
    x, y, z = _disjoint(dag, x, y, z)
    if not x or not y:
        return True
    opens_collider = z | ancestors(dag, z)
    # "up": reached from a child; "down": reached from a parent.
    frontier = deque((n, "up") for n in sorted(x))
    visited = set()
    while frontier:
        node, direction = frontier.popleft()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node in y:
            return False
        if direction == "up":
            if node in z:
                continue
            frontier.extend((p, "up") for p in dag._parents[node])
            frontier.extend((c, "down") for c in dag._children[node])
        else:
            if node not in z:
                frontier.extend((c, "down") for c in dag._children[node])
            if node in opens_collider:
                frontier.extend((p, "up") for p in dag._parents[node])
    return True


def d_separated_bruteforce(dag: Dag, x, y, z=(), max_nodes=DEFAULT_PATH_NODE_LIMIT) -> bool:
    """Reference definition: every path between every pair is blocked."""
    x, y, z = _disjoint(dag, x, y, z)
    return all(
        path_blocked(dag, path, z)
        for a in sorted(x)
        for b in sorted(y)
        for path in enumerate_paths(dag, a, b, max_nodes=max_nodes)
    )


def backdoor_paths(dag: Dag, a, y, max_nodes=DEFAULT_PATH_NODE_LIMIT):
    """Paths from ``a`` to ``y`` that start with an arrow into ``a``."""
    return [p for p in enumerate_paths(dag, a, y, max_nodes=max_nodes) if p.is_backdoor]


def open_paths(dag: Dag, x, y, z=(), backdoor_only=False) -> Iterator[Path]:
    """Yield paths between ``x`` and ``y`` left open by ``z``, shortest first.

    Partial paths are pruned as soon as an interior node blocks them, which
    keeps witness search cheap on the graphs used here.  Paths never run
    through a second member of ``x``.
    """
    x, y, z = _disjoint(dag, x, y, z)
    opens_collider = z | ancestors(dag, z)
    queue = deque()
    for start in sorted(x):
        for nxt, o in _neighbours(dag, start):
            if backdoor_only and o is Orientation.FORWARD:
                continue
            if nxt in x:
                continue
            queue.append(((start, nxt), (o,)))
    while queue:
        nodes, orients = queue.popleft()
        last = nodes[-1]
        if last in y:
            yield Path(nodes, orients)
            continue
        for nxt, o in _neighbours(dag, last):
            if nxt in nodes or nxt in x:
                continue
            collider = orients[-1] is Orientation.FORWARD and o is Orientation.BACKWARD
            if collider and last not in opens_collider:
                continue
            if not collider and last in z:
                continue
            queue.append((nodes + (nxt,), orients + (o,)))


def first_open_path(dag, x, y, z=(), backdoor_only=False) -> Optional[Path]:
    return next(open_paths(dag, x, y, z, backdoor_only=backdoor_only), None)


def directed_reach(dag: Dag, sources: Iterable[str], edges=None, reverse=False) -> frozenset:
    """Nodes reachable from ``sources`` by directed paths of length >= 1.

    ``edges`` restricts traversal to a subset of the graph's edges.
    """
    allowed = dag._edges if edges is None else frozenset(edges)
    found = set()
    stack = list(sources)
    while stack:
        node = stack.pop()
        nexts = dag._parents[node] if reverse else dag._children[node]
        for nxt in nexts:
            edge = (nxt, node) if reverse else (node, nxt)
            if edge in allowed and nxt not in found:
                found.add(nxt)
                stack.append(nxt)
    return frozenset(found)
