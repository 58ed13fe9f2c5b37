"""JSON serialization of table-mechanism SCMs.

File layout::

    {"nodes": {
        "A": {"kind": "observed", "domain": [0, 1], "parents": [],
              "noise": {"values": [0, 1], "probs": ["1/2", "1/2"]},
              "mechanism": [[[], 0, 0], [[], 1, 1]]},
        ...}}

Each mechanism row is ``[parent values in "parents" order, noise value,
node value]``.  Probabilities are ``"p/q"`` strings (integers are accepted).
"""

import json
from fractions import Fraction
from itertools import product

from .dag import Dag, NodeKind
from .errors import ScmFormatError
from .scm import Noise, Scm, TableMechanism


def _fraction(text, where):
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ScmFormatError(f"{where}: probabilities must be 'p/q' strings, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ScmFormatError(f"{where}: cannot read probability {text!r}") from None


def _hashable(value):
    return tuple(_hashable(v) for v in value) if isinstance(value, list) else value


def scm_from_dict(data) -> Scm:
    if not isinstance(data, dict) or not isinstance(data.get("nodes"), dict):
        raise ScmFormatError("an SCM file needs a top-level 'nodes' object")
    kinds, edges, domains, noise, mechanisms = {}, [], {}, {}, {}
    for name, spec in data["nodes"].items():
        if not isinstance(spec, dict):
            raise ScmFormatError(f"node {name!r}: expected an object")
        try:
            kinds[name] = NodeKind(spec.get("kind", "observed"))
        except ValueError:
            raise ScmFormatError(f"node {name!r}: unknown kind {spec.get('kind')!r}") from None
        parents = spec.get("parents", [])
        if not isinstance(parents, list):
            raise ScmFormatError(f"node {name!r}: 'parents' must be a list")
        edges.extend((p, name) for p in parents)
        if "domain" not in spec or not isinstance(spec["domain"], list):
            raise ScmFormatError(f"node {name!r}: missing 'domain' list")
        domains[name] = tuple(_hashable(v) for v in spec["domain"])
        nz = spec.get("noise", {"values": [0], "probs": ["1"]})
        try:
            values, probs = nz["values"], nz["probs"]
        except (KeyError, TypeError):
            raise ScmFormatError(f"node {name!r}: noise needs 'values' and 'probs'") from None
        noise[name] = Noise(
            tuple(_hashable(v) for v in values),
            tuple(_fraction(p, f"node {name!r}") for p in probs),
        )
        table = {}
        for row in spec.get("mechanism", []):
            if not isinstance(row, list) or len(row) != 3 or not isinstance(row[0], list):
                raise ScmFormatError(f"node {name!r}: mechanism rows are [parent values, noise, value]")
            if len(row[0]) != len(parents):
                raise ScmFormatError(f"node {name!r}: row {row!r} does not match {len(parents)} parents")
            key = (tuple(_hashable(v) for v in row[0]), _hashable(row[1]))
            if key in table:
                raise ScmFormatError(f"node {name!r}: duplicate mechanism row for {row[:2]!r}")
            table[key] = _hashable(row[2])
        mechanisms[name] = TableMechanism(parents, table)
    try:
        dag = Dag(kinds, edges)
    except Exception as exc:
        raise ScmFormatError(f"invalid graph: {exc}") from exc
    # mechanisms index parents in file order; Dag.parents is sorted, which is fine
    # because TableMechanism looks parents up by name
    return Scm(dag, domains, mechanisms, noise)


def scm_to_dict(scm: Scm) -> dict:
    """Tabulate every mechanism over its full parent-by-noise product."""
    nodes = {}
    for name in scm.dag.nodes:
        parents = list(scm.dag.parents(name))
        nz = scm.noise[name]
        rows = []
        for combo in product(*(scm.domains[p] for p in parents)):
            pa = dict(zip(parents, combo))
            for u in nz.values:
                rows.append([list(combo), u, scm.mechanisms[name](pa, u)])
        nodes[name] = {
            "kind": scm.dag.kind(name).value,
            "domain": list(scm.domains[name]),
            "parents": parents,
            "noise": {"values": list(nz.values), "probs": [str(Fraction(p)) for p in nz.probs]},
            "mechanism": rows,
        }
    return {"nodes": nodes}


def load_scm(path) -> Scm:
    with open(path, encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ScmFormatError(f"{path}: not valid JSON ({exc})") from None
    return scm_from_dict(data)


def dumps_scm(scm: Scm) -> str:
    return json.dumps(scm_to_dict(scm), indent=1, sort_keys=True)


def save_scm(scm: Scm, path):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps_scm(scm) + "\n")
