"""Reading and writing a small subset of Graphviz DOT.

Accepted grammar::

    digraph [name] { stmt* }
    stmt := node_id [attrs] | node_id ("->" node_id)+ [attrs]
    attrs := "[" key "=" value ("," | ";")? ... "]"

Statements are separated by ``;``, newlines or plain whitespace.  The only
attribute with meaning is ``kind`` (``observed``, ``latent`` or
``deterministic``) on node statements; other attributes are ignored.
Subgraphs and undirected edges are rejected.
"""

import re

from .dag import Dag, NodeKind
from .errors import DotSyntaxError

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|\#[^\n]*|/\*.*?\*/)
  | (?P<arrow>->)
  | (?P<undirected>--)
  | (?P<punct>[{}\[\];,=])
  | (?P<quoted>"(?:[^"\\]|\\.)*")
  | (?P<ident>[A-Za-z0-9_.*+()^']+)
    """,
    re.VERBOSE | re.DOTALL,
)

_PLAIN_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_KEYWORDS = {"digraph", "graph", "subgraph", "node", "edge", "strict"}


def _tokenize(text):
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise DotSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        value = match.group()
        column = pos - line_start + 1
        if kind == "undirected":
            raise DotSyntaxError("undirected edges are not supported", line, column)
        if kind not in ("ws", "comment"):
            if kind == "quoted":
                kind, value = "id", re.sub(r"\\(.)", r"\1", value[1:-1])
            elif kind == "ident":
                kind = "id"
            tokens.append((kind, value, line, column))
        newlines = value.count("\n") if kind in ("ws", "comment") else 0
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = match.end()
    tokens.append(("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            raise DotSyntaxError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2], tok[3])
        self.i += 1
        return tok

    def parse(self):
        head = self.take("id")
        if head[1] == "strict":
            head = self.take("id")
        if head[1] != "digraph":
            raise DotSyntaxError("graph must start with 'digraph'", head[2], head[3])
        if self.peek()[0] == "id":
            self.take("id")
        self.take("punct", "{")
        kinds, order, edges = {}, [], []
        explicit = set()

        def mention(tok):
            name = tok[1]
            if name in _KEYWORDS:
                raise DotSyntaxError(f"{name!r} statements are not supported", tok[2], tok[3])
            if name not in kinds:
                kinds[name] = NodeKind.OBSERVED
                order.append(name)
            return name

        while True:
            tok = self.peek()
            if tok[0] == "punct" and tok[1] == "}":
                self.take()
                break
            if tok[0] == "punct" and tok[1] == ";":
                self.take()
                continue
            if tok[0] != "id":
                raise DotSyntaxError(f"unexpected {tok[1] or 'end of input'!r}", tok[2], tok[3])
            chain = [mention(self.take("id"))]
            while self.peek()[0] == "arrow":
                self.take("arrow")
                chain.append(mention(self.take("id")))
            attrs = self.attributes() if self.peek()[1] == "[" else {}
            if len(chain) == 1:
                if "kind" in attrs:
                    value, vtok = attrs["kind"]
                    try:
                        kind = NodeKind(value)
                    except ValueError:
                        raise DotSyntaxError(f"unknown node kind {value!r}", vtok[2], vtok[3]) from None
                    if chain[0] in explicit and kinds[chain[0]] is not kind:
                        raise DotSyntaxError(f"conflicting kinds for node {chain[0]!r}", vtok[2], vtok[3])
                    kinds[chain[0]] = kind
                    explicit.add(chain[0])
            else:
                edges.extend(zip(chain, chain[1:]))
        end = self.peek()
        if end[0] != "eof":
            raise DotSyntaxError("trailing input after closing brace", end[2], end[3])
        return Dag({n: kinds[n] for n in order}, edges)

    def attributes(self):
        self.take("punct", "[")
        attrs = {}
        while self.peek()[1] != "]":
            key = self.take("id")
            self.take("punct", "=")
            value = self.take("id")
            attrs[key[1]] = (value[1], value)
            if self.peek()[1] in (",", ";"):
                self.take()
        self.take("punct", "]")
        return attrs


def parse_dot(text: str) -> Dag:
    """Parse DOT text into a :class:`~interference_dags.dag.Dag`.

    Raises :class:`DotSyntaxError` with line and column information, or the
    usual graph validation errors (e.g. ``CycleDetected``).
    """
    return _Parser(text).parse()


def _quote(name):
    if _PLAIN_ID.match(name) and name not in _KEYWORDS:
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(dag: Dag) -> str:
    """Canonical DOT text: sorted node declarations, then sorted edges."""
    if not len(dag):
        return "digraph{}"
    lines = ["digraph{"]
    for name, kind in dag.kinds.items():
        attr = "" if kind is NodeKind.OBSERVED else f" [kind={kind.value}]"
        lines.append(f"  {_quote(name)}{attr};")
    for parent, child in dag.edges:
        lines.append(f"  {_quote(parent)} -> {_quote(child)};")
    lines.append("}")
    return "\n".join(lines)
