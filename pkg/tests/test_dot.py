import pytest
from hypothesis import given

from interference_dags import FIGURES, Dag, NodeKind, build_figure, parse_dot, to_dot
from interference_dags.errors import CycleDetected, DotSyntaxError

from .strategies import dags

FIG1_DOT = "digraph{\n  A;\n  C;\n  Y;\n  A -> Y;\n  C -> A;\n  C -> Y;\n}"


def test_fig1_transcription():
    assert parse_dot("digraph{C->A;C->Y;A->Y;}") == build_figure("fig1")


def test_latent_attribute():
    d = parse_dot("digraph{U[kind=latent];U->Y1;U->Y2;}")
    assert len(d) == 3 and d.kind("U") is NodeKind.LATENT
    assert d.kind("Y1") is NodeKind.OBSERVED


def test_cycle_without_semicolons():
    with pytest.raises(CycleDetected):
        parse_dot("digraph{A->B B->A}")


def test_canonical_fig1():
    assert to_dot(build_figure("fig1")) == FIG1_DOT


def test_empty():
    assert to_dot(Dag()) == "digraph{}"
    assert parse_dot("digraph{}") == Dag()


def test_fig7_marks_latent():
    text = to_dot(build_figure("fig7"))
    assert "  U [kind=latent];" in text
    assert parse_dot(text) == build_figure("fig7")


def test_quoted_names_roundtrip():
    d = build_figure("fig14")
    text = to_dot(d)
    assert '"Z*_1" [kind=deterministic];' in text
    assert parse_dot(text) == d


def test_chains_comments_and_attributes():
    d = parse_dot(
        """strict digraph G {
          // a comment
          A -> M -> Y [color=red];  /* block */
          A -> Y
          # hash comment
          C [kind=latent, label="confounder"]
          C -> A; C -> Y
        }"""
    )
    assert d.edges == (("A", "M"), ("A", "Y"), ("C", "A"), ("C", "Y"), ("M", "Y"))
    assert d.kind("C") is NodeKind.LATENT


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("digraph{A -- B}", 1, 11),
        ("graph{A->B}", 1, 1),
        ("digraph{\n  A -> ;\n}", 2, 8),
        ("digraph{A [kind=ghost]}", 1, 17),
        ("digraph{A -> B", 1, 15),
        ("digraph{A}\nextra", 2, 1),
        ("digraph{subgraph{A}}", 1, 9),
        ("digraph{A @ B}", 1, 11),
    ],
)
def test_syntax_errors_carry_position(text, line, column):
    with pytest.raises(DotSyntaxError) as info:
        parse_dot(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_conflicting_kinds():
    with pytest.raises(DotSyntaxError):
        parse_dot("digraph{U[kind=latent]; U[kind=observed]}")


@pytest.mark.parametrize("name", FIGURES)
def test_roundtrip_all_figures(name):
    d = build_figure(name)
    text = to_dot(d)
    assert parse_dot(text) == d
    assert to_dot(parse_dot(text)) == text


@given(dags(max_nodes=8))
def test_roundtrip_random(dag):
    assert parse_dot(to_dot(dag)) == dag
