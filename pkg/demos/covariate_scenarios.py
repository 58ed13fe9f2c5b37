"""
Which covariates remove confounding in a block?
===============================================

Nine two-person block designs differ only in where the covariates point.
For each one we list the minimal backdoor adjustment sets for the joint
treatment vector on unit 1's outcome, and for the partner's treatment alone.
"""

from interference_dags import build_figure, minimal_adjustment_sets, to_dot

SCENARIOS = ["fig3", "fig4", "fig5a", "fig5b", "fig5c", "fig5d", "fig5e", "fig5f", "fig5g"]


def show(sets):
    return " or ".join("{" + ", ".join(sorted(s)) + "}" for s in sets) or "none"


# the block with no interference, as DOT
print(to_dot(build_figure("fig3")))
print()

for name in SCENARIOS:
    dag = build_figure(name, m=2)
    joint = minimal_adjustment_sets(dag, {"A1", "A2"}, "Y1")
    partner = minimal_adjustment_sets(dag, {"A2"}, "Y1")
    print(f"{name:6s}  A -> Y1: {show(joint):24s}  A2 -> Y1: {show(partner)}")

# the same search scales with the block size
print()
print("fig5a with m=4:", show(minimal_adjustment_sets(build_figure("fig5a", m=4), {"A1", "A2", "A3", "A4"}, "Y1")))
