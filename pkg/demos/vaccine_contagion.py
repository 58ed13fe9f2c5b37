"""
Contagion and infectiousness in a two-person vaccine trial
==========================================================

Person 1 is randomized to vaccine; person 2 can only be infected by person 1.
The effect of person 1's vaccine on person 2 splits into a part that runs
through person 1's own infection and a part that does not.
"""

from pathlib import Path

from interference_dags import contagion_infectiousness, load_scm
from interference_dags.cli import format_rational

scm = load_scm(Path(__file__).parent / "data" / "fig12.scm.json")
print("edges:", scm.dag.edges)

natural = contagion_infectiousness(scm)
for name, value in natural.as_dict().items():
    print(f"{name:15s} {format_rational(value)}")
print("components add up:", natural.contagion + natural.infectiousness == natural.spillover)

ratio = contagion_infectiousness(scm, scale="ratio")
print("ratio scale product matches:", ratio.contagion * ratio.infectiousness == ratio.spillover)

# holding person 1's infection at "infected" gives a controlled version
controlled = contagion_infectiousness(scm, "ControlledAtInfected")
print("controlled infectiousness:", format_rational(controlled.infectiousness))
