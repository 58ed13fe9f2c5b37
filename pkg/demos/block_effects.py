"""
Overall, unit-level, spillover and total effects
================================================

A two-person block with independent covariates, parameterized by explicit
conditional probability tables.  All numbers are exact rationals.
"""

from fractions import Fraction as F
from itertools import product

from interference_dags import EffectKind, EstimandSpec, binary_scm, block_effect, build_figure, sample

dag = build_figure("fig4")
print(dag.edges)

# P(node = 1 | parents), parents listed in sorted order
cpts = {
    "C1": F(1, 3),
    "C2": F(1, 2),
    "A1": {(0,): F(1, 5), (1,): F(3, 5)},
    "A2": {(0,): F(2, 5), (1,): F(4, 5)},
    "Y1": {k: F(1 + k[0] + 2 * k[1] + k[2], 6) for k in product((0, 1), repeat=3)},  # (A1, A2, C1)
    "Y2": {k: F(1 + 2 * k[0] + k[1] + k[2], 6) for k in product((0, 1), repeat=3)},  # (A1, A2, C2)
}
scm = binary_scm(dag, cpts)

block = dict(treatments=("A1", "A2"), outcomes=("Y1", "Y2"))
for unit in (1, 2, None):
    label = "block average" if unit is None else f"unit {unit}"
    overall = block_effect(scm, EstimandSpec("Overall", unit=unit, a=(1, 1), a_prime=(0, 0), **block))
    print(f"{label:13s} overall effect of treating everyone: {overall}")

# the total effect splits into a unit-level and a spillover piece
a, a_prime = (0, 1), (0, 0)
te = block_effect(scm, EstimandSpec(EffectKind.TOTAL, a=a, a_prime=a_prime, a_tilde=1, a_bar=0, **block))
se = block_effect(scm, EstimandSpec(EffectKind.SPILLOVER, a=a, a_prime=a_prime, a_tilde=1, **block))
ue = block_effect(scm, EstimandSpec(EffectKind.UNIT_LEVEL, a=a_prime, a_tilde=1, a_bar=0, **block))
print(f"total {te} = unit-level {ue} + spillover {se}: {te == ue + se}")

# and on the ratio scale it is a product
te_r = block_effect(scm, EstimandSpec(EffectKind.TOTAL, a=a, a_prime=a_prime, a_tilde=1, a_bar=0, scale="ratio", **block))
se_r = block_effect(scm, EstimandSpec(EffectKind.SPILLOVER, a=a, a_prime=a_prime, a_tilde=1, scale="ratio", **block))
ue_r = block_effect(scm, EstimandSpec(EffectKind.UNIT_LEVEL, a=a_prime, a_tilde=1, a_bar=0, scale="ratio", **block))
print(f"ratio scale: {te_r} = {ue_r} * {se_r}: {te_r == ue_r * se_r}")

# a reproducible sample, as CSV
print(sample(scm, 5, seed=1).to_csv(), end="")
