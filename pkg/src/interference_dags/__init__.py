"""Causal DAGs for interference: graphs, identification checks, exact SCMs."""

from .builders import (
    FIGURES,
    AllocationSpec,
    ContagionSpec,
    CovariateScenario,
    SocialContagionSpec,
    VaccineTrialSpec,
    build_allocation_dag,
    build_block_dag,
    build_contagion_dag,
    build_figure,
    build_from_spec,
    build_social_contagion_dag,
    build_vaccine_dag,
)
from .dag import (
    Dag,
    NodeKind,
    Path,
    ancestors,
    build_dag,
    d_separated,
    descendants,
    enumerate_paths,
    path_blocked,
    relatives,
)
from .dot import parse_dot, to_dot
from .errors import (
    InterferenceDagError,
    DagError,
    CycleDetected,
    DuplicateNode,
    DanglingEdge,
    UnknownNode,
    InvalidNode,
    InvalidPath,
    OverlappingSets,
    PathLimitExceeded,
    DotSyntaxError,
    IdentificationError,
    InadmissibleNode,
    SearchLimitExceeded,
    BuilderError,
    InvalidSize,
    InvalidSpec,
    ScmError,
    StateSpaceTooLarge,
    DomainViolation,
    OverlappingTargets,
    ScmFormatError,
    EstimandError,
    IncompleteSpec,
    PositivityViolation,
)
from .estimands import (
    EffectKind,
    EstimandSpec,
    block_effect,
    contagion_infectiousness,
    mediation_formula,
    observational_identification,
    path_specific_effect,
)
from .identification import (
    ActivationSpec,
    EffectQuery,
    IdentReport,
    check_block_exchangeability,
    check_controlled_direct,
    check_natural_effects,
    find_recanting_witness,
    minimal_adjustment_sets,
    satisfies_backdoor,
)
from .scm import (
    CounterfactualQuery,
    JointTable,
    Noise,
    Scm,
    TableMechanism,
    binary_scm,
    conditionally_independent,
    counterfactual_expectation,
    intervene,
    joint_distribution,
    nested_counterfactual_expectation,
    random_scm,
    sample,
    validate_scm,
)
from .scm_io import load_scm, save_scm

__version__ = "0.1.0"
