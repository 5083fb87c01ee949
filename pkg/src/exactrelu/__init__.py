"""Exact and constructive training of shallow ReLU networks."""

__version__ = "0.1.0"

from .core import (
    AffineFunction,
    Dataset,
    DimensionError,
    KReluNet,
    LabeledPoint,
    TwoReluNet,
    eval_k_relu,
    eval_two_relu,
    max_error,
    relu,
    squared_loss,
    zero_loss_decision,
)

from .exact import (
    ActivationPattern,
    BudgetExceeded,
    DimensionRefused,
    SubproblemFailure,
    TrainConfig,
    TrainResult,
    build_subprogram,
    decide_trainability,
    train_exact,
)
from .geometry import Dichotomy, enumerate_dichotomies, realize, strict_separation_lp
from .interp import fit_overparam, sample_direction, verify_interpolation
from .qp import QpSolution, QuadraticProgram, solve_qp
from .reduce import (
    HardSortWitness,
    SeparabilityInstance,
    TwoPlaneWitness,
    build_gadget,
    check_hard_sort,
    check_separability,
    extract_separability_witness,
    forward_construct,
    net_from_hard_sort,
)
