"""Online learning when Nature may replay the learner's own past predictions."""

from .hypotheses import (
    ClosureFamily,
    Domain,
    Hypothesis,
    HypothesisClass,
    Representation,
    apply_representation,
    class_from_spec,
    closure_of,
    intersection_closure,
    is_intersection_closed,
)
from .dimensions import (
    dimension_report,
    extended_threshold_dimension,
    littlestone_dimension,
    threshold_dimension,
    vc_dimension,
)
from .engine import GameTranscript, run_game, trap_region
from .learners import make_learner
from .adversaries import make_adversary

__all__ = [
    "ClosureFamily", "Domain", "Hypothesis", "HypothesisClass", "Representation",
    "apply_representation", "class_from_spec", "closure_of", "intersection_closure",
    "is_intersection_closed", "dimension_report", "extended_threshold_dimension",
    "littlestone_dimension", "threshold_dimension", "vc_dimension", "GameTranscript",
    "run_game", "trap_region", "make_learner", "make_adversary",
]
