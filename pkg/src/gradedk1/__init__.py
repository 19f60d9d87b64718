"""Exact graded K1 computations over finite graded rings."""

from .errors import GradedK1Error
from .grading import INTEGERS, TRIVIAL, GradeElement, GradeGroup, cyclic
from .k1 import (
    K1Class,
    K1Report,
    check_exactness,
    congruence_subgroup,
    crossed_product_triviality_check,
    elementary_group,
    gamma_action,
    gl_group,
    inclusion_map,
    k1_local,
    k1_relative_local,
    perfectness_check,
    relative_elementary,
    stabilization_check,
)
from .matrices import ElementaryGenerator, GradedMatrix, ShiftFamily, matrix_from_entries
from .rings import (
    DoubleRing,
    GradedIdeal,
    GroupRing,
    HomogeneousElement,
    LaurentRing,
    PairRing,
    QuotientRing,
    TrivialRing,
    ideal,
)

__version__ = "0.1.0"

__all__ = [
    "DoubleRing",
    "ElementaryGenerator",
    "GradeElement",
    "GradeGroup",
    "GradedIdeal",
    "GradedK1Error",
    "GradedMatrix",
    "GroupRing",
    "HomogeneousElement",
    "INTEGERS",
    "K1Class",
    "K1Report",
    "LaurentRing",
    "PairRing",
    "QuotientRing",
    "ShiftFamily",
    "TRIVIAL",
    "TrivialRing",
    "check_exactness",
    "congruence_subgroup",
    "crossed_product_triviality_check",
    "cyclic",
    "elementary_group",
    "gamma_action",
    "gl_group",
    "ideal",
    "inclusion_map",
    "k1_local",
    "k1_relative_local",
    "matrix_from_entries",
    "perfectness_check",
    "relative_elementary",
    "stabilization_check",
]
