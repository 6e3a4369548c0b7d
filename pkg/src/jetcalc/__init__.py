"""jetcalc: exact jet calculus and pseudogroup membership over Q.

Sparse rational-function arithmetic, coordinate exterior calculus, jet
prolongation, truncated map jets with a formal flow parameter, groupoid
membership by exact residuals, the Painlevé VI model, and the graded
divergence-free symbol algebra.
"""

from .cartan import (
    Chart,
    ChartMismatchError,
    DifferentialForm,
    QuotientContext,
    VectorField,
    divergence,
    exterior_derivative,
    interior_product,
    lie_bracket,
    lie_derivative,
    pushforward,
    reduce_mod,
    wedge,
)
from .exactalg import (
    Monomial,
    PoleError,
    Polynomial,
    Q,
    RationalFunction,
    poly_gcd,
)
from .groupoid import (
    DatumResidual,
    GroupoidSpec,
    MembershipReport,
    infinitesimal_membership,
    membership,
    translation_spec,
    volume_spec,
)
from .jets import (
    FieldJet,
    FormJet,
    JetChart,
    TruncatedMapJet,
    check_invariant,
    flow_of_field,
    frame_volume_invariant,
    jet_compose,
    jet_invert,
    jet_pullback_form,
    jet_pushforward_field,
    jet_variable_values,
    prolong,
    total_derivative,
)
from .parsing import ParseError, parse_expression

__all__ = [
    "Chart",
    "ChartMismatchError",
    "DatumResidual",
    "DifferentialForm",
    "FieldJet",
    "FormJet",
    "GroupoidSpec",
    "JetChart",
    "MembershipReport",
    "Monomial",
    "ParseError",
    "PoleError",
    "Polynomial",
    "Q",
    "QuotientContext",
    "RationalFunction",
    "TruncatedMapJet",
    "VectorField",
    "check_invariant",
    "divergence",
    "exterior_derivative",
    "flow_of_field",
    "frame_volume_invariant",
    "infinitesimal_membership",
    "interior_product",
    "jet_compose",
    "jet_invert",
    "jet_pullback_form",
    "jet_pushforward_field",
    "jet_variable_values",
    "lie_bracket",
    "lie_derivative",
    "membership",
    "parse_expression",
    "poly_gcd",
    "prolong",
    "pushforward",
    "reduce_mod",
    "total_derivative",
    "translation_spec",
    "volume_spec",
    "wedge",
]

__version__ = "0.1.0"
