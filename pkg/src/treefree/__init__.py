"""Free groups, multiple HNN extensions with cyclic associated subgroups,
generalized torsion certificates and finite positive-cone search."""

from treefree.errors import BudgetExhausted, ParseError
from treefree.freeness import FreenessReport, check_freeness_hypotheses
from treefree.hnn import (
    HnnWord,
    MultipleHnnPresentation,
    PinchReport,
    StableLetter,
    are_equal,
    format_hnn_word,
    hnn_conjugate,
    is_trivial,
    load_presentation,
    parse_hnn_word,
    parse_presentation,
    pinch_reduce,
)
from treefree.order import (
    Ball,
    ConeVerdict,
    TraceStep,
    check_cone,
    enumerate_ball,
    replay_json,
    replay_refutation,
    search_cone,
)
from treefree.torsion import TorsionCertificate, search_certificate, verify_certificate
from treefree.words import (
    Alphabet,
    CyclicDecomposition,
    Letter,
    Word,
    concat,
    conjugate,
    cyclic_power_membership,
    cyclic_reduce,
    invert,
    is_conjugate,
    shortlex_compare,
    translation_length,
)

__version__ = "0.1.0"
