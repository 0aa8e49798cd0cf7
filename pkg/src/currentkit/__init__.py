"""Geodesic currents on hyperbolic surfaces: intersection numbers, systoles,
decomposition along special curves, curve surgery and length functions."""

from .currents import (
    DiscreteCurrent,
    IntersectionResult,
    LiouvilleCurrent,
    axis_geodesic,
    class_intersection,
    delta,
    enumerate_classes,
    intersection_number,
    is_simple,
    liouville_length,
    pairing,
    quadrilateral_check,
    self_intersection,
    somewhat_short,
    systole_scan,
)
from .decomposition import check_decomposition, decompose, is_basic, special_curves, support_graph, zero_detector
from .errors import *  # noqa: F401,F403
from .groups import (
    ConjClass,
    SurfacePresentation,
    ball,
    builtin,
    canonical_conj,
    coset_reps,
    cyclic_reduce,
    evaluate,
    get_surface,
    is_peripheral,
    load_presentation,
    reduce,
)
from .hypcore import (
    BoundaryPoint,
    Geodesic,
    MobiusMap,
    apply,
    axis,
    cross,
    liouville_box,
    orient,
    translation_length,
)
from .lengths import (
    LengthTable,
    MatrixRep,
    chamber_vector,
    length_L,
    length_table,
    sym_power_rep,
    trichotomy_classify,
)
from .sphere3 import classify_single_selfint, lemma_a_check, peripheral_class, positivity_harness
from .surgery import find_self_crossing, resolve, simplify_to_simple, surgery_report

__version__ = "0.1.0"
