"""Executable theory of partial iterated function systems.

Partial metrics and their axioms, the Hausdorff partial metric on compact
sets, attractors of contraction families, the collage bound, shift-space
addressing, Lipschitz bookkeeping and the space of contractions.
"""

from .collage import collage_bound_check, collage_gap, collage_sweep
from .conspace import (
    ConElement,
    cauchy_completeness_probe,
    con_distance,
    continuity_probe,
    fixed_point_map,
    raw_sup,
)
from .errors import CarrierError, ConvergenceError, PreconditionError, SizeCapError
from .hyperspace import (
    FinitePointSet,
    Interval1D,
    diameter,
    directed_distance,
    hausdorff_partial,
    point_to_set,
)
from .ifs import (
    IFSp,
    apriori_bound_check,
    attractor,
    condensation_contraction_check,
    condensation_map,
    fixed_point,
    hutchinson,
    invariant_set_check,
)
from .kernels import get_backend, set_backend
from .maps import (
    LipMap,
    affine1d,
    affine2d,
    apply,
    compose,
    identity,
    ifsp_semigroup_words,
    lipschitz_estimate,
    parse_map,
    quad1d,
    semigroup_closure_check,
)
from .pmetric import (
    PartialMetric,
    metric_continuity_probe,
    pm_distance,
    self_distance,
    verify_axioms,
)
from .shiftspace import (
    Word,
    address_to_point,
    composed_fixed_point_check,
    cylinder_set,
    shift_metric,
    shift_space,
)

__version__ = "0.1.0"
