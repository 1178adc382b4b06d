"""Exact algebra tables, coadjoint orbits and verified dynamics for the
conformal extensions of Galilei symmetry."""

from .algebra import (
    AlgebraSpec,
    GeneratorId,
    bracket,
    build_algebra,
    conformal_basis,
    conformal_basis_inverse,
    dump_table,
    jacobi_report,
)
from .coadjoint import (
    DualVector,
    OrbitClass,
    OrbitLabel,
    casimir_values,
    classify_orbit,
    coad_closed_form,
    coad_generic,
    parametrize,
)
from .dynamics import (
    FREE,
    HamiltonianChoice,
    Trajectory,
    closed_form,
    integrate,
    time_derivative,
    verify_motion_order,
)
from .poisson import (
    PhasePoint,
    Poly,
    StructureMatrix,
    from_darboux,
    generators_at,
    observable_bracket,
    raw_bracket,
    to_darboux,
)
from .symmetry import (
    ConformalMap,
    GalileiMap,
    GalileiParams,
    conformal_time,
    conformal_transform,
    galilei_transform,
    integrals_of_motion,
    map_trajectory,
)
from .verify import run_suites

__version__ = "0.1.0"
