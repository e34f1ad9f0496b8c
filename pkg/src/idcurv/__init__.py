"""Curvature and Ricci flow for inversive distance circle packings.

Closed triangulated surfaces carry a circle packing metric: one radius per
vertex, one inversive distance per edge, realized in Euclidean or hyperbolic
background geometry. This package computes the induced combinatorial
curvatures, integrates the associated Ricci flows, and solves prescribed
curvature problems by Newton descent on the Ricci potential.
"""

from .curvature import (
    CurvatureField,
    CurvatureJacobian,
    angle_deficits,
    average_curvature,
    classical_curvature,
    curvature,
    curvature_jacobian,
    gauss_bonnet_residual,
    laplacian_apply,
    laplacian_spectrum,
)
from .errors import (
    AdmissibilityError,
    ConditioningError,
    DomainError,
    IntegrationError,
    MeshFormatError,
    QuadratureError,
    SolverError,
    TopologyError,
    WeightError,
)
from .flows import (
    EventKind,
    FlowEvent,
    FlowSpec,
    FlowKind,
    FlowTrace,
    Integrator,
    check_evolution_identity,
    flow_rhs,
    run_flow,
)
from .geometry import (
    CornerAngles,
    PackingMetric,
    admissible,
    corner_angles,
    edge_length,
    edge_lengths,
    extended_angles,
    face_admissible,
    face_lengths,
    hyperbolic_triangle_area,
    inner_angles,
    r_of_u,
    s_of_r,
    total_area,
    triangle_slack,
    u_of_r,
)
from .potential import (
    ConvexityReport,
    PotentialQuery,
    convexity_report,
    newton_solve,
    potential_gradient,
    potential_value,
)
from .surface import (
    Geometry,
    WeightedTriangulation,
    WeightRegime,
    WeightReport,
    csaszar_torus,
    euler_characteristic,
    load_radii,
    load_surface,
    save_radii,
    surface_regime,
    tetrahedron,
    validate_weights,
)
from .surface import CSASZAR_FACES, TETRA_FACES
from .tetra import (
    TetraFamily,
    SecondRoot,
    X_SUP,
    curvature_residual,
    f_curve,
    find_second_root,
    write_f_curve,
)

__version__ = "0.1.0"
