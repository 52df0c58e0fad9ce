"""latwave: waves on the integer lattice.

Boundary values of the resolvent of the difference Laplacian, the geometry
of its dispersion surfaces, stationary-phase far fields, discrete radiation
conditions, and compact-potential scattering via finite-rank reduction.
"""

from .dispersion import (
    K_TOL,
    DegeneratePointError,
    GradientVanishesError,
    SingularContactWarning,
    StationaryPoint,
    SurfaceMesh,
    convexity_scan,
    exceptional_set,
    exceptional_set_contains,
    is_regular,
    level_polylines,
    mesh_to_csv,
    polylines_to_svg,
    principal_curvatures,
    reduce_to_cube,
    signature,
    singular_direction_check,
    stationary_points,
    surface_mesh,
    symbol,
    symbol_value,
    total_curvature,
)
from .farfield import (
    DirectionOutsideDomainError,
    FarFieldExpansion,
    MultiWaveDirectionError,
    VanishingCurvatureError,
    amplitude,
    asymptotic_eval,
    build_expansion,
    farfield_decay_fit,
    fit_wavenumbers,
    local_wavenumber,
    radiation_residual,
    ray_sites,
)
from .lattice import (
    BoxRegion,
    CompactLatticeFunction,
    apply_laplacian,
    apply_schrodinger,
    box_sites,
    boundary_sites,
    delta,
    difference_derivative,
    fourier_transform,
    green_identity_residual,
    shell_average,
    shell_sites,
)
from .resolvent import (
    BoundaryValue,
    EtaOnSpectrumError,
    ExceptionalPointError,
    LadderDivergenceError,
    LapPlan,
    QuadratureConfig,
    ResolventValue,
    eta_extrapolate,
    fundamental_solution,
    lap_apply,
    lap_apply_window,
    log_coefficient_estimate,
    resolvent_offspectrum,
    resolvent_offspectrum_window,
    surface_integral_phi,
)
from .scattering import (
    BirmanSchwingerSystem,
    BoundStateReport,
    NearSingularSystemError,
    assemble,
    bound_state_scan,
    solve_scattering,
)

__version__ = "0.1.0"
