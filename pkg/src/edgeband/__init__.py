"""Band structures, Dirac points, and topologically protected edge states in 1D.

The pipeline: build cosine-series potentials (``potentials``), solve the
Floquet-Bloch bands (``bloch``), certify linear crossings at k = pi
(``dirac``), reduce to the effective Dirac operator and its zero mode
(``dirac1d``), assemble the multiscale ansatz and second-order energy
(``multiscale``), and verify everything against the direct real-space solve
(``edge``).  ``cli`` exposes the whole chain as the ``edgeband`` command.
"""

from .bloch import (
    BandStructure,
    BlochMode,
    PlaneWaveBasis,
    band_sweep,
    bloch_spectrum,
    inversion_map,
    parity_spectrum,
)
from .dirac import (
    DiracPointCertificate,
    GapPrediction,
    certify_dirac_point,
    certify_sweep,
    gap_edges_formula,
    k0_splitting,
    lambda_sharp,
    theta_sharp,
    with_coupling,
)
from .dirac1d import (
    CompactBump,
    DiracSpec,
    ZeroMode,
    dirac_squared_spectrum,
    essential_edge,
    stability_probe,
    zero_mode,
)
from .edge import (
    BifurcationDiagram,
    EdgeEigenpair,
    RealSpaceGrid,
    TridiagonalOperator,
    bifurcation_sweep,
    build_operator,
    eigenpairs_in_window,
    essential_gap,
    find_edge_states,
    h2_discrepancy,
)
from .errors import (
    ConvergenceError,
    EdgebandError,
    GridError,
    NoGapError,
    NotDiracPointError,
    NoZeroModeError,
)
from .multiscale import (
    SecondOrderEnergy,
    SeparableState,
    compute_E2,
    solve_corrector,
    synthesize_ansatz,
)
from .potentials import (
    CosineSeries,
    DomainWall,
    ModulatedPotential,
    SuperlatticeBase,
    dimer_linearization,
    eval_series,
    eval_wall,
    superlattice_series,
)

__version__ = "0.1.0"
