"""Dyson boson/fermion mappings of spin and super-spin lattice models, with exact diagonalization checks."""

from .algebra import (
    SU2_NAMES, SUPER_NAMES, DoubledSpin, OperatorMatrix, RelationReport, anticommutator, commutator,
    max_norm, spin_operators, super_operators, verify_su2, verify_superalgebra,
)
from .dyson import (
    FactorTable, LocalSpace, MappedOperatorSet, Metric, anti_dyson_factors, dynamical_metric, dyson_factors,
    map_spin, map_super, quasi_operator, star_adjoint, super_factors,
)
from .errors import (
    BasisMismatchError, ClusterError, DegenerateSpinError, DimensionError, DysonizeError, ModelError,
    PreconditionError,
)
from .kernels import BACKEND
from .lattice import MAX_DIM, Cluster, ManyBodyOperator, embed, square_cluster
from .models import (
    MODELS, REPRESENTATIONS, HamiltonianSpec, build_hamiltonian, neel_report, reference_energy,
    reference_state, total_operator, transcription_audit,
)
from .spectral import (
    ComparisonReport, Spectrum, compare_spectra, self_adjointness_residual, spectrum, susy_point_sweep,
    symmetry_scan,
)

__version__ = "0.1.0"
