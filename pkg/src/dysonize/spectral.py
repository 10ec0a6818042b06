"""Metric-aware diagonalization, spectral comparison and symmetry scans."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import as_spin
from .dyson import Metric
from .errors import DimensionError, PreconditionError
from .lattice import Cluster, ManyBodyOperator
from .models import HamiltonianSpec, algebra_elements, build_hamiltonian, total_operator

HERMITIAN_TOL = 1e-10
DEFECTIVE_COND = 1e8


def _matrix(h) -> np.ndarray:
    return h.entries if hasattr(h, "entries") else np.asarray(h, dtype=complex)


def _sorted(values) -> np.ndarray:
    v = np.asarray(values, dtype=complex)
    return v[np.lexsort((v.imag, v.real))]


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    max_imag: float
    method: str
    defective: bool = False

    def __post_init__(self):
        if self.method not in ("hermitized", "general"):
            raise ValueError(f"unknown method {self.method!r}")
        ev = _sorted(self.eigenvalues)
        ev.flags.writeable = False
        object.__setattr__(self, "eigenvalues", ev)

    def __len__(self):
        return len(self.eigenvalues)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "max_imag": self.max_imag,
            "defective": self.defective,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
        }


@dataclass(frozen=True)
class ComparisonReport:
    max_abs_difference: float
    matched: bool
    tolerance: float
    dim_a: int
    dim_b: int
    note: str = ""

    def to_dict(self) -> dict:
        return dict(vars(self))


def self_adjointness_residual(h: ManyBodyOperator, g: Metric | None = None) -> float:
    """Max-norm of ``g H - H^+ g``; ``g = None`` means the identity metric."""
    m = _matrix(h)
    if g is None:
        return float(np.abs(m - m.conj().T).max())
    if hasattr(h, "basis_id") and h.basis_id != g.basis_id:
        raise DimensionError(f"Hamiltonian basis {h.basis_id!r} differs from metric basis {g.basis_id!r}")
    if g.dim != m.shape[0]:
        raise DimensionError(f"metric of dim {g.dim} for a matrix of dim {m.shape[0]}")
    w = g.weights
    return float(np.abs(w[:, None] * m - m.conj().T * w[None, :]).max())


def spectrum(h, g: Metric | None = None, threshold: float = HERMITIAN_TOL, method: str | None = None) -> Spectrum:
    """Eigenvalues of ``h``.

    With a metric the matrix is symmetrized by the similarity ``g^1/2 H g^-1/2``
    and handed to a Hermitian solver.  Without one, or with ``method="general"``,
    a nonsymmetric solver is used and eigenvector conditioning flags defective
    matrices.
    """
    m = _matrix(h)
    if method is None:
        method = "general" if g is None else "hermitized"
    if method == "general":
        vals, vecs = np.linalg.eig(m)
        cond = np.linalg.cond(vecs) if m.size else 1.0
        return Spectrum(vals, float(np.abs(vals.imag).max(initial=0.0)), "general", bool(cond > DEFECTIVE_COND))
    if method != "hermitized":
        raise ValueError(f"unknown method {method!r}")
    if g is None:
        g = Metric.kinematic(m.shape[0], getattr(h, "basis_id", ""))
    res = self_adjointness_residual(h, g)
    scale = max(1.0, float(np.abs(m).max(initial=0.0)) * float(g.weights.max()))
    if res > threshold * scale:
        raise PreconditionError(f"metric self-adjointness residual {res:.3e} exceeds {threshold:.1e}", res)
    r = np.sqrt(g.weights)
    k = r[:, None] * m / r[None, :]
    herm = float(np.abs(k - k.conj().T).max(initial=0.0))
    if herm > HERMITIAN_TOL * max(1.0, float(np.abs(k).max(initial=0.0))):
        raise PreconditionError(f"hermitized matrix is not Hermitian (residual {herm:.3e})", herm)
    vals = np.linalg.eigvalsh((k + k.conj().T) / 2)
    return Spectrum(vals.astype(complex), 0.0, "hermitized")


def compare_spectra(a: Spectrum, b: Spectrum, tol: float = 1e-9) -> ComparisonReport:
    if len(a) != len(b):
        return ComparisonReport(float("inf"), False, tol, len(a), len(b),
                                f"dimension mismatch: {len(a)} vs {len(b)}")
    diff = float(np.abs(a.eigenvalues - b.eigenvalues).max(initial=0.0))
    return ComparisonReport(diff, diff <= tol, tol, len(a), len(b))


def commutator_norm(h: np.ndarray, x: np.ndarray) -> float:
    return float(np.abs(h @ x - x @ h).max())


def symmetry_scan(spec: HamiltonianSpec, c: Cluster, elements: Sequence[str] | None = None) -> list[tuple[str, float]]:
    """``||[H, X_tot]||`` for each requested algebra element."""
    if elements is None:
        elements = algebra_elements(spec.model)
    totals = [(name, total_operator(name, spec, c).entries) for name in elements]
    h, _ = build_hamiltonian(spec, c)
    return [(name, commutator_norm(h.entries, x)) for name, x in totals]


@dataclass(frozen=True)
class SweepRow:
    tau: float
    max_norm: float
    norms: tuple  # ((element, commutator norm), ...)


def susy_point_sweep(c: Cluster, s, j: float, tau_values: Sequence[float], model: str = "tJ_ferro",
                     representation: str = "spin") -> list[SweepRow]:
    """Max commutator norm of H with the eight total super-spin generators along ``tau``."""
    base = HamiltonianSpec(model, representation, j, 0.0, as_spin(s))
    names = algebra_elements(model)
    totals = [(name, total_operator(name, base, c).entries) for name in names]
    rows = []
    for tau in tau_values:
        h, _ = build_hamiltonian(base.replace(tau=float(tau)), c)
        norms = tuple((name, commutator_norm(h.entries, x)) for name, x in totals)
        rows.append(SweepRow(float(tau), max(n for _, n in norms), norms))
    return rows
