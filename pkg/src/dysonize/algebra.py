"""Matrix representations of a spin multiplet and of the t-J super-multiplet.

Every operator is an :class:`OperatorMatrix`: a dense complex matrix tagged
with the identifier of the ordered basis it acts on.  Operators on different
bases refuse to combine.

Basis conventions
-----------------
spin
    ``|s, m>`` with ``m = -s, ..., s`` ascending.
super
    the ``2s+1`` states ``|s, m>`` (m ascending) followed by the ``2s``
    states ``|s-1/2, m>`` (m ascending).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import BasisMismatchError, DegenerateSpinError, DimensionError

SU2_NAMES = ("S_plus", "S_minus", "S_z")
SUPER_NAMES = ("S_plus", "S_minus", "S_z", "A", "R_plus", "R_minus", "T_plus", "T_minus")


@dataclass(frozen=True)
class DoubledSpin:
    """Spin quantum number stored as the integer ``2s``."""

    two_s: int

    def __post_init__(self):
        if isinstance(self.two_s, bool) or int(self.two_s) != self.two_s or self.two_s < 0:
            raise ValueError(f"two_s must be a non-negative integer, got {self.two_s!r}")
        object.__setattr__(self, "two_s", int(self.two_s))

    @property
    def s(self) -> float:
        return self.two_s / 2

    def require_physical(self) -> "DoubledSpin":
        if self.two_s < 1:
            raise DegenerateSpinError(self.two_s)
        return self

    def __str__(self):
        return f"{self.two_s}/2" if self.two_s % 2 else str(self.two_s // 2)


def as_spin(s) -> DoubledSpin:
    """Accept a :class:`DoubledSpin` or a bare ``two_s`` integer."""
    return s if isinstance(s, DoubledSpin) else DoubledSpin(s)


def spin_basis_id(s: DoubledSpin) -> str:
    return f"spin(2s={s.two_s}):m asc"


def super_basis_id(s: DoubledSpin) -> str:
    return f"super(2s={s.two_s}):[s; m asc]+[s-1/2; m asc]"


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A labelled dense complex square matrix acting on a named ordered basis."""

    label: str
    entries: np.ndarray
    basis_id: str
    dim: int = field(init=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DimensionError(f"operator {self.label!r} must be a non-empty square matrix, got shape {m.shape}")
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "dim", m.shape[0])

    def _check(self, other: "OperatorMatrix"):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        if other.basis_id != self.basis_id:
            raise BasisMismatchError(
                f"cannot combine {self.label!r} on {self.basis_id!r} with {other.label!r} on {other.basis_id!r}"
            )
        return None

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return OperatorMatrix(f"{self.label}*{other.label}", self.entries @ other.entries, self.basis_id)

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return OperatorMatrix(f"{self.label}+{other.label}", self.entries + other.entries, self.basis_id)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return OperatorMatrix(f"{self.label}-{other.label}", self.entries - other.entries, self.basis_id)

    def __mul__(self, scalar):
        if isinstance(scalar, OperatorMatrix):
            return NotImplemented
        return OperatorMatrix(f"{scalar}*{self.label}", scalar * self.entries, self.basis_id)

    __rmul__ = __mul__

    def __neg__(self):
        return OperatorMatrix(f"-{self.label}", -self.entries, self.basis_id)

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(f"{self.label}^+", self.entries.conj().T, self.basis_id)

    def relabel(self, label: str) -> "OperatorMatrix":
        return OperatorMatrix(label, self.entries, self.basis_id)

    @classmethod
    def identity(cls, dim: int, basis_id: str) -> "OperatorMatrix":
        return cls("I", np.eye(dim), basis_id)

    @classmethod
    def zeros(cls, dim: int, basis_id: str) -> "OperatorMatrix":
        return cls("0", np.zeros((dim, dim)), basis_id)


def max_norm(x) -> float:
    """Largest absolute entry; accepts arrays or anything with ``.entries``."""
    m = getattr(x, "entries", x)
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def commutator(x: OperatorMatrix, y: OperatorMatrix) -> OperatorMatrix:
    return (x @ y - y @ x).relabel(f"[{x.label},{y.label}]")


def anticommutator(x: OperatorMatrix, y: OperatorMatrix) -> OperatorMatrix:
    return (x @ y + y @ x).relabel(f"{{{x.label},{y.label}}}")


def spin_operators(s) -> dict[str, OperatorMatrix]:
    """Return ``S_plus``, ``S_minus`` and ``S_z`` for a single spin-s multiplet."""
    s = as_spin(s).require_physical()
    sv = s.s
    dim = s.two_s + 1
    m = -sv + np.arange(dim)
    # S+|s,m> = sqrt(s-m) sqrt(s+m+1) |s,m+1>
    sp = np.diag(np.sqrt((sv - m[:-1]) * (sv + m[:-1] + 1)), k=-1)
    bid = spin_basis_id(s)
    return {
        "S_plus": OperatorMatrix("S_plus", sp, bid),
        "S_minus": OperatorMatrix("S_minus", sp.T.copy(), bid),
        "S_z": OperatorMatrix("S_z", np.diag(m), bid),
    }


def super_operators(s) -> dict[str, OperatorMatrix]:
    """Return the eight super-algebra elements on the ``4s+1`` super-multiplet states."""
    s = as_spin(s).require_physical()
    sv = s.s
    n_hi, n_lo = s.two_s + 1, s.two_s
    dim = n_hi + n_lo
    m_hi = -sv + np.arange(n_hi)
    m_lo = -(sv - 0.5) + np.arange(n_lo)
    ops = {name: np.zeros((dim, dim)) for name in SUPER_NAMES}

    def hi(m):
        return int(round(m + sv))

    def lo(m):
        return n_hi + int(round(m + sv - 0.5))

    for m in m_hi:
        i = hi(m)
        if m + 1 <= sv:
            ops["S_plus"][hi(m + 1), i] = np.sqrt((sv - m) * (sv + m + 1))
        if m - 1 >= -sv:
            ops["S_minus"][hi(m - 1), i] = np.sqrt((sv - m + 1) * (sv + m))
        ops["S_z"][i, i] = m
        ops["A"][i, i] = sv
        # R+ and T+ leave the spin-s multiplet; the endpoints carry zero amplitude
        if m - 0.5 >= -(sv - 0.5):
            ops["R_plus"][lo(m - 0.5), i] = np.sqrt(sv + m)
        if m + 0.5 <= sv - 0.5:
            ops["T_plus"][lo(m + 0.5), i] = np.sqrt(sv - m)
    for m in m_lo:
        i = lo(m)
        if m + 1 <= sv - 0.5:
            ops["S_plus"][lo(m + 1), i] = np.sqrt((sv - 0.5 - m) * (sv + 0.5 + m))
        if m - 1 >= -(sv - 0.5):
            ops["S_minus"][lo(m - 1), i] = np.sqrt((sv + 0.5 - m) * (sv - 0.5 + m))
        ops["S_z"][i, i] = m
        ops["A"][i, i] = sv + 0.5
        ops["R_minus"][hi(m + 0.5), i] = np.sqrt(sv + 0.5 + m)
        ops["T_minus"][hi(m - 0.5), i] = np.sqrt(sv + 0.5 - m)

    bid = super_basis_id(s)
    return {name: OperatorMatrix(name, mat, bid) for name, mat in ops.items()}


@dataclass(frozen=True)
class RelationReport:
    relation_name: str
    residual: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.residual <= self.tolerance))


# (name, bracket, x, y, {element: coefficient} for the right-hand side)
_SU2_RELATIONS = (
    ("[S+,S-]=2Sz", "comm", "S_plus", "S_minus", {"S_z": 2}),
    ("[S+,Sz]=-S+", "comm", "S_plus", "S_z", {"S_plus": -1}),
    ("[S-,Sz]=S-", "comm", "S_minus", "S_z", {"S_minus": 1}),
)

_SUPER_RELATIONS = (
    # diagonal Weyl
    ("[S+,S-]=2Sz", "comm", "S_plus", "S_minus", {"S_z": 2}),
    ("{R+,R-}=A+Sz", "anti", "R_plus", "R_minus", {"A": 1, "S_z": 1}),
    ("{T+,T-}=A-Sz", "anti", "T_plus", "T_minus", {"A": 1, "S_z": -1}),
    # off-diagonal Weyl commutators
    ("[S+,R+]=-T+", "comm", "S_plus", "R_plus", {"T_plus": -1}),
    ("[S-,R+]=0", "comm", "S_minus", "R_plus", {}),
    ("[S+,R-]=0", "comm", "S_plus", "R_minus", {}),
    ("[S-,R-]=T-", "comm", "S_minus", "R_minus", {"T_minus": 1}),
    ("[S+,T+]=0", "comm", "S_plus", "T_plus", {}),
    ("[S-,T+]=-R+", "comm", "S_minus", "T_plus", {"R_plus": -1}),
    ("[S+,T-]=R-", "comm", "S_plus", "T_minus", {"R_minus": 1}),
    ("[S-,T-]=0", "comm", "S_minus", "T_minus", {}),
    # off-diagonal Weyl anti-commutators
    ("{R+,T+}=0", "anti", "R_plus", "T_plus", {}),
    ("{R-,T+}=S+", "anti", "R_minus", "T_plus", {"S_plus": 1}),
    # R+ lowers and T- lowers, so this pair closes on the lowering operator
    ("{R+,T-}=S-", "anti", "R_plus", "T_minus", {"S_minus": 1}),
    ("{R-,T-}=0", "anti", "R_minus", "T_minus", {}),
    # Cartan elements
    ("[A,Sz]=0", "comm", "A", "S_z", {}),
    # Weyl-Cartan
    ("[S+,Sz]=-S+", "comm", "S_plus", "S_z", {"S_plus": -1}),
    ("[S+,A]=0", "comm", "S_plus", "A", {}),
    ("[S-,Sz]=S-", "comm", "S_minus", "S_z", {"S_minus": 1}),
    ("[S-,A]=0", "comm", "S_minus", "A", {}),
    ("[R+,Sz]=R+/2", "comm", "R_plus", "S_z", {"R_plus": 0.5}),
    ("[R+,A]=-R+/2", "comm", "R_plus", "A", {"R_plus": -0.5}),
    ("[R-,Sz]=-R-/2", "comm", "R_minus", "S_z", {"R_minus": -0.5}),
    ("[R-,A]=R-/2", "comm", "R_minus", "A", {"R_minus": 0.5}),
    ("[T+,Sz]=-T+/2", "comm", "T_plus", "S_z", {"T_plus": -0.5}),
    ("[T+,A]=-T+/2", "comm", "T_plus", "A", {"T_plus": -0.5}),
    ("[T-,Sz]=T-/2", "comm", "T_minus", "S_z", {"T_minus": 0.5}),
    ("[T-,A]=T-/2", "comm", "T_minus", "A", {"T_minus": 0.5}),
)


def _operators(ops) -> Mapping[str, OperatorMatrix]:
    return getattr(ops, "operators", ops)


def _check_relations(relations, ops, tol) -> list[RelationReport]:
    ops = _operators(ops)
    first = ops[relations[0][2]]
    reports = []
    for name, bracket, x, y, rhs in relations:
        lhs = commutator(ops[x], ops[y]) if bracket == "comm" else anticommutator(ops[x], ops[y])
        target = OperatorMatrix.zeros(first.dim, first.basis_id)
        for element, coeff in rhs.items():
            target = target + coeff * ops[element]
        reports.append(RelationReport(name, max_norm(lhs - target), tol))
    return reports


def verify_su2(ops, tol: float = 1e-12) -> list[RelationReport]:
    """Check the three angular-momentum relations on ``S_plus``, ``S_minus``, ``S_z``."""
    return _check_relations(_SU2_RELATIONS, ops, tol)


def verify_superalgebra(ops, tol: float = 1e-12) -> list[RelationReport]:
    """Check all 28 defining (anti-)commutation relations of the eight-element super-algebra."""
    return _check_relations(_SUPER_RELATIONS, ops, tol)


def restrict(op: OperatorMatrix, indices, basis_id: str) -> OperatorMatrix:
    """Restrict ``op`` to the sub-basis ``indices`` (no check that the block is invariant)."""
    idx = np.asarray(indices)
    return OperatorMatrix(op.label, op.entries[np.ix_(idx, idx)], basis_id)
