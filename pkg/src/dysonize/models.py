"""Heisenberg and t-J Hamiltonians in spin space and in Dyson quasi-particle space.

Four models, each summed over directed bonds ``(r, r + delta)``:

``heisenberg_FM``
    ``-J/2 sum [Sz Sz' + 1/2 S+ S-' + 1/2 S+' S-]`` over every directed bond.
``heisenberg_AFM``
    ``J sum [Sz1 Sz2 + 1/2 S+1 S-2 + 1/2 S+2 S-1]`` with ``r`` on sublattice 1.
``tJ_ferro``
    the super-spin t-J form over every directed bond, Dyson map on all sites.
``tJ_AF``
    the same summand with ``r`` on sublattice 1; Dyson map on sublattice 1 and
    anti-Dyson on sublattice 2.

Representations: ``spin`` uses the (super-)spin matrices; ``mapped_substituted``
substitutes the mapped image of every algebra element into the spin-form
expression; ``mapped_transcribed`` assembles the explicit quasi-particle
polynomials term by term; ``mapped_truncated`` keeps only the displayed
low-order t-J terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Mapping

import numpy as np

from .algebra import SU2_NAMES, SUPER_NAMES, DoubledSpin, OperatorMatrix, as_spin, spin_operators, super_operators
from .dyson import LocalSpace, Metric
from .errors import ModelError
from .lattice import Cluster, ManyBodyOperator, Term, assemble, global_basis_id

MODELS = ("heisenberg_FM", "heisenberg_AFM", "tJ_ferro", "tJ_AF")
REPRESENTATIONS = ("spin", "mapped_transcribed", "mapped_substituted", "mapped_truncated")
TWO_SUBLATTICE = ("heisenberg_AFM", "tJ_AF")
SUPER_MODELS = ("tJ_ferro", "tJ_AF")


@dataclass(frozen=True)
class HamiltonianSpec:
    model: str
    representation: str = "spin"
    J: float = 1.0
    tau: float = 0.0
    s: DoubledSpin = field(default_factory=lambda: DoubledSpin(1))

    def __post_init__(self):
        if self.model not in MODELS:
            raise ModelError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.representation not in REPRESENTATIONS:
            raise ModelError(f"unknown representation {self.representation!r}; expected one of {REPRESENTATIONS}")
        if self.representation == "mapped_truncated" and self.model not in SUPER_MODELS:
            raise ModelError(f"mapped_truncated is only defined for t-J models, not {self.model!r}")
        object.__setattr__(self, "s", as_spin(self.s).require_physical())
        object.__setattr__(self, "J", float(self.J))
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def flags(self) -> tuple:
        if self.model == "heisenberg_FM" and self.J <= 0:
            return ("heisenberg_FM with J <= 0 (ferromagnet assumes J > 0)",)
        return ()

    @property
    def mapped(self) -> bool:
        return self.representation != "spin"

    def replace(self, **changes) -> "HamiltonianSpec":
        d = {"model": self.model, "representation": self.representation, "J": self.J, "tau": self.tau, "s": self.s}
        d.update(changes)
        return HamiltonianSpec(**d)

    def to_dict(self) -> dict:
        return {"model": self.model, "representation": self.representation, "J": self.J, "tau": self.tau,
                "two_s": self.s.two_s}

    @classmethod
    def from_dict(cls, d: Mapping) -> "HamiltonianSpec":
        return cls(d["model"], d.get("representation", "spin"), d.get("J", 1.0), d.get("tau", 0.0),
                   DoubledSpin(d["two_s"]))


def local_variant(model: str, sublattice: int) -> str:
    if model == "heisenberg_FM":
        return "dyson"
    if model == "heisenberg_AFM":
        return "dyson" if sublattice == 1 else "anti_dyson"
    if model == "tJ_ferro":
        return "super_dyson"
    return "super_dyson" if sublattice == 1 else "super_anti_dyson"


def algebra_elements(model: str) -> tuple:
    return SUPER_NAMES if model in SUPER_MODELS else SU2_NAMES


class _Site:
    """Resolves algebra elements and quasi-particle words on one site."""

    def __init__(self, spec: HamiltonianSpec, sublattice: int):
        self.spec = spec
        self.elements = algebra_elements(spec.model)
        if spec.mapped:
            self.space = LocalSpace(spec.s, local_variant(spec.model, sublattice))
            self.basis_id = self.space.basis_id
            self.dim = self.space.dim
        else:
            self.space = None
            self._ops = super_operators(spec.s) if spec.model in SUPER_MODELS else spin_operators(spec.s)
            first = next(iter(self._ops.values()))
            self.basis_id, self.dim = first.basis_id, first.dim

    def element(self, name: str) -> OperatorMatrix:
        if name == "A_shift":
            a = self.element("A")
            return (a - self.spec.s.two_s * OperatorMatrix.identity(self.dim, self.basis_id)).relabel("A-2s")
        if name not in self.elements:
            raise ModelError(f"unknown element {name!r} for model {self.spec.model!r}")
        return self.space.image(name) if self.space is not None else self._ops[name]

    def element_pieces(self, name: str) -> dict[int, OperatorMatrix]:
        if name == "A_shift":
            pieces = dict(self.element_pieces("A"))
            shift = -self.spec.s.two_s * OperatorMatrix.identity(self.dim, self.basis_id)
            pieces[0] = pieces[0] + shift if 0 in pieces else shift
            return pieces
        if name not in self.elements:
            raise ModelError(f"unknown element {name!r} for model {self.spec.model!r}")
        return self.space.pieces(name)

    def word(self, word: str) -> OperatorMatrix:
        return self.space.word(tuple(word.split()))


class _Context:
    def __init__(self, spec: HamiltonianSpec, c: Cluster):
        if spec.model in TWO_SUBLATTICE:
            c.sublattice_one_bonds()  # raises on non-bipartite clusters
        self.spec, self.cluster = spec, c
        cache = {}
        self.sites = []
        for tag in c.sublattice:
            if tag not in cache:
                cache[tag] = _Site(spec, tag)
            self.sites.append(cache[tag])
        self.site_dims = tuple(st.dim for st in self.sites)
        self.basis_id = global_basis_id([st.basis_id for st in self.sites])

    def metric(self) -> Metric:
        if not self.spec.mapped:
            return Metric.kinematic(int(np.prod(self.site_dims)), self.basis_id)
        w = np.ones(1)
        for st in self.sites:
            w = np.kron(w, st.space.metric().weights)
        return Metric(w, self.basis_id)

    def bonds(self):
        if self.spec.model in TWO_SUBLATTICE:
            return self.cluster.sublattice_one_bonds()
        return self.cluster.bonds


# ---------------------------------------------------------------------------
# spin-form expressions: (coefficient, ((site, element), ...), label)

def _spin_form(spec: HamiltonianSpec, ctx: _Context) -> Iterator[tuple]:
    J, tau = spec.J, spec.tau
    for i, j, _ in ctx.bonds():
        if spec.model == "heisenberg_FM":
            yield -J / 2, ((i, "S_z"), (j, "S_z")), "Sz Sz'"
            yield -J / 4, ((i, "S_plus"), (j, "S_minus")), "S+ S-'"
            yield -J / 4, ((j, "S_plus"), (i, "S_minus")), "S+' S-"
        elif spec.model == "heisenberg_AFM":
            yield J, ((i, "S_z"), (j, "S_z")), "Sz1 Sz2"
            yield J / 2, ((i, "S_plus"), (j, "S_minus")), "S+1 S-2"
            yield J / 2, ((j, "S_plus"), (i, "S_minus")), "S+2 S-1"
        else:
            yield -tau, ((j, "R_plus"), (i, "R_minus")), "R+' R-"
            yield -tau, ((i, "R_plus"), (j, "R_minus")), "R+ R-'"
            yield -tau, ((j, "T_plus"), (i, "T_minus")), "T+' T-"
            yield -tau, ((i, "T_plus"), (j, "T_minus")), "T+ T-'"
            yield J, ((i, "S_z"), (j, "S_z")), "Sz Sz'"
            yield -J, ((i, "A_shift"), (j, "A_shift")), "(A-2s)(A'-2s)"
            yield J / 2, ((j, "S_plus"), (i, "S_minus")), "S+' S-"
            yield J / 2, ((i, "S_plus"), (j, "S_minus")), "S+ S-'"


# ---------------------------------------------------------------------------
# explicit quasi-particle polynomials: (coefficient, ((site, word), ...), label)

def _transcribed_FM(spec, ctx):
    J, s = spec.J, spec.s.s
    for i, j, _ in ctx.bonds():
        yield J * s, ((i, "bd b"),), "Js/2 [2 n(r)]"
        yield -J * s / 2, ((i, "bd"), (j, "b")), "-Js/2 b+(r) b(r+d)"
        yield -J * s / 2, ((j, "bd"), (i, "b")), "-Js/2 b+(r+d) b(r)"
        yield J / 4, ((i, "bd"), (j, "bd b b")), "J/4 b+(r) b+(r+d) b^2(r+d)"
        yield J / 4, ((i, "bd b b"), (j, "bd")), "J/4 b+(r) b+(r+d) b^2(r)"
        yield -J / 2, ((i, "bd b"), (j, "bd b")), "-J/2 n(r) n(r+d)"


def _transcribed_AFM(spec, ctx):
    J, s = spec.J, spec.s.s
    for i, j, _ in ctx.bonds():
        yield J * s, ((i, "bd b"),), "Js n1(r)"
        yield J * s, ((j, "bd b"),), "Js n2(r+d)"
        yield J * s, ((i, "bd"), (j, "bd")), "Js b1+ b2+"
        yield J * s, ((j, "b"), (i, "b")), "Js b2 b1"
        yield -J, ((i, "bd b"), (j, "bd b")), "-J n1 n2"
        yield -J / 2, ((i, "bd"), (j, "bd bd b")), "-J/2 b1+ b2+ b2+ b2"
        yield -J / 2, ((i, "bd b b"), (j, "b")), "-J/2 b1+ b1 b1 b2"


def _tJ_ferro_quadratic(spec, ctx):
    J, tau, s = spec.J, spec.tau, spec.s.s
    for i, j, _ in ctx.bonds():
        yield -2 * tau * s, ((j, "ad"), (i, "a")), "-2ts a+(r+d) a(r)"
        yield -2 * tau * s, ((i, "ad"), (j, "a")), "-2ts a+(r) a(r+d)"
        yield J * s / 2, ((i, "ad a"),), "Js/2 a+(r) a(r)"
        yield J * s / 2, ((i, "bd b"),), "Js/2 b+(r) b(r)"
        yield -J * s / 2, ((j, "bd"), (i, "b")), "-Js/2 b+(r+d) b(r)"


def _tJ_ferro_interaction(spec, ctx):
    J, tau = spec.J, spec.tau
    for i, j, _ in ctx.bonds():
        yield -tau, ((i, "bd b a"), (j, "ad")), "-t n_b(r) a(r) a+(r+d)"
        yield -tau, ((j, "b ad"), (i, "bd a")), "-t b(r+d) b+(r) a+(r+d) a(r)"
        yield -tau, ((i, "bd ad"), (j, "b a")), "-t b+(r) b(r+d) a+(r) a(r+d)"
        yield -J / 2, ((i, "bd b"), (j, "bd b")), "-J/2 n_b n_b'"
        yield -J / 4, ((i, "bd b"), (j, "ad a")), "-J/4 n_b n_a'"
        yield -J / 4, ((i, "ad a"), (j, "bd b")), "-J/4 n_a n_b'"
        yield -J / 8, ((i, "ad a"), (j, "ad a")), "-J/8 n_a n_a'"
        yield J / 4, ((i, "ad a b"), (j, "bd")), "J/4 n_a(r) b+(r+d) b(r)"
        yield J / 4, ((i, "bd b b"), (j, "bd")), "J/4 n_b(r) b+(r+d) b(r)"


def _tJ_AF_cubic(spec, ctx):
    J, tau, s = spec.J, spec.tau, spec.s.s
    hop = tau * np.sqrt(2 * s)
    for i, j, _ in ctx.bonds():
        yield J * s, ((i, "bd b"),), "Js n_b1"
        yield J * s, ((j, "bd b"),), "Js n_b2"
        yield J * s, ((i, "ad a"),), "Js n_a1"
        yield J * s, ((j, "ad a"),), "Js n_a2"
        yield J * s, ((i, "b"), (j, "b")), "Js b1 b2"
        yield J * s, ((j, "bd"), (i, "bd")), "Js b2+ b1+"
        yield -hop, ((i, "ad b"), (j, "a")), "-t sqrt(2s) a1+ a2 b1"
        yield -hop, ((j, "ad"), (i, "a bd")), "-t sqrt(2s) a2+ a1 b1+"
        yield -hop, ((i, "ad"), (j, "a bd")), "-t sqrt(2s) a1+ a2 b2+"
        yield -hop, ((j, "ad b"), (i, "a")), "-t sqrt(2s) a2+ a1 b2"


def _transcription(spec, ctx):
    model, rep = spec.model, spec.representation
    if model == "heisenberg_FM":
        return _transcribed_FM(spec, ctx)
    if model == "heisenberg_AFM":
        return _transcribed_AFM(spec, ctx)
    if model == "tJ_ferro":
        if rep == "mapped_truncated":
            return _tJ_ferro_quadratic(spec, ctx)

        def both():
            yield from _tJ_ferro_quadratic(spec, ctx)
            yield from _tJ_ferro_interaction(spec, ctx)

        return both()
    return _tJ_AF_cubic(spec, ctx)


def _word_degree(word: str) -> int:
    return len(word.split())


def hamiltonian_terms(spec: HamiltonianSpec, c: Cluster) -> tuple[list[Term], _Context]:
    ctx = _Context(spec, c)
    terms = []
    if spec.representation in ("spin", "mapped_substituted"):
        for coeff, factors, label in _spin_form(spec, ctx):
            ops = tuple((k, ctx.sites[k].element(name)) for k, name in factors)
            terms.append(Term(coeff, ops, label))
    else:
        for coeff, factors, label in _transcription(spec, ctx):
            ops = tuple((k, ctx.sites[k].word(w)) for k, w in factors)
            terms.append(Term(coeff, ops, label, sum(_word_degree(w) for _, w in factors)))
    return terms, ctx


def build_hamiltonian(spec: HamiltonianSpec, c: Cluster, backend: str | None = None) -> tuple[ManyBodyOperator, Metric]:
    """Global Hamiltonian matrix and the matching metric (identity for ``spin``)."""
    terms, ctx = hamiltonian_terms(spec, c)
    meta = {"spec": spec.to_dict(), "flags": list(spec.flags), "n_terms": len(terms)}
    h = assemble(terms, ctx.site_dims, ctx.basis_id, f"H[{spec.model},{spec.representation}]", meta, backend)
    return h, ctx.metric()


def total_operator(element_name: str, spec: HamiltonianSpec, c: Cluster) -> ManyBodyOperator:
    """``sum_r X(r)`` in the representation named by ``spec``."""
    ctx = _Context(spec, c)
    if element_name not in algebra_elements(spec.model):
        raise ModelError(f"unknown element {element_name!r} for model {spec.model!r}")
    terms = [Term(1.0, ((k, st.element(element_name)),)) for k, st in enumerate(ctx.sites)]
    return assemble(terms, ctx.site_dims, ctx.basis_id, f"{element_name}^tot")


def reference_state(spec: HamiltonianSpec, c: Cluster) -> np.ndarray:
    """Product state mapped to the quasi-particle vacuum.

    Ferromagnetic models: every spin maximally down.  Two-sublattice models:
    the Neel state (down on sublattice 1, up on sublattice 2), no holes.
    """
    ctx = _Context(spec, c)
    vec = np.ones(1)
    for tag, st in zip(c.sublattice, ctx.sites):
        local = np.zeros(st.dim)
        if spec.mapped or not (spec.model in TWO_SUBLATTICE and tag == 2):
            local[0] = 1.0
        else:
            local[spec.s.two_s] = 1.0  # |s, +s> is the last state of the spin-s multiplet
        vec = np.kron(vec, local)
    return vec.astype(complex)


def reference_energy(spec: HamiltonianSpec, c: Cluster) -> float:
    """Expectation of the spin-space Hamiltonian in :func:`reference_state`."""
    spin_spec = spec.replace(representation="spin")
    h, _ = build_hamiltonian(spin_spec, c)
    v = reference_state(spin_spec, c)
    return float(np.real(v.conj() @ h.entries @ v))


def graded_substitution(spec: HamiltonianSpec, c: Cluster) -> dict[int, np.ndarray]:
    """Substituted Hamiltonian split by total polynomial degree in b, b+, a, a+."""
    sub = spec.replace(representation="mapped_substituted")
    ctx = _Context(sub, c)
    by_degree: dict[int, list[Term]] = {}
    for coeff, factors, label in _spin_form(sub, ctx):
        expansions = [ctx.sites[k].element_pieces(name).items() for k, name in factors]
        for combo in product(*expansions):
            degree = sum(d for d, _ in combo)
            ops = tuple((k, op) for (k, _), (_, op) in zip(factors, combo))
            by_degree.setdefault(degree, []).append(Term(coeff, ops, label, degree))
    return {d: assemble(ts, ctx.site_dims, ctx.basis_id).entries for d, ts in sorted(by_degree.items())}


def graded_transcription(spec: HamiltonianSpec, c: Cluster) -> dict[int, np.ndarray]:
    terms, ctx = hamiltonian_terms(spec, c)
    by_degree: dict[int, list[Term]] = {}
    for t in terms:
        by_degree.setdefault(t.degree, []).append(t)
    return {d: assemble(ts, ctx.site_dims, ctx.basis_id).entries for d, ts in sorted(by_degree.items())}


@dataclass(frozen=True)
class DegreeRow:
    degree: int
    substituted_norm: float
    transcribed_norm: float
    discrepancy: float


@dataclass(frozen=True)
class TranscriptionAudit:
    """Entrywise comparison of the explicit quasi-particle polynomial against substitution.

    ``reference_energy`` is the spin-space energy of the reference product
    state; the explicit polynomials drop this constant, so it is removed from
    the substituted side before comparison.  ``max_degree`` restricts the
    substituted side to low orders (the through-cubic AF t-J form).
    """

    spec: HamiltonianSpec
    reference_energy: float
    max_degree: int | None
    rows: tuple
    term_norms: tuple  # ((label, max-norm of the assembled term), ...)
    residual: float
    tolerance: float

    @property
    def exact(self) -> bool:
        return self.residual <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "reference_energy": self.reference_energy,
            "max_degree": self.max_degree,
            "rows": [vars(r) for r in self.rows],
            "term_norms": [{"label": lab, "norm": n} for lab, n in self.term_norms],
            "residual": self.residual,
            "tolerance": self.tolerance,
            "exact": self.exact,
        }


def transcription_audit(spec: HamiltonianSpec, c: Cluster, tol: float = 1e-12) -> TranscriptionAudit:
    """Compare ``mapped_transcribed`` with ``mapped_substituted`` degree by degree."""
    spec = spec.replace(representation="mapped_transcribed")
    max_degree = 3 if spec.model == "tJ_AF" else None
    sub = graded_substitution(spec, c)
    trans = graded_transcription(spec, c)
    e_ref = reference_energy(spec, c)
    dim = next(iter(sub.values())).shape[0]
    zero = np.zeros((dim, dim), dtype=complex)
    sub[0] = sub.get(0, zero) - e_ref * np.eye(dim)
    rows, total = [], zero.copy()
    for d in sorted(set(sub) | set(trans)):
        a = sub.get(d, zero) if max_degree is None or d <= max_degree else zero
        b = trans.get(d, zero)
        total += a - b
        rows.append(DegreeRow(d, float(np.abs(a).max()), float(np.abs(b).max()), float(np.abs(a - b).max())))
    terms, ctx = hamiltonian_terms(spec, c)
    norms: dict[str, list] = {}
    for t in terms:
        norms.setdefault(t.label, []).append(t)
    term_norms = tuple(
        (label, float(np.abs(assemble(ts, ctx.site_dims, ctx.basis_id).entries).max())) for label, ts in norms.items()
    )
    return TranscriptionAudit(spec, e_ref, max_degree, tuple(rows), term_norms, float(np.abs(total).max()), tol)


@dataclass(frozen=True)
class NeelReport:
    neel_energy: float
    ground_energy: float

    @property
    def gap(self) -> float:
        return self.neel_energy - self.ground_energy


def neel_report(spec: HamiltonianSpec, c: Cluster) -> NeelReport:
    """Neel-state energy against the exact ground energy; no bound is asserted."""
    if spec.model not in TWO_SUBLATTICE:
        raise ModelError(f"Neel state is defined for two-sublattice models, not {spec.model!r}")
    spin = spec.replace(representation="spin")
    h, _ = build_hamiltonian(spin, c)
    e0 = float(np.linalg.eigvalsh(h.entries)[0])
    return NeelReport(reference_energy(spin, c), e0)
