"""Dyson and anti-Dyson maps from (super-)spin operators to boson/fermion operators.

The quasi-particle spaces are truncated to their physical part: boson rungs
``u = 0..2s`` for a single spin, and for a super-spin the product space
(boson rung) x (fermion occupancy) with the weightless state ``(u=2s, a=1)``
removed.  Super bases are ordered boson-rung major, fermion-occupancy minor.

Mapped operators are evaluated as words in ``b``, ``b^+``, ``a``, ``a^+`` on a
boson ladder padded by the word length and then projected onto the physical
states, so intermediate excursions above ``u = 2s`` are kept exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .algebra import SU2_NAMES, SUPER_NAMES, DoubledSpin, OperatorMatrix, as_spin
from .errors import BasisMismatchError, DimensionError, ModelError

SPIN_VARIANTS = ("dyson", "anti_dyson")
SUPER_VARIANTS = ("super_dyson", "super_anti_dyson")
VARIANTS = SPIN_VARIANTS + SUPER_VARIANTS

LETTERS = ("b", "bd", "a", "ad")


@dataclass(frozen=True)
class FactorTable:
    """Normalization factors ``F_u`` (Dyson) or ``G_u`` (anti-Dyson) indexed by boson rung."""

    two_s: int
    variant: str
    values: tuple
    fermion_sector: int | None = None

    def value(self, u: int) -> float:
        """Factor for rung ``u``; Dyson factors vanish beyond the physical range."""
        if 0 <= u < len(self.values):
            return self.values[u]
        if u < 0:
            raise IndexError(f"negative boson rung {u}")
        if self.variant in ("dyson", "super_dyson"):
            return 0.0
        raise IndexError(f"rung {u} is outside the physical range of {self.variant} (no anti-Dyson factor)")

    def __len__(self):
        return len(self.values)


def _weights(two_s: int, a: int, n_rungs: int) -> np.ndarray:
    # w_u = prod_{k=1}^{u-1+a} (1 - k/2s); a running product keeps relative error at eps
    terms = 1.0 - np.arange(1, max(n_rungs - 2 + a, 0) + 1, dtype=float) / two_s
    running = np.cumprod(np.concatenate(([1.0], terms)))
    u = np.arange(n_rungs)
    return running[np.maximum(u - 1 + a, 0)]


def dyson_factors(s) -> FactorTable:
    s = as_spin(s).require_physical()
    w = _weights(s.two_s, 0, s.two_s + 1)
    return FactorTable(s.two_s, "dyson", tuple(np.sqrt(w)))


def anti_dyson_factors(s) -> FactorTable:
    s = as_spin(s).require_physical()
    w = _weights(s.two_s, 0, s.two_s + 1)
    return FactorTable(s.two_s, "anti_dyson", tuple(1.0 / np.sqrt(w)))


def super_factors(s, a: int, variant: str = "super_dyson") -> FactorTable:
    """Factors ``F_{u,a}`` (``super_dyson``) or ``G_{u,a}`` (``super_anti_dyson``)."""
    s = as_spin(s).require_physical()
    if a not in (0, 1):
        raise ValueError(f"fermion sector must be 0 or 1, got {a!r}")
    if variant not in SUPER_VARIANTS:
        raise ModelError(f"unknown super variant {variant!r}")
    w = _weights(s.two_s, a, s.two_s + 1 - a)
    vals = np.sqrt(w) if variant == "super_dyson" else 1.0 / np.sqrt(w)
    return FactorTable(s.two_s, variant, tuple(vals), fermion_sector=a)


@dataclass(frozen=True, eq=False)
class Metric:
    """Diagonal positive-definite inner-product weights on an ordered basis."""

    weights: np.ndarray
    basis_id: str
    dim: int = field(init=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        if w.size == 0 or not np.all(w > 0):
            raise ValueError("metric weights must be non-empty and strictly positive")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "dim", w.size)

    @classmethod
    def kinematic(cls, dim: int, basis_id: str) -> "Metric":
        return cls(np.ones(dim), basis_id)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.weights)

    def is_identity(self) -> bool:
        return bool(np.all(self.weights == 1.0))


def boson_ops(n_max: int) -> dict[str, OperatorMatrix]:
    """Boson ladder truncated at ``n_max`` quanta (``b^+|n_max) = 0``)."""
    if n_max < 1:
        raise DimensionError(f"n_max must be >= 1, got {n_max}")
    bd = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=-1)
    bid = f"boson(n_max={n_max}):u asc"
    return {
        "b": OperatorMatrix("b", bd.T.copy(), bid),
        "b_dagger": OperatorMatrix("b_dagger", bd, bid),
        "number": OperatorMatrix("n_b", np.diag(np.arange(n_max + 1, dtype=float)), bid),
    }


def fermion_ops() -> dict[str, OperatorMatrix]:
    ad = np.array([[0.0, 0.0], [1.0, 0.0]])
    bid = "fermion:[empty, occupied]"
    return {
        "a": OperatorMatrix("a", ad.T.copy(), bid),
        "a_dagger": OperatorMatrix("a_dagger", ad, bid),
        "number": OperatorMatrix("n_a", np.diag([0.0, 1.0]), bid),
    }


# Substitution rules.  Each element is a list of (coefficient(s), word); a word is
# read as an operator product left to right, e.g. ("bd", "b", "b") = b^+ b b.
def _r(s):
    return np.sqrt(2 * s)


_RULES = {
    "dyson": {
        "S_plus": [(_r, ("bd",))],
        "S_minus": [(_r, ("b",)), (lambda s: -1 / _r(s), ("bd", "b", "b"))],
        "S_z": [(lambda s: -s, ()), (lambda s: 1.0, ("bd", "b"))],
    },
    "anti_dyson": {
        "S_plus": [(_r, ("b",))],
        "S_minus": [(_r, ("bd",)), (lambda s: -1 / _r(s), ("bd", "bd", "b"))],
        "S_z": [(lambda s: s, ()), (lambda s: -1.0, ("bd", "b"))],
    },
    "super_dyson": {
        "S_plus": [(_r, ("bd",))],
        "S_minus": [
            (_r, ("b",)),
            (lambda s: -1 / _r(s), ("bd", "b", "b")),
            (lambda s: -1 / _r(s), ("ad", "a", "b")),
        ],
        "S_z": [(lambda s: -s, ()), (lambda s: 1.0, ("bd", "b")), (lambda s: 0.5, ("ad", "a"))],
        # A has eigenvalue s on the neutral multiplet and s + 1/2 on the charged one
        "A": [(lambda s: s, ()), (lambda s: 0.5, ("ad", "a"))],
        "T_plus": [(_r, ("ad",))],
        "T_minus": [
            (_r, ("a",)),
            (lambda s: -1 / _r(s), ("bd", "b", "a")),
            (lambda s: -1 / _r(s), ("ad", "a", "a")),
        ],
        "R_plus": [(lambda s: 1.0, ("b", "ad"))],
        "R_minus": [(lambda s: 1.0, ("a", "bd"))],
    },
    "super_anti_dyson": {
        "S_plus": [(_r, ("b",))],
        "S_minus": [
            (_r, ("bd",)),
            (lambda s: -1 / _r(s), ("bd", "bd", "b")),
            (lambda s: -1 / _r(s), ("bd", "ad", "a")),
        ],
        "S_z": [(lambda s: s, ()), (lambda s: -1.0, ("bd", "b")), (lambda s: -0.5, ("ad", "a"))],
        "A": [(lambda s: s, ()), (lambda s: 0.5, ("ad", "a"))],
        # R+ must create the fermion: sqrt(2s) (1 - n_b/2s) a^+
        "R_plus": [(_r, ("ad",)), (lambda s: -1 / _r(s), ("bd", "b", "ad"))],
        "R_minus": [(_r, ("a",))],
        "T_plus": [(lambda s: 1.0, ("b", "ad"))],
        "T_minus": [(lambda s: 1.0, ("bd", "a"))],
    },
}


def substitution_rule(variant: str, element: str):
    """The (coefficient, word) expansion used for ``element`` under ``variant``."""
    try:
        return _RULES[variant][element]
    except KeyError:
        raise ModelError(f"no {variant!r} image for element {element!r}") from None


def quasi_basis_id(s: DoubledSpin, variant: str) -> str:
    if variant in SPIN_VARIANTS:
        return f"bose(2s={s.two_s},{variant}):u asc"
    return f"bose-fermi(2s={s.two_s},{variant}):u major,a minor,drop(u=2s,a=1)"


class LocalSpace:
    """Physical quasi-particle space of one site under a given mapping variant."""

    def __init__(self, s, variant: str):
        self.s = as_spin(s).require_physical()
        if variant not in VARIANTS:
            raise ModelError(f"unknown mapping variant {variant!r}")
        self.variant = variant
        self.has_fermion = variant in SUPER_VARIANTS
        self.basis_id = quasi_basis_id(self.s, variant)
        two_s = self.s.two_s
        if self.has_fermion:
            self.states = tuple((u, a) for u in range(two_s + 1) for a in (0, 1) if not (u == two_s and a == 1))
        else:
            self.states = tuple((u, 0) for u in range(two_s + 1))
        self.dim = len(self.states)

    def factors(self) -> np.ndarray:
        if self.variant == "dyson":
            return np.array(dyson_factors(self.s).values)
        if self.variant == "anti_dyson":
            return np.array(anti_dyson_factors(self.s).values)
        tables = [super_factors(self.s, a, self.variant) for a in (0, 1)]
        return np.array([tables[a].values[u] for u, a in self.states])

    def metric(self) -> Metric:
        return Metric(self.factors() ** 2, self.basis_id)

    def _physical_index(self, n_max: int) -> np.ndarray:
        width = 2 if self.has_fermion else 1
        return np.array([u * width + a for u, a in self.states])

    def word(self, word: Sequence[str], label: str | None = None) -> OperatorMatrix:
        """Matrix of an operator word restricted to the physical states."""
        for letter in word:
            if letter not in LETTERS:
                raise ModelError(f"unknown quasi-particle operator {letter!r}")
            if letter in ("a", "ad") and not self.has_fermion:
                raise ModelError(f"fermion operator {letter!r} on a pure-boson site")
        n_max = self.s.two_s + max(len(word), 1)
        raw = _padded_letters(n_max, self.has_fermion)
        full = np.eye(raw["b"].shape[0])
        for letter in word:
            full = full @ raw[letter]
        idx = self._physical_index(n_max)
        return OperatorMatrix(label or ("*".join(word) or "I"), full[np.ix_(idx, idx)], self.basis_id)

    def pieces(self, element: str) -> dict[int, OperatorMatrix]:
        """Image of ``element`` split by polynomial degree in the quasi-particle operators."""
        sv = self.s.s
        out: dict[int, np.ndarray] = {}
        for coeff, word in substitution_rule(self.variant, element):
            m = coeff(sv) * self.word(word).entries
            out[len(word)] = out.get(len(word), 0) + m
        return {d: OperatorMatrix(f"{element}[deg {d}]", m, self.basis_id) for d, m in sorted(out.items())}

    def image(self, element: str) -> OperatorMatrix:
        total = sum(p.entries for p in self.pieces(element).values())
        return OperatorMatrix(element, total, self.basis_id)


@lru_cache(maxsize=None)
def _padded_letters(n_max: int, with_fermion: bool) -> dict[str, np.ndarray]:
    b = boson_ops(n_max)["b"].entries.real
    if not with_fermion:
        return {"b": b, "bd": b.T.copy()}
    a = fermion_ops()["a"].entries.real
    i_b, i_f = np.eye(n_max + 1), np.eye(2)
    # boson rung major, fermion occupancy minor
    return {
        "b": np.kron(b, i_f),
        "bd": np.kron(b.T, i_f),
        "a": np.kron(i_b, a),
        "ad": np.kron(i_b, a.T),
    }


@dataclass(frozen=True)
class MappedOperatorSet:
    variant: str
    two_s: int
    operators: Mapping[str, OperatorMatrix]
    metric: Metric

    def __post_init__(self):
        for op in self.operators.values():
            if op.basis_id != self.metric.basis_id:
                raise BasisMismatchError(f"{op.label!r} is not on the metric's basis {self.metric.basis_id!r}")

    @property
    def basis_id(self) -> str:
        return self.metric.basis_id

    def __getitem__(self, name):
        return self.operators[name]


def map_spin(s, variant: str = "dyson") -> MappedOperatorSet:
    if variant not in SPIN_VARIANTS:
        raise ModelError(f"map_spin variant must be one of {SPIN_VARIANTS}, got {variant!r}")
    space = LocalSpace(s, variant)
    ops = {name: space.image(name) for name in SU2_NAMES}
    return MappedOperatorSet(variant, space.s.two_s, ops, space.metric())


def map_super(s, variant: str = "super_dyson") -> MappedOperatorSet:
    if variant not in SUPER_VARIANTS:
        raise ModelError(f"map_super variant must be one of {SUPER_VARIANTS}, got {variant!r}")
    space = LocalSpace(s, variant)
    ops = {name: space.image(name) for name in SUPER_NAMES}
    return MappedOperatorSet(variant, space.s.two_s, ops, space.metric())


def dynamical_metric(s, variant: str) -> Metric:
    return LocalSpace(s, variant).metric()


def quasi_operator(s, variant: str, word: Sequence[str] | str) -> OperatorMatrix:
    """A quasi-particle operator word on the physical basis of ``variant``.

    ``word`` may be a sequence of letters or a space-separated string such as ``"bd b"``.
    """
    if isinstance(word, str):
        word = tuple(word.split())
    return LocalSpace(s, variant).word(tuple(word))


def star_adjoint(x: OperatorMatrix, g: Metric) -> OperatorMatrix:
    """Adjoint under the metric inner product: ``g^-1 x^+ g`` for diagonal ``g``."""
    if x.basis_id != g.basis_id:
        raise BasisMismatchError(f"operator on {x.basis_id!r} but metric on {g.basis_id!r}")
    w = g.weights
    m = x.entries.conj().T * (w[np.newaxis, :] / w[:, np.newaxis])
    return OperatorMatrix(f"{x.label}^*", m, x.basis_id)
