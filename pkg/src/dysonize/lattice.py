"""Finite square clusters, site embedding and dense many-body assembly.

Bond lists are directed: a periodic or open square cluster lists, for every
site, one bond per nearest-neighbour displacement (``+x, -x, +y, -y``) that
lands on a different site.  Each undirected pair therefore appears twice, and
on a periodic side of length 2 the wrap-around displacement duplicates the
direct one; both copies are kept.

Global basis: sites ordered row-major over ``(m, n)`` (index ``m * ly + n``),
site 0 most significant in the Kronecker product.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .algebra import OperatorMatrix
from .errors import ClusterError, DimensionError

MAX_DIM = 2**14

_DELTAS = (("+x", 1, 0), ("-x", -1, 0), ("+y", 0, 1), ("-y", 0, -1))


@dataclass(frozen=True)
class Cluster:
    n_sites: int
    sublattice: tuple
    bonds: tuple
    boundary: str = "open"
    lattice_constant: float = 1.0
    shape: tuple | None = None

    def __post_init__(self):
        if self.n_sites < 1:
            raise ClusterError("empty cluster")
        if self.boundary not in ("open", "periodic"):
            raise ClusterError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")
        sub = tuple(int(t) for t in self.sublattice)
        if len(sub) != self.n_sites or any(t not in (1, 2) for t in sub):
            raise ClusterError("sublattice must give a tag 1 or 2 for every site")
        bonds = tuple((int(i), int(j), str(lab)) for i, j, lab in self.bonds)
        for i, j, _ in bonds:
            if not (0 <= i < self.n_sites and 0 <= j < self.n_sites):
                raise ClusterError(f"bond ({i}, {j}) references a site outside 0..{self.n_sites - 1}")
            if i == j:
                raise ClusterError(f"self-bond on site {i}")
        object.__setattr__(self, "sublattice", sub)
        object.__setattr__(self, "bonds", bonds)
        if self.shape is not None:
            object.__setattr__(self, "shape", tuple(self.shape))

    def is_bipartite(self) -> bool:
        """True when every bond joins sublattice 1 to sublattice 2."""
        return all(self.sublattice[i] != self.sublattice[j] for i, j, _ in self.bonds)

    def sublattice_one_bonds(self) -> tuple:
        """Bonds leaving sublattice-1 sites: the ``r`` in lattice one, ``r + delta`` in lattice two."""
        if not self.is_bipartite():
            bad = next((i, j) for i, j, _ in self.bonds if self.sublattice[i] == self.sublattice[j])
            raise ClusterError(f"cluster is not bipartite: bond {bad} joins two sites of one sublattice")
        return tuple(b for b in self.bonds if self.sublattice[b[0]] == 1)

    def neighbor_counts(self) -> list[int]:
        counts = [0] * self.n_sites
        for i, _, _ in self.bonds:
            counts[i] += 1
        return counts

    def to_dict(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "sublattice": list(self.sublattice),
            "bonds": [list(b) for b in self.bonds],
            "boundary": self.boundary,
            "lattice_constant": self.lattice_constant,
            "shape": list(self.shape) if self.shape is not None else None,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "Cluster":
        return cls(
            n_sites=d["n_sites"],
            sublattice=tuple(d["sublattice"]),
            bonds=tuple(tuple(b) for b in d["bonds"]),
            boundary=d.get("boundary", "open"),
            lattice_constant=d.get("lattice_constant", 1.0),
            shape=tuple(d["shape"]) if d.get("shape") is not None else None,
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "Cluster":
        return cls.from_dict(json.loads(text))


def site_index(m: int, n: int, ly: int) -> int:
    return m * ly + n


def square_cluster(lx: int, ly: int, boundary: str = "open", lattice_constant: float = 1.0) -> Cluster:
    """Square ``lx`` x ``ly`` cluster with checkerboard sublattice tags.

    A periodic side of length 1 contributes no bonds (the wrap would be a
    self-bond).  A periodic side of length 2 keeps both displacements, so each
    neighbour across that side is reached twice.
    """
    if lx < 1 or ly < 1 or lx * ly < 2:
        raise ClusterError(f"cluster {lx}x{ly} needs at least two sites")
    if boundary not in ("open", "periodic"):
        raise ClusterError(f"boundary must be 'open' or 'periodic', got {boundary!r}")
    bonds = []
    for m in range(lx):
        for n in range(ly):
            for label, dm, dn in _DELTAS:
                mm, nn = m + dm, n + dn
                if boundary == "periodic":
                    mm, nn = mm % lx, nn % ly
                elif not (0 <= mm < lx and 0 <= nn < ly):
                    continue
                if (mm, nn) == (m, n):
                    continue
                bonds.append((site_index(m, n, ly), site_index(mm, nn, ly), label))
    sub = [1 if (m + n) % 2 == 0 else 2 for m in range(lx) for n in range(ly)]
    return Cluster(lx * ly, tuple(sub), tuple(bonds), boundary, lattice_constant, (lx, ly))


@dataclass(frozen=True, eq=False)
class ManyBodyOperator:
    entries: np.ndarray
    site_dims: tuple
    basis_id: str
    label: str = ""
    metadata: Mapping = field(default_factory=dict)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        dims = tuple(int(d) for d in self.site_dims)
        total = int(np.prod(dims))
        if m.shape != (total, total):
            raise DimensionError(f"matrix shape {m.shape} does not match site dims {dims} (product {total})")
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "site_dims", dims)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def check_guardrail(site_dims: Sequence[int]) -> int:
    total = int(np.prod([int(d) for d in site_dims], dtype=np.int64))
    if total > MAX_DIM:
        raise DimensionError(f"Hilbert space of dimension {total} exceeds the desk-scale limit {MAX_DIM}")
    return total


def global_basis_id(local_ids: Sequence[str]) -> str:
    return "sites[row-major]:" + " (x) ".join(local_ids)


@dataclass(frozen=True)
class Term:
    """``coeff`` times a product of site-local matrices (same-site factors multiply in order)."""

    coeff: complex
    factors: tuple  # ((site, OperatorMatrix), ...)
    label: str = ""
    degree: int | None = None


def assemble(terms: Iterable[Term], site_dims: Sequence[int], basis_id: str, label: str = "",
             metadata: Mapping | None = None, backend: str | None = None) -> ManyBodyOperator:
    dim = check_guardrail(site_dims)
    H = np.zeros((dim, dim), dtype=complex)
    dims = np.asarray(site_dims, dtype=np.int64)
    for term in terms:
        if term.coeff == 0:
            continue
        merged: dict[int, np.ndarray] = {}
        for site, op in term.factors:
            m = op.entries if isinstance(op, OperatorMatrix) else np.asarray(op)
            if m.shape[0] != site_dims[site]:
                raise DimensionError(f"factor of dim {m.shape[0]} placed on site {site} of dim {site_dims[site]}")
            merged[site] = merged[site] @ m if site in merged else m
        if not merged:
            H[np.diag_indices(dim)] += term.coeff
            continue
        sites = list(merged)
        kernels.accumulate(H, dims, sites, [merged[k] for k in sites], term.coeff, backend=backend)
    return ManyBodyOperator(H, tuple(site_dims), basis_id, label, dict(metadata or {}))


def embed(local_op: OperatorMatrix, site: int, c: Cluster, site_dims: Sequence[int],
          local_ids: Sequence[str] | None = None) -> ManyBodyOperator:
    """Kronecker placement ``I x .. x local_op x .. x I`` at ``site``."""
    if len(site_dims) != c.n_sites:
        raise DimensionError(f"{len(site_dims)} site dims for a {c.n_sites}-site cluster")
    if not 0 <= site < c.n_sites:
        raise DimensionError(f"site {site} outside cluster of {c.n_sites} sites")
    if local_op.dim != site_dims[site]:
        raise DimensionError(f"operator of dim {local_op.dim} does not fit site {site} of dim {site_dims[site]}")
    ids = list(local_ids) if local_ids is not None else [local_op.basis_id] * c.n_sites
    return assemble([Term(1.0, ((site, local_op),))], site_dims, global_basis_id(ids), f"{local_op.label}({site})")
