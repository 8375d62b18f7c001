"""Multipartite states, ensembles, purification and partition models."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from . import linalg
from .errors import ArgumentError, InvalidDensityError, ShapeError, SpaceError

NORM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
RANK_TOL = 1e-12
ROLES = ("S", "S1", "S2", "E0", "E1", "E2")

PartySet = Union[str, int, Iterable[Union[str, int]]]


@dataclass(frozen=True)
class MultipartiteSpace:
    """Ordered tensor product of labelled parties; the first party is most significant."""

    parties: tuple[tuple[str, int], ...]

    def __post_init__(self):
        parties = tuple((str(label), int(dim)) for label, dim in self.parties)
        object.__setattr__(self, "parties", parties)
        if not parties:
            raise ShapeError("a space needs at least one party")
        labels = [p[0] for p in parties]
        if any(not label or label != label.strip() for label in labels):
            raise ShapeError(f"invalid party labels {labels}")
        if len(set(labels)) != len(labels):
            raise ShapeError(f"duplicate party labels {labels}")
        for label, dim in parties:
            if dim < 2:
                raise ShapeError(f"party {label} has dimension {dim}; need at least 2")
        linalg.check_dim(self.dim)

    @classmethod
    def of(cls, *dims: int, prefix: str = "q") -> "MultipartiteSpace":
        return cls(tuple((f"{prefix}{k}", d) for k, d in enumerate(dims)))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, int]] | Mapping[str, int]) -> "MultipartiteSpace":
        if isinstance(pairs, Mapping):
            pairs = pairs.items()
        return cls(tuple(pairs))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(p[0] for p in self.parties)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(p[1] for p in self.parties)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self) -> int:
        return len(self.parties)

    def index(self, party: str | int) -> int:
        if isinstance(party, (int, np.integer)):
            if not 0 <= party < len(self):
                raise ArgumentError(f"party index {party} out of range")
            return int(party)
        try:
            return self.labels.index(party)
        except ValueError:
            raise ArgumentError(f"unknown party {party!r}; have {list(self.labels)}") from None

    def indices(self, parties: PartySet) -> list[int]:
        """Resolve a label, index, or collection of either to sorted unique indices."""
        if isinstance(parties, (str, int, np.integer)):
            parties = [parties]
        return sorted({self.index(p) for p in parties})

    def subspace(self, indices: Iterable[int]) -> "MultipartiteSpace":
        return MultipartiteSpace(tuple(self.parties[i] for i in sorted(indices)))

    def extended(self, label: str, dim: int) -> "MultipartiteSpace":
        return MultipartiteSpace(self.parties + ((label, dim),))

    def fresh_label(self, base: str) -> str:
        label, k = base, 1
        while label in self.labels:
            label, k = f"{base}{k}", k + 1
        return label


@dataclass(frozen=True, eq=False)
class PureState:
    space: MultipartiteSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amp.size != self.space.dim:
            raise ShapeError(f"{amp.size} amplitudes for a space of dimension {self.space.dim}")
        if not np.all(np.isfinite(amp)):
            raise ArgumentError("amplitudes must be finite")
        norm = float(np.linalg.norm(amp))
        if abs(norm - 1.0) > NORM_TOL:
            raise ArgumentError(f"state norm {norm!r} deviates from 1")
        object.__setattr__(self, "amplitudes", linalg.frozen(amp))

    @classmethod
    def normalized(cls, space: MultipartiteSpace, vector) -> "PureState":
        v = np.asarray(vector, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ArgumentError("cannot normalize the zero vector")
        return cls(space, v / norm)

    @classmethod
    def from_terms(cls, space: MultipartiteSpace, terms: Mapping[Sequence[int], complex],
                   normalize: bool = False) -> "PureState":
        """Build from ``{(i_A, i_B, ...): amplitude}``."""
        v = np.zeros(space.dim, dtype=np.complex128)
        for idx, amp in terms.items():
            idx = tuple(idx)
            if len(idx) != len(space) or any(not 0 <= i < d for i, d in zip(idx, space.dims)):
                raise ArgumentError(f"basis index {idx} invalid for dims {space.dims}")
            v[np.ravel_multi_index(idx, space.dims)] += amp
        return cls.normalized(space, v) if normalize else cls(space, v)

    @classmethod
    def basis(cls, space: MultipartiteSpace, idx: Sequence[int]) -> "PureState":
        return cls.from_terms(space, {tuple(idx): 1.0})

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.space.dims)

    def density(self) -> "DensityOperator":
        v = self.amplitudes
        return DensityOperator(self.space, np.outer(v, v.conj()))

    def overlap(self, other: "PureState") -> complex:
        if other.space.dims != self.space.dims:
            raise SpaceError("states live on different spaces")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __repr__(self):
        return f"PureState({list(self.space.parties)}, {np.round(self.amplitudes, 6).tolist()})"


@dataclass(frozen=True, eq=False)
class DensityOperator:
    space: MultipartiteSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = linalg.as_cmatrix(self.matrix, "density matrix")
        d = self.space.dim
        if m.shape != (d, d):
            raise ShapeError(f"matrix shape {m.shape} does not match space dimension {d}")
        if not linalg.is_hermitian(m):
            raise InvalidDensityError("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidDensityError(f"trace {tr.real!r} deviates from 1")
        lo = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
        if lo < -PSD_TOL:
            raise InvalidDensityError(f"negative eigenvalue {lo!r}")
        object.__setattr__(self, "matrix", linalg.frozen(m))

    def partial(self, keep: PartySet) -> "DensityOperator":
        idx = self.space.indices(keep)
        if len(idx) == len(self.space):
            return self
        red = linalg.partial_trace(self.matrix, self.space.dims, idx)
        return DensityOperator(self.space.subspace(idx), red)


@dataclass(frozen=True)
class Ensemble:
    """Convex mixture ``{(p_i, |psi_i>)}`` on a common space."""

    members: tuple[tuple[float, PureState], ...]

    def __post_init__(self):
        members = tuple((float(p), s) for p, s in self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ArgumentError("ensemble needs at least one member")
        space = members[0][1].space
        for p, s in members:
            if not 0.0 < p <= 1.0:
                raise ArgumentError(f"weight {p} outside (0, 1]")
            if s.space.dims != space.dims:
                raise SpaceError("ensemble members live on different spaces")
        total = sum(p for p, _ in members)
        if abs(total - 1.0) > NORM_TOL:
            raise ArgumentError(f"weights sum to {total!r}, not 1")

    @property
    def space(self) -> MultipartiteSpace:
        return self.members[0][1].space


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """``|psi> = sum_k coefficients[k] |left_basis[:, k]> |right_basis[:, k]>``."""

    cut: tuple[tuple[str, ...], tuple[str, ...]]
    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray
    space: MultipartiteSpace

    @property
    def rank(self) -> int:
        return int(self.coefficients.size)

    def reconstruct(self) -> PureState:
        """Reassemble the state in the original party order."""
        m = (self.left_basis * self.coefficients) @ self.right_basis.T
        left = self.space.indices(self.cut[0])
        right = self.space.indices(self.cut[1])
        dims = self.space.dims
        t = m.reshape([dims[i] for i in left] + [dims[i] for i in right])
        t = t.transpose(np.argsort(left + right))
        return PureState.normalized(self.space, t.reshape(-1))


@dataclass(frozen=True)
class PartitionModel:
    """Assignment of parties to the roles S, S1, S2, E0, E1, E2.

    ``model-a`` is U = S + E0, ``model-b`` adds a layered environment E1, and
    ``model-c`` holds two system/environment clusters (S1, E1), (S2, E2)
    with an optional outer E0. Anything else is ``custom``. A role may be
    shared by several parties.
    """

    kind: str
    roles: Mapping[str, str]

    REQUIRED = {
        "model-a": ({"S", "E0"}, set()),
        "model-b": ({"S", "E1", "E0"}, set()),
        "model-c": ({"S1", "E1", "S2", "E2"}, {"E0"}),
    }

    def __post_init__(self):
        roles = dict(self.roles)
        object.__setattr__(self, "roles", MappingProxyType(roles))
        if not roles:
            raise ArgumentError("partition model assigns no roles")
        bad = sorted({r for r in roles.values() if r not in ROLES})
        if bad:
            raise ArgumentError(f"unknown roles {bad}; valid roles are {list(ROLES)}")
        if self.kind == "custom":
            return
        if self.kind not in self.REQUIRED:
            raise ArgumentError(f"unknown model kind {self.kind!r}")
        required, optional = self.REQUIRED[self.kind]
        present = set(roles.values())
        if not required <= present or not present <= required | optional:
            raise ArgumentError(
                f"{self.kind} requires roles {sorted(required)}"
                + (f" (optional {sorted(optional)})" if optional else "")
                + f", got {sorted(present)}"
            )

    @classmethod
    def infer(cls, roles: Mapping[str, str]) -> "PartitionModel":
        """Pick the most specific kind whose role shape matches ``roles``."""
        present = set(roles.values())
        for kind, (required, optional) in cls.REQUIRED.items():
            if required <= present <= required | optional:
                return cls(kind, roles)
        return cls("custom", roles)

    def parties_with(self, roles: Iterable[str]) -> list[str]:
        roles = set(roles)
        return [label for label, role in self.roles.items() if role in roles]

    def present_roles(self) -> set[str]:
        return set(self.roles.values())

    def check_covers(self, space: MultipartiteSpace) -> None:
        missing = [label for label in space.labels if label not in self.roles]
        extra = [label for label in self.roles if label not in space.labels]
        if missing or extra:
            raise ArgumentError(
                f"partition does not match the space: unassigned {missing}, unknown {extra}"
            )


def _as_density(state: PureState | DensityOperator) -> DensityOperator:
    return state.density() if isinstance(state, PureState) else state


def purify(rho: DensityOperator, ancilla: str = "anc") -> PureState:
    """Canonical purification ``sum_k sqrt(lam_k) |k>|k_anc>`` in the descending eigenbasis.

    Zero eigenvalues are dropped, so the ancilla dimension equals the rank
    (padded up to 2, the minimum party dimension).
    """
    es = linalg.eig_hermitian(rho.matrix)
    lam = np.clip(es.eigenvalues, 0.0, None)
    rank = max(1, int(np.sum(lam > RANK_TOL)))
    anc_dim = max(2, rank)
    space = rho.space.extended(rho.space.fresh_label(ancilla), anc_dim)
    psi = np.zeros((rho.space.dim, anc_dim), dtype=np.complex128)
    for k in range(rank):
        psi[:, k] = np.sqrt(lam[k]) * es.eigenvectors[:, k]
    return PureState.normalized(space, psi.reshape(-1))


def mix(e: Ensemble) -> DensityOperator:
    m = sum(p * np.outer(s.amplitudes, s.amplitudes.conj()) for p, s in e.members)
    return DensityOperator(e.space, m)


def views_equivalent(e: Ensemble, ancilla: str = "anc") -> PureState:
    """Global pure state ``sum_i sqrt(p_i) |psi_i>|i_anc>`` whose ancilla trace is ``mix(e)``."""
    n = len(e.members)
    anc_dim = max(2, n)
    space = e.space.extended(e.space.fresh_label(ancilla), anc_dim)
    psi = np.zeros((e.space.dim, anc_dim), dtype=np.complex128)
    for i, (p, s) in enumerate(e.members):
        psi[:, i] = np.sqrt(p) * s.amplitudes
    return PureState(space, psi.reshape(-1))


def trace_out_ancilla(psi: PureState) -> DensityOperator:
    """Reduced state on every party but the last."""
    keep = list(range(len(psi.space) - 1))
    m = linalg.reduced_from_vector(psi.amplitudes, psi.space.dims, keep)
    return DensityOperator(psi.space.subspace(keep), m)


def schmidt(psi: PureState, left: PartySet) -> SchmidtDecomposition:
    space = psi.space
    li = space.indices(left)
    if not li or len(li) == len(space):
        raise ArgumentError("Schmidt cut needs a nonempty proper subset of parties")
    ri = [k for k in range(len(space)) if k not in li]
    dl = int(np.prod([space.dims[k] for k in li]))
    m = psi.tensor().transpose(li + ri).reshape(dl, -1)
    u, s, vh = np.linalg.svd(m)
    r = max(1, int(np.sum(s > RANK_TOL)))
    return SchmidtDecomposition(
        cut=(tuple(space.labels[k] for k in li), tuple(space.labels[k] for k in ri)),
        coefficients=linalg.frozen(s[:r]),
        left_basis=linalg.frozen(u[:, :r]),
        right_basis=linalg.frozen(vh[:r, :].T),
        space=space,
    )


def reduce(rho_universe: PureState | DensityOperator, model: PartitionModel,
           target: Iterable[str]) -> DensityOperator:
    """Trace out every party whose role is not in ``target``.

    For model-b with target ``{S}`` this is the chain tr_E1 tr_E0; for model-c
    with target ``{S1}`` it is tr_E1 tr_{S2+E2} tr_E0. Partial traces commute,
    so the chain is evaluated in one shot.
    """
    target = set([target] if isinstance(target, str) else target)
    unknown = sorted(target - set(ROLES))
    if unknown:
        raise ArgumentError(f"unknown roles {unknown}")
    absent = sorted(target - model.present_roles())
    if absent:
        raise ArgumentError(f"roles {absent} are not assigned in this {model.kind} model")
    model.check_covers(rho_universe.space)
    keep = rho_universe.space.indices(model.parties_with(target))
    if isinstance(rho_universe, PureState):
        space = rho_universe.space
        m = linalg.reduced_from_vector(rho_universe.amplitudes, space.dims, keep)
        return DensityOperator(space.subspace(keep), m)
    return rho_universe.partial(keep)


def purity(rho: PureState | DensityOperator) -> float:
    if isinstance(rho, PureState):
        return 1.0
    m = rho.matrix
    # tr(rho^2) for Hermitian rho is the squared Frobenius norm
    return float(np.real(np.vdot(m, m)))


def is_approx_pure(rho: PureState | DensityOperator, eps: float = 1e-6) -> bool:
    """Whether the state is close enough to pure to be assigned one wave function."""
    return purity(rho) >= 1.0 - eps
