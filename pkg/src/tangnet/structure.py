"""Quantum-structure representation of pure states.

A structure has one node per local basis state of each party and one
branch per nonzero amplitude in the product basis. A branch's length is the
amplitude magnitude; its orientation is the phase relative to a reference
branch, drawn so that a relative phase ``e^{i phi}`` appears as a rotation
by ``-phi`` (a relative phase of ``-i`` is a 90 degree anticlockwise turn).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import ArgumentError, StructureError
from .states import MultipartiteSpace, PureState

BRANCH_TOL = 1e-12
LENGTH_TOL = 1e-10
_DIGITS = 9


def _wrap_degrees(deg: float) -> float:
    deg = float(deg) % 360.0
    if deg >= 360.0 - 1e-9 or deg < 1e-9:
        return 0.0
    return deg


@dataclass(frozen=True)
class Branch:
    nodes: tuple[int, ...]
    length: float
    orientation: float


@dataclass(frozen=True)
class QuantumStructure:
    parties: tuple[tuple[str, int], ...]
    branches: tuple[Branch, ...]
    reference_branch: int = 0

    def __post_init__(self):
        object.__setattr__(self, "parties", tuple((str(l), int(d)) for l, d in self.parties))
        object.__setattr__(self, "branches", tuple(self.branches))
        self.validate()

    def validate(self) -> None:
        if not self.branches:
            raise StructureError("structure has no branches")
        dims = [d for _, d in self.parties]
        seen = set()
        for b in self.branches:
            if len(b.nodes) != len(dims) or any(not 0 <= i < d for i, d in zip(b.nodes, dims)):
                raise StructureError(f"branch nodes {b.nodes} invalid for dims {dims}")
            if b.nodes in seen:
                raise StructureError(f"two branches share nodes {b.nodes}")
            seen.add(b.nodes)
            if not 0.0 < b.length <= 1.0 + LENGTH_TOL:
                raise StructureError(f"branch length {b.length} outside (0, 1]")
            if not 0.0 <= b.orientation < 360.0:
                raise StructureError(f"orientation {b.orientation} outside [0, 360)")
        total = sum(b.length ** 2 for b in self.branches)
        if abs(total - 1.0) > LENGTH_TOL:
            raise StructureError(f"squared branch lengths sum to {total!r}, not 1")
        if not 0 <= self.reference_branch < len(self.branches):
            raise StructureError("reference branch index out of range")
        if self.branches[self.reference_branch].orientation != 0.0:
            raise StructureError("reference branch must have orientation 0")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.parties)

    def nodes(self) -> dict[str, list[int]]:
        """Occupied local basis states per party, ascending."""
        return {label: sorted({b.nodes[k] for b in self.branches})
                for k, label in enumerate(self.labels)}

    def to_dict(self) -> dict:
        return {
            "parties": [{"label": l, "dim": d} for l, d in self.parties],
            "nodes": self.nodes(),
            "branches": [
                {"nodes": list(b.nodes), "length": b.length, "orientation": b.orientation}
                for b in self.branches
            ],
            "reference_branch": self.reference_branch,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QuantumStructure":
        return cls(
            parties=tuple((p["label"], p["dim"]) for p in data["parties"]),
            branches=tuple(Branch(tuple(b["nodes"]), float(b["length"]), float(b["orientation"]))
                           for b in data["branches"]),
            reference_branch=int(data.get("reference_branch", 0)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True) + "\n"


def structure_from_state(psi: PureState) -> QuantumStructure:
    amp = psi.amplitudes
    nz = np.flatnonzero(np.abs(amp) > BRANCH_TOL)
    if nz.size == 0:
        raise ArgumentError("state has no nonzero amplitudes")
    ref = amp[nz[0]]
    norm = np.sqrt(np.sum(np.abs(amp[nz]) ** 2))
    branches = []
    for flat in nz:
        a = amp[flat]
        nodes = tuple(int(i) for i in np.unravel_index(flat, psi.space.dims))
        orient = _wrap_degrees(-np.degrees(np.angle(a / ref)))
        branches.append(Branch(nodes, float(abs(a) / norm), orient))
    return QuantumStructure(psi.space.parties, tuple(branches), 0)


def state_from_structure(qs: QuantumStructure) -> PureState:
    qs.validate()
    space = MultipartiteSpace(qs.parties)
    v = np.zeros(space.dim, dtype=np.complex128)
    for b in qs.branches:
        v[np.ravel_multi_index(b.nodes, space.dims)] = b.length * np.exp(-1j * np.radians(b.orientation))
    return PureState.normalized(space, v)


@dataclass(frozen=True)
class TwoQubitFamily:
    """``cos a |00> + sin a e^{i t} |11>`` (symmetric) or ``cos a |01> + sin a e^{i t} |10>``."""

    pairing: str
    alpha: float
    theta: float

    def __post_init__(self):
        if self.pairing not in ("symmetric", "asymmetric"):
            raise ArgumentError(f"pairing must be symmetric or asymmetric, got {self.pairing!r}")


def family_state(f: TwoQubitFamily, labels=("A", "B")) -> PureState:
    a, t = np.radians(f.alpha), np.radians(f.theta)
    first, second = ((0, 0), (1, 1)) if f.pairing == "symmetric" else ((0, 1), (1, 0))
    space = MultipartiteSpace(((labels[0], 2), (labels[1], 2)))
    v = np.zeros(4, dtype=np.complex128)
    v[2 * first[0] + first[1]] += np.cos(a)
    v[2 * second[0] + second[1]] += np.sin(a) * np.exp(1j * t)
    # exact zeros keep structures free of rounding-dust branches
    v[np.abs(v) < 1e-15] = 0.0
    return PureState.normalized(space, v)


@dataclass(frozen=True)
class StructureClass:
    """Canonical form of a structure modulo global rotation, mirror and party relabeling.

    ``branches`` holds the canonical (length, orientation) pairs; the weight
    profile and phase class are its sorted projections.
    """

    pairing: str
    weight_profile: tuple[float, ...]
    phase_class: tuple[float, ...]
    branches: tuple[tuple[float, float], ...]

    def to_dict(self) -> dict:
        return {
            "pairing": self.pairing,
            "weight_profile": list(self.weight_profile),
            "phase_class": list(self.phase_class),
            "branches": [list(b) for b in self.branches],
        }


def _pairing(qs: QuantumStructure) -> str:
    if len(qs.branches) < 2:
        return "other"
    if all(len(set(b.nodes)) == 1 for b in qs.branches):
        return "symmetric"
    if all(len(set(b.nodes)) == len(b.nodes) for b in qs.branches):
        return "asymmetric"
    return "other"


def canonical_class(qs: QuantumStructure) -> StructureClass:
    """Lexicographic minimum over every choice of reference branch and mirror sign."""
    lengths = [round(b.length, _DIGITS) for b in qs.branches]
    best = None
    for ref, sign in product(qs.branches, (1.0, -1.0)):
        cand = tuple(sorted(
            (L, round(_wrap_degrees(sign * (b.orientation - ref.orientation)), _DIGITS) % 360.0)
            for L, b in zip(lengths, qs.branches)
        ))
        if best is None or cand < best:
            best = cand
    return StructureClass(
        pairing=_pairing(qs),
        weight_profile=tuple(sorted(lengths)),
        phase_class=tuple(sorted(o for _, o in best)),
        branches=best,
    )


def classify(qs: QuantumStructure) -> StructureClass:
    if len(qs.parties) != 2 or any(d != 2 for _, d in qs.parties):
        raise ArgumentError("classification is defined for two qubits only")
    return canonical_class(qs)


def _circular_gap(a: float, b: float) -> float:
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def equivalent(q1: QuantumStructure, q2: QuantumStructure,
               length_tol: float = 1e-9, angle_tol: float = 1e-6) -> bool:
    """Tolerant structure equality under the same quotient as :func:`canonical_class`.

    Unlike comparing canonical forms, this does not depend on how rounding
    breaks near-ties, so it is the right test for numerically transformed states.
    """
    if _pairing(q1) != _pairing(q2) or len(q1.branches) != len(q2.branches):
        return False
    r1 = q1.branches[0]
    base = [(b.length, b.orientation - r1.orientation) for b in q1.branches]
    for ref, sign in product(q2.branches, (1.0, -1.0)):
        other = [(b.length, sign * (b.orientation - ref.orientation)) for b in q2.branches]
        used = [False] * len(other)
        ok = True
        for L, o in base:
            for j, (L2, o2) in enumerate(other):
                if not used[j] and abs(L - L2) <= length_tol and _circular_gap(o, o2) <= angle_tol:
                    used[j] = True
                    break
            else:
                ok = False
                break
        if ok:
            return True
    return False


@dataclass(frozen=True)
class ClassGroup:
    structure_class: StructureClass
    members: tuple[TwoQubitFamily, ...]


def enumerate_qubit_classes() -> list[ClassGroup]:
    """Classify the eight maximally entangled family members at alpha = 45 degrees.

    Members that fall into the same class are merged; the number of groups
    returned is whatever the quotient produces.
    """
    groups: dict[StructureClass, list[TwoQubitFamily]] = {}
    for pairing in ("symmetric", "asymmetric"):
        for theta in (0.0, 90.0, 180.0, 270.0):
            f = TwoQubitFamily(pairing, 45.0, theta)
            c = classify(structure_from_state(family_state(f)))
            groups.setdefault(c, []).append(f)
    return [ClassGroup(c, tuple(m)) for c, m in groups.items()]
