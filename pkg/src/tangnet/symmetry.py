"""Checks of the out-in symmetry on bipartite pure states.

Three transformations are exercised: envariant local-unitary pairs that
leave the state fixed, identical local base rotations ``u (x) u``, and the
party exchange (SWAP). The invariants asserted are the Schmidt spectrum for
all three and the structure class for SWAP and envariance. The state itself
and the computational-basis branch lengths are measured and reported only.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .errors import ArgumentError, InvariantViolation
from .states import PureState, schmidt
from .structure import equivalent, structure_from_state

OPERATIONS = ("envariance", "rotation", "swap")


def _bipartite(psi: PureState) -> None:
    if len(psi.space) != 2:
        raise ArgumentError(f"expected a two-party state, got {len(psi.space)} parties")


@dataclass(frozen=True, eq=False)
class LocalUnitaryPair:
    u_a: np.ndarray
    u_b: np.ndarray

    def __post_init__(self):
        for name in ("u_a", "u_b"):
            u = linalg.as_cmatrix(getattr(self, name), name)
            if not linalg.is_unitary(u):
                raise ArgumentError(f"{name} is not unitary")
            object.__setattr__(self, name, linalg.frozen(u))

    def operator(self) -> np.ndarray:
        return linalg.kron(self.u_a, self.u_b)

    def apply(self, psi: PureState) -> PureState:
        _bipartite(psi)
        if (self.u_a.shape[0], self.u_b.shape[0]) != psi.space.dims:
            raise ArgumentError("unitary dimensions do not match the state's parties")
        t = self.u_a @ psi.tensor() @ self.u_b.T
        return PureState.normalized(psi.space, t.reshape(-1))

    def residual(self, psi: PureState) -> float:
        return float(np.linalg.norm(self.apply(psi).amplitudes - psi.amplitudes))


@dataclass(frozen=True)
class SymmetryVerdict:
    operation: str
    state_distance: float
    class_changed: bool
    schmidt_distance: float
    global_phase: float = 0.0
    lengths_changed: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def schmidt_spectrum(psi: PureState) -> np.ndarray:
    """Schmidt coefficients across the first-party cut, zero-padded to ``min(dA, dB)``."""
    _bipartite(psi)
    lam = schmidt(psi, [0]).coefficients
    out = np.zeros(min(psi.space.dims))
    out[: lam.size] = lam
    return out


def phase_distance(before: PureState, after: PureState) -> tuple[float, float]:
    """``min_phi ||after - e^{i phi} before||`` with ``phi = arg <before|after>``."""
    ov = before.overlap(after)
    phi = float(np.angle(ov)) if abs(ov) > 0 else 0.0
    d = np.linalg.norm(after.amplitudes - np.exp(1j * phi) * before.amplitudes)
    return float(d), phi


def _length_multiset(psi: PureState) -> list[float]:
    return sorted(b.length for b in structure_from_state(psi).branches)


def verdict(operation: str, before: PureState, after: PureState) -> SymmetryVerdict:
    dist, phi = phase_distance(before, after)
    l0, l1 = _length_multiset(before), _length_multiset(after)
    lengths_changed = len(l0) != len(l1) or not np.allclose(l0, l1, rtol=0, atol=1e-9)
    changed = not equivalent(structure_from_state(before), structure_from_state(after))
    spec_d = float(np.linalg.norm(schmidt_spectrum(before) - schmidt_spectrum(after)))
    return SymmetryVerdict(operation, dist, changed, spec_d, phi, bool(lengths_changed))


def envariance_counterpart(psi: PureState, phases: Sequence[float]) -> LocalUnitaryPair:
    """Pair ``U_A = sum e^{i phi_k}|a_k><a_k|``, ``U_B = sum e^{-i phi_k}|b_k><b_k|``.

    Both act as the identity off the Schmidt support, so ``U_A (x) U_B`` fixes
    ``psi`` exactly.
    """
    _bipartite(psi)
    sd = schmidt(psi, [0])
    phases = np.asarray(phases, dtype=float).reshape(-1)
    if phases.size != sd.rank:
        raise ArgumentError(f"need {sd.rank} phases (Schmidt rank), got {phases.size}")
    a, b = sd.left_basis, sd.right_basis
    da, db = psi.space.dims
    u_a = np.eye(da, dtype=np.complex128) + (a * (np.exp(1j * phases) - 1)) @ a.conj().T
    u_b = np.eye(db, dtype=np.complex128) + (b * (np.exp(-1j * phases) - 1)) @ b.conj().T
    return LocalUnitaryPair(u_a, u_b)


def apply_envariance(psi: PureState, phases: Sequence[float]) -> tuple[PureState, SymmetryVerdict]:
    pair = envariance_counterpart(psi, phases)
    after = pair.apply(psi)
    return after, verdict("envariance", psi, after)


def apply_local_rotation(psi: PureState, u) -> tuple[PureState, SymmetryVerdict]:
    """Rotate the local basis of both parties identically with ``u``."""
    _bipartite(psi)
    u = linalg.as_cmatrix(u, "u")
    if not linalg.is_unitary(u):
        raise ArgumentError("rotation is not unitary")
    da, db = psi.space.dims
    if u.shape[0] != da or da != db:
        raise ArgumentError("identical rotations need equal party dimensions matching u")
    after = LocalUnitaryPair(u, u).apply(psi)
    return after, verdict("rotation", psi, after)


def apply_permutation(psi: PureState) -> tuple[PureState, SymmetryVerdict]:
    """Exchange the local states of the two parties (labels stay in place)."""
    _bipartite(psi)
    da, db = psi.space.dims
    if da != db:
        raise ArgumentError("permutation needs equal party dimensions")
    after = PureState(psi.space, psi.tensor().T.reshape(-1))
    return after, verdict("swap", psi, after)


@dataclass
class SuiteSummary:
    trials: int
    seed: int
    operations: tuple[str, ...]
    counts: dict[str, int] = field(default_factory=dict)
    worst_schmidt_distance: float = 0.0
    worst_envariance_residual: float = 0.0
    class_checks: int = 0
    class_changes: int = 0
    worst_state_distance: dict[str, float] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        d = asdict(self)
        d["operations"] = list(self.operations)
        d["ok"] = self.ok
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True) + "\n"


def out_in_suite(psi: PureState, trials: int, seed: int = 0,
                 operations: Sequence[str] | None = None, tol: float = 1e-8,
                 raise_on_violation: bool = True) -> SuiteSummary:
    """Apply ``trials`` random chains of symmetry operations and check the invariants.

    Trial ``t`` draws from its own generator keyed by ``seed + t``, picks a
    chain of one to three operations, and compares every intermediate state
    with ``psi``: the Schmidt spectrum must agree to ``tol``, every envariant
    pair must fix its input to ``tol``, and the structure must stay in its
    class while no rotation has been applied.
    """
    _bipartite(psi)
    ops = tuple(operations) if operations else OPERATIONS
    unknown = [o for o in ops if o not in OPERATIONS]
    if unknown:
        raise ArgumentError(f"unknown operations {unknown}; choose from {list(OPERATIONS)}")
    da, db = psi.space.dims
    if da != db:
        ops = tuple(o for o in ops if o == "envariance")
        if not ops:
            raise ArgumentError("rotation and swap need equal party dimensions")

    summary = SuiteSummary(trials=int(trials), seed=int(seed), operations=ops,
                           counts={o: 0 for o in ops},
                           worst_state_distance={o: 0.0 for o in ops})
    ref_spec = schmidt_spectrum(psi)
    ref_struct = structure_from_state(psi)

    for t in range(int(trials)):
        rng = linalg.make_rng(int(seed) + t)
        chain = [ops[int(k)] for k in rng.integers(0, len(ops), size=int(rng.integers(1, 4)))]
        state = psi
        rotated = False
        for op in chain:
            summary.counts[op] += 1
            if op == "envariance":
                rank = schmidt(state, [0]).rank
                pair = envariance_counterpart(state, rng.uniform(0, 2 * np.pi, rank))
                res = pair.residual(state)
                summary.worst_envariance_residual = max(summary.worst_envariance_residual, res)
                if res > tol:
                    summary.violations.append(f"trial {t}: envariance residual {res:.3e}")
                new = pair.apply(state)
                v = verdict(op, state, new)
            elif op == "rotation":
                new, v = apply_local_rotation(state, linalg.haar_random_unitary(da, rng))
                rotated = True
            else:
                new, v = apply_permutation(state)
            summary.worst_state_distance[op] = max(summary.worst_state_distance[op], v.state_distance)
            state = new

            sd = float(np.linalg.norm(schmidt_spectrum(state) - ref_spec))
            summary.worst_schmidt_distance = max(summary.worst_schmidt_distance, sd)
            if sd > tol:
                summary.violations.append(f"trial {t}: Schmidt spectrum moved by {sd:.3e} after {op}")
            if not rotated:
                summary.class_checks += 1
                if not equivalent(ref_struct, structure_from_state(state)):
                    summary.class_changes += 1
                    summary.violations.append(f"trial {t}: structure class changed after {op}")

    if summary.violations and raise_on_violation:
        raise InvariantViolation("; ".join(summary.violations[:5]))
    return summary
