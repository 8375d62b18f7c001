"""Von Neumann entropies and mutual-information decompositions, in bits."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ArgumentError, InvalidDensityError
from .states import (
    DensityOperator,
    MultipartiteSpace,
    PartitionModel,
    PartySet,
    PureState,
    schmidt,
)

CLAMP_TOL = 1e-10
ZERO_CMI = 1e-9

State = PureState | DensityOperator


def entropy_of_spectrum(eigenvalues) -> float:
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size and lam.min() < -CLAMP_TOL:
        raise InvalidDensityError(f"eigenvalue {lam.min()!r} below -{CLAMP_TOL}")
    lam = lam[lam > 0]
    s = float(-np.sum(lam * np.log2(lam)))
    return s if s > 0 else 0.0


def _spectrum(state: State, keep: list[int]) -> np.ndarray:
    space = state.space
    if isinstance(state, PureState):
        # nonzero spectra of the two sides of a pure bipartition coincide; use the smaller
        rest = [k for k in range(len(space)) if k not in keep]
        if not rest:
            return np.array([1.0])
        d_keep = int(np.prod([space.dims[k] for k in keep]))
        side = keep if d_keep <= space.dim // d_keep else rest
        m = linalg.reduced_from_vector(state.amplitudes, space.dims, side)
    elif len(keep) == len(space):
        m = state.matrix
    else:
        m = linalg.partial_trace(state.matrix, space.dims, keep)
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


def entropy(rho: State, keep: PartySet | None = None) -> float:
    """``-sum lam log2 lam`` of the (optionally reduced) state.

    Eigenvalues in ``[-1e-10, 0)`` are treated as zero; anything more
    negative raises :class:`InvalidDensityError`.
    """
    keep = list(range(len(rho.space))) if keep is None else rho.space.indices(keep)
    if not keep:
        return 0.0
    return entropy_of_spectrum(_spectrum(rho, keep))


def _disjoint(space: MultipartiteSpace, *sets: PartySet, allow_empty=()) -> list[list[int]]:
    out = []
    for k, s in enumerate(sets):
        idx = space.indices(s) if s is not None else []
        if not idx and k not in allow_empty:
            raise ArgumentError("party sets must be nonempty")
        out.append(idx)
    flat = [i for idx in out for i in idx]
    if len(flat) != len(set(flat)):
        raise ArgumentError("party sets must be pairwise disjoint")
    return out


def mutual_info(rho: State, a: PartySet, b: PartySet) -> float:
    """``S_a + S_b - S_ab``."""
    a, b = _disjoint(rho.space, a, b)
    return entropy(rho, a) + entropy(rho, b) - entropy(rho, a + b)


def conditional_mutual_info(rho: State, a: PartySet, b: PartySet, c: PartySet = ()) -> float:
    """``I(a:b|c) = S_ac + S_bc - S_c - S_abc``; an empty ``c`` gives plain mutual information."""
    a, b, c = _disjoint(rho.space, a, b, c, allow_empty=(2,))
    return entropy(rho, a + c) + entropy(rho, b + c) - entropy(rho, c) - entropy(rho, a + b + c)


@dataclass(frozen=True)
class PureBipartiteInfo:
    total: float
    classical: float
    quantum: float


def mutual_info_pure_bipartite(psi: PureState, env: PartySet) -> PureBipartiteInfo:
    """Mutual information of a pure system/environment split, ``2 S_E``.

    The total is reported together with its even split into a classical and
    a quantum share of ``S_E`` each.
    """
    e = psi.space.indices(env)
    if not e or len(e) == len(psi.space):
        raise ArgumentError("environment must be a nonempty proper subset of parties")
    lam = schmidt(psi, e).coefficients ** 2
    s_e = entropy_of_spectrum(lam)
    return PureBipartiteInfo(total=2 * s_e, classical=s_e, quantum=s_e)


TERM_NAMES = ("I(S1E1:S2E2)", "I(E1:E2)", "I(E1:S2|E2)", "I(E2:S1|E1)")


@dataclass(frozen=True)
class MutualInfoReport:
    model_kind: str
    entropies: dict[str, float]
    I_total: float
    terms: dict[str, float]
    flags: dict[str, bool] = field(default_factory=dict)
    composites: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "model_kind": self.model_kind,
            "entropies": dict(self.entropies),
            "I_total": self.I_total,
            "terms": dict(self.terms),
            "flags": dict(self.flags),
            "composites": dict(self.composites),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True) + "\n"


def multiworld_mi(rho: State, model: PartitionModel) -> MutualInfoReport:
    """Mutual information between two systems, each with its own environment.

    ``I = I(S1E1:S2E2) - I(E1:E2) - I(E1:S2|E2) - I(E2:S1|E1)`` after the
    outer environment E0 is traced out. A role left unassigned (custom
    models) contributes the empty set, which is how coinciding environments
    are represented. The composite is reported raw, sign included.
    """
    if model.kind not in ("model-c", "custom"):
        raise ArgumentError(f"multiworld_mi needs a model-c or custom partition, got {model.kind}")
    roles = model.present_roles()
    if not {"S1", "S2"} <= roles or roles & {"S"}:
        raise ArgumentError("multiworld partition needs roles S1 and S2 and no plain S")
    model.check_covers(rho.space)
    sp = rho.space

    def idx(role):
        return sp.indices(model.parties_with([role]))

    s1, e1, s2, e2, e0 = idx("S1"), idx("E1"), idx("S2"), idx("E2"), idx("E0")

    names = {}
    for name, parts in (("S1", s1), ("E1", e1), ("S2", s2), ("E2", e2),
                        ("S1E1", s1 + e1), ("S2E2", s2 + e2), ("E1E2", e1 + e2),
                        ("E1S2E2", e1 + s2 + e2), ("S1E1E2", s1 + e1 + e2),
                        ("S1E1S2E2", s1 + e1 + s2 + e2)):
        if parts:
            names[f"S_{name}"] = entropy(rho, parts)

    def S(name):
        return names.get(f"S_{name}", 0.0)

    i_sys = S("S1E1") + S("S2E2") - S("S1E1S2E2")
    i_env = S("E1") + S("E2") - S("E1E2")
    # I(E1:S2|E2) and I(E2:S1|E1); an empty first argument makes the term vanish
    cmi_1 = S("E1E2") + S("S2E2") - S("E2") - S("E1S2E2") if e1 else 0.0
    cmi_2 = S("E1E2") + S("S1E1") - S("E1") - S("S1E1E2") if e2 else 0.0
    total = i_sys - i_env - cmi_1 - cmi_2

    terms = dict(zip(TERM_NAMES, (i_sys, i_env, cmi_1, cmi_2)))
    case4 = abs(cmi_1) <= ZERO_CMI and abs(cmi_2) <= ZERO_CMI
    flags = {
        "case1": not e1 and not e2 and bool(e0),
        "case2": bool(e1) != bool(e2),
        "case3": not e0,
        "case4": case4,
    }
    composites = {}
    if case4:
        composites["I_case4"] = i_sys - i_env
    if flags["case2"]:
        composites["I(S1:S2|E)"] = conditional_mutual_info(rho, s1, s2, e1 + e2)
    return MutualInfoReport(model.kind, names, total, terms, flags, composites)


def _apparatus_pair(overlap: complex) -> tuple[np.ndarray, np.ndarray]:
    r = np.array([1.0, 0.0], dtype=np.complex128)
    l = np.array([overlap, np.sqrt(max(0.0, 1.0 - abs(overlap) ** 2))], dtype=np.complex128)
    return r, l


def slit_state(overlap: complex) -> PureState:
    """Electron path (r, l) entangled with detector states whose inner product is ``overlap``."""
    overlap = complex(overlap)
    if not np.isfinite(overlap) or abs(overlap) > 1 + 1e-12:
        raise ArgumentError(f"|overlap| must be at most 1, got {abs(overlap)!r}")
    if abs(overlap) > 1:
        overlap /= abs(overlap)
    R, L = _apparatus_pair(overlap)
    r = np.array([1.0, 0.0])
    l = np.array([0.0, 1.0])
    v = (np.kron(r, R) + np.kron(l, L)) / np.sqrt(2)
    space = MultipartiteSpace((("electron", 2), ("apparatus", 2)))
    return PureState.normalized(space, v)


def slit_visibility(overlap: complex) -> float:
    """Fringe visibility ``2 |rho_rl|`` of the electron after the apparatus is traced out."""
    psi = slit_state(overlap)
    rho_e = linalg.reduced_from_vector(psi.amplitudes, psi.space.dims, [0])
    return float(2 * abs(rho_e[0, 1]))


def rabi_state(gt: float) -> PureState:
    """``cos(gt)|e, n-1> - i sin(gt)|g, n>`` with the field truncated to {n-1, n}."""
    gt = float(gt)
    space = MultipartiteSpace((("atom", 2), ("field", 2)))
    # atom basis (e, g), field basis (n-1, n)
    return PureState.normalized(space, [np.cos(gt), 0, 0, -1j * np.sin(gt)])


def rabi_entanglement(gt: float) -> float:
    return entropy(rabi_state(gt), ["atom"])
