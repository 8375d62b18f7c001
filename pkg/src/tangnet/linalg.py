"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` ``complex128`` arrays. Functions here never
mutate their inputs and never touch global random state.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, ContractViolation, ShapeError, SizeLimitError

DEFAULT_MAX_DIM = 4096
HERMITIAN_RTOL = 1e-10
_NONZERO = 1e-10


def max_dim() -> int:
    """Global cap on total Hilbert-space dimension (``TANGNET_MAX_DIM`` overrides)."""
    raw = os.environ.get("TANGNET_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError:
        raise ArgumentError(f"TANGNET_MAX_DIM must be an integer, got {raw!r}") from None
    if value < 1:
        raise ArgumentError("TANGNET_MAX_DIM must be positive")
    return value


def check_dim(total: int) -> None:
    cap = max_dim()
    if total > cap:
        raise SizeLimitError(f"total dimension {total} exceeds cap {cap}")


def as_cmatrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex128 array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ArgumentError(f"{name} has non-finite entries")
    return arr


def frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def kron(a, b) -> np.ndarray:
    """Kronecker product, entry ``[i*rb + k, j*cb + l] = a[i, j] * b[k, l]``."""
    a = as_cmatrix(a, "a")
    b = as_cmatrix(b, "b")
    check_dim(max(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]))
    return np.kron(a, b)


def _normalize_keep(keep: Iterable[int], n: int) -> list[int]:
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ArgumentError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise ArgumentError(f"keep indices {keep} out of range for {n} parties")
    return keep


def partial_trace(rho, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every party not listed in ``keep``.

    Parties in the result appear in ascending index order.
    """
    rho = as_cmatrix(rho, "rho")
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise ShapeError(f"invalid party dimensions {dims}")
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ShapeError(f"rho has shape {rho.shape}, dims {dims} require ({total}, {total})")
    n = len(dims)
    keep = _normalize_keep(keep, n)
    traced = [k for k in range(n) if k not in keep]
    dk = int(np.prod([dims[k] for k in keep]))
    dt = int(np.prod([dims[k] for k in traced])) if traced else 1
    t = rho.reshape(dims + dims)
    perm = keep + traced + [n + k for k in keep] + [n + k for k in traced]
    t = t.transpose(perm).reshape(dk, dt, dk, dt)
    return np.trace(t, axis1=1, axis2=3)


def reduced_from_vector(psi: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduced density matrix of a pure state without forming ``|psi><psi|``."""
    n = len(dims)
    keep = _normalize_keep(keep, n)
    traced = [k for k in range(n) if k not in keep]
    dk = int(np.prod([dims[k] for k in keep]))
    m = np.asarray(psi, dtype=np.complex128).reshape(dims).transpose(keep + traced).reshape(dk, -1)
    return m @ m.conj().T


def is_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(a))))
    return float(np.max(np.abs(a - a.conj().T))) <= rtol * scale


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate a vector so its first non-negligible component is real-positive."""
    idx = np.flatnonzero(np.abs(v) > _NONZERO)
    if idx.size == 0:
        return v
    c = v[idx[0]]
    return v * (abs(c) / c)


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues in descending order with matching unit eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eig_hermitian(a) -> EigenSystem:
    """Deterministic Hermitian eigendecomposition.

    Eigenvalues are sorted descending; ties keep the LAPACK order. Each
    eigenvector is phase-fixed so its first nonzero entry is real-positive.
    """
    a = as_cmatrix(a, "a")
    if not is_hermitian(a):
        raise ContractViolation("eig_hermitian requires a Hermitian matrix")
    a = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(a)
    order = np.lexsort((np.arange(w.size), -np.round(w, 12)))
    w = w[order]
    v = v[:, order]
    v = np.column_stack([fix_phase(v[:, k]) for k in range(v.shape[1])])
    return EigenSystem(frozen(w), frozen(v))


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator (Philox) keyed by ``seed``; generators pass through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


def haar_random_vector(dim: int, seed) -> np.ndarray:
    check_dim(dim)
    rng = make_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def haar_random_unitary(dim: int, seed) -> np.ndarray:
    """Haar unitary via QR of a complex Ginibre matrix with the R-diagonal phase fix."""
    check_dim(dim)
    rng = make_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_random_state(dims: Sequence[int], seed):
    """Haar-random :class:`~tangnet.states.PureState` on parties named ``q0, q1, ...``."""
    from .states import MultipartiteSpace, PureState

    space = MultipartiteSpace.of(*dims)
    return PureState(space, haar_random_vector(space.dim, seed))


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]))) <= tol
