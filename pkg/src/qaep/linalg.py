"""
Dense complex matrix kernel: Kronecker products, partial traces and a
cyclic complex Jacobi eigensolver for Hermitian matrices.

Matrices are plain ``numpy`` complex arrays. ``DensityOperator`` wraps a
validated, read-only array.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import CapacityError, ContractError, NumericalError, StructuralError

# Largest dense dimension any routine will build (12 qubits).
MAX_DIM = 4096

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
NEGATIVE_TOL = 1e-10

JACOBI_MAX_SWEEPS = 100
JACOBI_OFF_TOL = 1e-12


def _max_dim(max_dim: Optional[int]) -> int:
    return MAX_DIM if max_dim is None else int(max_dim)


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite 2-D complex array."""
    if isinstance(m, DensityOperator):
        return m.matrix
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise StructuralError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractError("matrix has non-finite entries")
    return a


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix.

    Construction validates the invariants (unless ``check=False`` is passed by
    a caller that built the matrix from a known-valid structure). The stored
    array is read-only.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix, check: bool = True):
        a = np.array(as_matrix(matrix), dtype=complex, copy=True)
        if a.shape[0] != a.shape[1]:
            raise StructuralError(f"density operator must be square, got {a.shape}")
        if check:
            _validate_density(a)
        a.setflags(write=False)
        self.matrix = a

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"DensityOperator(dim={self.dim})"

    @classmethod
    def pure(cls, vector) -> "DensityOperator":
        v = np.asarray(vector, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim, dtype=complex) / dim, check=False)

    @classmethod
    def diagonal(cls, probs) -> "DensityOperator":
        return cls(np.diag(np.asarray(probs, dtype=float)).astype(complex))


def _validate_density(a: np.ndarray) -> None:
    herm = np.max(np.abs(a - a.conj().T), initial=0.0)
    if herm > HERMITIAN_TOL:
        raise ContractError(f"density operator is not Hermitian (deviation {herm:.3e})")
    tr = np.trace(a).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ContractError(f"density operator trace is {tr!r}, expected 1")
    # all eigenvalues >= -tol  <=>  a + tol*I admits a Cholesky factor
    try:
        np.linalg.cholesky(a + NEGATIVE_TOL * np.eye(a.shape[0]))
    except np.linalg.LinAlgError:
        raise ContractError("density operator is not positive semidefinite") from None


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted in descending order with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __len__(self):
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def kron(a, b, max_dim: Optional[int] = None):
    """Kronecker product ``a ⊗ b``.

    Two density operators give a density operator; anything else gives a
    plain complex array.
    """
    ma, mb = as_matrix(a), as_matrix(b)
    limit = _max_dim(max_dim)
    rows, cols = ma.shape[0] * mb.shape[0], ma.shape[1] * mb.shape[1]
    if max(rows, cols) > limit:
        raise CapacityError(
            f"Kronecker product of size {rows}x{cols} exceeds the maximum dimension {limit}"
        )
    out = np.kron(ma, mb)
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(out, check=False)
    return out


def kron_power(a, n: int, max_dim: Optional[int] = None):
    """``a ⊗ a ⊗ ... ⊗ a`` with ``n`` factors (``n >= 1``)."""
    if n < 1:
        raise StructuralError("Kronecker power needs at least one factor")
    d = as_matrix(a).shape[0]
    limit = _max_dim(max_dim)
    if d**n > limit:
        raise CapacityError(f"dimension d^n = {d}^{n} = {d**n} exceeds the maximum dimension {limit}")
    out = a
    for _ in range(n - 1):
        out = kron(out, a, max_dim=limit)
    return out


def partial_trace(
    rho, site_dims: Sequence[int], keep: Sequence[int]
) -> DensityOperator:
    """Reduced density operator on the sites in ``keep`` (returned in ascending site order)."""
    m = as_matrix(rho)
    dims = [int(d) for d in site_dims]
    if any(d < 1 for d in dims):
        raise StructuralError(f"site dimensions must be positive, got {dims}")
    total = int(np.prod(dims)) if dims else 1
    if m.shape != (total, total):
        raise StructuralError(
            f"site dimensions {dims} (product {total}) do not match matrix shape {m.shape}"
        )
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise StructuralError(f"keep indices {keep} out of range for {len(dims)} sites")

    nsites = len(dims)
    tensor = m.reshape(dims + dims)
    row_idx = list(range(nsites))
    col_idx = [i + nsites if i in keep else i for i in range(nsites)]
    out_idx = keep + [k + nsites for k in keep]
    reduced = np.einsum(tensor, row_idx + col_idx, out_idx)
    kd = int(np.prod([dims[k] for k in keep])) if keep else 1
    return DensityOperator(reduced.reshape(kd, kd), check=False)


def _round_robin(n: int):
    """Rounds of disjoint index pairs covering every pair exactly once per sweep."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def hermitian_eig(m, tol: float = HERMITIAN_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the rotations of one round act on disjoint index pairs and can be
    applied together. Iteration stops when the off-diagonal Frobenius norm
    drops below ``JACOBI_OFF_TOL`` (relative to the matrix norm for matrices
    with norm above one).

    Raises
    ------
    ContractError
        If ``m`` is not square or not Hermitian within ``tol``.
    NumericalError
        If the sweep cap is reached; ``residual`` carries the final off-norm.
    """
    a = np.array(as_matrix(m), dtype=complex, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ContractError(f"eigendecomposition needs a square matrix, got {a.shape}")
    if not is_hermitian(a, tol):
        dev = np.max(np.abs(a - a.conj().T))
        raise ContractError(f"matrix is not Hermitian within {tol:g} (deviation {dev:.3e})")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)

    threshold = JACOBI_OFF_TOL * max(1.0, float(np.linalg.norm(a)))
    rounds = _round_robin(n)
    off = _off_norm(a)
    sweeps = 0
    while off > threshold:
        if sweeps >= JACOBI_MAX_SWEEPS:
            raise NumericalError(
                f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps "
                f"(off-diagonal norm {off:.3e})",
                residual=off,
            )
        for p, q in rounds:
            _rotate(a, v, p, q)
        off = _off_norm(a)
        sweeps += 1

    w = np.real(np.diag(a)).copy()
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


def _rotate(a: np.ndarray, v: np.ndarray, p: np.ndarray, q: np.ndarray) -> None:
    apq = a[p, q]
    absb = np.abs(apq)
    active = absb > 1e-300
    if not np.any(active):
        return
    p, q, apq, absb = p[active], q[active], apq[active], absb[active]
    app = a[p, p].real
    aqq = a[q, q].real
    phase = apq / absb  # e^{i phi}
    theta = (aqq - app) / (2.0 * absb)
    t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    # V = diag(1, e^{-i phi}) @ [[c, s], [-s, c]]
    v11, v12 = c, s
    v21, v22 = -s * phase.conj(), c * phase.conj()

    ap, aq = a[:, p], a[:, q]
    a[:, p], a[:, q] = ap * v11 + aq * v21, ap * v12 + aq * v22
    rp, rq = a[p, :], a[q, :]
    a[p, :] = v11[:, None] * rp + v21.conj()[:, None] * rq
    a[q, :] = v12[:, None] * rp + v22.conj()[:, None] * rq
    a[p, q] = 0.0
    a[q, p] = 0.0
    vp, vq = v[:, p], v[:, q]
    v[:, p], v[:, q] = vp * v11 + vq * v21, vp * v12 + vq * v22


def clip_spectrum(eigenvalues) -> np.ndarray:
    """Clip roundoff negatives to zero and renormalize to unit sum.

    Values below ``-NEGATIVE_TOL`` mean the matrix was not a state and raise.
    """
    w = np.asarray(eigenvalues, dtype=float)
    if w.size and w.min() < -NEGATIVE_TOL:
        raise ContractError(f"eigenvalue {w.min():.3e} is below -{NEGATIVE_TOL:g}")
    w = np.clip(w, 0.0, 1.0)
    total = w.sum()
    if total <= 0:
        raise ContractError("spectrum has zero total weight")
    return w / total


def density_eig(rho: Union[DensityOperator, np.ndarray]) -> EigenDecomposition:
    """``hermitian_eig`` followed by the density-operator clipping rule."""
    e = hermitian_eig(as_matrix(rho))
    return EigenDecomposition(clip_spectrum(e.eigenvalues), e.eigenvectors)


def is_orthonormal(basis, tol: float = 1e-10) -> bool:
    b = as_matrix(basis)
    if b.shape[0] != b.shape[1]:
        return False
    return bool(np.max(np.abs(b.conj().T @ b - np.eye(b.shape[1]))) <= tol)


def kron_columns(site_basis: np.ndarray, words: np.ndarray, n: int) -> np.ndarray:
    """Columns ``W[:, a_1] ⊗ ... ⊗ W[:, a_n]`` for each word index (base-d digits, site 1 first)."""
    w = np.asarray(site_basis, dtype=complex)
    d = w.shape[0]
    words = np.asarray(words, dtype=np.int64)
    digits = [(words // d ** (n - 1 - j)) % d for j in range(n)]
    out = np.ones((1, len(words)), dtype=complex)
    for dig in digits:
        out = (out[:, None, :] * w[:, dig][None, :, :]).reshape(out.shape[0] * d, len(words))
    return out


__all__ = [
    "MAX_DIM", "DensityOperator", "EigenDecomposition",
    "kron", "kron_power", "partial_trace", "hermitian_eig", "density_eig",
    "clip_spectrum", "is_hermitian", "is_orthonormal", "kron_columns", "as_matrix",
]
