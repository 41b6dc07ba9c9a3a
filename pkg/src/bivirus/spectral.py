"""Spectral tools for Metzler and nonnegative matrices.

Everything here works on small dense matrices.  The Perron pair is obtained
by shifted power iteration so iterates stay strictly positive; dense
eigensolves are used for the abscissa/radius and as cross-checks.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import ConsistencyError, NumericalError, PreconditionError, ValidationError
from .netgraph import check_irreducible

__all__ = [
    "EPS_CRIT",
    "MetzlerMatrix",
    "PerronPair",
    "Threshold",
    "as_metzler",
    "diagonal_lyapunov",
    "negative_inverse_check",
    "perron_pair",
    "sign_pattern_violation",
    "spectral_abscissa",
    "spectral_radius",
    "threshold_trichotomy",
]

EPS_CRIT = 1e-9
POWER_TOL = 1e-12
POWER_MAX_ITER = 100_000


def _square(M, name="matrix"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValidationError(f"{name} has non-finite entries")
    return M


class MetzlerMatrix:
    """Square matrix with nonnegative off-diagonal entries.

    ``irreducible`` is cached from the off-diagonal pattern plus any positive
    diagonal (the diagonal never affects strong connectivity).
    """

    __slots__ = ("entries", "irreducible")

    def __init__(self, entries):
        M = _square(entries, "Metzler matrix")
        off = M - np.diag(np.diag(M))
        if np.any(off < 0):
            i, j = np.argwhere(off < 0)[0]
            raise ValidationError(f"not Metzler: entry ({i}, {j}) = {M[i, j]} < 0")
        M = M.copy()
        M.setflags(write=False)
        self.entries = M
        self.irreducible = check_irreducible(off + np.diag(np.clip(np.diag(M), 0, None)))

    @property
    def n(self):
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __repr__(self):
        return f"MetzlerMatrix({self.entries.tolist()!r})"


def as_metzler(M):
    return M if isinstance(M, MetzlerMatrix) else MetzlerMatrix(M)


@dataclass(frozen=True)
class PerronPair:
    value: float
    right: np.ndarray
    left: np.ndarray


class Threshold(str, enum.Enum):
    BELOW = "Below"
    CRITICAL = "Critical"
    ABOVE = "Above"


def _eigvals(M):
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed on matrix {M.tolist()}: {exc}") from exc


def spectral_abscissa(M):
    """Largest real part over the spectrum of ``M``."""
    M = _square(np.asarray(M, dtype=float))
    return float(np.max(_eigvals(M).real))


def spectral_radius(M):
    """Largest eigenvalue modulus of ``M``."""
    M = _square(np.asarray(M, dtype=float))
    return float(np.max(np.abs(_eigvals(M))))


def _power_iterate(P, tol, max_iter):
    n = P.shape[0]
    v = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        w = P @ v
        lam = w.sum()
        w /= lam
        if np.max(np.abs(w - v)) < tol:
            return lam, w
        v = w
    raise NumericalError(f"power iteration did not converge in {max_iter} iterations on {P.tolist()}")


def perron_pair(M, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """Dominant eigenvalue s(M) with l1-normalised positive right/left eigenvectors.

    Shifts by ``sigma = 1 + max|M_ii|`` so ``M + sigma*I`` is nonnegative with a
    positive diagonal (hence primitive), then power-iterates on it and its
    transpose.
    """
    M = as_metzler(M)
    if not M.irreducible:
        raise PreconditionError("perron_pair needs an irreducible Metzler matrix")
    A = M.entries
    n = A.shape[0]
    if n == 1:
        one = np.ones(1)
        return PerronPair(float(A[0, 0]), one, one.copy())
    sigma = 1.0 + np.max(np.abs(np.diag(A)))
    P = A + sigma * np.eye(n)
    lam_r, right = _power_iterate(P, tol, max_iter)
    lam_l, left = _power_iterate(P.T, tol, max_iter)
    if np.any(right <= 0) or np.any(left <= 0):
        raise NumericalError("Perron vectors lost strict positivity")
    return PerronPair(float(lam_r - sigma), right, left)


def threshold_trichotomy(Lam, N, eps_crit=EPS_CRIT):
    """Classify ``Lam + N`` as Below / Critical / Above the stability threshold.

    ``Lam`` is a strictly negative diagonal (matrix or vector of its entries),
    ``N`` irreducible nonnegative.  The verdict comes from the sign of
    ``s(Lam + N)`` and is cross-checked against ``rho(-Lam^{-1} N) - 1``.
    """
    Lam = np.asarray(Lam, dtype=float)
    lam = np.diag(Lam) if Lam.ndim == 2 else Lam
    if Lam.ndim == 2 and np.any(Lam - np.diag(lam)):
        raise PreconditionError("Lambda must be diagonal")
    if np.any(lam >= 0):
        raise PreconditionError(f"Lambda must have strictly negative diagonal, got {lam.tolist()}")
    N = _square(N, "N")
    if N.shape[0] != lam.size:
        raise ValidationError("Lambda and N differ in dimension")
    if np.any(N < 0) or not check_irreducible(N):
        raise PreconditionError("N must be irreducible nonnegative")

    s = spectral_abscissa(np.diag(lam) + N)
    gap = spectral_radius(-N / lam[:, None]) - 1.0
    if abs(s) > eps_crit and abs(gap) > eps_crit and np.sign(s) != np.sign(gap):
        raise ConsistencyError(f"s(Lambda+N) = {s:.3e} but rho(-Lambda^-1 N) - 1 = {gap:.3e}")
    if s < -eps_crit:
        return Threshold.BELOW
    if s > eps_crit:
        return Threshold.ABOVE
    return Threshold.CRITICAL


def diagonal_lyapunov(M, eps_crit=EPS_CRIT):
    """Positive diagonal P with ``M'P + PM`` negative (semi)definite.

    Built as ``diag(left_i / right_i)`` from the Perron pair and accepted only
    after a symmetric eigensolve confirms definiteness: strict when s(M) < 0,
    semidefinite with a simple zero eigenvalue when s(M) is critical.
    """
    M = as_metzler(M)
    pair = perron_pair(M)
    if pair.value > eps_crit:
        raise PreconditionError(f"s(M) = {pair.value:.3e} > 0; no diagonal Lyapunov certificate")
    P = np.diag(pair.left / pair.right)
    A = M.entries
    Q = A.T @ P + P @ A
    ev = np.linalg.eigvalsh(Q)
    tol = 1e-9 * max(1.0, np.max(np.abs(Q)))
    if pair.value < -eps_crit:
        ok = ev[-1] < 0
    else:
        ok = abs(ev[-1]) <= tol and (ev.size == 1 or ev[-2] < -tol)
    if not ok:
        raise NumericalError(f"Perron-quotient P failed verification: eigenvalues {ev.tolist()}")
    return P


def sign_pattern_violation(M, x):
    """Index i with ``x_i == 0`` and ``(M x)_i > 0``.

    For irreducible nonnegative M and nonzero x >= 0 with a zero entry such an
    index always exists; not finding one raises ConsistencyError.
    """
    M = _square(M)
    x = np.asarray(x, dtype=float)
    if np.any(M < 0) or not check_irreducible(M):
        raise PreconditionError("M must be irreducible nonnegative")
    if x.shape != (M.shape[0],) or np.any(x < 0) or not np.any(x > 0) or np.all(x > 0):
        raise PreconditionError("x must be nonnegative, nonzero, and have a zero entry")
    y = M @ x
    hits = np.flatnonzero((x == 0) & (y > 0))
    if hits.size == 0:
        raise ConsistencyError(f"no sign-pattern violation for M={M.tolist()}, x={x.tolist()}")
    return int(hits[0])


def negative_inverse_check(M, eps_crit=EPS_CRIT):
    """Inverse of an irreducible Hurwitz Metzler matrix, checked to be entrywise negative."""
    M = as_metzler(M)
    if not M.irreducible:
        raise PreconditionError("M must be irreducible")
    s = spectral_abscissa(M.entries)
    if s >= -eps_crit:
        raise PreconditionError(f"M is not Hurwitz (s(M) = {s:.3e})")
    try:
        inv = np.linalg.inv(M.entries)
    except np.linalg.LinAlgError as exc:
        raise PreconditionError(f"M is singular: {exc}") from exc
    if np.any(inv >= 0):
        raise ConsistencyError(f"inverse of Hurwitz Metzler matrix has a nonnegative entry: {inv.tolist()}")
    return inv
