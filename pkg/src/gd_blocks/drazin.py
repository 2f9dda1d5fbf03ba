"""Ground-truth Drazin inverses of square complex matrices.

Two independent oracles are provided:

* :func:`drazin_rankpinv` -- the classical rank/pseudoinverse formula
  ``a^d = a^k (a^(2k+1))^+ a^k`` with ``k = index(a)``;
* :func:`drazin_spectral` -- an ordered-Schur method that splits the spectrum
  into an invertible core and a nilpotent part, inverts the core and
  transforms back.

Both verify their output against the defining axioms and refuse to return
garbage.  For finite matrices "quasinilpotent" coincides with "nilpotent",
so the third axiom (``a - a^2 x`` quasinilpotent) is certified through the
n-th power of the spectral radius: computed eigenvalues of a defective
nilpotent matrix carry an eps**(1/p) noise floor (p = largest Jordan block),
while ``rho^n`` compares cleanly against exact-arithmetic zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import BorderlineInstance, GroupInverseError, NumericFailure, ShapeError
from .matrixcore import (
    DEFAULT_RANK_RTOL,
    _freeze,
    eye,
    fnorm,
    require_square,
    zeros,
)

#: Default relative tolerance for treating eigenvalues / singular values as zero.
DEFAULT_ZERO_RTOL = 1e-10

#: Oracle outputs with any GD-axiom residual above this are rejected.
AXIOM_FAIL_TOL = 1e-8

@dataclass(frozen=True)
class GdResiduals:
    """Residuals of the three defining axioms of a generalized Drazin inverse.

    commute        ``|a x - x a|_F`` relative to ``|a|_F |x|_F``
    inner          ``|x a x - x|_F`` relative to ``|x|_F``
    quasinil_radius  spectral radius of ``w = a - a^2 x`` taken to the n-th
                     power and normalised by ``max(1, |a|_F)^n``; zero in
                     exact arithmetic iff w is nilpotent
    quasinil_power   ``|w^n|_F / max(1, |w|_F)^n`` -- the norm certificate
    """

    commute: float
    inner: float
    quasinil_radius: float
    quasinil_power: float

    def max_residual(self) -> float:
        return max(self.commute, self.inner, self.quasinil_radius, self.quasinil_power)

    def all_below(self, tol: float) -> bool:
        return self.max_residual() <= tol


@dataclass(frozen=True)
class DrazinResult:
    """Drazin inverse plus the index and the spectral idempotent."""

    dinv: np.ndarray
    index: int
    pi: np.ndarray
    method: str
    residuals: GdResiduals


def gd_residuals(a, x) -> GdResiduals:
    """Evaluate the GD-inverse axioms for a candidate inverse *x* of *a*.

    The quasinilpotency residuals measure ``w = a - a^2 x`` against its own
    spectral norm (floored at ``1e-8 * max(1, |a|_2)`` so that a residual-level
    w counts as zero): any genuine eigenvalue of relative size ``tol**(1/n)``
    makes the radius residual exceed ``tol``, while the eps**(1/p) eigenvalue
    noise of an exactly nilpotent w stays far below every tolerance used here.
    """
    a = require_square(a)
    x = require_square(x)
    if a.shape != x.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {x.shape}")
    n = a.shape[0]
    na, nx = fnorm(a), fnorm(x)
    commute = fnorm(a @ x - x @ a) / max(1.0, na * nx)
    inner = fnorm(x @ a @ x - x) / max(1.0, nx)
    w = a - a @ a @ x
    norm_w = float(np.linalg.norm(w, 2))
    scale_w = max(norm_w, 1e-8 * max(1.0, float(np.linalg.norm(a, 2))))
    rho = float(np.max(np.abs(np.linalg.eigvals(w))))
    radius = (rho / scale_w) ** n
    wn = np.linalg.matrix_power(w, n)
    pw = fnorm(wn) / scale_w**n
    return GdResiduals(commute, inner, radius, pw)


class _PowerChain:
    """Successive powers of a matrix with cached singular values."""

    def __init__(self, a: np.ndarray, rank_rtol: float):
        self.a = a
        self.n = a.shape[0]
        self.rtol = rank_rtol
        self._powers = [np.eye(self.n, dtype=np.complex128)]
        self._svals = [np.ones(self.n)]

    def _extend(self, k: int) -> None:
        while len(self._powers) <= k:
            p = self.a @ self._powers[-1]
            self._powers.append(p)
            self._svals.append(np.linalg.svd(p, compute_uv=False))

    def matpow(self, k: int) -> np.ndarray:
        self._extend(k)
        return self._powers[k]

    def svals(self, k: int) -> np.ndarray:
        self._extend(k)
        return self._svals[k]

    def rank(self, k: int) -> int:
        s = self.svals(k)
        if s.size == 0 or s[0] == 0.0:
            return 0
        cutoff = self.rtol * float(s[0]) * self.n
        return int(np.count_nonzero(s > cutoff))


def _index_chain(a: np.ndarray, rank_rtol: float) -> tuple[int, int, _PowerChain]:
    """Return (index, core rank, chain).

    The core rank is the stabilised value of the rank sequence; for a fully
    nilpotent matrix whose deep powers are pure rounding junk the sequence
    is forced to zero once the available rank reaches the junk level.
    """
    chain = _PowerChain(a, rank_rtol)
    ranks = [chain.rank(0)]
    n = a.shape[0]
    collapsed = False
    for k in range(n + 1):
        cur = chain.rank(k + 1)
        if collapsed:
            cur = 0
        elif cur > ranks[-1]:
            # rank can never genuinely grow with the power: the whole matrix
            # power has collapsed into rounding noise, its true rank is zero
            collapsed = True
            cur = 0
        if cur == ranks[-1]:
            return k, cur, chain
        ranks.append(cur)
    return n, ranks[-1], chain  # rank chain of an n x n matrix stabilises by n


def index(a, rank_rtol: float = DEFAULT_RANK_RTOL) -> int:
    """Smallest k >= 0 with rank(a^k) = rank(a^(k+1)).

    0 for invertible matrices, 1 for the zero matrix, never exceeds the
    dimension.
    """
    a = require_square(a)
    if rank_rtol <= 0:
        raise ValueError("rank_rtol must be positive")
    k, _, _ = _index_chain(a, rank_rtol)
    return k


def drazin_rankpinv(a, rank_rtol: float = DEFAULT_RANK_RTOL) -> DrazinResult:
    """Drazin inverse by the rank/pseudoinverse formula (oracle #1).

    Evaluates ``a^d = a^k (a^(2k+1))^+ a^k`` with ``k = index(a)`` in its
    cancelled full-rank-factorization form: writing the rank-r SVD of a^k
    as ``U S V*``, the pseudoinverse sandwich collapses algebraically to
    ``a^d = U (V* a U)^(-1) V*``, which trades the huge (but benign)
    singular-value range of the high power for one small well-conditioned
    solve.  A few quadratic refinement steps polish the result.  The GD
    axioms are verified; :class:`NumericFailure` signals an instance too
    ill-conditioned to certify (callers should regenerate).
    """
    a = require_square(a)
    if rank_rtol <= 0:
        raise ValueError("rank_rtol must be positive")
    k, r, chain = _index_chain(a, rank_rtol)
    n = a.shape[0]
    if r == 0:
        return _finalize(a, np.zeros((n, n), dtype=np.complex128), k, "rank_pinv")
    ak = chain.matpow(k)
    u, _, vh = np.linalg.svd(ak)
    ur = u[:, :r]
    vr = vh[:r].conj().T

    def from_subspaces(uu: np.ndarray, vv: np.ndarray) -> np.ndarray:
        return uu @ np.linalg.solve(vv.conj().T @ a @ uu, vv.conj().T)

    # deep-index instances can have violently non-normal cores; one extra
    # re-orthonormalised pass over the invariant subspaces often gains a digit,
    # so keep whichever candidate certifies best
    candidates = [_newton_polish(a, from_subspaces(ur, vr))]
    try:
        u1 = np.linalg.qr(a @ ur)[0]
        v1 = np.linalg.qr(a.conj().T @ vr)[0]
        candidates.append(_newton_polish(a, from_subspaces(u1, v1)))
    except np.linalg.LinAlgError:
        pass
    x = min(candidates, key=lambda cand: gd_residuals(a, cand).max_residual())
    return _finalize(a, x, k, "rank_pinv")


def _newton_polish(a: np.ndarray, x: np.ndarray, steps: int = 10) -> np.ndarray:
    """Refine a Drazin-inverse candidate by the quadratic iteration x(2I - ax).

    Structure identification (core rank and subspaces) is the oracle's job;
    this iteration only restores digits lost to conditioning.  It contracts
    quadratically towards the Drazin inverse whenever the candidate has the
    right structure, so both oracles are pulled onto the same fixed point.
    Keeps the best iterate by commute/inner residual and stops when the
    score no longer improves.
    """
    n = a.shape[0]
    ident = np.eye(n, dtype=np.complex128)

    def score(cand: np.ndarray) -> float:
        na, nc = fnorm(a), fnorm(cand)
        com = fnorm(a @ cand - cand @ a) / max(1.0, na * nc)
        inn = fnorm(cand @ a @ cand - cand) / max(1.0, nc)
        return max(com, inn)

    best, best_score = x, score(x)
    cur = x
    for _ in range(steps):
        cur = cur @ (2.0 * ident - a @ cur)
        s = score(cur)
        if s >= best_score:
            break
        best, best_score = cur, s
    return best


def _finalize(a: np.ndarray, x: np.ndarray, k: int, method: str) -> DrazinResult:
    res = gd_residuals(a, x)
    if not res.all_below(AXIOM_FAIL_TOL):
        raise NumericFailure(
            f"Drazin oracle ({method}) failed the GD axioms: "
            f"max residual {res.max_residual():.3e} > {AXIOM_FAIL_TOL:g}"
        )
    pi = eye(a.shape[0]) - a @ x
    return DrazinResult(_freeze(np.array(x)), k, _freeze(np.array(pi)), method, res)


def drazin_spectral(a, zero_rtol: float = DEFAULT_ZERO_RTOL) -> DrazinResult:
    """Drazin inverse by Schur decomposition and spectral splitting (oracle #2).

    The dimension of the quasinilpotent part is fixed by the rank chain (the
    algebraic multiplicity of the zero cluster); eigenvalues are then split
    by magnitude into that cluster and the invertible core.  If the smallest
    core magnitude is within a factor 10 of the largest cluster magnitude
    the split is ambiguous and :class:`BorderlineInstance` is raised.
    """
    a = require_square(a)
    if zero_rtol <= 0:
        raise ValueError("zero_rtol must be positive")
    n = a.shape[0]
    if fnorm(a) == 0.0:
        return DrazinResult(zeros(n), 1, eye(n), "spectral", GdResiduals(0, 0, 0, 0))
    k, core, _ = _index_chain(a, zero_rtol)
    m0 = n - core
    if m0 == 0:
        x = np.linalg.solve(a, np.eye(n, dtype=np.complex128))
        return _finalize(a, x, 0, "spectral")
    if m0 == n:
        return _finalize(a, zeros(n), k, "spectral")

    mags = np.sort(np.abs(np.linalg.eigvals(a)))
    lo, hi = float(mags[m0 - 1]), float(mags[m0])
    if hi == 0.0 or (lo > 0.0 and hi / lo < 10.0):
        raise BorderlineInstance(
            f"eigenvalue clustering ambiguous: |lambda| gap {lo:.3e} .. {hi:.3e} "
            f"around a zero cluster of size {m0}"
        )
    theta = np.sqrt(lo * hi) if lo > 0.0 else hi / 100.0
    t, z, sdim = scipy.linalg.schur(a, output="complex", sort=lambda lam: abs(lam) > theta)
    if sdim != core:
        raise BorderlineInstance(
            f"Schur reordering selected {sdim} core eigenvalues, expected {core}"
        )
    t11, t12, t22 = t[:core, :core], t[:core, core:], t[core:, core:]
    # The Drazin inverse of (T11 T12; 0 T22) with invertible T11 and
    # quasinilpotent T22 is (T11^-1 X; 0 0) where the coupling block solves
    # the Sylvester equation T11 X - X T22 = T11^-1 T12.  The spectra are
    # separated by the cluster gap, so the solve is well conditioned.
    inv11 = scipy.linalg.solve_triangular(t11, np.eye(core, dtype=np.complex128))
    x12 = scipy.linalg.solve_sylvester(t11, -t22, inv11 @ t12)
    td = np.zeros((n, n), dtype=np.complex128)
    td[:core, :core] = inv11
    td[:core, core:] = x12
    x = _newton_polish(a, z @ td @ z.conj().T)
    return _finalize(a, x, k, "spectral")


def spectral_idempotent(a, rank_rtol: float = DEFAULT_RANK_RTOL) -> np.ndarray:
    """Projector ``I - a a^d`` onto the generalized nullspace along the core."""
    a = require_square(a)
    return drazin_rankpinv(a, rank_rtol).pi


def is_nilpotent(a, zero_rtol: float = DEFAULT_ZERO_RTOL) -> tuple[bool, int | None]:
    """Decide nilpotency and return the nilpotency index when it holds.

    The verdict is eigenvalue-based with the same n-th power normalisation as
    :class:`GdResiduals`: ``(rho(a)/max(1,|a|_F))^n <= zero_rtol``.  On a
    positive verdict the norm decay of the powers is checked as corroboration
    and the smallest k with ``a^k ~ 0`` is returned.
    """
    a = require_square(a)
    if zero_rtol <= 0:
        raise ValueError("zero_rtol must be positive")
    n = a.shape[0]
    na = fnorm(a)
    if na == 0.0:
        return True, 1
    rho = float(np.max(np.abs(np.linalg.eigvals(a))))
    if (rho / max(1.0, na)) ** n > zero_rtol:
        return False, None
    scale = max(1.0, na)
    p = np.eye(n, dtype=np.complex128)
    for k in range(1, n + 1):
        p = a @ p
        if fnorm(p) <= zero_rtol * scale**k:
            return True, k
    return False, None


def group_inverse(a, rank_rtol: float = DEFAULT_RANK_RTOL) -> np.ndarray:
    """Group inverse a^# (the Drazin inverse when ind(a) <= 1).

    Raises :class:`GroupInverseError` when the index exceeds one, since no
    group inverse exists then.
    """
    a = require_square(a)
    res = drazin_rankpinv(a, rank_rtol)
    if res.index > 1:
        raise GroupInverseError(f"group inverse requires index <= 1, got {res.index}")
    x = res.dinv
    extra = fnorm(a @ x @ a - a) / max(1.0, fnorm(a))
    if extra > 1e-10:
        raise NumericFailure(f"group-inverse identity a x a = a fails: {extra:.3e}")
    return x
