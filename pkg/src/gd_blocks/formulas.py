"""Closed-form block representations of the Drazin inverse.

Every function evaluates one closed-form representation, gated by its
algebraic hypotheses (violations raise :class:`HypothesisViolation`, the
formulas are meaningless outside them).  All series carry a killing factor
such as ``a^pi a^i`` or ``F^(i+1) F^pi`` that vanishes exactly once the
exponent reaches the relevant index, so in finite dimension every sum is
truncated at a bound derived from that factor -- the truncation is exact,
not approximate.  Each result ships a :class:`FormulaTrace` holding the
named intermediates and the bounds used; ``extra_terms`` widens every bound
(the extra terms are exact zeros, which is itself a testable property).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import HypothesisViolation, NumericFailure, ShapeError
from .drazin import DrazinResult, drazin_rankpinv, gd_residuals, index, is_nilpotent
from .hypotheses import (
    DEFAULT_HYPOTHESIS_TOL,
    HypothesisReport,
    check_lemma,
    check_m22,
    check_m22_cor,
    check_n220_a,
    check_n220_b,
)
from .matrixcore import (
    Block2x2,
    _freeze,
    as_matrix,
    block_compose,
    block_swap_top,
    fnorm,
    rel_residual,
    require_square,
)


@dataclass
class FormulaTrace:
    """Named intermediates of a block formula plus the series bounds used."""

    values: dict[str, np.ndarray] = field(default_factory=dict)
    bounds: dict[str, int] = field(default_factory=dict)

    def store(self, name: str, value: np.ndarray) -> None:
        self.values[name] = _freeze(np.ascontiguousarray(value))

    def bound(self, name: str, value: int) -> None:
        self.bounds[name] = int(value)


@dataclass(frozen=True)
class FormulaOutput:
    result: np.ndarray
    trace: FormulaTrace


def series_truncation_bound(a) -> int:
    """Number of terms after which any series with an ``a^pi a^i`` factor dies.

    Equals the index of *a*: the factor ``a^pi a^i = (a a^pi)^i a^pi`` is a
    power of the nilpotent part, exactly zero for ``i >= ind(a)``.
    """
    return index(require_square(a))


class _Op:
    """Cached powers, Drazin inverse and spectral idempotent of one operand."""

    def __init__(self, a: np.ndarray):
        self.a = a
        self.n = a.shape[0]
        self.res: DrazinResult = drazin_rankpinv(a)
        self.d = np.asarray(self.res.dinv)
        self.pi = np.asarray(self.res.pi)
        self.ind = self.res.index
        self.e = a @ self.d
        self._pows = [np.eye(self.n, dtype=np.complex128), np.asarray(a)]
        self._dpows = [np.eye(self.n, dtype=np.complex128), self.d]

    def pow(self, k: int) -> np.ndarray:
        while len(self._pows) <= k:
            self._pows.append(self._pows[-1] @ self.a)
        return self._pows[k]

    def dpow(self, k: int) -> np.ndarray:
        while len(self._dpows) <= k:
            self._dpows.append(self._dpows[-1] @ self.d)
        return self._dpows[k]

    def pipow(self, k: int) -> np.ndarray:
        """The killing factor a^pi a^k (zero for k >= ind(a) exactly)."""
        return self.pi @ self.pow(k)


def _gate(report: HypothesisReport) -> HypothesisReport:
    if not report.overall:
        failed = ", ".join(
            f"{c.name} = {c.residual:.3e}" for c in report.conditions if not c.passed
        )
        raise HypothesisViolation(
            f"hypotheses of {report.theorem} violated at tol {report.tolerance:g}: {failed}"
        )
    return report


def _ceil_half(k: int) -> int:
    return (k + 1) // 2


def triangular_drazin(a, b, d, orientation: str = "upper", *, extra_terms: int = 0) -> FormulaOutput:
    """Drazin inverse of a block-triangular matrix (a b; 0 d) or (d 0; b a).

    The coupling block is
    ``X = sum a^pi a^i b d^d(i+2) + sum a^d(i+2) b d^i d^pi - a^d b d^d``
    with the sums truncated at ind(a) and ind(d) respectively.
    """
    if orientation not in ("upper", "lower"):
        raise ValueError("orientation must be 'upper' or 'lower'")
    a = require_square(a)
    d = require_square(d)
    b = as_matrix(b)
    m, n = a.shape[0], d.shape[0]
    if b.shape != (m, n):
        raise ShapeError(f"b must be {m}x{n}, got {b.shape}")
    ra, rd = _Op(a), _Op(d)
    x = _coupling_block(ra, b, rd, extra_terms)
    trace = FormulaTrace()
    trace.store("X", x)
    trace.bound("a_series", ra.ind + extra_terms)
    trace.bound("d_series", rd.ind + extra_terms)
    zmn = np.zeros((n, m), dtype=np.complex128)
    if orientation == "upper":
        result = np.block([[ra.d, x], [zmn, rd.d]])
    else:
        result = np.block([[rd.d, zmn], [x, ra.d]])
    return FormulaOutput(_freeze(result), trace)


def _coupling_block(ra: _Op, b: np.ndarray, rd: _Op, extra: int) -> np.ndarray:
    m, n = ra.n, rd.n
    x = np.zeros((m, n), dtype=np.complex128)
    for i in range(ra.ind + extra):
        x += ra.pipow(i) @ b @ rd.dpow(i + 2)
    for i in range(rd.ind + extra):
        x += ra.dpow(i + 2) @ b @ rd.pow(i) @ rd.pi
    x -= ra.d @ b @ rd.d
    return x


def corner_drazin(a, e, *, hypothesis_tol: float = DEFAULT_HYPOTHESIS_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Drazin inverses of the corner products: (ea)^d = e a^d, (a(1-e))^d = a^d (1-e).

    Requires e idempotent and e a (1-e) = 0.  Both outputs are verified
    against the GD axioms for their products before being returned.
    """
    a = require_square(a)
    e = require_square(e)
    if a.shape != e.shape:
        raise ShapeError("a and e must have equal shape")
    _gate(check_lemma("corner", [a, e], hypothesis_tol))
    ad = np.asarray(drazin_rankpinv(a).dinv)
    ident = np.eye(a.shape[0], dtype=np.complex128)
    left = e @ ad
    right = ad @ (ident - e)
    for prod, cand in ((e @ a, left), (a @ (ident - e), right)):
        res = gd_residuals(prod, cand)
        if not res.all_below(1e-8):
            raise NumericFailure(
                f"corner formula output fails GD axioms: {res.max_residual():.3e}"
            )
    return _freeze(left), _freeze(right)


def cline_drazin(a, b) -> np.ndarray:
    """Drazin inverse of b a from the one of a b: (ba)^d = b ((ab)^d)^2 a."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0] or a.shape[0] != b.shape[1]:
        raise ShapeError(f"need a: m x n and b: n x m, got {a.shape} and {b.shape}")
    ab = a @ b
    dd = np.asarray(drazin_rankpinv(ab).dinv)
    return _freeze(b @ dd @ dd @ a)


def pierce_blocks(a, e, *, hypothesis_tol: float = DEFAULT_HYPOTHESIS_TOL) -> Block2x2:
    """Pierce corners (eae, ea(1-e), (1-e)ae, (1-e)a(1-e)) as full-size matrices."""
    a = require_square(a)
    e = require_square(e)
    if a.shape != e.shape:
        raise ShapeError("a and e must have equal shape")
    if rel_residual(e @ e - e, e, e) > hypothesis_tol:
        raise HypothesisViolation("e is not idempotent")
    ident = np.eye(a.shape[0], dtype=np.complex128)
    f = ident - e
    return Block2x2(
        _freeze(e @ a @ e), _freeze(e @ a @ f), _freeze(f @ a @ e), _freeze(f @ a @ f)
    )


def pierce_reassemble(b: Block2x2, e, *, hypothesis_tol: float = DEFAULT_HYPOTHESIS_TOL) -> np.ndarray:
    """Collapse a Pierce block matrix back to the algebra element: a11+a12+a21+a22."""
    e = require_square(e)
    if rel_residual(e @ e - e, e, e) > hypothesis_tol:
        raise HypothesisViolation("e is not idempotent")
    blocks = [as_matrix(x) for x in b]
    shape = blocks[0].shape
    if any(x.shape != shape for x in blocks):
        raise ShapeError("pierce blocks must all be full-size (n x n)")
    return _freeze(blocks[0] + blocks[1] + blocks[2] + blocks[3])


def guo_337_drazin(a, b, c, d, *, hypothesis_tol: float = DEFAULT_HYPOTHESIS_TOL,
                   extra_terms: int = 0) -> FormulaOutput:
    """Drazin inverse of (a b; c d) when a b c = 0, b d = 0 and b c is nilpotent.

    The two series over ``(cb + d^2)^i`` are evaluated in their combined,
    cancellation-free form: under the hypotheses ``(cb)(d^2) = 0`` and
    ``b d^d = 0``, expanding the powers and pairing terms exposes an explicit
    ``d^pi d^(2(i-q))`` killing factor in every term, so the sum truncates
    exactly instead of subtracting two geometrically growing tails.
    """
    a = require_square(a)
    d = require_square(d)
    b = as_matrix(b)
    c = as_matrix(c)
    m, n = a.shape[0], d.shape[0]
    if b.shape != (m, n) or c.shape != (n, m):
        raise ShapeError(f"need b {m}x{n} and c {n}x{m}, got {b.shape}, {c.shape}")
    _gate(check_lemma("guo337", [a, b, c, d], hypothesis_tol))
    ra, rd = _Op(a), _Op(d)
    j_bc = is_nilpotent(b @ c)[1] or m
    j_cb = is_nilpotent(c @ b)[1] or n
    phi1, psi1, tau, trace = _coupled_corner_blocks(ra, rd, b, c, j_bc, j_cb, extra_terms)
    result = np.block([[phi1 @ a, phi1 @ b], [tau @ a + psi1, rd.d + tau @ b]])
    trace.store("phi_1", phi1)
    trace.store("psi_1", psi1)
    trace.store("tau", tau)
    return FormulaOutput(_freeze(result), trace)


def _coupled_corner_blocks(ra, rd, b: np.ndarray, c: np.ndarray, j_bc: int, j_cb: int,
                           extra: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, FormulaTrace]:
    """Evaluate phi_1, psi_1 and tau of the coupled-corner representation.

    *ra* and *rd* provide the diagonal operands' powers and Drazin data (any
    object with the :class:`_Op` interface); j_bc / j_cb are the nilpotency
    indices of bc and cb.
    """
    m, n = ra.n, rd.n
    bc = b @ c
    cb = c @ b
    cb_pows = [np.eye(n, dtype=np.complex128)]
    bc_pows = [np.eye(m, dtype=np.complex128)]
    for _ in range(j_cb + extra + 2):
        cb_pows.append(cb_pows[-1] @ cb)
    for _ in range(j_bc + extra + 2):
        bc_pows.append(bc_pows[-1] @ bc)

    def phi(nn: int) -> np.ndarray:
        out = np.zeros((m, m), dtype=np.complex128)
        for j in range(j_bc + extra):
            out += bc_pows[j] @ ra.dpow(2 * j + 2 * nn)
        return out

    def psi(nn: int) -> np.ndarray:
        out = np.zeros((n, m), dtype=np.complex128)
        for j in range(j_cb + extra):
            out += rd.dpow(2 * j + 2 * nn) @ cb_pows[j] @ c
        return out

    kd, ka = rd.ind, ra.ind
    b1 = j_cb + _ceil_half(kd) + extra
    tau = np.zeros((n, m), dtype=np.complex128)
    # combined (cb + d^2)^i series: sum_i sum_q d^pi d^2(i-q) (cb)^q c a^d(2i+3)
    for i in range(b1):
        acc = np.zeros((n, m), dtype=np.complex128)
        for q in range(min(i, j_cb + extra - 1) + 1):
            if 2 * (i - q) >= kd + extra:
                continue
            acc += rd.pi @ rd.pow(2 * (i - q)) @ cb_pows[q] @ c
        tau += acc @ ra.dpow(2 * i + 3)
    # leftover of the e_d-collapsed pairing: -sum_{j>i} e_d d^d(2(j-i)) (cb)^j c a^d(2i+3)
    for i in range(j_cb + extra):
        for j in range(i + 1, j_cb + extra):
            tau -= rd.e @ rd.dpow(2 * (j - i)) @ cb_pows[j] @ c @ ra.dpow(2 * i + 3)
    # sum d^pi d^(2i+1) c phi_(i+2): alive while 2i+1 < ind(d)
    for i in range(kd // 2 + extra):
        tau += rd.pi @ rd.pow(2 * i + 1) @ c @ phi(i + 2)
    # sum psi_(i+2) a^(2i+1) a^pi: alive while 2i+1 < ind(a)
    for i in range(ka // 2 + extra):
        tau += psi(i + 2) @ ra.pow(2 * i + 1) @ ra.pi
    # sum d^d(2i+3) c (a^2 + bc)^i a^pi, expanded as (bc)^q a^(2(i-q)) a^pi
    b5 = j_bc + _ceil_half(ka) + extra
    for i in range(b5):
        acc = np.zeros((m, m), dtype=np.complex128)
        for q in range(min(i, j_bc + extra - 1) + 1):
            if 2 * (i - q) >= ka + extra:
                continue
            acc += bc_pows[q] @ ra.pow(2 * (i - q)) @ ra.pi
        tau += rd.dpow(2 * i + 3) @ c @ acc
    # - sum d^d(2i+1) c (bc)^i phi_1
    phi1 = phi(1)
    psi1 = psi(1)
    for i in range(j_bc + extra):
        tau -= rd.dpow(2 * i + 1) @ c @ bc_pows[i] @ phi1
    tau -= psi1 @ ra.d

    trace = FormulaTrace()
    trace.bound("bc_nilindex", j_bc + extra)
    trace.bound("cb_nilindex", j_cb + extra)
    trace.bound("tau_combined", b1)
    trace.bound("tau_core_series", b5)
    return phi1, psi1, tau, trace


def guo_322_drazin(a, b, c, d, *, hypothesis_tol: float = DEFAULT_HYPOTHESIS_TOL,
                   extra_terms: int = 0) -> FormulaOutput:
    """Drazin inverse of (a b; c d) when c a^d = 0 and c a^i b = 0 for all i >= 0.

    Under the hypotheses ``c a^i = c (a a^pi)^i``, so the coupling series in
    powers of a truncate at ind(a); the double series are cut at
    (ind(a), ind(d)) per their own killing factors.
    """
    a = require_square(a)
    d = require_square(d)
    b = as_matrix(b)
    c = as_matrix(c)
    m, n = a.shape[0], d.shape[0]
    if b.shape != (m, n) or c.shape != (n, m):
        raise ShapeError(f"need b {m}x{n} and c {n}x{m}, got {b.shape}, {c.shape}")
    _gate(check_lemma("guo322", [a, b, c, d], hypothesis_tol))
    ra, rd = _Op(a), _Op(d)
    ka, kd = ra.ind, rd.ind

    psi = np.zeros((n, m), dtype=np.complex128)
    for i in range(ka + extra_terms):
        psi += rd.dpow(i + 2) @ c @ ra.pow(i)

    phi = _coupling_block(ra, b, rd, extra_terms)

    varphi = np.zeros((m, m), dtype=np.complex128)
    for i in range(ka + extra_terms):
        lead = ra.pipow(i) @ b
        for j in range(ka + extra_terms):
            varphi += lead @ rd.dpow(i + j + 3) @ c @ ra.pow(j)
    for i in range(kd + extra_terms):
        lead = ra.dpow(i + 1) @ b @ rd.pow(i)
        for j in range(ka + extra_terms):
            varphi -= lead @ rd.dpow(j + 2) @ c @ ra.pow(j)
    for i in range(ka + extra_terms):
        lead = ra.dpow(i + 3) @ b
        for j in range(i + 1):
            varphi += lead @ rd.pow(j) @ c @ ra.pow(i - j)

    result = np.block([[ra.d + varphi, phi], [psi, rd.d]])
    trace = FormulaTrace()
    trace.store("psi", psi)
    trace.store("phi", phi)
    trace.store("varphi", varphi)
    trace.bound("a_series", ka + extra_terms)
    trace.bound("d_series", kd + extra_terms)
    return FormulaOutput(_freeze(result), trace)


def _swap(c11, c12, c21, c22) -> np.ndarray:
    """Assemble the block matrix after the off-diagonal block exchange."""
    return np.asarray(block_compose(block_swap_top(Block2x2(
        as_matrix(c11), as_matrix(c12), as_matrix(c21), as_matrix(c22)
    ))))


def _n220_pieces(re: _Op, rf: _Op, extra: int):
    """Shared ingredients of the (E I; F 0) representations."""
    n = re.n
    ident = np.eye(n, dtype=np.complex128)
    zero = np.zeros((n, n), dtype=np.complex128)
    efd = re.a @ rf.d
    r0 = np.block([[zero, rf.d], [ident, -efd]])
    rker = np.block([[zero, rf.d], [rf.e, -rf.e @ efd]])
    return ident, zero, efd, r0, rker


def n220_drazin_a(e, f, *, hypothesis_tol: float = DEFAULT_HYPOTHESIS_TOL,
                  extra_terms: int = 0) -> FormulaOutput:
    """Drazin inverse of N = (E I; F 0) when F^d E F^pi = 0 and F^pi F E = 0.

    The i-series carries the killing factor E^(2i) E^pi (both coefficient
    rows die once 2i reaches ind(E)); the inner sums die with F^(i+1) F^pi
    and F^i F^pi at ind(F).
    """
    e = require_square(e)
    f = require_square(f)
    if e.shape != f.shape:
        raise ShapeError("E and F must be square of equal size")
    _gate(check_n220_a(e, f, hypothesis_tol))
    re_, rf = _Op(e), _Op(f)
    out, trace = _n220_a_sum(re_, rf, 1, extra_terms)
    return FormulaOutput(_freeze(out), trace)


def _n220_a_sum(re_: _Op, rf: _Op, power: int, extra: int) -> tuple[np.ndarray, FormulaTrace]:
    """The N^(d power) representation shared by the theorem (power = 1) and
    its power corollary (power >= 1)."""
    n = re_.n
    ident, zero, efd, r0, rker = _n220_pieces(re_, rf, extra)
    fpi_e_fd = rf.pi @ re_.a @ rf.d
    middle = (rf.pi - re_.a @ fpi_e_fd) @ re_.a @ rf.d

    b1 = _ceil_half(re_.ind) + extra
    term1 = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    for i in range(b1):
        c11 = re_.pow(2 * i + 1) @ re_.pi @ fpi_e_fd
        c21 = re_.pow(2 * i) @ re_.pi @ middle
        term1 += _swap(c11, zero, c21, zero) @ np.linalg.matrix_power(r0, 2 * i + power)

    bf1 = max(rf.ind - 1, 0) + extra
    bf2 = rf.ind + extra
    term2 = np.zeros_like(term1)
    for j in range(1, power + 1):
        s1 = np.zeros((n, n), dtype=np.complex128)
        for i in range(bf1):
            s1 += re_.dpow(2 * i + j + 2) @ rf.pow(i + 1) @ rf.pi
        s2 = np.zeros((n, n), dtype=np.complex128)
        for i in range(bf2):
            s2 += re_.dpow(2 * i + 1) @ rf.pow(i) @ rf.pi
        q11 = re_.dpow(j) @ rf.pi + s1
        q21 = re_.dpow(j) @ (s2 - fpi_e_fd)
        term2 += _swap(q11, zero, q21, zero) @ np.linalg.matrix_power(rker, power - j)

    term3 = np.linalg.matrix_power(rker, power)
    out = term1 + term2 + term3

    trace = FormulaTrace()
    trace.store("P", term1)
    trace.store("Q", term2)
    trace.store("R", term3)
    trace.store("a_sharp", rker)
    trace.bound("E_series", b1)
    trace.bound("F_series_inner1", bf1)
    trace.bound("F_series_inner2", bf2)
    return out, trace


def n220_power_a(e, f, n_power: int, *, hypothesis_tol: float = DEFAULT_HYPOTHESIS_TOL,
                 extra_terms: int = 0) -> FormulaOutput:
    """n-th power of the Drazin inverse of N = (E I; F 0), same hypotheses.

    At n_power = 1 this reduces term-by-term to :func:`n220_drazin_a`.
    """
    if n_power < 1 or int(n_power) != n_power:
        raise ValueError("the power must be a positive integer")
    e = require_square(e)
    f = require_square(f)
    if e.shape != f.shape:
        raise ShapeError("E and F must be square of equal size")
    _gate(check_n220_a(e, f, hypothesis_tol))
    re_, rf = _Op(e), _Op(f)
    out, trace = _n220_a_sum(re_, rf, int(n_power), extra_terms)
    return FormulaOutput(_freeze(out), trace)


class _OpGiven:
    """:class:`_Op` interface with the Drazin inverse supplied in closed form.

    Used when an operand's inverse is known structurally (corner products,
    group-invertible blocks) so no oracle call is needed.  The index is
    recovered from the rank chain.
    """

    def __init__(self, a: np.ndarray, dinv: np.ndarray, ind: int | None = None):
        self.a = np.asarray(a)
        self.n = a.shape[0]
        self.d = np.asarray(dinv)
        self.e = self.a @ self.d
        self.pi = np.eye(self.n, dtype=np.complex128) - self.e
        self.ind = index(self.a) if ind is None else ind
        self._pows = [np.eye(self.n, dtype=np.complex128), self.a]
        self._dpows = [np.eye(self.n, dtype=np.complex128), self.d]

    pow = _Op.pow
    dpow = _Op.dpow
    pipow = _Op.pipow


def n220_drazin_b(e, f, *, hypothesis_tol: float = DEFAULT_HYPOTHESIS_TOL,
                  extra_terms: int = 0) -> FormulaOutput:
    """Drazin inverse of N = (E I; F 0) when F^pi E F^d = 0 and E F F^pi = 0.

    Evaluated constructively: split along the idempotent diag(F^pi, 0), whose
    corners have closed-form inverses under the hypotheses --
    ``(F^pi E)^d = F^pi E^d`` (corner product, since F^pi E F F^d = 0) and the
    group inverse ``(0 F^d; F F^d, -E F^d)`` for the complementary corner --
    then apply the coupled-corner representation to the corner split and
    collapse the four blocks.  Every series truncates at bounds set by ind(E)
    and ind(F).  (The flattened two-term expansion of this same object does
    not survive oracle validation; see the project notes.)
    """
    e = require_square(e)
    f = require_square(f)
    if e.shape != f.shape:
        raise ShapeError("E and F must be square of equal size")
    _gate(check_n220_b(e, f, hypothesis_tol))
    re_, rf = _Op(e), _Op(f)
    n = re_.n
    z = np.zeros((n, n), dtype=np.complex128)
    fe = rf.e
    fpi = rf.pi
    fd = rf.d

    # corner split along diag(F^pi, 0)
    a_c = np.block([[fpi @ e, z], [z, z]])
    b_c = np.block([[z, fpi], [z, z]])
    c_c = np.block([[fe @ e @ fpi, z], [f @ fpi, z]])
    d_c = np.block([[e @ fe, fe], [f @ fe, z]])
    # (F^pi E)^d = F^pi E^d: corner product, F^pi E (1 - F^pi) = F^pi E F F^d = 0
    a_dinv = np.block([[fpi @ re_.d, z], [z, z]])
    # the complementary corner is group invertible with inverse (0 F^d; FF^d -EF^d)
    d_dinv = np.block([[z, fd], [fe, -(e @ fd)]])
    ra = _OpGiven(a_c, a_dinv)
    rd = _OpGiven(d_c, d_dinv)

    j_bc = max(rf.ind, 1)  # (bc)^j = ((F F^pi)^j, 0; 0, 0)
    j_cb = rf.ind + 1  # (cb)^j = (0, FF^d E F^pi (F F^pi)^(j-1); 0, (F F^pi)^j)
    phi1, psi1, tau, trace = _coupled_corner_blocks(ra, rd, b_c, c_c, j_bc, j_cb, extra_terms)
    xd = np.block([
        [phi1 @ a_c, phi1 @ b_c],
        [tau @ a_c + psi1, rd.d + tau @ b_c],
    ])
    m2 = 2 * n
    out = xd[:m2, :m2] + xd[:m2, m2:] + xd[m2:, :m2] + xd[m2:, m2:]
    trace.store("corner_phi1", phi1)
    trace.store("corner_psi1", psi1)
    trace.store("corner_tau", tau)
    trace.store("G", a_dinv)
    trace.store("H", d_dinv)
    trace.bound("E_series", ra.ind + extra_terms)
    trace.bound("F_series", rf.ind + extra_terms)
    return FormulaOutput(_freeze(out), trace)
