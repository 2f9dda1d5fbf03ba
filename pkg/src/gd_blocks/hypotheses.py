"""Residual verification of the algebraic hypotheses of each block formula.

Each checker evaluates its theorem's conditions as relative Frobenius
residuals (normalised by the product of operand norms) and reports a
per-condition verdict.  Conditions quantified over all powers ("for every
i >= 1") are certified over i = 1..dim: by Cayley-Hamilton any higher power
of D is a linear combination of D..D^dim times powers that are already
annihilated, so the finite range is a complete certificate.

All checkers recompute Drazin inverses through the rank/pinv oracle only,
so verdicts are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ShapeError
from .drazin import drazin_rankpinv, gd_residuals, is_nilpotent
from .matrixcore import as_matrix, fnorm, rel_residual, require_square

THEOREMS = (
    "triangle",
    "corner",
    "cline",
    "guo337",
    "guo322",
    "n220_a",
    "n220_b",
    "m22",
    "m22_cor",
)

DEFAULT_HYPOTHESIS_TOL = 1e-10


@dataclass(frozen=True)
class Condition:
    name: str
    residual: float
    passed: bool


@dataclass(frozen=True)
class HypothesisReport:
    theorem: str
    conditions: tuple[Condition, ...]
    overall: bool
    tolerance: float

    def residual(self, name: str) -> float:
        for c in self.conditions:
            if c.name == name:
                return c.residual
        raise KeyError(name)


def _report(theorem: str, tol: float, entries: list[tuple[str, float]]) -> HypothesisReport:
    conds = tuple(Condition(name, float(r), float(r) <= tol) for name, r in entries)
    return HypothesisReport(theorem, conds, all(c.passed for c in conds), tol)


def check_n220_a(e, f, tol: float = DEFAULT_HYPOTHESIS_TOL) -> HypothesisReport:
    """Conditions F^d E F^pi = 0 and F^pi F E = 0."""
    e = require_square(e)
    f = require_square(f)
    if e.shape != f.shape:
        raise ShapeError("E and F must be square of equal size")
    rf = drazin_rankpinv(f)
    r1 = rel_residual(rf.dinv @ e @ rf.pi, rf.dinv, e)
    r2 = rel_residual(rf.pi @ f @ e, f, e)
    return _report("n220_a", tol, [("F^d E F^pi", r1), ("F^pi F E", r2)])


def check_n220_b(e, f, tol: float = DEFAULT_HYPOTHESIS_TOL) -> HypothesisReport:
    """Conditions F^pi E F^d = 0 and E F F^pi = 0."""
    e = require_square(e)
    f = require_square(f)
    if e.shape != f.shape:
        raise ShapeError("E and F must be square of equal size")
    rf = drazin_rankpinv(f)
    r1 = rel_residual(rf.pi @ e @ rf.dinv, rf.dinv, e)
    r2 = rel_residual(e @ f @ rf.pi, f, e)
    return _report("n220_b", tol, [("F^pi E F^d", r1), ("E F F^pi", r2)])


def _power_family_residual(b, d, c, upto: int) -> float:
    """max over i = 1..upto of the relative residual of B D^i C."""
    worst = 0.0
    cur = np.array(d)
    for _ in range(upto):
        worst = max(worst, rel_residual(b @ cur @ c, b, cur, c))
        cur = cur @ d
    return worst


def check_m22(a, b, c, d, tol: float = DEFAULT_HYPOTHESIS_TOL) -> HypothesisReport:
    """Conditions (BC)^d A (BC)^pi = 0, (BC)^pi BC A = 0, B D^d = 0, B D^i C = 0."""
    a = require_square(a)
    d = require_square(d)
    b = as_matrix(b)
    c = as_matrix(c)
    m, n = a.shape[0], d.shape[0]
    if b.shape != (m, n) or c.shape != (n, m):
        raise ShapeError(f"need B {m}x{n} and C {n}x{m}, got {b.shape}, {c.shape}")
    w = b @ c
    rw = drazin_rankpinv(w)
    rd = drazin_rankpinv(d)
    r1 = rel_residual(rw.dinv @ a @ rw.pi, rw.dinv, a)
    r2 = rel_residual(rw.pi @ w @ a, w, a)
    r3 = rel_residual(b @ rd.dinv, b, rd.dinv)
    r4 = _power_family_residual(b, d, c, n)
    return _report(
        "m22",
        tol,
        [
            ("(BC)^d A (BC)^pi", r1),
            ("(BC)^pi BC A", r2),
            ("B D^d", r3),
            (f"B D^i C (i=1..{n})", r4),
        ],
    )


def check_m22_cor(a, b, c, d, tol: float = DEFAULT_HYPOTHESIS_TOL) -> HypothesisReport:
    """Conditions A (BC)^pi = 0, (BC)^pi BC A = 0, B D = 0."""
    a = require_square(a)
    d = require_square(d)
    b = as_matrix(b)
    c = as_matrix(c)
    m, n = a.shape[0], d.shape[0]
    if b.shape != (m, n) or c.shape != (n, m):
        raise ShapeError(f"need B {m}x{n} and C {n}x{m}, got {b.shape}, {c.shape}")
    w = b @ c
    rw = drazin_rankpinv(w)
    r1 = rel_residual(a @ rw.pi, a)
    r2 = rel_residual(rw.pi @ w @ a, w, a)
    r3 = rel_residual(b @ d, b, d)
    return _report(
        "m22_cor",
        tol,
        [("A (BC)^pi", r1), ("(BC)^pi BC A", r2), ("B D", r3)],
    )


def check_lemma(lemma: str, operands, tol: float = DEFAULT_HYPOTHESIS_TOL) -> HypothesisReport:
    """Hypotheses of the auxiliary lemmas.

    guo337   operands (a, b, c, d): a b c = 0, b d = 0, b c nilpotent
    guo322   operands (a, b, c, d): c a^d = 0 and c a^i b = 0 for i = 0..dim(a)
    corner   operands (a, e): e idempotent and e a (1-e) = 0
    triangle operands (a, b, d): no algebraic conditions
    cline    operands (a, b): no algebraic conditions
    """
    if lemma == "triangle":
        if len(operands) != 3:
            raise ShapeError("triangle takes (a, b, d)")
        return _report("triangle", tol, [])
    if lemma == "cline":
        if len(operands) != 2:
            raise ShapeError("cline takes (a, b)")
        return _report("cline", tol, [])
    if lemma == "corner":
        if len(operands) != 2:
            raise ShapeError("corner takes (a, e)")
        a, e = (require_square(x) for x in operands)
        ident = np.eye(e.shape[0], dtype=np.complex128)
        r1 = rel_residual(e @ e - e, e, e)
        r2 = rel_residual(e @ a @ (ident - e), e, a)
        return _report("corner", tol, [("e^2 - e", r1), ("e a (1-e)", r2)])
    if lemma == "guo337":
        if len(operands) != 4:
            raise ShapeError("guo337 takes (a, b, c, d)")
        a, b, c, d = (as_matrix(x) for x in operands)
        w = b @ c
        n = w.shape[0]
        r1 = rel_residual(a @ w, a, w)
        r2 = rel_residual(b @ d, b, d)
        nil, _ = is_nilpotent(w)
        wn = np.linalg.matrix_power(w, n)
        scale = max(1.0, float(np.linalg.norm(w, 2)))
        r3 = fnorm(wn) / scale**n
        if not nil:
            r3 = max(r3, 1.0)
        return _report(
            "guo337",
            tol,
            [("a b c", r1), ("b d", r2), ("(b c) nilpotent", r3)],
        )
    if lemma == "guo322":
        if len(operands) != 4:
            raise ShapeError("guo322 takes (a, b, c, d)")
        a, b, c, _ = (as_matrix(x) for x in operands)
        m = a.shape[0]
        ra = drazin_rankpinv(a)
        r1 = rel_residual(c @ ra.dinv, c, ra.dinv)
        worst = 0.0
        cur = np.eye(m, dtype=np.complex128)
        for _ in range(m + 1):
            worst = max(worst, rel_residual(c @ cur @ b, c, cur, b))
            cur = cur @ a
        return _report(
            "guo322",
            tol,
            [("c a^d", r1), (f"c a^i b (i=0..{m})", worst)],
        )
    raise ValueError(f"unknown lemma {lemma!r}")


def gd_axioms_pass(a, x, tol: float) -> bool:
    """Convenience: do all four GD-axiom residuals of (a, x) stay below tol."""
    return gd_residuals(a, x).all_below(tol)
