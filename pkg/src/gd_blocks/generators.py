"""Deterministic, seeded generators for theorem-exact matrix instances.

Every family imposes its algebraic hypotheses as exact zero patterns in a
hidden basis and then conjugates by a random well-conditioned similarity, so
the conditions hold to rounding (residuals ~1e-14) while the instances look
unstructured.  One counter-based Philox stream per case makes generation a
pure function of the spec: identical specs give bitwise-identical cases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InfeasibleSpec
from .matrixcore import _freeze, fnorm
from .drazin import index

#: Name recorded in case metadata; the contract is determinism per
#: (seed, draw counter), which numpy's counter-based Philox engine provides.
PRNG_NAME = "philox4x64 (numpy Philox bit generator)"

FAMILIES = (
    "t220a_split",
    "t220a_fzero",
    "t220b_split",
    "m22_nilD",
    "m22_czero",
    "m22_bzero",
    "cor33",
    "guo337",
    "guo322",
    "triangle",
    "cline",
    "corner",
    "with_index",
)

#: Families whose composed matrix is intentionally block-structured in the
#: standard basis, exempt from the hidden-structure non-triviality check.
TRIVIAL_FAMILIES = ("m22_czero", "m22_bzero")


@dataclass(frozen=True)
class CaseSpec:
    """Recipe for one generated instance."""

    family: str
    seed: int
    block_dim: int = 4
    core_dim: int = 2
    nil_index: int = 2
    cond_cap: float = 1e3

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InfeasibleSpec(f"unknown family {self.family!r}")
        if not 1 <= self.block_dim <= 16:
            raise InfeasibleSpec("block_dim must be in 1..16")
        if not 0 <= self.core_dim <= self.block_dim:
            raise InfeasibleSpec("core_dim must be in 0..block_dim")
        nil_dim = self.block_dim - self.core_dim
        if nil_dim == 0:
            if self.nil_index != 1:
                raise InfeasibleSpec("nil_index must be 1 when core_dim = block_dim")
        elif not 1 <= self.nil_index <= nil_dim:
            raise InfeasibleSpec(
                f"nil_index must be in 1..{nil_dim} for core_dim {self.core_dim}"
            )
        if self.cond_cap < 1.0:
            raise InfeasibleSpec("cond_cap must be >= 1")
        if self.seed < 0 or self.seed > 2**64 - 1:
            raise InfeasibleSpec("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class GeneratedCase:
    """Named operands plus the hidden similarity and construction metadata."""

    family: str
    seed: int
    operands: dict[str, np.ndarray]
    basis: np.ndarray
    expected_indices: dict[str, int]
    prng: str = PRNG_NAME
    notes: dict[str, object] = field(default_factory=dict)


class _Draws:
    """All randomness for one case, drawn sequentially from one Philox stream."""

    def __init__(self, seed: int):
        self.rng = np.random.Generator(np.random.Philox(key=seed))

    def cnormal(self, rows: int, cols: int) -> np.ndarray:
        re = self.rng.standard_normal((rows, cols))
        im = self.rng.standard_normal((rows, cols))
        return (re + 1j * im) / np.sqrt(2.0)

    def uniform(self, n: int, lo: float, hi: float) -> np.ndarray:
        return lo + (hi - lo) * self.rng.random(n)

    def similarity(self, n: int, cond_cap: float) -> tuple[np.ndarray, np.ndarray]:
        """Random invertible S with an exactly controlled condition number.

        Built as U diag(s) V* with random unitary factors and log-spaced
        singular values of geometric mean one, so cond(S) is drawn exactly
        in [2, min(cond_cap, 30)] and never tails toward the cap.  The
        inverse comes from the factors, not a linear solve.
        """
        u = np.linalg.qr(self.cnormal(n, n))[0]
        v = np.linalg.qr(self.cnormal(n, n))[0]
        hi = min(cond_cap, 20.0)
        kappa = self.uniform(1, min(2.0, hi), hi)[0] if n > 1 else 1.0
        if n > 1:
            half = 0.5 * np.log(kappa)
            svals = np.exp(np.linspace(half, -half, n))
        else:
            svals = np.ones(1)
        s = (u * svals) @ v.conj().T
        sinv = (v / svals) @ u.conj().T
        return s, sinv

    def invertible_core(self, r: int) -> np.ndarray:
        """Upper-triangular core with eigenvalue magnitudes in [0.5, 2]."""
        if r == 0:
            return np.zeros((0, 0), dtype=np.complex128)
        mags = self.uniform(r, 0.5, 2.0)
        phases = np.exp(2j * np.pi * self.rng.random(r))
        k = np.diag(mags * phases).astype(np.complex128)
        if r > 1:
            k += 0.3 * np.triu(self.cnormal(r, r), 1)
        return k

    def nilpotent_part(self, dim: int, nil_index: int) -> tuple[np.ndarray, list[int]]:
        """Shift-block nilpotent of the given dimension and nilpotency index.

        The leading block has size nil_index; the remainder is filled with
        blocks no larger, so the index is exact.  Superdiagonal entries are
        scaled randomly in [0.5, 1.5].  Returns (matrix, block sizes).
        """
        if dim == 0:
            return np.zeros((0, 0), dtype=np.complex128), []
        sizes = []
        left = dim
        while left > 0:
            s = min(nil_index, left)
            sizes.append(s)
            left -= s
        n = np.zeros((dim, dim), dtype=np.complex128)
        pos = 0
        for s in sizes:
            for j in range(s - 1):
                n[pos + j, pos + j + 1] = self.uniform(1, 0.5, 1.5)[0]
            pos += s
        return n, sizes


def _null_basis(sizes: list[int], dim: int) -> np.ndarray:
    """Exact kernel basis of a shift-block nilpotent: first vector of each block."""
    cols = []
    pos = 0
    for s in sizes:
        e = np.zeros((dim, 1), dtype=np.complex128)
        e[pos, 0] = 1.0
        cols.append(e)
        pos += s
    return np.hstack(cols) if cols else np.zeros((dim, 0), dtype=np.complex128)


def _corange_basis(sizes: list[int], dim: int) -> np.ndarray:
    """Exact basis of the orthogonal complement of the range: last vector per block."""
    cols = []
    pos = 0
    for s in sizes:
        e = np.zeros((dim, 1), dtype=np.complex128)
        e[pos + s - 1, 0] = 1.0
        cols.append(e)
        pos += s
    return np.hstack(cols) if cols else np.zeros((dim, 0), dtype=np.complex128)


def _range_factors(n: np.ndarray, sizes: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Exact rank factorization N = U V of a shift-block nilpotent."""
    dim = n.shape[0]
    cols, rows = [], []
    pos = 0
    for s in sizes:
        for j in range(s - 1):
            u = np.zeros((dim, 1), dtype=np.complex128)
            u[pos + j, 0] = n[pos + j, pos + j + 1]
            v = np.zeros((1, dim), dtype=np.complex128)
            v[0, pos + j + 1] = 1.0
            cols.append(u)
            rows.append(v)
        pos += s
    if not cols:
        return (
            np.zeros((dim, 0), dtype=np.complex128),
            np.zeros((0, dim), dtype=np.complex128),
        )
    return np.hstack(cols), np.vstack(rows)


def _blockdiag(*blocks: np.ndarray) -> np.ndarray:
    parts = [b for b in blocks if b.shape[0] > 0]
    total = sum(b.shape[0] for b in parts)
    out = np.zeros((total, total), dtype=np.complex128)
    pos = 0
    for b in parts:
        s = b.shape[0]
        out[pos : pos + s, pos : pos + s] = b
        pos += s
    return out


def _case(family, seed, operands, basis, expected, **notes) -> GeneratedCase:
    ops = {k: _freeze(np.ascontiguousarray(v, dtype=np.complex128)) for k, v in operands.items()}
    return GeneratedCase(
        family=family,
        seed=int(seed),
        operands=ops,
        basis=_freeze(np.ascontiguousarray(basis, dtype=np.complex128)),
        expected_indices=dict(expected),
        notes=dict(notes),
    )


def gen_with_index(seed: int, n: int, k: int, cond_cap: float = 1e3) -> np.ndarray:
    """Random n x n matrix with Drazin index exactly *k* (0 <= k <= n).

    Built as S diag(K, J_k) S^-1 with K invertible (eigenvalues bounded away
    from zero by 0.5) and J_k a single shift block; k = 0 means no nilpotent
    part at all.
    """
    if not 0 <= k <= n:
        raise InfeasibleSpec(f"need 0 <= k <= n, got k={k}, n={n}")
    if n < 1:
        raise InfeasibleSpec("dimension must be positive")
    draws = _Draws(seed)
    core = draws.invertible_core(n - k)
    nil, _ = draws.nilpotent_part(k, k)
    m0 = _blockdiag(core, nil)
    s, sinv = draws.similarity(n, cond_cap)
    return _freeze(s @ m0 @ sinv)


def _split_f(draws: _Draws, spec: CaseSpec, zero_nil: bool):
    """F = diag(F1, N) in the hidden basis; N = 0 for the *_fzero family."""
    q = spec.block_dim - spec.core_dim
    f1 = draws.invertible_core(spec.core_dim)
    if zero_nil:
        nil = np.zeros((q, q), dtype=np.complex128)
        sizes = [1] * q
        ind_f = 1 if q else 0
    else:
        nil, sizes = draws.nilpotent_part(q, spec.nil_index)
        ind_f = spec.nil_index if q else 0
    return f1, nil, sizes, ind_f


def gen_n220_a(spec: CaseSpec) -> GeneratedCase:
    """Instance (E, F) with F^d E F^pi = 0 and F^pi F E = 0 exactly.

    In the hidden basis F = diag(F1, N) with F1 invertible and N nilpotent;
    E has zero upper-right block (kills F^d E F^pi) and its lower blocks map
    into ker(N) (kills F^pi F E).
    """
    if spec.family not in ("t220a_split", "t220a_fzero"):
        raise InfeasibleSpec(f"family {spec.family!r} does not belong to gen_n220_a")
    if spec.family == "t220a_split" and spec.core_dim == spec.block_dim:
        raise InfeasibleSpec("t220a_split needs a nonempty nilpotent part")
    draws = _Draws(spec.seed)
    n, core = spec.block_dim, spec.core_dim
    q = n - core
    f1, nil, sizes, ind_f = _split_f(draws, spec, zero_nil=spec.family == "t220a_fzero")
    e0 = np.zeros((n, n), dtype=np.complex128)
    e0[:core, :core] = draws.cnormal(core, core)
    if q:
        if spec.family == "t220a_fzero":
            e0[core:, :core] = draws.cnormal(q, core)
            e0[core:, core:] = draws.cnormal(q, q)
        else:
            zn = _null_basis(sizes, q)
            nu = zn.shape[1]
            e0[core:, :core] = zn @ draws.cnormal(nu, core)
            # keep E's trailing corner nilpotent (index >= 2 when nonzero) so the
            # split family exercises nontrivial E^pi a^i series
            r2 = draws.cnormal(nu, q)
            g = r2 @ zn
            keep = np.diag(np.diag(g, 1), 1) if nu > 1 else np.zeros_like(g)
            r2 = r2 - (g - keep) @ zn.conj().T
            e0[core:, core:] = zn @ r2
    f0 = _blockdiag(f1, nil) if q else f1
    s, sinv = draws.similarity(n, spec.cond_cap)
    e = s @ e0 @ sinv
    f = s @ f0 @ sinv
    return _case(
        spec.family,
        spec.seed,
        {"E": e, "F": f},
        s,
        {"E": index(e), "F": ind_f},
    )


def gen_n220_b(spec: CaseSpec) -> GeneratedCase:
    """Instance (E, F) with F^pi E F^d = 0 and E F F^pi = 0 exactly.

    Mirror of :func:`gen_n220_a`: E has zero lower-left block and its right
    blocks annihilate range(N).
    """
    if spec.family != "t220b_split":
        raise InfeasibleSpec(f"family {spec.family!r} does not belong to gen_n220_b")
    draws = _Draws(spec.seed)
    n, core = spec.block_dim, spec.core_dim
    q = n - core
    f1, nil, sizes, ind_f = _split_f(draws, spec, zero_nil=False)
    e0 = np.zeros((n, n), dtype=np.complex128)
    e0[:core, :core] = draws.cnormal(core, core)
    if q:
        w = _corange_basis(sizes, q)  # columns orthogonal to range(N)
        mu = w.shape[1]
        e0[:core, core:] = draws.cnormal(core, mu) @ w.conj().T
        r2 = draws.cnormal(q, mu)
        g = w.conj().T @ r2
        keep = np.diag(np.diag(g, 1), 1) if mu > 1 else np.zeros_like(g)
        r2 = r2 - w @ (g - keep)
        e0[core:, core:] = r2 @ w.conj().T
    f0 = _blockdiag(f1, nil) if q else f1
    s, sinv = draws.similarity(n, spec.cond_cap)
    e = s @ e0 @ sinv
    f = s @ f0 @ sinv
    return _case(
        spec.family,
        spec.seed,
        {"E": e, "F": f},
        s,
        {"E": index(e), "F": ind_f},
    )


def _factored_product(draws: _Draws, spec: CaseSpec):
    """W = BC with a clean spectral split, via an exact rank factorization.

    W = S diag(K, N) S^-1 is built first (K invertible core, N nilpotent),
    then factored W = X Y and embedded into B = [X 0] Q, C = Q^-1 [Y; R]
    with a random invertible mixer Q.  ker(B) contains the trailing columns
    of Q^-1 exactly, which is where range(D) will live.
    """
    m, core = spec.block_dim, spec.core_dim
    q = m - core
    if q == 0:
        raise InfeasibleSpec("this family needs BC singular: core_dim < block_dim")
    kblk = draws.invertible_core(core)
    nil, sizes = draws.nilpotent_part(q, spec.nil_index)
    s, sinv = draws.similarity(m, spec.cond_cap)
    un, vn = _range_factors(nil, sizes)
    r_w = core + un.shape[1]
    if r_w >= m:
        raise InfeasibleSpec("nilpotent part must lose rank (needs at least one block)")
    x = np.zeros((m, r_w), dtype=np.complex128)
    y = np.zeros((r_w, m), dtype=np.complex128)
    x[:core, :core] = kblk
    x[core:, core:] = un
    y[:core, :core] = np.eye(core)
    y[core:, core:] = vn
    x = s @ x
    y = y @ sinv
    qmix, qinv = draws.similarity(m, spec.cond_cap)
    b = np.hstack([x, np.zeros((m, m - r_w), dtype=np.complex128)]) @ qmix
    c = qinv @ np.vstack([y, draws.cnormal(m - r_w, m)])
    return s, sinv, nil, sizes, b, c, (qmix, qinv), r_w


def _structured(draws: _Draws, n: int, k: int, cond_cap: float) -> np.ndarray:
    """In-stream version of :func:`gen_with_index` (shares the case's draws)."""
    core = draws.invertible_core(n - k)
    nil, _ = draws.nilpotent_part(k, k)
    s, sinv = draws.similarity(n, cond_cap)
    return s @ _blockdiag(core, nil) @ sinv


def gen_m22(spec: CaseSpec) -> GeneratedCase:
    """Instance (A, B, C, D) for the two-by-two block theorem.

    m22_nilD: BC has a clean spectral split; A is constrained in that basis
    ((BC)^d A (BC)^pi = 0 and (BC)^pi BC A = 0 exact); D is nilpotent with
    range(D) in ker(B), so B D = 0 and hence B D^d = 0 and B D^i C = 0.
    m22_czero: C = 0, D nilpotent with range(D) in ker(B).
    m22_bzero: B = 0, everything else unconstrained.
    """
    if spec.family not in ("m22_nilD", "m22_czero", "m22_bzero"):
        raise InfeasibleSpec(f"family {spec.family!r} does not belong to gen_m22")
    draws = _Draws(spec.seed)
    m = spec.block_dim

    if spec.family == "m22_bzero":
        k_a = spec.nil_index if m > spec.core_dim else 0
        a = _structured(draws, m, k_a, spec.cond_cap)
        d = _structured(draws, m, 1 if m > 1 else 0, spec.cond_cap)
        c = draws.cnormal(m, m)
        b = np.zeros((m, m), dtype=np.complex128)
        return _case(
            spec.family, spec.seed,
            {"A": a, "B": b, "C": c, "D": d},
            np.eye(m, dtype=np.complex128),
            {"A": index(a), "D": index(d)},
        )

    if spec.family == "m22_czero":
        # rank-deficient B with an exact kernel column, D nilpotent inside it
        qmix, qinv = draws.similarity(m, spec.cond_cap)
        r_b = m - 1
        b = np.hstack([draws.cnormal(m, r_b), np.zeros((m, 1), dtype=np.complex128)]) @ qmix
        d = _nilpotent_with_range(draws, spec, (qmix, qinv), r_b, free_core=False)
        a = draws.cnormal(m, m)
        c = np.zeros((m, m), dtype=np.complex128)
        return _case(
            spec.family, spec.seed,
            {"A": a, "B": b, "C": c, "D": d},
            np.eye(m, dtype=np.complex128),
            {"A": index(a), "D": index(d)},
        )

    s, sinv, nil, sizes, b, c, qpair, r_w = _factored_product(draws, spec)
    core, q = spec.core_dim, m - spec.core_dim
    a0 = np.zeros((m, m), dtype=np.complex128)
    a0[:core, :core] = draws.cnormal(core, core)
    zn = _null_basis(sizes, q)
    nu = zn.shape[1]
    a0[core:, :core] = zn @ draws.cnormal(nu, core)
    a0[core:, core:] = zn @ draws.cnormal(nu, q)
    a = s @ a0 @ sinv
    d = _nilpotent_with_range(draws, spec, qpair, r_w, free_core=False)
    return _case(
        spec.family, spec.seed,
        {"A": a, "B": b, "C": c, "D": d},
        s,
        {"A": index(a), "D": index(d), "BC": spec.nil_index},
    )


def _nilpotent_with_range(draws: _Draws, spec: CaseSpec, qpair, r: int,
                          free_core: bool) -> np.ndarray:
    """D = Q^-1 [[0, 0], [M, J]] Q: range(D) inside ker(B) exactly.

    B was built as [X 0] Q, so B Q^-1 keeps only the leading r columns and
    B D = 0 to rounding.  J nilpotent gives D nilpotency index nu(J) + 1;
    J unconstrained (free_core) leaves D's spectrum free.
    """
    qmix, qinv = qpair
    m = qmix.shape[0]
    nu_d = m - r
    bottom = np.zeros((nu_d, m), dtype=np.complex128)
    if free_core:
        bottom[:, :r] = draws.cnormal(nu_d, r)
        bottom[:, r:] = draws.cnormal(nu_d, nu_d)
    elif spec.nil_index == 1:
        return np.zeros((m, m), dtype=np.complex128)
    else:
        jlen = min(spec.nil_index - 1, nu_d)
        j, _ = draws.nilpotent_part(nu_d, jlen)
        bottom[:, :r] = 0.8 * draws.cnormal(nu_d, r)
        bottom[:, r:] = j
    return qinv[:, r:] @ (bottom @ qmix)


def gen_cor33(spec: CaseSpec) -> GeneratedCase:
    """Corollary-family instance: A (BC)^pi = 0, (BC)^pi BC A = 0, B D = 0.

    A's whole second block column vanishes in the spectral basis of BC and
    its lower-left block maps into ker(N); D is unconstrained inside ker(B).
    """
    if spec.family != "cor33":
        raise InfeasibleSpec(f"family {spec.family!r} does not belong to gen_cor33")
    draws = _Draws(spec.seed)
    m = spec.block_dim
    s, sinv, nil, sizes, b, c, qpair, r_w = _factored_product(draws, spec)
    core, q = spec.core_dim, m - spec.core_dim
    a0 = np.zeros((m, m), dtype=np.complex128)
    a0[:core, :core] = draws.cnormal(core, core)
    zn = _null_basis(sizes, q)
    a0[core:, :core] = zn @ draws.cnormal(zn.shape[1], core)
    a = s @ a0 @ sinv
    d = _nilpotent_with_range(draws, spec, qpair, r_w, free_core=True)
    return _case(
        spec.family, spec.seed,
        {"A": a, "B": b, "C": c, "D": d},
        s,
        {"A": index(a), "D": index(d), "BC": spec.nil_index},
    )


def gen_lemma_case(lemma: str, spec: CaseSpec) -> GeneratedCase:
    """Instances for the auxiliary lemmas.

    triangle  unconstrained (a, b, d) with constructed indices
    cline     rectangular (a, b), no conditions
    corner    idempotent e and a with e a (1-e) = 0 by basis structure
    guo337    a b c = 0, b d = 0 and b c exactly nilpotent (flag construction)
    guo322    c a^d = 0 and c a^i b = 0 for all i >= 0 (two-shift-block split)
    """
    if lemma not in ("triangle", "cline", "corner", "guo337", "guo322"):
        raise InfeasibleSpec(f"unknown lemma {lemma!r}")
    if spec.family != lemma:
        raise InfeasibleSpec(f"family {spec.family!r} does not match lemma {lemma!r}")
    draws = _Draws(spec.seed)
    n = spec.block_dim
    q = n - spec.core_dim

    if lemma == "triangle":
        k_a = spec.nil_index if q else 0
        k_d = min(1, n - 1)
        a = _structured(draws, n, k_a, spec.cond_cap)
        d = _structured(draws, n, k_d, spec.cond_cap)
        b = draws.cnormal(n, n)
        return _case(lemma, spec.seed, {"a": a, "b": b, "d": d},
                     np.eye(n, dtype=np.complex128), {"a": k_a, "d": k_d})

    if lemma == "cline":
        cols = max(1, n - 1)
        a = draws.cnormal(n, cols)
        b = draws.cnormal(cols, n)
        return _case(lemma, spec.seed, {"a": a, "b": b},
                     np.eye(n, dtype=np.complex128), {})

    if lemma == "corner":
        r = spec.core_dim
        if r < 1:
            raise InfeasibleSpec("corner needs core_dim >= 1 for a nonzero idempotent")
        s, sinv = draws.similarity(n, spec.cond_cap)
        e0 = np.zeros((n, n), dtype=np.complex128)
        e0[:r, :r] = np.eye(r)
        a0 = np.zeros((n, n), dtype=np.complex128)
        a0[:r, :r] = draws.cnormal(r, r)
        a0[r:, :r] = draws.cnormal(n - r, r)
        a0[r:, r:] = draws.cnormal(n - r, n - r)
        a = s @ a0 @ sinv
        e = s @ e0 @ sinv
        return _case(lemma, spec.seed, {"a": a, "e": e},
                     s, {"a": index(a)})

    if lemma == "guo337":
        k = spec.nil_index  # nilpotency index of bc
        if k > n:
            raise InfeasibleSpec("nil_index cannot exceed block_dim for guo337")
        u_full = np.linalg.qr(draws.cnormal(n, n))[0]
        u = u_full[:, :k]
        t = np.zeros((k, k), dtype=np.complex128)
        for j in range(k - 1):
            t[j, j + 1] = draws.uniform(1, 0.5, 1.5)[0]
        flag = u_full[:, : k - 1]  # range of u t u*, annihilated by a
        extra = min(2, n - 1 - (k - 1), n - k)
        if extra < 0:
            raise InfeasibleSpec("no room for ker(b): need rank(b) < block_dim")
        rank_b = max(k - 1, 1) if k > 1 else 1
        rank_b = min(rank_b + max(extra, 0), n - 1)
        wb_cols = [flag] if k > 1 else []
        need = rank_b - (k - 1 if k > 1 else 0)
        if need > 0:
            wb_cols.append(u_full[:, k : k + need])
        wb = np.hstack(wb_cols)
        gmix = draws.cnormal(rank_b, n)
        b = wb @ gmix
        bplus = np.linalg.pinv(b)
        target = u @ t @ u.conj().T
        c = bplus @ target + (np.eye(n) - bplus @ b) @ draws.cnormal(n, n)
        a = draws.cnormal(n, n)
        if k > 1:
            a = a @ (np.eye(n) - flag @ flag.conj().T)
        # d with range inside ker(b) = ker(gmix)
        _, _, vh = np.linalg.svd(gmix)
        zd = vh[rank_b:].conj().T
        d = zd @ draws.cnormal(zd.shape[1], n)
        return _case(lemma, spec.seed, {"a": a, "b": b, "c": c, "d": d},
                     u_full, {"a": index(a), "d": index(d), "bc": k},
                     bc_nilindex=k)

    # guo322: a = S diag(K, J1, J2) S^-1; b lives in the J1 block (an
    # a-invariant subspace), c sees only the J2 block, so c a^i b = 0 for
    # every i >= 0 and c a^d = 0, both exactly.
    if q < 2:
        raise InfeasibleSpec("guo322 needs at least two nilpotent dimensions")
    core = spec.core_dim
    q1 = (q + 1) // 2
    q2 = q - q1
    j1, _ = draws.nilpotent_part(q1, min(spec.nil_index, q1))
    j2, _ = draws.nilpotent_part(q2, min(spec.nil_index, q2))
    kblk = draws.invertible_core(core)
    s, sinv = draws.similarity(n, spec.cond_cap)
    a = s @ _blockdiag(kblk, j1, j2) @ sinv
    b0 = np.zeros((n, n), dtype=np.complex128)
    b0[core : core + q1, :] = draws.cnormal(q1, n)
    b = s @ b0
    c0 = np.zeros((n, n), dtype=np.complex128)
    c0[:, core + q1 :] = draws.cnormal(n, q2)
    c = c0 @ sinv
    d = _structured(draws, n, min(1, n - 1), spec.cond_cap)
    ind_a = max(min(spec.nil_index, q1), min(spec.nil_index, q2))
    return _case(lemma, spec.seed, {"a": a, "b": b, "c": c, "d": d},
                 s, {"a": ind_a, "d": index(d)})


_GENERATORS = {
    "t220a_split": gen_n220_a,
    "t220a_fzero": gen_n220_a,
    "t220b_split": gen_n220_b,
    "m22_nilD": gen_m22,
    "m22_czero": gen_m22,
    "m22_bzero": gen_m22,
    "cor33": gen_cor33,
}


def generate(spec: CaseSpec) -> GeneratedCase:
    """Dispatch a CaseSpec to its family's generator."""
    if spec.family in _GENERATORS:
        return _GENERATORS[spec.family](spec)
    if spec.family in ("guo337", "guo322", "triangle", "cline", "corner"):
        return gen_lemma_case(spec.family, spec)
    if spec.family == "with_index":
        nil = spec.block_dim - spec.core_dim
        a = gen_with_index(spec.seed, spec.block_dim, nil if nil == 0 else spec.nil_index, spec.cond_cap)
        return _case("with_index", spec.seed, {"A": a},
                     np.eye(spec.block_dim, dtype=np.complex128),
                     {"A": 0 if nil == 0 else spec.nil_index})
    raise InfeasibleSpec(f"no generator for family {spec.family!r}")
