"""Certified computation of the factorization norm gamma_2.

gamma_2(A) is the least product of the row-norm bound and column-norm
bound over factorizations A = B C:

    gamma_2(A) = min { max_i ||B_i,:||_2 * max_j ||C_:,j||_2 : A = B C }.

Geometrically it is the smallest L-infinity norm of a 0-centered
ellipsoid containing the columns of A, and it admits the semidefinite
characterization

    gamma_2(A) = min t  s.t.  X psd, X_{ii} <= t, X[:m, m:] = A,

whose dual is a maximization over probability weights on rows and
columns:

    gamma_2(A) = max { || diag(p)^1/2 A diag(q)^1/2 ||_*
                       : p, q >= 0, sum p = sum q = 1 }.

Every routine here returns certified quantities:

* lower bounds are nuclear norms of explicitly weighted matrices
  (any feasible (p, q) certifies);
* upper bounds come from explicit ellipsoids that are re-checked for
  containment of every column, never from unverified solver output.

The solver stack, cheapest first:

1. trivial factorizations A = A I and A = I A (row/column norm bounds);
2. dual ascent for (p, q): projected subgradient with restarts, then a
   monotone alternating polish on the variational form
   ||M||_* = max_{||Z||_2 <= 1} <M, Z>;
3. a closed-form primal lift of the dual optimum (the first-order
   conditions pair an optimal (p, q) with the optimal ellipsoid
   P^{-1/2} U Sigma U^T P^{-1/2}), certified after the fact;
4. an interior-point solve of the enclosing-ellipsoid program on the
   smaller side, when that side is small enough;
5. bisection on t with Dykstra alternating projections between the PSD
   cone and the affine/box constraints of the SDP, with warm starts.

Stages 4 and 5 only run while the certified gap exceeds the requested
tolerance. Results are deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ellipsoid import Ellipsoid, ellipsoid_contains, ellipsoid_inf_norm, membership_value
from .interior import InteriorPointError, minimum_height_ellipsoid
from .linalg import (
    KRON_ENTRY_CAP,
    as_matrix,
    nuclear_norm,
    one_to_two_norm,
    read_matrix_with_comments,
    two_to_infinity_norm,
)

# Relative tolerance on the certified upper/lower gap.
DEFAULT_TOL = 1e-4

# Dykstra iteration cap per feasibility probe.
DEFAULT_MAX_ITER = 2000

# Random restarts for the dual ascent.
DEFAULT_RESTARTS = 8

# Largest small-side dimension passed to the interior-point refiner.
IP_SIDE_CAP = 32

# Largest m + n for which Dykstra probes are attempted. Each probe
# iteration eigendecomposes an (m+n) x (m+n) matrix, so the cost grows
# cubically; past a few hundred dimensions a stalled bisection burns
# hours, while the lifted dual certificate is already sound. Larger
# instances skip the probes and report the lift value (flagged
# unconverged whenever the gap stays above tol).
DYKSTRA_DIM_CAP = 384

# Relative Frobenius slack allowed in the factorization identity B C = A.
FACT_RTOL = 1e-8


class CertificateError(ValueError):
    """A gamma_2 certificate failed re-validation."""


@dataclass(frozen=True)
class Gamma2Certificate:
    """Certified two-sided estimate of gamma_2(A).

    upper: certified upper bound (the solved value).
    lower: certified lower bound from the dual weights.
    ellipsoid: E(D) containing every column of A, max diag(D) = upper^2.
    factor_left/factor_right: balanced factorization A = B C with
        max row norm of B and max column norm of C both <= sqrt(upper)
        up to tolerance.
    dual_p/dual_q: the probability weights certifying ``lower``.
    gap: upper - lower.
    converged: whether gap <= tol * upper was reached within budget.
    """

    upper: float
    lower: float
    ellipsoid: Ellipsoid
    factor_left: np.ndarray
    factor_right: np.ndarray
    dual_p: np.ndarray
    dual_q: np.ndarray
    gap: float
    converged: bool


def dual_value(a, p, q) -> float:
    """Nuclear norm of diag(p)^1/2 A diag(q)^1/2; a lower bound on
    gamma_2(A) for any probability vectors p, q."""
    a = as_matrix(a)
    p = np.asarray(p, dtype=float).reshape(-1)
    q = np.asarray(q, dtype=float).reshape(-1)
    if p.shape[0] != a.shape[0] or q.shape[0] != a.shape[1]:
        raise ValueError("weight lengths must match the matrix shape")
    if (p < -1e-12).any() or (q < -1e-12).any():
        raise ValueError("weights must be nonnegative")
    m = np.sqrt(np.clip(p, 0.0, None))[:, None] * a
    m = m * np.sqrt(np.clip(q, 0.0, None))[None, :]
    return nuclear_norm(m)


def uniform_nuclear_lower(a) -> float:
    """gamma_2(A) >= ||A||_* / sqrt(m n): the uniform-weights dual point."""
    a = as_matrix(a)
    m, n = a.shape
    return nuclear_norm(a) / float(np.sqrt(m * n))


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-threshold)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    cond = u - css / idx > 0
    rho = int(np.nonzero(cond)[0][-1]) + 1
    theta = css[rho - 1] / rho
    return np.clip(v - theta, 0.0, None)


def _dual_subgradient(a, p, q, iters: int, step_c: float = 1.0):
    """Projected subgradient ascent with step c / sqrt(k).

    The subgradient of (p, q) -> ||P^1/2 A Q^1/2||_* chains U V^T
    through the diagonal square roots:
        d/dp_i = (U Sigma U^T)_ii / (2 p_i) on the support,
    evaluated here as elementwise products to stay finite at p_i = 0.
    Keeps the best iterate.
    """
    best = (dual_value(a, p, q), p.copy(), q.copy())
    for k in range(1, iters + 1):
        sp = np.sqrt(p)
        sq = np.sqrt(q)
        m = sp[:, None] * a * sq[None, :]
        u, s, vt = np.linalg.svd(m, full_matrices=False)
        z = u @ vt
        # gradient wrt sqrt-weights, chained: d val / d p_i
        gp = ((a * z) @ sq) * 0.5
        gq = ((a * z).T @ sp) * 0.5
        # at p_i = 0 the one-sided derivative along the simplex is finite
        with np.errstate(divide="ignore", invalid="ignore"):
            gp = np.where(sp > 1e-150, gp / np.maximum(sp, 1e-150), gp * 0.0)
            gq = np.where(sq > 1e-150, gq / np.maximum(sq, 1e-150), gq * 0.0)
        g = np.concatenate([gp, gq])
        norm = float(np.linalg.norm(g))
        if norm <= 0.0:
            break
        step = step_c / (np.sqrt(k) * norm)
        p = _project_simplex(p + step * gp)
        q = _project_simplex(q + step * gq)
        val = dual_value(a, p, q)
        if val > best[0]:
            best = (val, p.copy(), q.copy())
    return best


def _dual_alternating(a, p, q, iters: int):
    """Monotone block-coordinate ascent on (Z, p, q).

    Uses ||M||_* = max_{||Z||_2 <= 1} <M, Z>. Given (p, q) the best Z is
    U V^T; given Z and q, maximizing sum_i sqrt(p_i) c_i with
    c = (A o Z) sqrt(q) over the simplex has the closed form
    p ~ (c_+)^2. Each step cannot decrease the objective, and every
    iterate is feasible, hence a valid lower bound.
    """
    best = (dual_value(a, p, q), p.copy(), q.copy())
    flat = 0
    for _ in range(iters):
        m = np.sqrt(p)[:, None] * a * np.sqrt(q)[None, :]
        u, s, vt = np.linalg.svd(m, full_matrices=False)
        z = u @ vt
        c = np.maximum((a * z) @ np.sqrt(q), 0.0)
        denom = float(c @ c)
        if denom <= 0.0:
            break
        p = c * c / denom
        r = np.maximum((a * z).T @ np.sqrt(p), 0.0)
        denom = float(r @ r)
        if denom <= 0.0:
            break
        q = r * r / denom
        val = dual_value(a, p, q)
        if val > best[0] + 1e-13 * max(best[0], 1.0):
            best = (val, p.copy(), q.copy())
            flat = 0
        else:
            if val > best[0]:
                best = (val, p.copy(), q.copy())
            flat += 1
            if flat >= 30:
                break
    return best


def gamma2_lower_dual(
    a,
    *,
    restarts: int = DEFAULT_RESTARTS,
    iters: int = 60,
    polish_iters: int = 300,
    seed: int = 0,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Best dual lower bound found from multiple starts.

    The uniform start and the argmax-entry vertex run the monotone
    alternating ascent directly (on symmetric instances the uniform
    basin already holds the optimum); the ``restarts`` Dirichlet(1)
    samples get a subgradient prelude for exploration before the same
    polish. Deterministic for fixed seed. Returns (value, p, q).
    """
    a = as_matrix(a)
    m, n = a.shape
    if float(np.abs(a).max()) == 0.0:
        return 0.0, np.full(m, 1.0 / m), np.full(n, 1.0 / n)
    rng = np.random.default_rng(seed)
    starts: list[tuple[np.ndarray, np.ndarray, bool]] = []
    starts.append((np.full(m, 1.0 / m), np.full(n, 1.0 / n), False))
    i0, j0 = np.unravel_index(int(np.argmax(np.abs(a))), a.shape)
    ev_p = np.full(m, 1e-9)
    ev_p[i0] = 1.0
    ev_q = np.full(n, 1e-9)
    ev_q[j0] = 1.0
    starts.append((ev_p / ev_p.sum(), ev_q / ev_q.sum(), False))
    for _ in range(max(restarts, 0)):
        starts.append((rng.dirichlet(np.ones(m)), rng.dirichlet(np.ones(n)), True))
    best = (-np.inf, None, None)
    for p0, q0, explore in starts:
        p, q = p0.copy(), q0.copy()
        if explore:
            _, p, q = _dual_subgradient(a, p, q, iters)
        val, p, q = _dual_alternating(a, p, q, polish_iters)
        if val > best[0]:
            best = (val, p, q)
    return float(best[0]), best[1], best[2]


# ---------------------------------------------------------------------------
# Upper bounds: every candidate is an ellipsoid matrix D (any scale); the
# certification step rescales it so that all columns fit exactly and reads
# off the certified value sqrt(eta * max diag).
# ---------------------------------------------------------------------------

_REG_RTOL = 1e-12


def _certified_value(a: np.ndarray, d0: np.ndarray) -> tuple[float, np.ndarray]:
    """Best upper bound obtainable from the ellipsoid shape d0.

    Returns (value, d_scaled) where d_scaled = eta * (d0 + reg I)
    contains every column of a with max diag = value^2.
    """
    d0 = 0.5 * (d0 + d0.T)
    lam, vec = np.linalg.eigh(d0)
    lmax = float(lam[-1]) if lam.size else 0.0
    if lmax <= 0.0:
        return np.inf, d0
    reg = _REG_RTOL * lmax
    lam = np.clip(lam, 0.0, None) + reg
    w = vec.T @ a
    eta = float(np.max(np.sum(w * w / lam[:, None], axis=0)))
    if eta <= 0.0:  # a == 0
        return 0.0, np.zeros_like(d0)
    d_reg = (vec * lam) @ vec.T
    d_scaled = eta * d_reg
    maxdiag = float(np.max(np.diag(d_scaled)))
    return float(np.sqrt(maxdiag)), d_scaled


def _factors_from_scaled(a: np.ndarray, d_scaled: np.ndarray, value: float):
    """Balanced factors A = B C from a scaled certificate ellipsoid.

    d_scaled contains all columns (quadratic form <= 1) and has max
    diagonal value^2. With D = V L V^T (full rank after the caller's
    regularization), B0 = V L^1/2 and C0 = L^-1/2 V^T A reproduce A
    exactly; balancing spreads value evenly across the two factors.
    """
    lam, vec = np.linalg.eigh(0.5 * (d_scaled + d_scaled.T))
    lam = np.clip(lam, 0.0, None)
    lmax = float(lam[-1]) if lam.size else 0.0
    if lmax <= 0.0 or value <= 0.0:
        m, n = a.shape
        return np.zeros((m, 1)), np.zeros((1, n))
    lam = lam + _REG_RTOL * lmax
    root = np.sqrt(lam)
    b0 = vec * root
    c0 = (vec / root).T @ a
    s = 1.0 / np.sqrt(value)
    return b0 * s, c0 / s


def _lift_candidates(a: np.ndarray, p: np.ndarray, q: np.ndarray, floor: float = 1e-12):
    """Primal ellipsoid shapes implied by dual weights, both sides.

    At a dual optimum with singular decomposition
    P^1/2 A Q^1/2 = U Sigma V^T, complementary slackness pins the
    optimal SDP block to P^{-1/2} U Sigma U^T P^{-1/2} (and the
    column-side analogue). Away from optimality these are merely
    candidate shapes; certification decides their worth.
    """
    m, n = a.shape
    pf = np.maximum(p, floor)
    pf = pf / pf.sum()
    qf = np.maximum(q, floor)
    qf = qf / qf.sum()
    mat = np.sqrt(pf)[:, None] * a * np.sqrt(qf)[None, :]
    u, s, vt = np.linalg.svd(mat, full_matrices=False)
    d_row = ((u * s) @ u.T) / np.sqrt(pf)[:, None] / np.sqrt(pf)[None, :]
    v = vt.T
    d_col = ((v * s) @ v.T) / np.sqrt(qf)[:, None] / np.sqrt(qf)[None, :]
    return d_row, d_col


def _dykstra_probe(a, t, x0, max_iter, dist_tol):
    """One feasibility probe of the SDP at level t.

    Alternates (with Dykstra corrections) between the PSD cone and the
    affine/box set {X : X[:m, m:] = A, diag(X) <= t}. Returns
    (feasible, last_psd_iterate, distance, iterations); the PSD iterate
    is always a valid certification seed whether or not the probe
    converged. Plateau detection bails early on clearly infeasible t.
    """
    m, n = a.shape
    size = m + n

    def proj_box(x):
        y = x.copy()
        y[:m, m:] = a
        y[m:, :m] = a.T
        dg = np.diagonal(y).copy()
        np.fill_diagonal(y, np.minimum(dg, t))
        return y

    x = proj_box(np.zeros((size, size))) if x0 is None else x0.copy()
    p_corr = np.zeros((size, size))
    q_corr = np.zeros((size, size))
    last_psd = None
    dist = np.inf
    window: list[float] = []
    for k in range(max_iter):
        w, v = np.linalg.eigh(x + p_corr)
        y = (v * np.clip(w, 0.0, None)) @ v.T
        p_corr = x + p_corr - y
        x2 = proj_box(y + q_corr)
        q_corr = y + q_corr - x2
        dist = float(np.linalg.norm(x2 - y))
        last_psd = y
        x = x2
        if dist < dist_tol:
            return True, y, dist, k + 1
        window.append(dist)
        if len(window) > 120:
            window.pop(0)
            # no meaningful decrease over the window and far from
            # feasible: treat as infeasible at this level
            if k > 300 and dist > 100.0 * dist_tol and window[0] - dist < 1e-3 * dist:
                return False, last_psd, dist, k + 1
    return False, last_psd, dist, max_iter


def _zero_certificate(m: int, n: int) -> Gamma2Certificate:
    return Gamma2Certificate(
        upper=0.0,
        lower=0.0,
        ellipsoid=Ellipsoid(np.zeros((m, m))),
        factor_left=np.zeros((m, 1)),
        factor_right=np.zeros((1, n)),
        dual_p=np.full(m, 1.0 / m),
        dual_q=np.full(n, 1.0 / n),
        gap=0.0,
        converged=True,
    )


def gamma2_upper(
    a,
    *,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    dual: tuple[float, np.ndarray, np.ndarray] | None = None,
    ip_side_cap: int = IP_SIDE_CAP,
    dykstra_dim_cap: int = DYKSTRA_DIM_CAP,
) -> tuple[float, Ellipsoid, np.ndarray, np.ndarray, bool]:
    """Certified upper bound on gamma_2(a).

    Returns (value, ellipsoid, B, C, converged): the ellipsoid contains
    every column of ``a`` and has max diagonal = value^2; A = B C with
    balanced norm bounds. ``converged`` is False when the certified gap
    against the best known lower bound still exceeds ``tol`` after the
    iteration budget (the value is still a valid upper bound).

    ``dual`` may carry a precomputed (value, p, q) triple to avoid
    re-running the dual ascent.
    """
    a = as_matrix(a)
    m, n = a.shape
    if m * m > KRON_ENTRY_CAP:
        raise ValueError(
            f"certificate ellipsoid would have {m * m} entries, "
            f"cap is {KRON_ENTRY_CAP}; transpose or use bound-only routines"
        )
    if float(np.abs(a).max()) == 0.0:
        c = _zero_certificate(m, n)
        return 0.0, c.ellipsoid, c.factor_left, c.factor_right, True

    if dual is None:
        dual = gamma2_lower_dual(a, restarts=restarts, seed=seed)
    lower, p, q = dual
    lower = max(lower, uniform_nuclear_lower(a) * (1.0 - 1e-12))

    d_row, d_col = _lift_candidates(a, p, q)
    # (shape, transposed?) pairs; transposed shapes enclose the rows of A
    candidates = [
        (a @ a.T, False),  # trivial factorization A = A I
        (np.eye(m) * one_to_two_norm(a) ** 2, False),  # A = I A
        (d_row, False),
        (d_col, True),
    ]

    best_val = np.inf
    best_scaled: np.ndarray | None = None
    best_side_t = False
    for mat, side_t in candidates:
        target = a.T if side_t else a
        val, scaled = _certified_value(target, mat)
        if val < best_val:
            best_val, best_scaled, best_side_t = val, scaled, side_t

    def gap_ok() -> bool:
        return best_val - lower <= tol * max(best_val, 1e-300)

    # interior-point refinement on the small side
    if not gap_ok() and min(m, n) <= ip_side_cap:
        pts = a if m <= n else a.T
        try:
            _, w = minimum_height_ellipsoid(pts, tol=min(tol, 1e-9) * 0.01)
            target = a if m <= n else a.T
            val, scaled = _certified_value(target, w)
            if val < best_val:
                best_val, best_scaled, best_side_t = val, scaled, m > n
        except (InteriorPointError, np.linalg.LinAlgError):
            pass

    # Dykstra bisection refinement (general sizes)
    probes_left = 40
    if not gap_ok() and (m + n) <= dykstra_dim_cap:
        dist_tol = 1e-7 * max(float(np.linalg.norm(a)), 1e-300)
        lo_b = lower
        up_b = best_val
        x_warm: np.ndarray | None = None
        while probes_left > 0 and up_b - lo_b > tol * max(up_b, 1e-300):
            t_mid = 0.5 * (lo_b + up_b)
            feasible, y, _, _ = _dykstra_probe(a, t_mid, x_warm, max_iter, dist_tol)
            probes_left -= 1
            if y is not None:
                val, scaled = _certified_value(a, y[:m, :m])
                if val < best_val:
                    best_val, best_scaled, best_side_t = val, scaled, False
            if feasible:
                up_b = min(up_b, best_val, t_mid * (1.0 + 1e-9))
                x_warm = y
            else:
                lo_b = t_mid
            up_b = min(up_b, best_val)

    converged = gap_ok()
    target = a.T if best_side_t else a
    b_t, c_t = _factors_from_scaled(target, best_scaled, best_val)
    if best_side_t:
        b, c = c_t.T, b_t.T
        d_final = best_val * (b @ b.T)
        ell = Ellipsoid(d_final)
    else:
        ell = Ellipsoid(best_scaled)
        b, c = b_t, c_t
    return float(best_val), ell, b, c, converged


def gamma2(
    a,
    *,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    ip_side_cap: int = IP_SIDE_CAP,
    dykstra_dim_cap: int = DYKSTRA_DIM_CAP,
) -> Gamma2Certificate:
    """Two-sided certified gamma_2 computation.

    Runs the dual ascent for a lower bound and weight certificate, then
    the upper-bound stack seeded with those weights, and re-validates
    the assembled certificate before returning it.
    """
    a = as_matrix(a)
    m, n = a.shape
    if float(np.abs(a).max()) == 0.0:
        return _zero_certificate(m, n)
    lower, p, q = gamma2_lower_dual(a, restarts=restarts, seed=seed)
    upper, ell, b, c, converged = gamma2_upper(
        a,
        tol=tol,
        max_iter=max_iter,
        seed=seed,
        restarts=restarts,
        dual=(lower, p, q),
        ip_side_cap=ip_side_cap,
        dykstra_dim_cap=dykstra_dim_cap,
    )
    # weak duality must hold between certified quantities
    if lower > upper * (1.0 + 10.0 * max(tol, 1e-12)):
        raise CertificateError(
            f"certified lower {lower} exceeds certified upper {upper}"
        )
    lower = min(lower, upper)  # guard fp-rounding at closed gaps
    cert = Gamma2Certificate(
        upper=float(upper),
        lower=float(lower),
        ellipsoid=ell,
        factor_left=b,
        factor_right=c,
        dual_p=p,
        dual_q=q,
        gap=float(upper - lower),
        converged=bool(converged),
    )
    check_certificate(cert, a, tol=tol)
    return cert


def check_certificate(cert: Gamma2Certificate, a, *, tol: float = DEFAULT_TOL) -> dict:
    """Re-validate every invariant of a certificate against its matrix.

    Raises CertificateError on any violation; returns measured slacks.
    """
    a = as_matrix(a)
    m, n = a.shape
    scale = max(cert.upper, 1.0)
    report: dict[str, float] = {}

    if not (cert.lower <= cert.upper + tol * scale):
        raise CertificateError(
            f"lower {cert.lower} > upper {cert.upper} + slack"
        )
    report["weak_duality_slack"] = cert.upper - cert.lower

    b, c = cert.factor_left, cert.factor_right
    if b.shape[0] != m or c.shape[1] != n or b.shape[1] != c.shape[0]:
        raise CertificateError(
            f"factor shapes {b.shape} x {c.shape} do not match {a.shape}"
        )
    prod_bound = two_to_infinity_norm(b) * one_to_two_norm(c) if cert.upper > 0 else 0.0
    if prod_bound > cert.upper * (1.0 + tol) + 1e-12:
        raise CertificateError(
            f"factor norms certify {prod_bound}, above upper {cert.upper}"
        )
    report["factor_bound"] = prod_bound

    resid = float(np.linalg.norm(b @ c - a))
    fro = float(np.linalg.norm(a))
    if resid > FACT_RTOL * max(fro, 1e-300):
        raise CertificateError(
            f"factorization residual {resid:.3e} above {FACT_RTOL:.1e} * ||A||_F"
        )
    report["factorization_residual"] = resid

    if cert.ellipsoid.dim != m:
        raise CertificateError(
            f"ellipsoid dim {cert.ellipsoid.dim}, expected {m}"
        )
    inf_norm = ellipsoid_inf_norm(cert.ellipsoid)
    if inf_norm > cert.upper * (1.0 + tol) + 1e-12:
        raise CertificateError(
            f"ellipsoid inf-norm {inf_norm} above upper {cert.upper}"
        )
    worst = 0.0
    for j in range(n):
        worst = max(worst, membership_value(cert.ellipsoid, a[:, j]))
    if fro > 0 and worst > 1.0 + tol:
        raise CertificateError(
            f"column membership value {worst} above 1 + tol"
        )
    report["worst_membership"] = worst

    p, q = cert.dual_p, cert.dual_q
    if (p < -1e-12).any() or (q < -1e-12).any():
        raise CertificateError("dual weights must be nonnegative")
    if abs(p.sum() - 1.0) > 1e-9 or abs(q.sum() - 1.0) > 1e-9:
        if cert.upper > 0:  # zero certificate keeps uniform weights
            raise CertificateError("dual weights must sum to 1")
    lb = dual_value(a, p, q)
    if cert.lower > lb + 1e-8 * scale:
        raise CertificateError(
            f"stored lower {cert.lower} not reproduced by weights ({lb})"
        )
    report["dual_value"] = lb
    return report


# ---------------------------------------------------------------------------
# Certificate text bundles: key=value header lines, then the matrices
# D, B, C, p, q in the matrix text format, each introduced by a
# "# <name>" section line.
# ---------------------------------------------------------------------------


def write_certificate(path, cert: Gamma2Certificate) -> None:
    from .linalg import write_matrix  # local import to reuse formatting
    import io

    def fmt_block(mat):
        buf = io.StringIO()
        mm, nn = mat.shape
        buf.write(f"{mm} {nn}\n")
        for row in mat:
            buf.write(" ".join(f"{x:.17g}" for x in row) + "\n")
        return buf.getvalue()

    with open(path, "w") as fh:
        fh.write(f"upper={cert.upper:.17g}\n")
        fh.write(f"lower={cert.lower:.17g}\n")
        fh.write(f"gap={cert.gap:.17g}\n")
        fh.write(f"converged={1 if cert.converged else 0}\n")
        for name, mat in (
            ("D", cert.ellipsoid.d),
            ("B", cert.factor_left),
            ("C", cert.factor_right),
            ("p", cert.dual_p.reshape(-1, 1)),
            ("q", cert.dual_q.reshape(-1, 1)),
        ):
            fh.write(f"# {name}\n")
            fh.write(fmt_block(np.asarray(mat, dtype=float)))


def read_certificate(path) -> Gamma2Certificate:
    header: dict[str, float] = {}
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                name = line[1:].strip()
                current = []
                sections[name] = current
                continue
            if current is None:
                key, _, val = line.partition("=")
                header[key.strip()] = float(val)
            else:
                current.append(line)

    def parse_block(name):
        lines = sections.get(name)
        if not lines:
            raise ValueError(f"certificate file missing section {name!r}")
        mm, nn = (int(x) for x in lines[0].split())
        rows = [[float(x) for x in ln.split()] for ln in lines[1 : 1 + mm]]
        mat = np.array(rows, dtype=float)
        if mat.shape != (mm, nn):
            raise ValueError(f"section {name!r} shape mismatch")
        return mat

    for key in ("upper", "lower", "gap"):
        if key not in header:
            raise ValueError(f"certificate file missing {key}= line")
    return Gamma2Certificate(
        upper=header["upper"],
        lower=header["lower"],
        ellipsoid=Ellipsoid(parse_block("D")),
        factor_left=parse_block("B"),
        factor_right=parse_block("C"),
        dual_p=parse_block("p").reshape(-1),
        dual_q=parse_block("q").reshape(-1),
        gap=header["gap"],
        converged=bool(int(header.get("converged", 0.0))),
    )


def read_matrix_or_system(path) -> np.ndarray:
    """Read a matrix file, tolerating a set-system label block."""
    mat, _ = read_matrix_with_comments(path)
    return mat
