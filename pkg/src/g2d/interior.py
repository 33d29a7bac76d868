"""Interior-point solver for the minimum-height enclosing ellipsoid program.

The factorization norm of a matrix equals the smallest L-infinity norm of
a 0-centered ellipsoid containing its columns. Writing the ellipsoid as
{x : x^T M x <= 1} with M positive definite, that reads

    minimize   t
    subject to p_j^T M p_j <= 1   for every point p_j   (containment)
               (M^{-1})_ii <= t   for every axis i      (height)
               M > 0,

a convex program in (M, t): the containment constraints are linear and
(M^{-1})_ii is matrix-fractional. The optimum satisfies
gamma_2 = sqrt(t*), and D = (M*)^{-1} is the optimal ellipsoid in dual
form (max diagonal = t*).

This module solves the program by a short-step log-barrier method:

    minimize theta * t
             - sum_j log(1 - p_j^T M p_j)
             - sum_i log det [[M, e_i], [e_i^T, t]]

with the Schur identity log det [[M, e_i], [e_i^T, t]] =
log det M + log(t - (M^{-1})_ii), Newton steps on (svec(M), t), and a
geometric theta schedule. The barrier parameter is
nu = d(d+1) + #points, so the final duality gap is at most nu / theta.

Dimension guidance: the Newton system is dense of order d(d+1)/2 + 1,
so this is intended for the small side of the input (d up to a few
dozen); the number of points only enters through cheap accumulations.
Fully deterministic.
"""

from __future__ import annotations

import numpy as np

_SQ2 = np.sqrt(2.0)


def svec(s: np.ndarray) -> np.ndarray:
    """Upper-triangle vectorization with sqrt(2) off-diagonal scaling.

    Isometric: <S, T>_F = svec(S) . svec(T) for symmetric S, T.
    """
    d = s.shape[0]
    iu = np.triu_indices(d)
    w = np.where(iu[0] == iu[1], 1.0, _SQ2)
    return s[iu] * w


def unsvec(x: np.ndarray, d: int) -> np.ndarray:
    iu = np.triu_indices(d)
    w = np.where(iu[0] == iu[1], 1.0, 1.0 / _SQ2)
    s = np.zeros((d, d))
    s[iu] = x * w
    return s + s.T - np.diag(np.diag(s))


def sym_kron(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """svec-matrix of the operator Delta -> (P Delta Q + Q Delta P) / 2.

    Its quadratic form is svec(Delta)^T (P (x)_s Q) svec(Delta)
    = tr(Delta P Delta Q).
    """
    d = p.shape[0]
    iu, ju = np.triu_indices(d)
    w = np.where(iu == ju, 1.0, _SQ2)
    t4 = (
        np.einsum("ik,jl->ijkl", p, q)
        + np.einsum("il,jk->ijkl", p, q)
        + np.einsum("ik,jl->ijkl", q, p)
        + np.einsum("il,jk->ijkl", q, p)
    ) / 4.0
    m = t4[iu[:, None], ju[:, None], iu[None, :], ju[None, :]]
    return m * w[:, None] * w[None, :]


class InteriorPointError(RuntimeError):
    """The barrier method left its domain or failed to progress."""


def minimum_height_ellipsoid(
    points: np.ndarray,
    *,
    tol: float = 1e-9,
    theta_mult: float = 8.0,
    max_newton_per_stage: int = 60,
    max_stages: int = 40,
) -> tuple[float, np.ndarray]:
    """Solve the program above for a d x N array of points (columns).

    Returns (t, W) with W = M^{-1} the optimal dual ellipsoid matrix;
    the certified objective value is sqrt(t) and max(diag(W)) ~ t.
    ``tol`` is the relative duality-gap target on t.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be a 2-d array (columns = points)")
    d, n = pts.shape
    if d < 1 or n < 1:
        raise ValueError(f"bad point array shape {pts.shape}")
    aj = pts.T  # rows are points
    dim = d * (d + 1) // 2
    nu = d * (d + 1) + n
    iu = np.triu_indices(d)
    wgt = np.where(iu[0] == iu[1], 1.0, _SQ2)

    sq_norms = (aj * aj).sum(axis=1)
    smax = float(sq_norms.max())
    if smax == 0.0:
        # all points at the origin: any tiny ellipsoid works
        return 0.0, np.zeros((d, d))

    # strictly feasible start
    m_mat = np.eye(d) / (smax + 1.0)
    t = (smax + 1.0) * 1.5
    # svec of p_j p_j^T for all points, for gradient/Hessian accumulation
    outer_flat = aj[:, iu[0]] * aj[:, iu[1]] * wgt[None, :]

    def parts(m_try, t_try, theta_now):
        """Domain check plus barrier pieces; None when outside the domain.

        Returns (W, r, c, f) with f = theta * t - d log det M
        - sum log r - sum log c, the objective the line search monitors.
        """
        try:
            chol = np.linalg.cholesky(m_try)
        except np.linalg.LinAlgError:
            return None
        w = np.linalg.inv(m_try)
        r = t_try - np.diag(w)
        c = 1.0 - np.einsum("jk,kl,jl->j", aj, m_try, aj)
        if (r <= 0.0).any() or (c <= 0.0).any():
            return None
        logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
        f = theta_now * t_try - d * logdet - float(np.sum(np.log(r))) - float(
            np.sum(np.log(c))
        )
        return w, r, c, f

    theta = 1.0
    for _stage in range(max_stages):
        for _ in range(max_newton_per_stage):
            pp = parts(m_mat, t, theta)
            if pp is None:
                raise InteriorPointError("iterate left the barrier domain")
            w, r, c, f_cur = pp
            grad_m = -d * w - (w * (1.0 / r)) @ w + (aj.T * (1.0 / c)) @ aj
            g = np.concatenate([svec(grad_m), [theta - float(np.sum(1.0 / r))]])

            # Hessian blocks; s_i = W e_i, so
            #   sum_i (2/r_i) s_i s_i^T = W diag(2/r) W.
            stilde = (w * (2.0 / r)) @ w
            h11 = d * sym_kron(w, w) + sym_kron(w, stilde)
            outs = w.T[:, :, None] * w.T[:, None, :]  # outs[i] = s_i s_i^T
            ui = outs[:, iu[0], iu[1]] * wgt[None, :]
            h11 += (ui.T * (1.0 / r**2)) @ ui
            h11 += (outer_flat.T * (1.0 / c**2)) @ outer_flat
            hcross = ui.T @ (1.0 / r**2)
            h = np.empty((dim + 1, dim + 1))
            h[:dim, :dim] = h11
            h[:dim, dim] = hcross
            h[dim, :dim] = hcross
            h[dim, dim] = float(np.sum(1.0 / r**2))

            jitter = 1e-13 * np.trace(h) / (dim + 1)
            try:
                chol = np.linalg.cholesky(h + jitter * np.eye(dim + 1))
            except np.linalg.LinAlgError:
                chol = np.linalg.cholesky(h + 1e8 * jitter * np.eye(dim + 1))
            delta = -np.linalg.solve(chol.T, np.linalg.solve(chol, g))
            decrement = float(-g @ delta)
            if decrement < 1e-11:
                break
            dm = unsvec(delta[:dim], d)
            dt = float(delta[dim])

            # damped Newton: full steps only inside the quadratic
            # convergence region, 1 / (1 + lambda) otherwise, then
            # Armijo backtracking on the barrier objective
            lam = np.sqrt(max(decrement, 0.0))
            step = 1.0 if lam <= 0.25 else 1.0 / (1.0 + lam)
            accepted = False
            while step > 1e-14:
                pp_new = parts(m_mat + step * dm, t + step * dt, theta)
                if pp_new is not None and pp_new[3] <= f_cur - 0.25 * step * decrement:
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                break  # at the numerical floor for this stage
            m_mat = m_mat + step * dm
            t = t + step * dt
        if nu / theta < tol * max(abs(t), 1.0):
            break
        theta *= theta_mult
    return float(t), np.linalg.inv(m_mat)
