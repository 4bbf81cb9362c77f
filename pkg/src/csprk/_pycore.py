"""Pure numpy stage solver, the reference backend.

The stage polynomials are represented by their Legendre coefficients,
lam (s+1, d) for P and mu (r+1, d) for Q. One fixed-point sweep evaluates
the stages at the quadrature nodes, applies the Hamiltonian gradients, and
projects back through the precomputed weight matrices:

    lam <- e0 p0 - h * WAB @ grad_q(P, Q)
    mu  <- e0 q0 + h * WHB @ grad_p(P, Q)

where WAB / WHB already contain the quadrature weights. Iteration stops when
the max-norm coefficient update drops to the tolerance; a final gradient pass
at the converged coefficients yields the reported equation residual and the
step update. Status codes: 0 converged, 1 iteration budget exhausted,
2 non-finite gradient value (the compiled backend mirrors this contract).
"""

import numpy as np


def solve_stage(vp, vq, wab, whb, bw_b, bw_bhat, grad_p, grad_q,
                p0, q0, h, lam, mu, tol, max_iter):
    iterations = 0
    delta = np.inf
    converged = False
    while iterations < max_iter:
        iterations += 1
        pstage = vp @ lam
        qstage = vq @ mu
        pg = grad_q(pstage, qstage)
        qg = grad_p(pstage, qstage)
        if not (np.all(np.isfinite(pg)) and np.all(np.isfinite(qg))):
            return None, None, iterations, delta, 2
        lam_new = -h * (wab @ pg)
        lam_new[0] += p0
        mu_new = h * (whb @ qg)
        mu_new[0] += q0
        delta = max(
            float(np.max(np.abs(lam_new - lam))),
            float(np.max(np.abs(mu_new - mu))),
        )
        lam[...] = lam_new
        mu[...] = mu_new
        if delta <= tol:
            converged = True
            break
    if not converged:
        return None, None, iterations, delta, 1
    pstage = vp @ lam
    qstage = vq @ mu
    pg = grad_q(pstage, qstage)
    qg = grad_p(pstage, qstage)
    if not (np.all(np.isfinite(pg)) and np.all(np.isfinite(qg))):
        return None, None, iterations, delta, 2
    res_l = -h * (wab @ pg)
    res_l[0] += p0
    res_m = h * (whb @ qg)
    res_m[0] += q0
    residual = max(
        float(np.max(np.abs(res_l - lam))),
        float(np.max(np.abs(res_m - mu))),
    )
    p1 = p0 - h * (bw_b @ pg)
    q1 = q0 + h * (bw_bhat @ qg)
    return p1, q1, iterations, residual, 0
