"""Alternating fractional-programming solver for joint power control and AP-UE association.

The relaxed objective sum_t (w log2(1 + SINR_t) - alpha ||D_t||_1) is lifted in two
steps: a Lagrangian dual transform introduces per-UE auxiliaries Gamma_t (with
closed-form multiplier lambda_t = w'/(1 + Gamma_t), w' = w/ln 2), and a quadratic
transform with auxiliaries u_t replaces the remaining signal/interference ratio.
With (Gamma, u) held at their closed-form optima the lifted objective equals the
original one; for fixed (Gamma, u) it is concave in the power factors and in each
association column, so the two block maximizations never decrease it.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .opt import (dykstra, make_superlevel_projection, pga_maximize,
                  project_box, project_box_polyhedron, project_halfspace_ge)
from .se_model import (SystemParams, qos_satisfied, qos_vector, sinr_all,
                       sinr_terms)

_LN2 = math.log(2.0)
_ETA_FLOOR = 1e-30


class InfeasibleProblemError(RuntimeError):
    """Raised when the QoS constraints cannot be met and the policy is 'error'."""


@dataclass
class AuxState:
    gamma_aux: np.ndarray   # per-UE auxiliary SINR values
    u: np.ndarray           # quadratic-transform auxiliaries
    lam: np.ndarray         # dual multipliers w'/(1 + Gamma), kept for diagnostics


@dataclass(frozen=True)
class SolverOptions:
    epsilon: float = 5e-3
    max_outer_iters: int = 100
    inner_tolerance: float = 1e-7
    rounding_threshold: float = 0.5
    qos_infeasible_policy: str = "report_and_continue"
    max_inner_iters: int = 300

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.rounding_threshold < 1:
            raise ValueError("rounding_threshold must lie in (0, 1)")
        if self.qos_infeasible_policy not in ("error", "report_and_continue"):
            raise ValueError("qos_infeasible_policy must be 'error' or 'report_and_continue'")


@dataclass
class SolveResult:
    eta_star: np.ndarray
    d_relaxed: np.ndarray
    d_binary: np.ndarray
    objective_trace: np.ndarray
    iterations: int
    feasibility: np.ndarray
    wall_time: float


def _wprime(params: SystemParams) -> float:
    return params.prelog / _LN2


def update_gamma(eta, d, gamma, beta, gram, params: SystemParams) -> np.ndarray:
    """Optimal auxiliary values: the current closed-form SINRs."""
    return sinr_all(eta, d, gamma, beta, gram, params)


def lambda_star(gamma_aux, params: SystemParams) -> np.ndarray:
    """Closed-form multipliers w'/(1 + Gamma_t)."""
    return _wprime(params) / (1.0 + np.asarray(gamma_aux, dtype=float))


def update_u(gamma_aux, eta, d, gamma, beta, gram, params: SystemParams) -> np.ndarray:
    """Closed-form quadratic-transform auxiliaries sqrt(w'(1+Gamma) S) / (S + I)."""
    signal, pc, bu, noise = sinr_terms(eta, d, gamma, beta, gram, params)
    total = signal + pc + bu + noise
    return np.sqrt(_wprime(params) * (1.0 + np.asarray(gamma_aux, dtype=float)) * signal) / total


def refresh_aux(eta, d, gamma, beta, gram, params: SystemParams) -> AuxState:
    g = update_gamma(eta, d, gamma, beta, gram, params)
    return AuxState(gamma_aux=g,
                    u=update_u(g, eta, d, gamma, beta, gram, params),
                    lam=lambda_star(g, params))


def block_objective(eta, d, gamma_aux, u, gamma, beta, gram, params: SystemParams) -> float:
    """Quadratic-transform surrogate; a global lower bound of the relaxed objective,
    tight at gamma_aux = SINR(eta, d) and u at its closed-form optimum."""
    gamma_aux = np.asarray(gamma_aux, dtype=float)
    u = np.asarray(u, dtype=float)
    wp = _wprime(params)
    signal, pc, bu, noise = sinr_terms(eta, d, gamma, beta, gram, params)
    total = signal + pc + bu + noise
    val = (params.prelog * np.log2(1.0 + gamma_aux) - wp * gamma_aux
           - u ** 2 * total + 2.0 * u * np.sqrt(wp * (1.0 + gamma_aux) * signal))
    return float(val.sum() - params.alpha * np.abs(np.asarray(d, dtype=float)).sum())


def dual_transform_objective(eta, d, gamma_aux, gamma, beta, gram, params: SystemParams) -> float:
    """Dual-transform surrogate with the ratio term kept explicit; an upper bound of
    block_objective over u and equal to the relaxed objective at gamma_aux = SINR."""
    gamma_aux = np.asarray(gamma_aux, dtype=float)
    wp = _wprime(params)
    signal, pc, bu, noise = sinr_terms(eta, d, gamma, beta, gram, params)
    total = signal + pc + bu + noise
    val = (params.prelog * np.log2(1.0 + gamma_aux) - wp * gamma_aux
           + wp * (1.0 + gamma_aux) * signal / total)
    return float(val.sum() - params.alpha * np.abs(np.asarray(d, dtype=float)).sum())


def _field_products(d, gamma, beta):
    w_mat = np.asarray(d, dtype=float) * gamma
    sg = w_mat.sum(axis=0)
    coh = (w_mat / beta).T @ beta
    ncoh = w_mat.T @ beta
    return sg, coh, ncoh


def _power_coefficients(d, gamma_aux, u, gamma, beta, gram, params: SystemParams):
    """The block objective as a function of eta:  const - lin.eta + b.sqrt(eta)."""
    a = params.antennas_per_ap
    pu = params.uplink_snr
    wp = _wprime(params)
    u = np.asarray(u, dtype=float)
    gamma_aux = np.asarray(gamma_aux, dtype=float)
    sg, coh, ncoh = _field_products(d, gamma, beta)
    g_off = np.asarray(gram, dtype=float) - np.diag(np.diag(gram))
    c_sig = a * a * pu * sg ** 2                      # S_t = c_sig[t] * eta_t
    a_mat = a * a * pu * g_off * coh ** 2 + a * pu * ncoh  # dI_t/deta_s
    n_vec = a * sg                                    # eta-independent part of I_t
    u2 = u ** 2
    lin = u2 * c_sig + a_mat.T @ u2
    b_vec = 2.0 * u * a * np.sqrt(pu * wp * (1.0 + gamma_aux)) * sg
    const = float(np.sum(params.prelog * np.log2(1.0 + gamma_aux) - wp * gamma_aux)
                  - u2 @ n_vec - params.alpha * np.abs(np.asarray(d, dtype=float)).sum())
    return lin, b_vec, const, c_sig, a_mat, n_vec


def block_objective_eta_grad(eta, d, gamma_aux, u, gamma, beta, gram,
                             params: SystemParams) -> np.ndarray:
    """Analytic gradient of block_objective with respect to the power factors."""
    lin, b_vec, _, _, _, _ = _power_coefficients(d, gamma_aux, u, gamma, beta, gram, params)
    eta = np.asarray(eta, dtype=float)
    return -lin + b_vec / (2.0 * np.sqrt(np.maximum(eta, _ETA_FLOOR)))


def block_objective_d_grad(eta, d, gamma_aux, u, gamma, beta, gram,
                           params: SystemParams) -> np.ndarray:
    """Analytic gradient of block_objective with respect to the association entries."""
    a = params.antennas_per_ap
    pu = params.uplink_snr
    wp = _wprime(params)
    eta = np.asarray(eta, dtype=float)
    u = np.asarray(u, dtype=float)
    gamma_aux = np.asarray(gamma_aux, dtype=float)
    d = np.asarray(d, dtype=float)
    sg, coh, _ = _field_products(d, gamma, beta)
    g_off = np.asarray(gram, dtype=float) - np.diag(np.diag(gram))
    k_mat = g_off * coh * eta[None, :]          # k_mat[t, t'] = eta_t' G_tt' coh_tt'
    sig_part = 2.0 * a * a * pu * (eta * sg)[None, :] * gamma
    pc_part = 2.0 * a * a * pu * (gamma / beta) * (beta @ k_mat.T)
    bu_part = a * pu * gamma * (beta @ eta)[:, None]
    noise_part = a * gamma
    d_total = sig_part + pc_part + bu_part + noise_part
    sqrt_part = 2.0 * a * (u * np.sqrt(pu * eta * wp * (1.0 + gamma_aux)))[None, :] * gamma
    return -params.alpha - (u ** 2)[None, :] * d_total + sqrt_part


def _qos_thresholds(params: SystemParams, num_ues: int) -> np.ndarray:
    """SINR thresholds implied by the SE targets: 2^(qos/w) - 1."""
    return 2.0 ** (qos_vector(params, num_ues) / params.prelog) - 1.0


def _dual_power_solve(lin, b_vec, normals, offsets, max_iters=2000, tol=1e-10):
    """Approximate maximizer of -lin.eta + b.sqrt(eta) over the box intersected
    with {normals @ eta >= offsets} via the separable Lagrangian dual.

    For fixed multipliers mu the inner maximization splits per UE with a
    closed-form solution; the convex dual is minimized by projected gradient
    steps with backtracking. Returns the (near-feasible) primal iterate.
    """
    mu = np.zeros(offsets.size)

    def eta_of(m):
        lam = lin - normals.T @ m
        out = np.ones_like(lin)
        pos = lam > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            out[pos] = np.minimum(1.0, (b_vec[pos] / (2.0 * lam[pos])) ** 2)
        return out

    def phi(m):
        e = eta_of(m)
        return (-float(lin @ e) + float(b_vec @ np.sqrt(e))
                + float(m @ (normals @ e - offsets)))

    val = phi(mu)
    step = 1.0
    for _ in range(max_iters):
        e = eta_of(mu)
        grad = normals @ e - offsets
        if (np.max(-np.minimum(grad, 0.0), initial=0.0) <= tol
                and abs(float(mu @ grad)) <= 1e-9 * (1.0 + abs(val))):
            break
        accepted = False
        for _ in range(40):
            mu_new = np.maximum(mu - step * grad, 0.0)
            val_new = phi(mu_new)
            if val_new <= val:
                accepted = True
                break
            step *= 0.5
        if not accepted or not np.any(mu_new - mu):
            break
        mu, val = mu_new, val_new
        step *= 1.5
    return eta_of(mu)


def solve_power(d_fixed, gamma_aux, u, gamma, beta, gram, params: SystemParams,
                options: SolverOptions, eta_init=None) -> np.ndarray:
    """Maximize the block objective over eta in [0,1]^T subject to the QoS rows,
    which are linear in eta. Concave: the sqrt terms are concave, the rest affine."""
    d_fixed = np.asarray(d_fixed, dtype=float)
    num_ues = d_fixed.shape[1]
    lin, b_vec, const, c_sig, a_mat, n_vec = _power_coefficients(
        d_fixed, gamma_aux, u, gamma, beta, gram, params)
    gth = _qos_thresholds(params, num_ues)
    qos_rows = np.flatnonzero(gth > 0)
    if qos_rows.size:
        normals = -gth[qos_rows, None] * a_mat[qos_rows]
        normals[np.arange(qos_rows.size), qos_rows] += c_sig[qos_rows]
        offsets = gth[qos_rows] * n_vec[qos_rows]
        # Unit-normalize the rows so tolerances are distances in eta-space.
        row_norm = np.linalg.norm(normals, axis=1)
        normals /= row_norm[:, None]
        offsets /= row_norm
        norms_sq = np.ones(qos_rows.size)
    else:
        normals = offsets = norms_sq = None

    def fun(x):
        return const - float(lin @ x) + float(b_vec @ np.sqrt(np.maximum(x, 0.0)))

    def grad(x):
        return -lin + b_vec / (2.0 * np.sqrt(np.maximum(x, _ETA_FLOOR)))

    def project(x):
        return project_box_polyhedron(x, normals, offsets, norms_sq)

    def feasible(x, tol=1e-8):
        if np.any(x < -tol) or np.any(x > 1 + tol):
            return False
        if normals is None:
            return True
        return bool(np.all(normals @ x >= offsets - tol * np.maximum(1.0, np.abs(offsets))))

    eta0 = np.ones(num_ues) if eta_init is None else np.asarray(eta_init, dtype=float).copy()
    start = project(eta0)
    # Warm-start candidates: unconstrained separable maximizer, and when QoS
    # rows are present the Lagrangian-dual solution of the constrained block.
    with np.errstate(divide="ignore", invalid="ignore"):
        cf = np.where(lin > 0, np.clip((b_vec / (2.0 * lin)) ** 2, 0.0, 1.0),
                      np.where(b_vec > 0, 1.0, start))
    candidates = [project(cf)]
    if normals is not None:
        candidates.append(project(_dual_power_solve(lin, b_vec, normals, offsets)))
    for cand in candidates:
        if fun(cand) > fun(start):
            start = cand
    x, fx = pga_maximize(fun, grad, project, start,
                         max_iters=options.max_inner_iters, tol=options.inner_tolerance)
    if feasible(eta0) and fun(eta0) > fx:
        x = eta0
    if normals is not None and not feasible(x):
        if options.qos_infeasible_policy == "error":
            raise InfeasibleProblemError("power subproblem: QoS polyhedron unreachable")
        # Best effort: fall back to the feasible warm start when one exists,
        # otherwise keep the near-feasible iterate and let the caller report.
        if feasible(eta0):
            x = eta0
    return np.clip(x, 0.0, 1.0)


def _association_column(t, eta, gamma_aux, u, gamma, beta, gram, params: SystemParams,
                        options: SolverOptions, x0, gth_t):
    """Maximize the block objective over one association column (concave quadratic)."""
    a = params.antennas_per_ap
    pu = params.uplink_snr
    wp = _wprime(params)
    eta = np.asarray(eta, dtype=float)
    gt = gamma[:, t]
    others = np.flatnonzero((np.arange(gamma.shape[1]) != t)
                            & (np.asarray(gram[t], dtype=float) > 0) & (eta > 0))
    w_fac = gt[:, None] * beta[:, others] / beta[:, [t]]     # (M, k) copilot vectors
    omega = a * a * pu * eta[others] * np.asarray(gram[t], dtype=float)[others]
    bfu = gt * (pu * (beta @ eta))                           # beamforming-uncertainty slope
    u_t = float(u[t])
    eta_t = float(eta[t])
    gaux_t = float(gamma_aux[t])
    rho_sig = u_t ** 2 * a * a * pu * eta_t
    rho = u_t ** 2 * omega
    sqrt_coef = 2.0 * u_t * a * math.sqrt(pu * eta_t * wp * (1.0 + gaux_t))
    q = sqrt_coef * gt - u_t ** 2 * a * (bfu + gt) - params.alpha
    const = params.prelog * math.log2(1.0 + gaux_t) - wp * gaux_t

    def fun(x):
        s = float(gt @ x)
        v = w_fac.T @ x
        return const + float(q @ x) - rho_sig * s * s - float(rho @ (v * v))

    def grad(x):
        return q - 2.0 * rho_sig * float(gt @ x) * gt - 2.0 * w_fac @ (rho * (w_fac.T @ x))

    ones = np.ones_like(gt)
    num_aps = gt.shape[0]
    projections = [lambda z: project_box(z),
                   lambda z: project_halfspace_ge(z, ones, 1.0, norm_sq=num_aps)]
    psi_check = None
    start = x0
    if gth_t > 0 and eta_t > 0:
        # Quadratic-transform inner approximation of the QoS set, tight at x0.
        s0 = a * a * pu * eta_t * float(gt @ x0) ** 2
        v0 = w_fac.T @ x0
        i0 = float(omega @ (v0 * v0)) + a * float((bfu + gt) @ x0)
        if s0 > 0 and i0 > 0:
            v_aux = math.sqrt(s0) / i0
            lin_psi = 2.0 * v_aux * a * math.sqrt(pu * eta_t) * gt - v_aux ** 2 * a * (bfu + gt)
            b_psi = w_fac * np.sqrt(v_aux ** 2 * omega)[None, :]

            def psi_fun(x):
                s = b_psi.T @ x
                return float(lin_psi @ x) - float(s @ s) - gth_t

            keep_constraint = True
            if psi_fun(x0) < -1e-9 * max(1.0, gth_t):
                # Warm start violates the target: find a feasible point first, or
                # detect that the target is unreachable and drop the constraint.
                start, psi_max = pga_maximize(
                    psi_fun,
                    lambda x: lin_psi - 2.0 * b_psi @ (b_psi.T @ x),
                    lambda z: project_box_polyhedron(z, ones[None, :], np.ones(1),
                                                     np.array([float(num_aps)])),
                    x0, max_iters=80, tol=options.inner_tolerance)
                keep_constraint = psi_max >= 0.0
                if not keep_constraint:
                    start = x0
            if keep_constraint:
                psi_project = make_superlevel_projection(b_psi, lin_psi, gth_t)
                projections.append(psi_project)
                psi_check = psi_fun

    def project(x):
        # Box clip is the exact projection whenever it lands in the other sets.
        z = np.clip(x, 0.0, 1.0)
        if (float(z.sum()) >= 1.0 - 1e-12
                and (psi_check is None or psi_check(z) >= -1e-12 * max(1.0, gth_t))):
            return z
        z = dykstra(x, projections)
        # Feasibility polish against residual truncation error.
        for _ in range(100):
            z = np.clip(z, 0.0, 1.0)
            cov_ok = float(z.sum()) >= 1.0 - 1e-12
            psi_ok = psi_check is None or psi_check(z) >= -1e-11 * max(1.0, gth_t)
            if cov_ok and psi_ok:
                break
            if not cov_ok:
                z = project_halfspace_ge(z, ones, 1.0, norm_sq=num_aps)
            if not psi_ok:
                z = psi_project(z)
        return z

    x, fx = pga_maximize(fun, grad, project, start,
                         max_iters=options.max_inner_iters, tol=options.inner_tolerance)
    x0_ok = (float(x0.sum()) >= 1.0 - 1e-9
             and np.max(np.abs(project(x0) - x0)) <= 1e-9)
    if x0_ok and fun(x0) > fx:
        x = x0
    return np.clip(x, 0.0, 1.0)


def solve_association(eta_fixed, gamma_aux, u, gamma, beta, gram, params: SystemParams,
                      options: SolverOptions, d_init=None) -> np.ndarray:
    """Maximize the block objective over the relaxed association matrix.

    The problem separates per UE column; each column solve keeps the box,
    coverage (column sum >= 1) and QoS constraints.
    """
    gamma = np.asarray(gamma, dtype=float)
    num_aps, num_ues = gamma.shape
    d = np.ones((num_aps, num_ues)) if d_init is None else np.asarray(d_init, dtype=float).copy()
    gth = _qos_thresholds(params, num_ues)
    out = np.empty_like(d)
    for t in range(num_ues):
        out[:, t] = _association_column(t, eta_fixed, gamma_aux, u, gamma, beta, gram,
                                        params, options, d[:, t].copy(), float(gth[t]))
    return out


def round_association(d_relaxed, options: SolverOptions, gamma) -> np.ndarray:
    """Threshold the relaxed matrix; restore empty columns at the entry with the
    largest relaxed value (ties: larger gamma, then lower AP index)."""
    d_relaxed = np.asarray(d_relaxed, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    binary = (d_relaxed >= options.rounding_threshold).astype(float)
    num_aps = d_relaxed.shape[0]
    for t in np.flatnonzero(binary.sum(axis=0) == 0):
        order = np.lexsort((np.arange(num_aps), -gamma[:, t], -d_relaxed[:, t]))
        binary[order[0], t] = 1.0
    return binary


def _repair_columns(eta, d_binary, d_relaxed, gamma, beta, gram, params: SystemParams) -> np.ndarray:
    """Restore QoS broken by rounding, one UE at a time, by re-adding APs to the
    UE's own column (largest relaxed value first, ties by gamma then AP index).
    A UE's SINR depends only on its own column, so repairs do not interact."""
    qos = qos_vector(params, gamma.shape[1])
    ses = params.prelog * np.log2(1.0 + sinr_all(eta, d_binary, gamma, beta, gram, params))
    out = d_binary.copy()
    num_aps = gamma.shape[0]
    for t in np.flatnonzero(ses + 1e-9 < qos):
        order = np.lexsort((np.arange(num_aps), -gamma[:, t], -d_relaxed[:, t]))
        trial = out.copy()
        best_col, best_se = out[:, t].copy(), ses[t]
        for m in order:
            if trial[m, t] == 1.0:
                continue
            trial[m, t] = 1.0
            se_t = params.prelog * math.log2(
                1.0 + sinr_all(eta, trial, gamma, beta, gram, params)[t])
            if se_t > best_se:
                best_col, best_se = trial[:, t].copy(), se_t
            if se_t + 1e-9 >= qos[t]:
                break
        out[:, t] = best_col
    return out


def _feasibility_powers(d, gamma, beta, gram, params: SystemParams,
                        max_iters=200, margin=1.05) -> np.ndarray:
    """Target-tracking power control toward the QoS SINR thresholds.

    Standard-interference-function iteration eta <- min(1, eta * target/SINR);
    UEs without a QoS target keep full power. Returns the final iterate whether
    or not all targets were reached.
    """
    num_ues = gamma.shape[1]
    gth = _qos_thresholds(params, num_ues)
    eta = np.ones(num_ues)
    for _ in range(max_iters):
        vals = sinr_all(eta, d, gamma, beta, gram, params)
        ratio = np.where(gth > 0, margin * gth / np.maximum(vals, 1e-300), 1.0)
        new = np.clip(eta * ratio, 0.0, 1.0)
        if np.max(np.abs(new - eta)) <= 1e-10 and np.all(vals >= gth):
            return new
        eta = new
    return eta


def alternate(initial_eta, initial_d, gamma, beta, gram, params: SystemParams,
              options: SolverOptions, mode: str = "joint") -> SolveResult:
    """Alternating block maximization with auxiliary refreshes before each block.

    mode selects which blocks run: 'joint', 'power_only' or 'association_only'.
    Stops when the relative change of the post-block objective value falls
    below options.epsilon.
    """
    if mode not in ("joint", "power_only", "association_only"):
        raise ValueError(f"unknown mode: {mode!r}")
    t_start = time.perf_counter()
    gamma = np.asarray(gamma, dtype=float)
    beta = np.asarray(beta, dtype=float)
    gram = np.asarray(gram, dtype=float)
    num_aps, num_ues = gamma.shape
    eta = np.ones(num_ues) if initial_eta is None else np.asarray(initial_eta, dtype=float).copy()
    d = np.ones((num_aps, num_ues)) if initial_d is None else np.asarray(initial_d, dtype=float).copy()
    qos = qos_vector(params, num_ues)
    enforce_qos = bool(np.any(qos > 0))
    power_is_free = mode in ("joint", "power_only")
    if (enforce_qos and power_is_free
            and not qos_satisfied(eta, d, gamma, beta, gram, params).all()):
        eta = _feasibility_powers(d, gamma, beta, gram, params)
        if (not qos_satisfied(eta, d, gamma, beta, gram, params).all()
                and options.qos_infeasible_policy == "error"):
            raise InfeasibleProblemError("no QoS-feasible initialization found")

    trace = []
    f_prev = None
    iterations = 0
    aux = refresh_aux(eta, d, gamma, beta, gram, params)
    for i in range(1, options.max_outer_iters + 1):
        iterations = i
        if mode in ("joint", "power_only"):
            aux = refresh_aux(eta, d, gamma, beta, gram, params)
            eta = solve_power(d, aux.gamma_aux, aux.u, gamma, beta, gram,
                              params, options, eta_init=eta)
        if mode in ("joint", "association_only"):
            aux = refresh_aux(eta, d, gamma, beta, gram, params)
            d = solve_association(eta, aux.gamma_aux, aux.u, gamma, beta, gram,
                                  params, options, d_init=d)
        f_val = block_objective(eta, d, aux.gamma_aux, aux.u, gamma, beta, gram, params)
        trace.append(f_val)
        if f_prev is not None and abs(f_val - f_prev) <= options.epsilon * max(abs(f_prev), 1e-12):
            break
        f_prev = f_val

    d_binary = round_association(d, options, gamma)
    eta_final = eta
    if enforce_qos and not qos_satisfied(eta_final, d_binary, gamma, beta, gram, params).all():
        # Rounding broke a QoS target: re-add APs to the violated columns, then
        # (when power is a free variable) refit the powers on the binary matrix.
        d_binary = _repair_columns(eta_final, d_binary, d, gamma, beta, gram, params)
        if (power_is_free
                and not qos_satisfied(eta_final, d_binary, gamma, beta, gram, params).all()):
            aux_b = refresh_aux(eta_final, d_binary, gamma, beta, gram, params)
            eta_final = solve_power(d_binary, aux_b.gamma_aux, aux_b.u, gamma, beta, gram,
                                    params, options, eta_init=eta_final)
    feasibility = qos_satisfied(eta_final, d_binary, gamma, beta, gram, params)
    if enforce_qos and not feasibility.all() and options.qos_infeasible_policy == "error":
        raise InfeasibleProblemError(
            f"QoS violated for UE(s) {np.flatnonzero(~feasibility).tolist()} after rounding")
    return SolveResult(eta_star=eta_final, d_relaxed=d, d_binary=d_binary,
                       objective_trace=np.asarray(trace), iterations=iterations,
                       feasibility=feasibility, wall_time=time.perf_counter() - t_start)


def curvature_probe(eta, d, gamma, beta, gram, params: SystemParams, step: float = 0.02) -> float:
    """Max absolute finite-difference second derivative of the smooth part of the
    dual-transform objective with respect to each association entry."""
    d = np.asarray(d, dtype=float)
    gamma_aux = update_gamma(eta, d, gamma, beta, gram, params)
    wp = _wprime(params)

    def smooth(dd):
        signal, pc, bu, noise = sinr_terms(eta, dd, gamma, beta, gram, params)
        total = signal + pc + bu + noise
        val = (params.prelog * np.log2(1.0 + gamma_aux) - wp * gamma_aux
               + wp * (1.0 + gamma_aux) * signal / total)
        return float(val.sum())

    f0 = smooth(d)
    worst = 0.0
    num_aps, num_ues = d.shape
    for m in range(num_aps):
        for t in range(num_ues):
            dd = d.copy()
            dd[m, t] = d[m, t] + step
            f_plus = smooth(dd)
            dd[m, t] = d[m, t] - step
            f_minus = smooth(dd)
            worst = max(worst, abs((f_plus - 2.0 * f0 + f_minus) / step ** 2))
    return worst
