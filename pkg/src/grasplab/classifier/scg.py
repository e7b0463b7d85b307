"""Scaled conjugate gradient: a Hessian-free batch minimizer.

The curvature along the search direction is estimated from a one-sided
finite difference of the gradient, and a self-adjusting scalar regulator
keeps the estimate positive definite.  Steps are only taken when the
quadratic comparison parameter says the actual reduction agrees with the
predicted one; a failed step raises the regulator and leaves the iterate
untouched.

Standard initializers: finite-difference scale 5e-5, regulator 5e-7.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

SIGMA0 = 5e-5
LAMBDA0 = 5e-7
_LAMBDA_MAX = 1e100


@dataclass
class ScgState:
    sigma0: float
    lam: float                 # scalar regulator, never negative
    lam_bar: float             # raised-regulator accumulator
    p: np.ndarray              # search direction
    r: np.ndarray              # residual (negative gradient)
    success: bool
    comparison: float = np.nan  # last comparison parameter
    _delta_raw: float = 0.0
    _norm_p2: float = 0.0


@dataclass
class StepResult:
    accepted: bool
    loss: float
    comparison: float
    converged: bool = False


class ScgOptimizer:
    """Stepwise driver so callers can early-stop on their own criterion.

    fun(x) must return (loss, gradient).
    """

    def __init__(self, fun: Callable, x0: np.ndarray,
                 sigma0: float = SIGMA0, lam0: float = LAMBDA0,
                 gtol: float = 1e-10):
        self.fun = fun
        self.x = np.array(x0, dtype=np.result_type(x0, np.float32), copy=True)
        self.loss, self.grad = fun(self.x)
        self.gtol = gtol
        self.n = self.x.size
        self.k = 1
        self.n_evals = 1
        self._rejected_run = 0
        r = -self.grad
        self.state = ScgState(sigma0, lam0, 0.0, r.copy(), r.copy(), True)

    def step(self) -> StepResult:
        st = self.state
        dtype = self.x.dtype

        if float(np.linalg.norm(st.r)) < self.gtol:
            return StepResult(False, self.loss, st.comparison, converged=True)

        if st.success:
            st._norm_p2 = float(st.p @ st.p)
            norm_p = np.sqrt(st._norm_p2)
            if norm_p == 0.0 or not np.isfinite(norm_p):
                return StepResult(False, self.loss, st.comparison, converged=True)
            sigma_k = st.sigma0 / norm_p
            _, g_probe = self.fun(self.x + dtype.type(sigma_k) * st.p)
            self.n_evals += 1
            st._delta_raw = float(st.p @ (g_probe - self.grad)) / sigma_k

        delta = st._delta_raw + (st.lam - st.lam_bar) * st._norm_p2
        if delta <= 0.0:
            # force the curvature estimate positive definite
            st.lam_bar = 2.0 * (st.lam - delta / st._norm_p2)
            delta = -delta + st.lam * st._norm_p2
            st.lam = st.lam_bar

        mu = float(st.p @ st.r)
        if mu <= 0.0 or not np.isfinite(mu):
            # direction lost conjugacy to the gradient; restart at steepest descent
            st.p = st.r.copy()
            st.success = True
            self.k = 1
            mu = float(st.p @ st.r)
            if mu <= 0.0:
                return StepResult(False, self.loss, st.comparison, converged=True)
            st._norm_p2 = mu
            sigma_k = st.sigma0 / np.sqrt(mu)
            _, g_probe = self.fun(self.x + dtype.type(sigma_k) * st.p)
            self.n_evals += 1
            st._delta_raw = float(st.p @ (g_probe - self.grad)) / sigma_k
            delta = st._delta_raw + st.lam * st._norm_p2
            if delta <= 0.0:
                st.lam_bar = 2.0 * (st.lam - delta / st._norm_p2)
                delta = -delta + st.lam * st._norm_p2
                st.lam = st.lam_bar

        alpha = mu / delta
        trial = self.x + dtype.type(alpha) * st.p
        loss_trial, grad_trial = self.fun(trial)
        self.n_evals += 1
        cmp = 2.0 * delta * (self.loss - loss_trial) / mu**2
        st.comparison = cmp
        accepted = bool(np.isfinite(cmp) and cmp >= 0.0)

        if accepted:
            self._rejected_run = 0
            self.x = trial
            self.loss, self.grad = loss_trial, grad_trial
            r_new = -self.grad
            st.lam_bar = 0.0
            st.success = True
            if self.k % self.n == 0:
                p_new = r_new.copy()
            else:
                beta = (float(r_new @ r_new) - float(r_new @ st.r)) / mu
                p_new = r_new + dtype.type(beta) * st.p
            st.r = r_new
            st.p = p_new
            if cmp >= 0.75:
                st.lam = 0.25 * st.lam
        else:
            st.lam_bar = st.lam
            st.success = False
            self._rejected_run += 1
            if self._rejected_run >= 10:
                # conjugacy or curvature info has gone bad; drop back to a
                # fresh steepest-descent direction instead of spinning
                st.p = st.r.copy()
                st.success = True
                st.lam_bar = 0.0
                self.k = 0
                self._rejected_run = 0

        if cmp < 0.25:
            st.lam = min(st.lam + delta * (1.0 - cmp) / st._norm_p2, _LAMBDA_MAX)

        self.k += 1
        return StepResult(accepted, self.loss, cmp)


def scg_minimize(fun, x0, max_iters: int = 200,
                 sigma0: float = SIGMA0, lam0: float = LAMBDA0,
                 gtol: float = 1e-10, callback=None):
    """Run SCG to convergence or the iteration cap.

    callback(iteration, optimizer, result) may return True to stop early.
    Returns (x, info) where info carries the loss history of all steps.
    """
    opt = ScgOptimizer(fun, x0, sigma0=sigma0, lam0=lam0, gtol=gtol)
    history = []
    converged = False
    for it in range(max_iters):
        res = opt.step()
        history.append((res.accepted, res.loss))
        if res.converged:
            converged = True
            break
        if callback is not None and callback(it, opt, res):
            break
    info = {"loss": opt.loss, "iters": len(history), "history": history,
            "converged": converged, "n_evals": opt.n_evals}
    return opt.x, info
