"""Compiled inner loops for the marginal Rasch fit.

Pure functions over plain arrays; all tie-breaking and convergence logic is
deterministic so results are bitwise reproducible for identical inputs.
"""

import math

import numba as nb
import numpy as np


@nb.njit(cache=True)
def _log_expit_pair(z):
    """(log sigmoid(z), log sigmoid(-z)), numerically stable."""
    if z >= 0.0:
        t = math.log1p(math.exp(-z))
        return -t, -z - t
    t = math.log1p(math.exp(z))
    return z - t, -t


@nb.njit(cache=True)
def _resp_loglik(Yu, delta, theta, L):
    """Fill L[u, k] with the response log-likelihood of pattern u at node k."""
    U, I = Yu.shape
    K = theta.shape[0]
    la = np.empty((I, K))
    lb = np.empty((I, K))
    for i in range(I):
        for k in range(K):
            a, b = _log_expit_pair(theta[k] - delta[i])
            la[i, k] = a
            lb[i, k] = b
    for u in range(U):
        for k in range(K):
            s = 0.0
            for i in range(I):
                s += la[i, k] if Yu[u, i] == 1 else lb[i, k]
            L[u, k] = s


@nb.njit(cache=True)
def _marginal_ll_grad(Yu, c, x, logw, delta, sigma, L):
    """Marginal log-likelihood and its derivative in sigma (delta fixed)."""
    U, I = Yu.shape
    K = x.shape[0]
    theta = sigma * x
    _resp_loglik(Yu, delta, theta, L)
    psum = np.empty(K)
    for k in range(K):
        s = 0.0
        for i in range(I):
            s += 1.0 / (1.0 + math.exp(delta[i] - theta[k]))
        psum[k] = s
    ll = 0.0
    grad = 0.0
    for u in range(U):
        ysum = 0.0
        for i in range(I):
            ysum += Yu[u, i]
        m = -1e308
        for k in range(K):
            v = L[u, k] + logw[k]
            if v > m:
                m = v
        tot = 0.0
        gsum = 0.0
        for k in range(K):
            g = math.exp(L[u, k] + logw[k] - m)
            tot += g
            gsum += g * x[k] * (ysum - psum[k])
        ll += c[u] * (m + math.log(tot))
        grad += c[u] * gsum / tot
    return ll, grad


@nb.njit(cache=True)
def _maximize_sigma(Yu, c, x, logw, delta, sigma, lo, hi, L):
    """Maximize the marginal log-likelihood over sigma in [lo, hi].

    Brackets a sign change of the derivative starting from the incumbent,
    then runs safeguarded secant/bisection. Falls back to the incumbent if
    no improvement is found, so the recorded likelihood never decreases.
    """
    f0, g0 = _marginal_ll_grad(Yu, c, x, logw, delta, sigma, L)
    a = sigma
    b = sigma
    ga = g0
    gb = g0
    fa = f0
    fb = f0
    # bracket geometrically from the incumbent; late in the EM the optimum
    # barely moves, so start with a 5% step and square the factor
    factor = 1.05
    if g0 > 0.0:
        # optimum above the incumbent
        while b < hi:
            b = min(b * factor, hi)
            factor *= factor
            fb, gb = _marginal_ll_grad(Yu, c, x, logw, delta, b, L)
            if gb <= 0.0:
                break
            a, ga, fa = b, gb, fb
        if gb > 0.0:
            return hi if fb >= f0 else sigma
    elif g0 < 0.0:
        while a > lo:
            a = max(a / factor, lo)
            factor *= factor
            fa, ga = _marginal_ll_grad(Yu, c, x, logw, delta, a, L)
            if ga >= 0.0:
                break
            b, gb, fb = a, ga, fa
        if ga < 0.0:
            return lo if fa >= f0 else sigma
    else:
        return sigma
    # ga >= 0 >= gb on [a, b]; find the stationary point
    for _ in range(100):
        if b - a < 1e-9:
            break
        if ga != gb:
            s = a - ga * (b - a) / (gb - ga)
        else:
            s = 0.5 * (a + b)
        mid = 0.5 * (a + b)
        if not (a + 1e-12 < s < b - 1e-12):
            s = mid
        fs, gs = _marginal_ll_grad(Yu, c, x, logw, delta, s, L)
        if gs > 0.0:
            a, ga = s, gs
        else:
            b, gb = s, gs
    s = 0.5 * (a + b)
    fs, gs = _marginal_ll_grad(Yu, c, x, logw, delta, s, L)
    return s if fs >= f0 else sigma


@nb.njit(cache=True)
def _newton_delta(delta, theta, nk, R, max_steps=50):
    """Exact M-step for the difficulties: damped Newton per item."""
    I = delta.shape[0]
    K = theta.shape[0]
    d = delta.copy()
    ri = np.empty(I)
    scale = 1.0
    for i in range(I):
        s = 0.0
        for k in range(K):
            s += R[i, k]
        ri[i] = s
        scale += s

    score = np.empty(I)
    hess = np.empty(I)
    for i in range(I):
        sc = 0.0
        h = 0.0
        for k in range(K):
            p = 1.0 / (1.0 + math.exp(d[i] - theta[k]))
            sc += nk[k] * p
            h += nk[k] * p * (1.0 - p)
        score[i] = sc - ri[i]
        hess[i] = h

    for _ in range(max_steps):
        moved = False
        for i in range(I):
            if abs(score[i]) < 1e-12 * scale:
                continue
            step = score[i] / max(hess[i], 1e-300)
            if step > 5.0:
                step = 5.0
            elif step < -5.0:
                step = -5.0
            if abs(step) < 1e-11:
                continue
            for _half in range(12):
                cand = d[i] + step
                sc = 0.0
                h = 0.0
                for k in range(K):
                    p = 1.0 / (1.0 + math.exp(cand - theta[k]))
                    sc += nk[k] * p
                    h += nk[k] * p * (1.0 - p)
                sc -= ri[i]
                if abs(sc) <= abs(score[i]) + 1e-12 * scale:
                    d[i] = cand
                    score[i] = sc
                    hess[i] = h
                    moved = True
                    break
                step *= 0.5
        if not moved:
            break
    return d


@nb.njit(cache=True)
def _em_fit(Yu, c, x, logw, delta0, sigma0, tol, max_iter, sig_lo, sig_hi):
    """Full coordinate-EM loop; returns (delta, sigma, ll_trace, iters, conv)."""
    U, I = Yu.shape
    K = x.shape[0]
    L = np.empty((U, K))
    delta = delta0.copy()
    sigma = sigma0
    ll_trace = np.empty(max_iter + 1)
    converged = False
    it_done = 0
    P = 0.0
    for u in range(U):
        P += c[u]
    for it in range(1, max_iter + 1):
        theta = sigma * x
        _resp_loglik(Yu, delta, theta, L)
        ll = 0.0
        nk = np.zeros(K)
        R = np.zeros((I, K))
        for u in range(U):
            m = -1e308
            for k in range(K):
                v = L[u, k] + logw[k]
                if v > m:
                    m = v
            tot = 0.0
            for k in range(K):
                tot += math.exp(L[u, k] + logw[k] - m)
            ll += c[u] * (m + math.log(tot))
            for k in range(K):
                g = c[u] * math.exp(L[u, k] + logw[k] - m) / tot
                nk[k] += g
                for i in range(I):
                    if Yu[u, i] == 1:
                        R[i, k] += g
        ll_trace[it - 1] = ll

        d = _newton_delta(delta, theta, nk, R)
        sigma_new = _maximize_sigma(Yu, c, x, logw, d, sigma, sig_lo, sig_hi, L)

        change = abs(sigma_new - sigma)
        for i in range(I):
            ch = abs(d[i] - delta[i])
            if ch > change:
                change = ch
        delta = d
        sigma = sigma_new
        it_done = it
        if change < tol:
            converged = True
            break

    ll, _ = _marginal_ll_grad(Yu, c, x, logw, delta, sigma, L)
    ll_trace[it_done] = ll
    return delta, sigma, ll_trace[: it_done + 1].copy(), it_done, converged
