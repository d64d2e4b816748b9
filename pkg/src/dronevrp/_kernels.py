"""Compiled copies of the cost function and the annealing loop.

Every floating point operation here is performed in the same order as in
:mod:`dronevrp.route_cost`, so results match the reference implementation
exactly.  Keep the two in step when editing either.

Parameter packing (see :func:`pack_params`):
    fp = [tau, v, alpha, beta, xi, eps, K, Q, F, B, T, fixed_b]   (fixed_b <= 0: off)
    ip = [M, phi, reuse]
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

TAU, SPEED, ALPHA, BETA, XI, EPS, BIGK, CAP, FCOST, BUDGET, TLIM, FIXB = range(12)
MAXD, PHI, REUSE = range(3)


def pack_params(scn, phi, variant):
    p = scn.params
    fp = np.array([
        p.service_time, p.speed, p.power_model.alpha, p.power_model.beta,
        p.energy_density, p.energy_price, p.big_k, p.capacity, p.drone_cost,
        p.budget, p.time_limit,
        variant.battery_weight if variant.battery_weight is not None else 0.0,
    ], dtype=np.float64)
    ip = np.array([p.max_drones, int(phi), int(variant.reuse)], dtype=np.int64)
    return fp, ip


@njit(cache=True)
def _list_schedule(pd, qd, nr, n, heap_a, heap_i):
    if n >= nr:
        latest = 0.0
        for k in range(nr):
            if pd[k] > latest:
                latest = pd[k]
        return latest
    for k in range(n):
        heap_a[k] = 0.0
        heap_i[k] = k
    latest = 0.0
    for r in range(nr):
        arrival = heap_a[0]
        if arrival + pd[r] > latest:
            latest = arrival + pd[r]
        # replace the root and sift down on (arrival, index)
        na = arrival + qd[r]
        ni = heap_i[0]
        pos = 0
        while True:
            child = 2 * pos + 1
            if child >= n:
                break
            right = child + 1
            if right < n and (heap_a[right] < heap_a[child]
                              or (heap_a[right] == heap_a[child] and heap_i[right] < heap_i[child])):
                child = right
            if heap_a[child] < na or (heap_a[child] == na and heap_i[child] < ni):
                heap_a[pos] = heap_a[child]
                heap_i[pos] = heap_i[child]
                pos = child
            else:
                break
        heap_a[pos] = na
        heap_i[pos] = ni
    return latest


@njit(cache=True)
def evaluate(s, dist, dem, fp, ip, pd, qd, heap_a, heap_i):
    """Returns (c, l, lambda, gamma, n, penalized)."""
    tau = fp[TAU]
    v = fp[SPEED]
    alpha = fp[ALPHA]
    beta = fp[BETA]
    xi = fp[XI]
    eps = fp[EPS]
    K = fp[BIGK]
    Q = fp[CAP]
    fixb = fp[FIXB]
    L = s.shape[0]

    # energy, back to front
    t = 0.0
    omega = 0.0
    y = 0.0
    lam = 0.0
    penalized = False
    for k in range(L - 2, -1, -1):
        i = s[k + 1]
        j = s[k]
        if i != 0 or j != 0:
            tij = tau + dist[i, j] / v
            t += tij
            omega += y * tij
            y += dem[j]
            if j == 0 and i != 0:
                if fixb <= 0.0:
                    num = alpha * omega + beta * t
                    den = 1.0 - (alpha / xi) * t
                    if den == 0.0:
                        E = math.inf if num > 0 else 0.0
                    else:
                        E = num / den
                    if not math.isfinite(E):
                        E = K * K
                    if E > 0:
                        cost = E * eps
                    else:
                        cost = -K * (E * eps)
                        penalized = True
                    battery = E / xi
                else:
                    E = xi * fixb
                    cost = E * eps
                    needed = alpha * (omega + fixb * t) + beta * t
                    if needed > E:
                        cost += K * (needed - E) * eps
                        penalized = True
                    battery = fixb
                if y + battery > Q:
                    cost += K * (y + battery - Q)
                    penalized = True
                lam += cost
                t = 0.0
                omega = 0.0
                y = 0.0

    # route delivery / arrival times, front to back
    nr = 0
    p = 0.0
    q = 0.0
    for k in range(1, L):
        i = s[k]
        j = s[k - 1]
        if i != 0 or j != 0:
            p = q
            q += tau + dist[i, j] / v
            if i == 0 and j != 0:
                pd[nr] = p
                qd[nr] = q
                nr += 1
                q = 0.0

    # number of drones
    M = ip[MAXD]
    T = fp[TLIM]
    if ip[REUSE] == 0:
        n = nr if nr > 1 else 1
    elif ip[PHI] != 0:
        lo = 1
        hi = M
        while lo <= hi - 1:
            mid = lo + (hi - lo) // 2
            if _list_schedule(pd, qd, nr, mid, heap_a, heap_i) <= T:
                hi = mid
            else:
                lo = mid + 1
        n = lo
        if _list_schedule(pd, qd, nr, n, heap_a, heap_i) > T:
            n = hi
    else:
        spare = (fp[BUDGET] - lam) / fp[FCOST]
        if spare >= M:
            n = M
        else:
            n = int(math.floor(spare))
            if n < 1:
                n = 1
    gamma = n * fp[FCOST]
    l = _list_schedule(pd, qd, nr, n, heap_a, heap_i)

    c = lam + gamma
    B = fp[BUDGET]
    if c > B:
        excess = c - B
        c = c + K * excess
        l = l + K * excess
        penalized = True
    elif l > T:
        excess = l - T
        c = c + K * excess
        l = l + K * excess
        penalized = True
    return c, l, lam, gamma, n, penalized


@njit(cache=True)
def _objective(s, dist, dem, fp, ip, pd, qd, heap_a, heap_i):
    c, l, lam, gamma, n, pen = evaluate(s, dist, dem, fp, ip, pd, qd, heap_a, heap_i)
    return c if ip[PHI] != 0 else l


@njit(cache=True)
def exchange_into(out, s, rule, i, j):
    """Write rule(s, i, j) into ``out``: 1 swap, 2 relocate, 3 two-opt."""
    out[:] = s
    if rule == 1:
        out[i] = s[j]
        out[j] = s[i]
    elif rule == 2:
        if i < j:
            out[i:j] = s[i + 1:j + 1]
            out[j] = s[i]
        elif i > j:
            out[j + 1:i + 1] = s[j:i]
            out[j] = s[i]
    else:
        lo = min(i, j)
        hi = max(i, j)
        for k in range(hi - lo + 1):
            out[lo + k] = s[hi - k]


@njit(cache=True)
def count_phases(t0, tf, mu):
    temp = t0
    n = 0
    while temp > tf:
        temp = mu * temp
        n += 1
    return n


@njit(cache=True)
def anneal(s0, dist, dem, fp, ip, t0, tf, mu, rounds, rng):
    L = s0.shape[0]
    nmax = (L - 1) // 2 + 1
    pd = np.empty(nmax)
    qd = np.empty(nmax)
    heap_a = np.empty(nmax)
    heap_i = np.empty(nmax, dtype=np.int64)

    cur = s0.copy()
    cand = s0.copy()
    obj = _objective(cur, dist, dem, fp, ip, pd, qd, heap_a, heap_i)

    phases = count_phases(t0, tf, mu)
    temps = np.empty(phases)
    accepts = np.zeros(phases, dtype=np.int64)
    objs = np.empty(phases)
    bests = np.empty(phases)

    temp = t0
    ph = 0
    while temp > tf:
        temp = mu * temp
        best = obj
        for _ in range(rounds):
            i = rng.integers(1, L - 1)
            j = rng.integers(1, L - 1)
            rule = rng.integers(1, 4)
            exchange_into(cand, cur, rule, i, j)
            x = rng.random()
            new = _objective(cand, dist, dem, fp, ip, pd, qd, heap_a, heap_i)
            delta = new - obj
            if delta <= 0.0 or math.exp(-delta / temp) >= x:
                tmp = cur
                cur = cand
                cand = tmp
                obj = new
                accepts[ph] += 1
            if obj < best:
                best = obj
        temps[ph] = temp
        objs[ph] = obj
        bests[ph] = best
        ph += 1
    return cur, temps, accepts, objs, bests
