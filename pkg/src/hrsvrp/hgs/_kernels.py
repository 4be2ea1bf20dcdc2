"""Compiled inner loops: limited-fleet Split and the granular local search.

Routes live in a dense ``int64[m, n + 1]`` matrix with ``rlen[r]`` valid
entries per row. Every candidate move is described as a short list of
pieces ``(route, start, end, reversed)`` per modified route, which lets a
single evaluator price all move types from prefix sums.
"""

import numpy as np
from numba import njit

IMPROVE_EPS = 1e-7
MAX_PIECES = 5


@njit(cache=True)
def route_penalized(length, load, capacity, max_duration, w_cap, w_dur):
    return (length + w_cap * max(0.0, load - capacity)
            + w_dur * max(0.0, length - max_duration))


@njit(cache=True)
def split_dp(tour, dist, demand, service, include_service, capacity,
             max_duration, w_cap, w_dur, m):
    """Shortest-path segmentation of ``tour`` into between ``m - 1`` and ``m`` routes.

    Returns ``(cost, starts)`` where ``starts`` holds the first tour index of
    each used route. Fewer routes are used only when the tour is shorter
    than the admissible route count.
    """
    n = tour.shape[0]
    kmax = min(m, n)
    kmin = min(max(1, m - 1), n)
    inf = np.inf
    p = np.full((kmax + 1, n + 1), inf)
    pred = np.full((kmax + 1, n + 1), -1, dtype=np.int64)
    p[0, 0] = 0.0
    for k in range(1, kmax + 1):
        for i in range(k - 1, n):
            if p[k - 1, i] == inf:
                continue
            inner = 0.0
            load = 0.0
            svc = 0.0
            first = tour[i]
            for j in range(i + 1, n + 1):
                cj = tour[j - 1]
                if j > i + 1:
                    inner += dist[tour[j - 2], cj]
                load += demand[cj]
                svc += service[cj]
                length = dist[0, first] + inner + dist[cj, 0]
                if include_service:
                    length = length + svc
                cost = p[k - 1, i] + route_penalized(length, load, capacity,
                                                     max_duration, w_cap, w_dur)
                if cost < p[k, j]:
                    p[k, j] = cost
                    pred[k, j] = i
    best_k = -1
    best = inf
    for k in range(kmin, kmax + 1):
        if p[k, n] < best:
            best = p[k, n]
            best_k = k
    starts = np.empty(best_k, dtype=np.int64)
    j = n
    for k in range(best_k, 0, -1):
        i = pred[k, j]
        starts[k - 1] = i
        j = i
    return best, starts


@njit(cache=True)
def _rebuild_route(r, routes, rlen, pos, rt, cumd, cumq, cums, rdist, rload,
                   rsvc, dist, demand, service):
    L = rlen[r]
    cumq[r, 0] = 0.0
    cums[r, 0] = 0.0
    if L == 0:
        rdist[r] = 0.0
        rload[r] = 0.0
        rsvc[r] = 0.0
        return
    cumd[r, 0] = 0.0
    for k in range(L):
        c = routes[r, k]
        pos[c] = k
        rt[c] = r
        if k > 0:
            cumd[r, k] = cumd[r, k - 1] + dist[routes[r, k - 1], c]
        cumq[r, k + 1] = cumq[r, k] + demand[c]
        cums[r, k + 1] = cums[r, k] + service[c]
    rdist[r] = dist[0, routes[r, 0]] + cumd[r, L - 1] + dist[routes[r, L - 1], 0]
    rload[r] = cumq[r, L]
    rsvc[r] = cums[r, L]


@njit(cache=True)
def _eval_pieces(pc, npc, routes, cumd, cumq, cums, dist):
    d = 0.0
    q = 0.0
    s = 0.0
    last = 0
    cnt = 0
    for k in range(npc):
        r = pc[k, 0]
        a = pc[k, 1]
        b = pc[k, 2]
        if a > b:
            continue
        if pc[k, 3] == 1:
            first = routes[r, b]
            lst = routes[r, a]
        else:
            first = routes[r, a]
            lst = routes[r, b]
        d += dist[last, first] + (cumd[r, b] - cumd[r, a])
        q += cumq[r, b + 1] - cumq[r, a]
        s += cums[r, b + 1] - cums[r, a]
        last = lst
        cnt += b - a + 1
    if cnt > 0:
        d += dist[last, 0]
    return d, q, s, cnt


@njit(cache=True)
def _write_pieces(pc, npc, routes, buf):
    n = 0
    for k in range(npc):
        r = pc[k, 0]
        a = pc[k, 1]
        b = pc[k, 2]
        if a > b:
            continue
        if pc[k, 3] == 1:
            for t in range(b, a - 1, -1):
                buf[n] = routes[r, t]
                n += 1
        else:
            for t in range(a, b + 1):
                buf[n] = routes[r, t]
                n += 1
    return n


@njit(cache=True)
def _set(pc, k, r, a, b, rev):
    pc[k, 0] = r
    pc[k, 1] = a
    pc[k, 2] = b
    pc[k, 3] = rev


@njit(cache=True)
def _build_move(mt, a, i, b, j, rlen, pa, pb):
    """Fill piece lists for move type ``mt``; returns (nA, nB, valid).

    ``u`` sits at position ``i`` of route ``a``; ``v`` at ``j`` of ``b``
    (``j == -1`` stands for the depot at the start of ``b``). When
    ``a == b`` only ``pa`` is used and ``nB`` is 0.
    """
    La = rlen[a]
    Lb = rlen[b]
    hasx = i + 1 < La
    if a != b:
        hasy = j + 1 < Lb
        if mt == 1:
            _set(pa, 0, a, 0, i - 1, 0); _set(pa, 1, a, i + 1, La - 1, 0)
            _set(pb, 0, b, 0, j, 0); _set(pb, 1, a, i, i, 0); _set(pb, 2, b, j + 1, Lb - 1, 0)
            return 2, 3, True
        if mt == 2 or mt == 3:
            if not hasx:
                return 0, 0, False
            _set(pa, 0, a, 0, i - 1, 0); _set(pa, 1, a, i + 2, La - 1, 0)
            _set(pb, 0, b, 0, j, 0); _set(pb, 1, a, i, i + 1, 1 if mt == 3 else 0)
            _set(pb, 2, b, j + 1, Lb - 1, 0)
            return 2, 3, True
        if mt == 4:
            if j < 0:
                return 0, 0, False
            _set(pa, 0, a, 0, i - 1, 0); _set(pa, 1, b, j, j, 0); _set(pa, 2, a, i + 1, La - 1, 0)
            _set(pb, 0, b, 0, j - 1, 0); _set(pb, 1, a, i, i, 0); _set(pb, 2, b, j + 1, Lb - 1, 0)
            return 3, 3, True
        if mt == 5:
            if j < 0 or not hasx:
                return 0, 0, False
            _set(pa, 0, a, 0, i - 1, 0); _set(pa, 1, b, j, j, 0); _set(pa, 2, a, i + 2, La - 1, 0)
            _set(pb, 0, b, 0, j - 1, 0); _set(pb, 1, a, i, i + 1, 0); _set(pb, 2, b, j + 1, Lb - 1, 0)
            return 3, 3, True
        if mt == 6:
            if j < 0 or not hasx or not hasy:
                return 0, 0, False
            _set(pa, 0, a, 0, i - 1, 0); _set(pa, 1, b, j, j + 1, 0); _set(pa, 2, a, i + 2, La - 1, 0)
            _set(pb, 0, b, 0, j - 1, 0); _set(pb, 1, a, i, i + 1, 0); _set(pb, 2, b, j + 2, Lb - 1, 0)
            return 3, 3, True
        if mt == 8:
            _set(pa, 0, a, 0, i, 0); _set(pa, 1, b, 0, j, 1)
            _set(pb, 0, a, i + 1, La - 1, 1); _set(pb, 1, b, j + 1, Lb - 1, 0)
            return 2, 2, True
        if mt == 9:
            _set(pa, 0, a, 0, i, 0); _set(pa, 1, b, j + 1, Lb - 1, 0)
            _set(pb, 0, b, 0, j, 0); _set(pb, 1, a, i + 1, La - 1, 0)
            return 2, 2, True
        return 0, 0, False

    # same route
    L = La
    if mt == 1:
        if j == i or j == i - 1:
            return 0, 0, False
        if j > i:
            _set(pa, 0, a, 0, i - 1, 0); _set(pa, 1, a, i + 1, j, 0)
            _set(pa, 2, a, i, i, 0); _set(pa, 3, a, j + 1, L - 1, 0)
        else:
            _set(pa, 0, a, 0, j, 0); _set(pa, 1, a, i, i, 0)
            _set(pa, 2, a, j + 1, i - 1, 0); _set(pa, 3, a, i + 1, L - 1, 0)
        return 4, 0, True
    if mt == 2 or mt == 3:
        rev = 1 if mt == 3 else 0
        if not hasx or (j >= i - 1 and j <= i + 1):
            return 0, 0, False
        if j > i + 1:
            _set(pa, 0, a, 0, i - 1, 0); _set(pa, 1, a, i + 2, j, 0)
            _set(pa, 2, a, i, i + 1, rev); _set(pa, 3, a, j + 1, L - 1, 0)
        else:
            _set(pa, 0, a, 0, j, 0); _set(pa, 1, a, i, i + 1, rev)
            _set(pa, 2, a, j + 1, i - 1, 0); _set(pa, 3, a, i + 2, L - 1, 0)
        return 4, 0, True
    if mt == 4:
        if j < 0 or j == i:
            return 0, 0, False
        p = min(i, j)
        q = max(i, j)
        _set(pa, 0, a, 0, p - 1, 0); _set(pa, 1, a, q, q, 0); _set(pa, 2, a, p + 1, q - 1, 0)
        _set(pa, 3, a, p, p, 0); _set(pa, 4, a, q + 1, L - 1, 0)
        return 5, 0, True
    if mt == 5:
        if j < 0 or not hasx or j == i or j == i + 1:
            return 0, 0, False
        if j > i + 1:
            _set(pa, 0, a, 0, i - 1, 0); _set(pa, 1, a, j, j, 0); _set(pa, 2, a, i + 2, j - 1, 0)
            _set(pa, 3, a, i, i + 1, 0); _set(pa, 4, a, j + 1, L - 1, 0)
        else:
            _set(pa, 0, a, 0, j - 1, 0); _set(pa, 1, a, i, i + 1, 0); _set(pa, 2, a, j + 1, i - 1, 0)
            _set(pa, 3, a, j, j, 0); _set(pa, 4, a, i + 2, L - 1, 0)
        return 5, 0, True
    if mt == 6:
        if j < 0 or not hasx or j + 1 >= L or (j > i - 2 and j < i + 2):
            return 0, 0, False
        if j >= i + 2:
            _set(pa, 0, a, 0, i - 1, 0); _set(pa, 1, a, j, j + 1, 0); _set(pa, 2, a, i + 2, j - 1, 0)
            _set(pa, 3, a, i, i + 1, 0); _set(pa, 4, a, j + 2, L - 1, 0)
        else:
            _set(pa, 0, a, 0, j - 1, 0); _set(pa, 1, a, i, i + 1, 0); _set(pa, 2, a, j + 2, i - 1, 0)
            _set(pa, 3, a, j, j + 1, 0); _set(pa, 4, a, i + 2, L - 1, 0)
        return 5, 0, True
    if mt == 7:
        if j < i + 2:
            return 0, 0, False
        _set(pa, 0, a, 0, i, 0); _set(pa, 1, a, i + 1, j, 1); _set(pa, 2, a, j + 1, L - 1, 0)
        return 3, 0, True
    if mt == 10:
        if i < 1:
            return 0, 0, False
        _set(pa, 0, a, 0, i, 1); _set(pa, 1, a, i + 1, L - 1, 0)
        return 2, 0, True
    if mt == 11:
        if i + 2 > L - 1:
            return 0, 0, False
        _set(pa, 0, a, 0, i, 0); _set(pa, 1, a, i + 1, L - 1, 1)
        return 2, 0, True
    return 0, 0, False


@njit(cache=True)
def _balance_value(r, rlen, rlength, free_fleet):
    if free_fleet and rlen[r] == 0:
        return False, 0.0
    return True, rlength[r]


@njit(cache=True)
def _sort_balance(m, rlen, rlength, free_fleet, srt):
    cnt = 0
    vals = np.empty(m)
    for r in range(m):
        inc, v = _balance_value(r, rlen, rlength, free_fleet)
        if inc:
            srt[cnt] = r
            vals[cnt] = v
            cnt += 1
    order = np.argsort(vals[:cnt], kind="mergesort")
    tmp = srt[:cnt].copy()
    for k in range(cnt):
        srt[k] = tmp[order[k]]
    return cnt


@njit(cache=True)
def _range_after(srt, nsrt, rlength, a, b, inc_a, val_a, inc_b, val_b):
    """Route length range after routes ``a`` and ``b`` change (sorted-list lookup)."""
    hi = -np.inf
    lo = np.inf
    found = 0
    for k in range(nsrt - 1, -1, -1):
        r = srt[k]
        if r != a and r != b:
            hi = rlength[r]
            found = 1
            break
    if found:
        for k in range(nsrt):
            r = srt[k]
            if r != a and r != b:
                lo = rlength[r]
                break
    if inc_a:
        hi = max(hi, val_a)
        lo = min(lo, val_a)
    if inc_b:
        hi = max(hi, val_b)
        lo = min(lo, val_b)
    if hi == -np.inf:
        return 0.0
    return hi - lo


@njit(cache=True)
def full_penalized_cost(routes, rlen, m, dist, demand, service, include_service,
                        capacity, max_duration, w_cap, w_dur, w_bal, c, free_fleet):
    """Penalized cost recomputed from the route matrix alone."""
    total = 0.0
    hi = -np.inf
    lo = np.inf
    for r in range(m):
        L = rlen[r]
        d = 0.0
        q = 0.0
        s = 0.0
        last = 0
        for k in range(L):
            cst = routes[r, k]
            d += dist[last, cst]
            q += demand[cst]
            s += service[cst]
            last = cst
        if L > 0:
            d += dist[last, 0]
        length = d + s if include_service else d
        total += route_penalized(length, q, capacity, max_duration, w_cap, w_dur)
        if L > 0 or not free_fleet:
            hi = max(hi, length)
            lo = min(lo, length)
    f2 = hi - lo if hi > -np.inf else 0.0
    return total + w_bal * max(0.0, f2 - c)


@njit(cache=True)
def ls_kernel(routes, rlen, m, order, neigh, route_order, dist, demand, service,
              include_service, capacity, max_duration, w_cap, w_dur, w_bal, c,
              free_fleet, verify, log_pred, log_full, max_loops):
    """First-improvement granular descent; mutates ``routes``/``rlen`` in place.

    Returns the number of applied moves. With ``verify`` set, the predicted
    cost (full cost before the move + evaluated delta) and the full cost
    after the move are written to ``log_pred``/``log_full`` for each of the
    first ``len(log_pred)`` moves.
    """
    n = dist.shape[0] - 1
    pos = np.zeros(n + 1, dtype=np.int64)
    rt = np.zeros(n + 1, dtype=np.int64)
    cumd = np.zeros((m, n + 1))
    cumq = np.zeros((m, n + 2))
    cums = np.zeros((m, n + 2))
    rdist = np.zeros(m)
    rload = np.zeros(m)
    rsvc = np.zeros(m)
    rlength = np.zeros(m)
    rpen = np.zeros(m)
    for r in range(m):
        _rebuild_route(r, routes, rlen, pos, rt, cumd, cumq, cums, rdist, rload,
                       rsvc, dist, demand, service)
        rlength[r] = rdist[r] + rsvc[r] if include_service else rdist[r]
        rpen[r] = route_penalized(rlength[r], rload[r], capacity, max_duration, w_cap, w_dur)
    srt = np.zeros(m, dtype=np.int64)
    nsrt = _sort_balance(m, rlen, rlength, free_fleet, srt)

    pa = np.zeros((MAX_PIECES, 4), dtype=np.int64)
    pb = np.zeros((MAX_PIECES, 4), dtype=np.int64)
    bufa = np.zeros(n + 1, dtype=np.int64)
    bufb = np.zeros(n + 1, dtype=np.int64)
    G = neigh.shape[1]
    nmoves = 0
    nlog = log_pred.shape[0]
    loops = 0
    improved = True
    while improved and loops < max_loops:
        improved = False
        loops += 1
        for ui in range(order.shape[0]):
            u = order[ui]
            for vi in range(G + m):
                # neighbours first, then the depot of every route
                if vi < G:
                    v = neigh[u, vi]
                    b = rt[v]
                    j = pos[v]
                else:
                    b = route_order[vi - G]
                    j = -1
                for mt in range(1, 12):
                    a = rt[u]
                    i = pos[u]
                    if j == -1:
                        if a != b and not (mt <= 3 or mt == 8 or mt == 9):
                            continue
                        if a == b and not (mt <= 3 or mt >= 10):
                            continue
                    elif mt >= 10:
                        continue
                    nA, nB, ok = _build_move(mt, a, i, b, j, rlen, pa, pb)
                    if not ok:
                        continue
                    dA, qA, sA, cA = _eval_pieces(pa, nA, routes, cumd, cumq, cums, dist)
                    lenA = dA + sA if include_service else dA
                    penA = route_penalized(lenA, qA, capacity, max_duration, w_cap, w_dur)
                    delta = penA - rpen[a]
                    if a != b:
                        dB, qB, sB, cB = _eval_pieces(pb, nB, routes, cumd, cumq, cums, dist)
                        lenB = dB + sB if include_service else dB
                        penB = route_penalized(lenB, qB, capacity, max_duration, w_cap, w_dur)
                        delta += penB - rpen[b]
                        incB = cB > 0 or not free_fleet
                    else:
                        lenB = 0.0
                        cB = 0
                        incB = False
                    incA = cA > 0 or not free_fleet
                    if nsrt > 0:
                        old_range = rlength[srt[nsrt - 1]] - rlength[srt[0]]
                    else:
                        old_range = 0.0
                    bb = b if a != b else a
                    new_range = _range_after(srt, nsrt, rlength, a, bb, incA, lenA, incB, lenB)
                    delta += w_bal * (max(0.0, new_range - c) - max(0.0, old_range - c))
                    if delta > -IMPROVE_EPS:
                        continue
                    base = 0.0
                    if verify and nmoves < nlog:
                        base = full_penalized_cost(routes, rlen, m, dist, demand, service,
                                                   include_service, capacity, max_duration,
                                                   w_cap, w_dur, w_bal, c, free_fleet)
                    na = _write_pieces(pa, nA, routes, bufa)
                    nb = 0
                    if a != b:
                        nb = _write_pieces(pb, nB, routes, bufb)
                    for t in range(na):
                        routes[a, t] = bufa[t]
                    rlen[a] = na
                    if a != b:
                        for t in range(nb):
                            routes[b, t] = bufb[t]
                        rlen[b] = nb
                    for r in (a, bb):
                        _rebuild_route(r, routes, rlen, pos, rt, cumd, cumq, cums,
                                       rdist, rload, rsvc, dist, demand, service)
                        rlength[r] = rdist[r] + rsvc[r] if include_service else rdist[r]
                        rpen[r] = route_penalized(rlength[r], rload[r], capacity,
                                                  max_duration, w_cap, w_dur)
                    nsrt = _sort_balance(m, rlen, rlength, free_fleet, srt)
                    if verify and nmoves < nlog:
                        log_pred[nmoves] = base + delta
                        log_full[nmoves] = full_penalized_cost(
                            routes, rlen, m, dist, demand, service, include_service,
                            capacity, max_duration, w_cap, w_dur, w_bal, c, free_fleet)
                    nmoves += 1
                    improved = True
                    # positions moved; re-read v's location before the next move type
                    if vi < G:
                        b = rt[v]
                        j = pos[v]
    return nmoves
