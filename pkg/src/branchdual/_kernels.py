"""Compiled inner loops for the fixed-endpoint bandwidth relaxation.

Positions are 1-based throughout. A "side" computation works in the
coordinate system where the fixed prefix of that side sits at 1..k; the
right side is handled by mirroring positions (p -> n + 1 - p).

Arrays passed in:
  indptr, indices  CSR adjacency of the graph
  dist             (n, n) hop distances, UNREACHABLE for disconnected pairs
  pos              position of each fixed vertex in side coordinates, 0 if free
"""

import numpy as np
from numba import njit

UNREACHABLE = 1 << 30


@njit(cache=True, inline="always")
def _assign_slots(a, b, order, k, hole, used, used_base):
    """Match k windows [a, b] to distinct integer slots, skipping `hole`.

    Windows are taken in deadline order (`order`), each into the earliest
    free slot at or after its release; this greedy is exact for unit jobs.
    `used` is scratch covering slots used_base..used_base + len(used) - 1.
    """
    ok = True
    touched_lo = 1 << 30
    touched_hi = -1
    for t in range(k):
        i = order[t]
        s = a[i]
        while s <= b[i] and (s == hole or used[s - used_base]):
            s += 1
        if s > b[i]:
            ok = False
            break
        used[s - used_base] = True
        if s < touched_lo:
            touched_lo = s
        if s > touched_hi:
            touched_hi = s
    if touched_hi >= 0:
        for s in range(touched_lo, touched_hi + 1):
            used[s - used_base] = False
    return ok


@njit(cache=True, inline="always")
def _sort_by_key(idx, key, k):
    # insertion sort of idx[:k] by key[idx]; k is a vertex degree
    for i in range(1, k):
        x = idx[i]
        kx = key[x]
        j = i - 1
        while j >= 0 and key[idx[j]] > kx:
            idx[j + 1] = idx[j]
            j -= 1
        idx[j + 1] = x


@njit(cache=True)
def prefix_distances(n, dist, seq, nseq, out):
    """out[v] = hop distance from v to the nearest vertex of seq."""
    for v in range(n):
        out[v] = UNREACHABLE
    for t in range(nseq):
        u = seq[t]
        for v in range(n):
            d = dist[u, v]
            if d < out[v]:
                out[v] = d


@njit(cache=True)
def layer_structure(n, indptr, indices, dl, pos, order, counts, par_ptr, par_idx):
    """Free vertices reachable from the prefix, in nondecreasing layer, and
    for each the neighbours exactly one layer closer. Returns the count."""
    for d in range(n + 2):
        counts[d] = 0
    norder = 0
    for v in range(n):
        if pos[v] == 0 and dl[v] < UNREACHABLE:
            counts[dl[v] + 1] += 1
            norder += 1
    for d in range(1, n + 2):
        counts[d] += counts[d - 1]
    for v in range(n):
        if pos[v] == 0 and dl[v] < UNREACHABLE:
            order[counts[dl[v]]] = v
            counts[dl[v]] += 1
    w = 0
    par_ptr[0] = 0
    for i in range(norder):
        v = order[i]
        target = dl[v] - 1
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if dl[u] == target:
                par_idx[w] = u
                w += 1
        par_ptr[i + 1] = w
    return norder


def side_structure(n, indptr, indices, dist, seq, nseq, pos):
    """Python-facing wrapper: layering for a single side."""
    dl = np.empty(n, dtype=np.int64)
    prefix_distances(n, dist, seq, nseq, dl)
    order = np.empty(n, dtype=np.int64)
    counts = np.empty(n + 2, dtype=np.int64)
    par_ptr = np.empty(n + 1, dtype=np.int64)
    par_idx = np.empty(max(1, len(indices)), dtype=np.int64)
    norder = layer_structure(n, indptr, indices, dl, pos, order, counts, par_ptr, par_idx)
    return order, norder, par_ptr, par_idx


@njit(cache=True, inline="always")
def _latest_packing(b, idx, k, rigid, lo, hole, used, slots):
    """Pack windows as late as possible, never using slot `hole`.

    Rigid windows sit at b; the rest go, in decreasing deadline order, to
    the latest free slot <= b. Among all valid placements this maximises
    the earliest slot used, which is returned; -1 means some window cannot
    be placed at or after `lo` (or a rigid window sits on the hole).
    """
    smin = 1 << 30
    w = 0
    ok = True
    for t in range(k):
        if rigid[t]:
            s = b[t]
            if s == hole:
                ok = False
                break
            used[s] = True
            slots[w] = s
            w += 1
            if s < smin:
                smin = s
    if ok:
        for r in range(k - 1, -1, -1):
            t = idx[r]
            if rigid[t]:
                continue
            s = b[t]
            while s >= lo and (used[s] or s == hole):
                s -= 1
            if s < lo:
                ok = False
                break
            used[s] = True
            slots[w] = s
            w += 1
            if s < smin:
                smin = s
    for r in range(w):
        used[slots[r]] = False
    return smin if ok else -1


@njit(cache=True, inline="always")
def side_latest(n, phi, nthis, nother, pos, order, norder, par_ptr, par_idx,
                ell, b, idx, used, rigid, slots):
    """Latest feasible side-position of every vertex for trial bandwidth phi.

    Writes into `ell`; returns False when some free vertex has no position.
    Fixed vertices keep their position; unreachable free vertices get the
    last free position n - nother.
    """
    cap = n - nother
    for v in range(n):
        if pos[v] > 0:
            ell[v] = pos[v]
        else:
            ell[v] = cap
    for i in range(norder):
        v = order[i]
        lo_p = par_ptr[i]
        k = par_ptr[i + 1] - lo_p
        top = 0
        for t in range(k):
            u = par_idx[lo_p + t]
            idx[t] = t
            b[t] = ell[u]
            if b[t] > top:
                top = b[t]
            rigid[t] = pos[u] > 0
        _sort_by_key(idx, b, k)
        smin = _latest_packing(b, idx, k, rigid, nthis + 1, -1, used, slots)
        if smin < 0:
            return False
        p = min(cap, smin + phi)
        # slot p itself is taken by v; only matters when some window reaches it
        while p > nthis and p <= top:
            s2 = _latest_packing(b, idx, k, rigid, nthis + 1, p, used, slots)
            if s2 >= p - phi:
                break
            p -= 1
        if p <= nthis:
            return False
        ell[v] = p
    return True


@njit(cache=True, inline="always")
def fixed_span(n, indptr, indices, posl):
    """Longest edge among fixed vertices (posl: actual positions, 0 = free)."""
    best = 0
    for v in range(n):
        if posl[v] == 0:
            continue
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if posl[u] > 0:
                d = posl[u] - posl[v]
                if d > best:
                    best = d
    return best


@njit(cache=True, inline="always")
def crowding_bound(n, indptr, indices, posl, nl, nr):
    """Free neighbours of a fixed vertex must fit between it and the far end
    of its side's free block; the tightest such count bounds phi below."""
    best = 0
    for u in range(n):
        q = posl[u]
        if q == 0:
            continue
        f = 0
        for e in range(indptr[u], indptr[u + 1]):
            if posl[indices[e]] == 0:
                f += 1
        if f == 0:
            continue
        if q <= nl:
            need = f + nl - q
        else:
            need = f + nr - (n + 1 - q)
        if need > best:
            best = need
    return best


@njit(cache=True)
def _probe(n, phi, nl, nr, posl, posr, ol, nol, ppl, pil, orr, nor, ppr, pir,
           ell, lr, a, b, idx, used, rigid):
    """Both side propagations plus the free-vertex slot assignment."""
    if not side_latest(n, phi, nl, nr, posl, ol, nol, ppl, pil, ell, b, idx, used,
                       rigid, a):
        return False
    if not side_latest(n, phi, nr, nl, posr, orr, nor, ppr, pir, lr, b, idx, used,
                       rigid, a):
        return False
    k = 0
    for v in range(n):
        if posl[v] == 0:
            first = n + 1 - lr[v]
            if first > ell[v]:
                return False
            a[k] = first
            b[k] = ell[v]
            idx[k] = k
            k += 1
    _sort_by_key(idx, b, k)
    return _assign_slots(a, b, idx, k, -1, used, 1)


@njit(cache=True)
def _search(n, indptr, indices, nl, nr, posl, posr, dll, dlr, floor, hint, work, iwork,
            used):
    """Smallest phi >= floor passing every test; n encodes infinity.

    `hint` is a guess at the answer (the first phi probed).
    """
    lo = fixed_span(n, indptr, indices, posl)
    if floor > lo:
        lo = floor
    crowd = crowding_bound(n, indptr, indices, posl, nl, nr)
    if crowd > lo:
        lo = crowd
    hi = n - 1
    if lo > hi:
        return lo
    ol = work[0]
    ppl = work[1]
    orr = work[2]
    ppr = work[3]
    ell = work[4]
    lr = work[5]
    a = work[6]
    b = work[7]
    idx = work[8]
    counts = work[9]
    rigid = used[n + 2:]
    used = used[:n + 2]
    pil = iwork[0]
    pir = iwork[1]
    nol = layer_structure(n, indptr, indices, dll, posl, ol, counts, ppl, pil)
    nor = layer_structure(n, indptr, indices, dlr, posr, orr, counts, ppr, pir)
    start = hint if hint > lo else lo
    if start > hi:
        start = hi
    if _probe(n, start, nl, nr, posl, posr, ol, nol, ppl, pil, orr, nor, ppr, pir,
              ell, lr, a, b, idx, used, rigid):
        # answer lies in [lo, start]; siblings usually land right at the hint
        good = start
        bad = lo - 1
        if start > lo:
            if not _probe(n, start - 1, nl, nr, posl, posr, ol, nol, ppl, pil, orr,
                          nor, ppr, pir, ell, lr, a, b, idx, used, rigid):
                return start
            good = start - 1
    else:
        # gallop upward, then bisect
        step = 1
        bad = start
        good = -1
        while True:
            if bad == hi:
                return n
            trial = bad + step
            if trial >= hi:
                trial = hi
            if _probe(n, trial, nl, nr, posl, posr, ol, nol, ppl, pil, orr, nor, ppr,
                      pir, ell, lr, a, b, idx, used, rigid):
                good = trial
                break
            bad = trial
            step *= 2
    while good - bad > 1:
        mid = (good + bad) // 2
        if _probe(n, mid, nl, nr, posl, posr, ol, nol, ppl, pil, orr, nor, ppr,
                  pir, ell, lr, a, b, idx, used, rigid):
            good = mid
        else:
            bad = mid
    return good


@njit(cache=True)
def _setup(n, indices, lseq, nl, rseq, nr):
    posl = np.zeros(n, dtype=np.int64)
    posr = np.zeros(n, dtype=np.int64)
    for h in range(nl):
        posl[lseq[h]] = h + 1
        posr[lseq[h]] = n - h
    for i in range(nr):
        posl[rseq[i]] = n - i
        posr[rseq[i]] = i + 1
    work = np.empty((10, n + 2), dtype=np.int64)
    iwork = np.empty((2, max(1, indices.shape[0])), dtype=np.int64)
    used = np.zeros(2 * (n + 2), dtype=np.bool_)
    return posl, posr, work, iwork, used


@njit(cache=True)
def min_feasible_phi(n, indptr, indices, dist, lseq, nl, rseq, nr, floor):
    """Smallest phi >= floor for which the partial layout passes all tests.

    Returns n (meaning infinity) if even phi = n - 1 fails.
    """
    posl, posr, work, iwork, used = _setup(n, indices, lseq, nl, rseq, nr)
    dll = np.empty(n, dtype=np.int64)
    dlr = np.empty(n, dtype=np.int64)
    prefix_distances(n, dist, lseq, nl, dll)
    prefix_distances(n, dist, rseq, nr, dlr)
    return _search(n, indptr, indices, nl, nr, posl, posr, dll, dlr, floor, floor,
                   work, iwork, used)


@njit(cache=True)
def child_values(n, indptr, indices, dist, lseq, nl, rseq, nr, right, floor):
    """Relaxation values of every one-vertex extension on one side.

    Entry v holds the value of placing vertex v next on the left (or right
    when `right`), or -1 when v is already placed.
    """
    out = np.full(n, -1, dtype=np.int64)
    posl, posr, work, iwork, used = _setup(n, indices, lseq, nl, rseq, nr)
    dll = np.empty(n, dtype=np.int64)
    dlr = np.empty(n, dtype=np.int64)
    base = np.empty(n, dtype=np.int64)
    prefix_distances(n, dist, lseq, nl, dll)
    prefix_distances(n, dist, rseq, nr, dlr)
    hint = floor
    if right:
        base[:] = dlr
    else:
        base[:] = dll
    for v in range(n):
        if posl[v] != 0:
            continue
        if right:
            posl[v] = n - nr
            posr[v] = nr + 1
            for x in range(n):
                d = dist[v, x]
                dlr[x] = d if d < base[x] else base[x]
            out[v] = _search(n, indptr, indices, nl, nr + 1, posl, posr, dll, dlr,
                             floor, hint, work, iwork, used)
        else:
            posl[v] = nl + 1
            posr[v] = n - nl
            for x in range(n):
                d = dist[v, x]
                dll[x] = d if d < base[x] else base[x]
            out[v] = _search(n, indptr, indices, nl + 1, nr, posl, posr, dll, dlr,
                             floor, hint, work, iwork, used)
        if out[v] < n:
            hint = out[v]
        posl[v] = 0
        posr[v] = 0
    return out
