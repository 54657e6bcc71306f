"""Compiled BFS kernels over CSR adjacency.

All kernels take ``indptr``/``indices`` arrays of an undirected graph whose
vertices are the dense indices ``0..n-1``. Unreachable distances are -1.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def bfs(indptr, indices, src):
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    dist[src] = 0
    queue[0] = src
    head, tail = 0, 1
    while head < tail:
        v = queue[head]
        head += 1
        dv = dist[v] + 1
        for j in range(indptr[v], indptr[v + 1]):
            w = indices[j]
            if dist[w] < 0:
                dist[w] = dv
                queue[tail] = w
                tail += 1
    return dist


@njit(cache=True)
def eccentricities(indptr, indices):
    """Eccentricity of every vertex, -1 where some vertex is unreachable."""
    n = indptr.shape[0] - 1
    ecc = np.empty(n, np.int64)
    dist = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    for s in range(n):
        dist[:] = -1
        dist[s] = 0
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            v = queue[head]
            head += 1
            dv = dist[v] + 1
            for j in range(indptr[v], indptr[v + 1]):
                w = indices[j]
                if dist[w] < 0:
                    dist[w] = dv
                    queue[tail] = w
                    tail += 1
        ecc[s] = dist[queue[tail - 1]] if tail == n else -1
    return ecc


@njit(cache=True)
def distance_sums(indptr, indices):
    """Sum of distances from each vertex and the number of vertices it reaches."""
    n = indptr.shape[0] - 1
    total = np.zeros(n, np.int64)
    reached = np.zeros(n, np.int64)
    dist = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    for s in range(n):
        dist[:] = -1
        dist[s] = 0
        queue[0] = s
        head, tail = 0, 1
        acc = 0
        while head < tail:
            v = queue[head]
            head += 1
            dv = dist[v] + 1
            for j in range(indptr[v], indptr[v + 1]):
                w = indices[j]
                if dist[w] < 0:
                    dist[w] = dv
                    acc += dv
                    queue[tail] = w
                    tail += 1
        total[s] = acc
        reached[s] = tail
    return total, reached


@njit(cache=True)
def brandes(indptr, indices):
    """Unnormalized betweenness, each unordered pair counted once."""
    n = indptr.shape[0] - 1
    bc = np.zeros(n)
    dist = np.empty(n, np.int64)
    sigma = np.empty(n)
    delta = np.empty(n)
    order = np.empty(n, np.int64)
    for s in range(n):
        dist[:] = -1
        sigma[:] = 0.0
        delta[:] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head, tail = 0, 1
        while head < tail:
            v = order[head]
            head += 1
            dv = dist[v] + 1
            for j in range(indptr[v], indptr[v + 1]):
                w = indices[j]
                if dist[w] < 0:
                    dist[w] = dv
                    order[tail] = w
                    tail += 1
                if dist[w] == dv:
                    sigma[w] += sigma[v]
        # predecessors of w are the neighbours one level closer to s
        for i in range(tail - 1, 0, -1):
            w = order[i]
            coeff = (1.0 + delta[w]) / sigma[w]
            dw = dist[w] - 1
            for j in range(indptr[w], indptr[w + 1]):
                v = indices[j]
                if dist[v] == dw:
                    delta[v] += sigma[v] * coeff
            bc[w] += delta[w]
    return bc / 2.0


@njit(cache=True)
def csr_from_edges(src, dst, n):
    deg = np.zeros(n + 1, np.int64)
    for i in range(src.shape[0]):
        deg[src[i] + 1] += 1
        deg[dst[i] + 1] += 1
    indptr = np.cumsum(deg)
    fill = indptr[:-1].copy()
    indices = np.empty(2 * src.shape[0], np.int64)
    for i in range(src.shape[0]):
        a, b = src[i], dst[i]
        indices[fill[a]] = b
        fill[a] += 1
        indices[fill[b]] = a
        fill[b] += 1
    return indptr, indices


@njit(cache=True)
def reached_from(indptr, indices, src):
    n = indptr.shape[0] - 1
    seen = np.zeros(n, np.bool_)
    stack = np.empty(n, np.int64)
    seen[src] = True
    stack[0] = src
    top, count = 1, 1
    while top > 0:
        top -= 1
        v = stack[top]
        for j in range(indptr[v], indptr[v + 1]):
            w = indices[j]
            if not seen[w]:
                seen[w] = True
                stack[top] = w
                top += 1
                count += 1
    return count


@njit(cache=True)
def core_numbers(indptr, indices):
    """Batagelj-Zaversnik peeling."""
    n = indptr.shape[0] - 1
    deg = np.empty(n, np.int64)
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
    maxdeg = deg.max() if n else 0
    bin_ = np.zeros(maxdeg + 2, np.int64)
    for v in range(n):
        bin_[deg[v]] += 1
    start = 0
    for d in range(maxdeg + 1):
        num = bin_[d]
        bin_[d] = start
        start += num
    pos = np.empty(n, np.int64)
    vert = np.empty(n, np.int64)
    for v in range(n):
        pos[v] = bin_[deg[v]]
        vert[pos[v]] = v
        bin_[deg[v]] += 1
    for d in range(maxdeg, 0, -1):
        bin_[d] = bin_[d - 1]
    bin_[0] = 0
    for i in range(n):
        v = vert[i]
        for j in range(indptr[v], indptr[v + 1]):
            u = indices[j]
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bin_[du]
                w = vert[pw]
                if u != w:
                    pos[u] = pw
                    vert[pu] = w
                    pos[w] = pu
                    vert[pw] = u
                bin_[du] += 1
                deg[u] -= 1
    return deg


@njit(cache=True)
def _has_nb(indptr, indices, v, w):
    for j in range(indptr[v], indptr[v + 1]):
        if indices[j] == w:
            return True
    return False


@njit(cache=True)
def _replace_nb(indptr, indices, v, old, new):
    for j in range(indptr[v], indptr[v + 1]):
        if indices[j] == old:
            indices[j] = new
            return


@njit(cache=True)
def rewire(src, dst, n, nswap, max_tries, seed):
    """Degree-preserving double-edge swaps ``ab, cd -> ad, cb`` on copies of the edge arrays.

    Swaps keep every degree, so adjacency lives in fixed CSR rows that are
    edited in place; membership is a scan of the shorter row.
    """
    np.random.seed(seed)
    a_arr = src.copy()
    b_arr = dst.copy()
    m = a_arr.shape[0]
    indptr, indices = csr_from_edges(a_arr, b_arr, n)
    done = 0
    tries = 0
    while done < nswap and tries < max_tries:
        tries += 1
        i = np.random.randint(m)
        j = np.random.randint(m)
        if i == j:
            continue
        a, b = a_arr[i], b_arr[i]
        c, d = a_arr[j], b_arr[j]
        if np.random.random() < 0.5:
            c, d = d, c
        if a == d or c == b:
            continue
        if indptr[a + 1] - indptr[a] <= indptr[d + 1] - indptr[d]:
            if _has_nb(indptr, indices, a, d):
                continue
        elif _has_nb(indptr, indices, d, a):
            continue
        if indptr[c + 1] - indptr[c] <= indptr[b + 1] - indptr[b]:
            if _has_nb(indptr, indices, c, b):
                continue
        elif _has_nb(indptr, indices, b, c):
            continue
        _replace_nb(indptr, indices, a, b, d)
        _replace_nb(indptr, indices, b, a, c)
        _replace_nb(indptr, indices, c, d, b)
        _replace_nb(indptr, indices, d, c, a)
        b_arr[i] = d
        a_arr[j] = c
        b_arr[j] = b
        done += 1
    return a_arr, b_arr
