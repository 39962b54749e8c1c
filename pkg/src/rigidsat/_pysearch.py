"""Pure-Python backtracking kernel for matrix-preserving injections.

This is the fallback for :mod:`rigidsat._csearch`; both expose the same
``extend_maps`` function and must return identical results in identical order.
"""


def extend_maps(pattern, host, pcolor, hcolor, order, fixed, limit=0):
    """Enumerate injections ``f`` of pattern indices into host indices.

    ``f`` must satisfy ``pattern[i][k] == host[f(i)][f(k)]`` for all pairs,
    ``pcolor[i] == hcolor[f(i)]``, and ``f(i) == fixed[i]`` wherever
    ``fixed[i] >= 0``.  Pattern indices are assigned in ``order``; host
    candidates are tried in increasing index, so with ``order`` equal to
    ``range(n)`` the maps come out in lexicographic order.

    Returns a list of tuples (image of pattern index ``i`` at position ``i``),
    at most ``limit`` of them when ``limit > 0``.
    """
    n = len(pattern)
    N = len(host)
    if n == 0:
        return [()]
    if n > N:
        return []
    order = list(order)
    by_color = {}
    for h in range(N):
        by_color.setdefault(hcolor[h], []).append(h)
    cands = []
    for i in order:
        if fixed[i] >= 0:
            h = fixed[i]
            cands.append([h] if hcolor[h] == pcolor[i] else [])
        else:
            cands.append(by_color.get(pcolor[i], []))
    image = [-1] * n
    used = [False] * N
    out = []
    # positions of already-placed pattern indices, per depth
    placed = [order[:t] for t in range(n)]
    ptr = [0] * n
    depth = 0
    while depth >= 0:
        i = order[depth]
        if image[i] >= 0:
            used[image[i]] = False
            image[i] = -1
        cl = cands[depth]
        prow = pattern[i]
        found = False
        while ptr[depth] < len(cl):
            h = cl[ptr[depth]]
            ptr[depth] += 1
            if used[h]:
                continue
            hrow = host[h]
            if prow[i] != hrow[h]:
                continue
            ok = True
            for j in placed[depth]:
                if prow[j] != hrow[image[j]]:
                    ok = False
                    break
            if ok:
                found = True
                image[i] = h
                used[h] = True
                break
        if not found:
            ptr[depth] = 0
            depth -= 1
            continue
        if depth == n - 1:
            out.append(tuple(image))
            if limit and len(out) >= limit:
                return out
            continue
        depth += 1
    return out
