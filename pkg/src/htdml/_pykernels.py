"""Pure-numpy counterparts of the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def best_split(X, Y, idx, min_leaf):
    """Return ``(feature, threshold, score)`` of the best axis-aligned split
    of the rows ``idx``; ``feature`` is -1 when no split is admissible.

    ``score`` is ``|S_left|^2 / n_left + |S_right|^2 / n_right`` summed over
    output coordinates; maximising it minimises the children's squared error.
    """
    n = idx.shape[0]
    r = Y.shape[1]
    Yn = Y[idx]
    total = np.cumsum(Yn, axis=0)[-1]
    nl = np.arange(1, n, dtype=np.float64)
    nr = n - nl
    counts_ok = (nl >= min_leaf) & (nr >= min_leaf)
    best_feat, best_thr, best_score = -1, 0.0, -1.0
    for f in range(X.shape[1]):
        col = X[idx, f]
        order = np.argsort(col, kind="stable")
        vals = col[order]
        SL = np.cumsum(Yn[order], axis=0)[:-1]
        SR = total - SL
        sl_sq = SL[:, 0] * SL[:, 0]
        sr_sq = SR[:, 0] * SR[:, 0]
        for k in range(1, r):
            sl_sq = sl_sq + SL[:, k] * SL[:, k]
            sr_sq = sr_sq + SR[:, k] * SR[:, k]
        score = sl_sq / nl + sr_sq / nr
        valid = counts_ok & (vals[:-1] != vals[1:])
        if not valid.any():
            continue
        cand = np.flatnonzero(valid)
        j = cand[np.argmax(score[cand])]
        if best_feat < 0 or score[j] > best_score:
            v, vnext = vals[j], vals[j + 1]
            thr = (v + vnext) / 2.0
            if thr >= vnext:
                thr = v
            best_feat, best_thr, best_score = f, float(thr), float(score[j])
    return best_feat, best_thr, best_score


def route(X, feature, threshold, left, right):
    """Leaf index reached by each row of X ("left iff value <= threshold")."""
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    rows = np.arange(n)
    active = feature[node] >= 0
    while active.any():
        a = rows[active]
        nd = node[a]
        go_left = X[a, feature[nd]] <= threshold[nd]
        node[a] = np.where(go_left, left[nd], right[nd])
        active = feature[node] >= 0
    return node
