"""Definition-level reimplementations used as oracles for the metrics."""


def sqdist(a, b):
    return sum((float(x) - float(y)) ** 2 for x, y in zip(a, b))


def knn_label(train_X, train_y, q, k):
    ranked = sorted(range(len(train_X)), key=lambda i: (sqdist(train_X[i], q), i))[:k]
    votes, nearest = {}, {}
    for rank, i in enumerate(ranked):
        c = int(train_y[i])
        votes[c] = votes.get(c, 0) + 1
        nearest.setdefault(c, sqdist(train_X[i], q))
    return min(votes, key=lambda c: (-votes[c], nearest[c], c))


def macro_f1(preds, labels):
    f1s = []
    for c in sorted(set(int(v) for v in labels)):
        tp = sum(1 for p, t in zip(preds, labels) if p == c and t == c)
        fp = sum(1 for p, t in zip(preds, labels) if p == c and t != c)
        fn = sum(1 for p, t in zip(preds, labels) if p != c and t == c)
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1s.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
    return sum(f1s) / len(f1s)


def average_precision(relevant):
    hits, total = 0, 0.0
    for k, rel in enumerate(relevant, start=1):
        if rel:
            hits += 1
            total += hits / k
    return total / hits


def mean_ap(query_X, query_y, gal_X, gal_y):
    aps = []
    for q, c in zip(query_X, query_y):
        order = sorted(range(len(gal_X)), key=lambda i: (sqdist(gal_X[i], q), i))
        aps.append(average_precision([gal_y[i] == c for i in order]))
    return sum(aps) / len(aps)
