"""Versioned line-oriented model files.

Layout::

    HTDML-LINEAR v1            (or HTDML-GBRT v1)
    d <int>
    r <int>
    alpha <float>              (GBRT only)
    hyper key=value ...
    trace key=value ...
    U
    <d rows of r floats>
    trees <T>                  (GBRT only)
    tree <n_nodes>             (per tree, nodes in preorder)
    N <feature> <threshold> | L <v_1> ... <v_r>
    end

Floats are written with ``repr`` (shortest round-trip form).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boosting import BoostedMap
from .errors import FormatError, ParseError, VersionError
from .linear import LinearMap
from .trees import RegressionTree

VERSION = "v1"
LINEAR_MAGIC = "HTDML-LINEAR"
GBRT_MAGIC = "HTDML-GBRT"


@dataclass
class ModelFile:
    model: object
    hyper: dict = field(default_factory=dict)
    trace: dict = field(default_factory=dict)


def _kv(d):
    return " ".join(f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}"
                    for k, v in d.items())


def _floats(vals):
    return " ".join(repr(float(v)) for v in vals)


def _write_tree(tree, out):
    out.append(f"tree {tree.n_nodes}")

    def walk(node):
        if tree.feature[node] < 0:
            out.append("L " + _floats(tree.value[node]))
        else:
            out.append(f"N {int(tree.feature[node])} {float(tree.threshold[node])!r}")
            walk(tree.left[node])
            walk(tree.right[node])

    walk(0)


def dumps_model(model, hyper=None, trace=None) -> str:
    boosted = isinstance(model, BoostedMap)
    lin = model.init if boosted else model
    out = [f"{GBRT_MAGIC if boosted else LINEAR_MAGIC} {VERSION}",
           f"d {lin.d}", f"r {lin.r}"]
    if boosted:
        out.append(f"alpha {float(model.alpha)!r}")
    out.append("hyper " + _kv(hyper or {}))
    out.append("trace " + _kv(trace or {}))
    out.append("U")
    out.extend(_floats(row) for row in lin.U)
    if boosted:
        out.append(f"trees {len(model.trees)}")
        for t in model.trees:
            _write_tree(t, out)
    out.append("end")
    return "\n".join(out) + "\n"


def save_model(model, path, hyper=None, trace=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model, hyper, trace))


class _Cursor:
    def __init__(self, text):
        self.lines = text.splitlines()
        self.pos = 0

    def next(self, what):
        if self.pos >= len(self.lines):
            raise FormatError(f"truncated model file: expected {what}")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def keyed(self, key):
        line = self.next(key)
        head, _, rest = line.partition(" ")
        if head != key:
            raise FormatError(f"expected '{key}', found {line[:40]!r}", line=self.pos)
        return rest

    def error(self, msg):
        return ParseError(msg, line=self.pos)


def _parse_kv(text):
    out = {}
    for item in text.split():
        k, sep, v = item.partition("=")
        if not sep:
            raise FormatError(f"bad key=value item {item!r}")
        out[k] = _coerce(v)
    return out


def _coerce(v):
    for cast in (int, float):
        try:
            return cast(v)
        except ValueError:
            pass
    return v


def _float_row(cur, text, n):
    try:
        vals = [float(v) for v in text.split()]
    except ValueError:
        raise cur.error("non-numeric value") from None
    if len(vals) != n:
        raise FormatError(f"expected {n} values, found {len(vals)}", line=cur.pos)
    return vals


def _read_tree(cur, r):
    n_nodes = int(cur.keyed("tree"))
    feature, threshold, left, right, value = [], [], [], [], []

    def node():
        line = cur.next("tree node")
        kind, _, rest = line.partition(" ")
        i = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append([0.0] * r)
        if kind == "L":
            value[i] = _float_row(cur, rest, r)
        elif kind == "N":
            parts = rest.split()
            if len(parts) != 2:
                raise FormatError("internal node needs feature and threshold", line=cur.pos)
            try:
                feature[i], threshold[i] = int(parts[0]), float(parts[1])
            except ValueError:
                raise cur.error("bad internal node") from None
            left[i] = node()
            right[i] = node()
        else:
            raise FormatError(f"unknown node kind {kind!r}", line=cur.pos)
        if len(feature) > n_nodes:
            raise FormatError("tree has more nodes than declared", line=cur.pos)
        return i

    node()
    if len(feature) != n_nodes:
        raise FormatError(f"tree declares {n_nodes} nodes, found {len(feature)}")
    return RegressionTree(feature, threshold, left, right, np.array(value).reshape(-1, r))


def loads_model(text) -> ModelFile:
    cur = _Cursor(text)
    magic, _, version = cur.next("header").partition(" ")
    if magic not in (LINEAR_MAGIC, GBRT_MAGIC):
        raise FormatError(f"not a model file (header {magic!r})", line=1)
    if version.strip() != VERSION:
        raise VersionError(f"unsupported model version {version.strip()!r}; "
                           f"this build reads {VERSION}")
    try:
        d = int(cur.keyed("d"))
        r = int(cur.keyed("r"))
        alpha = float(cur.keyed("alpha")) if magic == GBRT_MAGIC else None
    except ValueError:
        raise cur.error("bad dimension header") from None
    hyper = _parse_kv(cur.keyed("hyper"))
    trace = _parse_kv(cur.keyed("trace"))
    if cur.next("U") != "U":
        raise FormatError("expected 'U'", line=cur.pos)
    U = np.array([_float_row(cur, cur.next("U row"), r) for _ in range(d)]).reshape(d, r)
    lin = LinearMap(U)
    model = lin
    if magic == GBRT_MAGIC:
        n_trees = int(cur.keyed("trees"))
        trees = [_read_tree(cur, r) for _ in range(n_trees)]
        model = BoostedMap(lin, tuple(trees), alpha)
    if cur.next("end") != "end":
        raise FormatError("expected 'end'", line=cur.pos)
    return ModelFile(model, hyper, trace)


def load_model(path) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())
