#!/usr/bin/env python3
"""Independent reference evaluator for assessment-graph traces.

Fusion goes through evidence space (r = W*b/u) instead of the closed-form
belief formula, and the joint opinion is built by explicit state
enumeration, so agreement with the Rust engine is a meaningful check.

usage: oracle.py GRAPH STREAM OUT [--stale N] [--prior-weight W]
"""

import argparse
import itertools
import json

W = 2.0


def opinion(obj, w=None):
    if "b" in obj:
        return (obj["b"], obj["d"], obj["u"], obj["a"])
    w = obj.get("W", w if w is not None else W)
    total = obj["r"] + obj["s"] + w
    return (obj["r"] / total, obj["s"] / total, w / total, obj["a"])


def proj(o):
    return o[0] + o[3] * o[2]


def fuse(x, y):
    if x[2] == 0.0 or y[2] == 0.0:
        raise ValueError("oracle only handles non-dogmatic fusion")
    if x[2] == 1.0:
        return y
    if y[2] == 1.0:
        return x
    rx, sx = W * x[0] / x[2], W * x[1] / x[2]
    ry, sy = W * y[0] / y[2], W * y[1] / y[2]
    r, s = rx + ry, sx + sy
    total = r + s + W
    ux, uy = x[2], y[2]
    a = (x[3] * uy + y[3] * ux - (x[3] + y[3]) * ux * uy) / (ux + uy - 2 * ux * uy)
    return (r / total, s / total, W / total, a)


def discount(t, x):
    p = proj(t)
    return (p * x[0], p * x[1], 1 - p * (x[0] + x[1]), x[3])


def deduce(parents, rows):
    m = len(parents)
    states = list(itertools.product([True, False], repeat=m))
    beliefs, bases = [], []
    for st in states:
        bel, base = 1.0, 1.0
        for o, up in zip(parents, st):
            bel *= o[0] if up else o[1]
            base *= o[3] if up else 1 - o[3]
        beliefs.append(bel)
        bases.append(base)
    u_joint = 1.0
    for o in parents:
        u_joint *= 1 - o[2]
    u_joint = 1 - u_joint
    probs = [bl + bs * u_joint for bl, bs in zip(beliefs, bases)]
    qs = [proj(r) for r in rows]
    py = sum(p * q for p, q in zip(probs, qs))
    ay = sum(bs * r[3] for bs, r in zip(bases, rows))
    u = sum(p * r[2] for p, r in zip(probs, rows)) + u_joint * (max(qs) - min(qs))
    caps = [u]
    if ay > 0:
        caps.append(py / ay)
    if ay < 1:
        caps.append((1 - py) / (1 - ay))
    u = max(0.0, min(caps))
    b = py - ay * u
    d = 1 - b - u
    return (b, d, u, ay)


class Graph:
    def __init__(self, doc):
        self.kind = {n["name"]: n["kind"] for n in doc["nodes"]}
        self.ft = [tuple(e) for e in doc.get("functional_trust", [])]
        self.referral = {k: opinion(v) for k, v in doc.get("referral_trust", {}).items()}
        self.defaults = {k: opinion(v) for k, v in doc.get("defaults", {}).items()}
        self.tables = {
            k: (v["parents"], [opinion(r) for r in v["rows"]])
            for k, v in doc.get("conditional_tables", {}).items()
        }

    def assessors(self, x):
        return sorted(f for f, t in self.ft if t == x and f != "A")


def resolve(g, snap, x, memo):
    if x in memo:
        return memo[x]
    if g.kind[x] == "overall_assessment":
        memo[x] = (1.0, 0.0, 0.0, 0.5)
        return memo[x]
    dep = None
    if x in g.tables and g.tables[x][0]:
        parents, rows = g.tables[x]
        dep = deduce([resolve(g, snap, p, memo) for p in parents], rows)
    terms = []
    if g.kind[x] == "assessment":
        trust = snap.get(("A", x), g.referral.get(x))
        if trust is not None:
            terms.append(trust)
    for src in g.assessors(x):
        if (src, x) in snap:
            terms.append(discount(resolve(g, snap, src, memo), snap[(src, x)]))
    if g.kind[x] in ("functional", "data_exchange"):
        expert = snap.get(("A", x), g.defaults.get(x))
        if expert is not None:
            terms.append(expert)
    rest = None
    for term in terms:
        rest = term if rest is None else fuse(rest, term)
    if dep is not None and rest is not None:
        out = fuse(dep, rest)
    else:
        out = dep if dep is not None else rest
    if out is None:
        out = (0.0, 0.0, 1.0, 0.5)
    memo[x] = out
    return out


def main():
    global W
    ap = argparse.ArgumentParser()
    ap.add_argument("graph")
    ap.add_argument("stream")
    ap.add_argument("out")
    ap.add_argument("--stale", type=float, default=10.0)
    ap.add_argument("--prior-weight", type=float, default=2.0)
    args = ap.parse_args()
    W = args.prior_weight

    with open(args.graph) as f:
        g = Graph(json.load(f))
    records = []
    with open(args.stream) as f:
        for line in f:
            if line.strip():
                r = json.loads(line)
                records.append((r["t"], r["source"], r["target"], opinion(r, W)))

    held = {}
    with open(args.out, "w") as out:
        i = 0
        while i < len(records):
            t = records[i][0]
            while i < len(records) and records[i][0] == t:
                _, s, tg, o = records[i]
                held[(s, tg)] = (t, o)
                i += 1
            snap = {}
            for key, (seen, o) in held.items():
                if t - seen <= args.stale:
                    snap[key] = o
                elif key[0] != "A":
                    snap[key] = (0.0, 0.0, 1.0, 0.5)
            memo = {}
            nodes = {n: resolve(g, snap, n, memo) for n in sorted(g.kind)}
            line = {"t": t, "nodes": {n: dict(zip("bdua", o)) for n, o in nodes.items()}}
            out.write(json.dumps(line) + "\n")


if __name__ == "__main__":
    main()
