#!/usr/bin/env python3
"""Convert a LINQS citation dataset (cora.content + cora.cites) to the
graph.tsv / attrs.tsv / labels.tsv layout read by `cycprop`.

Isolated papers are dropped and only the largest connected component is
kept, which yields 2,485 nodes and 5,069 edges for Cora.
"""

import argparse
import collections
import pathlib
import sys


def read_content(path):
    features, labels = {}, {}
    width = None
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            parts = line.split()
            if not parts:
                continue
            if width is None:
                width = len(parts) - 2
            elif len(parts) - 2 != width:
                sys.exit(f"{path}:{lineno}: expected {width} attributes, got {len(parts) - 2}")
            node = parts[0]
            features[node] = [j for j, v in enumerate(parts[1:-1]) if float(v) != 0.0]
            labels[node] = parts[-1]
    return features, labels, width


def read_edges(path, known):
    edges = set()
    with open(path) as f:
        for line in f:
            parts = line.split()
            if len(parts) != 2:
                continue
            a, b = parts
            if a == b or a not in known or b not in known:
                continue
            edges.add((min(a, b), max(a, b)))
    return edges


def largest_component(edges):
    adj = collections.defaultdict(list)
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen, best = set(), set()
    for start in sorted(adj):
        if start in seen:
            continue
        comp, stack = {start}, [start]
        seen.add(start)
        while stack:
            for nxt in adj[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    comp.add(nxt)
                    stack.append(nxt)
        if len(comp) > len(best):
            best = comp
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("content", type=pathlib.Path)
    ap.add_argument("cites", type=pathlib.Path)
    ap.add_argument("out", type=pathlib.Path)
    args = ap.parse_args()

    features, labels, width = read_content(args.content)
    edges = read_edges(args.cites, features)
    keep = largest_component(edges)

    # Integer ids when every paper id is numeric, otherwise a dense renumbering.
    names = sorted(keep, key=lambda s: (int(s), s) if s.isdigit() else (0, s))
    ids = {n: (int(n) if all(m.isdigit() for m in names) else i) for i, n in enumerate(names)}
    classes = {c: k for k, c in enumerate(sorted({labels[n] for n in keep}))}

    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "graph.tsv", "w") as f:
        for a, b in sorted((ids[a], ids[b]) for a, b in edges if a in keep):
            f.write(f"{min(a, b)}\t{max(a, b)}\n")
    with open(args.out / "attrs.tsv", "w") as f:
        f.write(f"# columns={width}\n")
        for n in names:
            f.write(f"{ids[n]}\t" + " ".join(f"{j}:1" for j in features[n]) + "\n")
    with open(args.out / "labels.tsv", "w") as f:
        for n in names:
            f.write(f"{ids[n]}\t{classes[labels[n]]}\n")

    kept = sum(1 for a, _ in edges if a in keep)
    print(f"nodes {len(names)}, edges {kept}, attributes {width}, classes {len(classes)}")
    for name, k in sorted(classes.items(), key=lambda kv: kv[1]):
        print(f"  class {k}: {name}")


if __name__ == "__main__":
    main()
