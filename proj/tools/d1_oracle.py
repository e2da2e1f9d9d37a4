#!/usr/bin/env python3
"""Brute-force values for fixture D1 on a 2x2 mesh with round-robin placement.

Prints the numbers the C++ tests freeze: per-record serialized sizes and their
total, the regression script results, per-DPU digests and the relation edges
at theta 0.25.
"""

import argparse
import itertools
import json
from pathlib import Path

HERE = Path(__file__).resolve().parent


def load(path):
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]


def keywords(rec):
    return sorted({t.lower() for t in rec["tags"]})


def serialized_size(rec):
    size = 16
    for value in rec["fields"].values():
        size += len(value.encode()) if isinstance(value, str) else 8
    return size + sum(len(k) + 1 for k in keywords(rec))


def select(records, kws, cond=None):
    out = []
    for rec in records:
        if not set(kws) & set(keywords(rec)):
            continue
        if cond and not cond(rec["fields"]):
            continue
        out.append(rec)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dataset", default=str(HERE.parent / "data" / "d1.jsonl"))
    args = ap.parse_args()
    records = load(args.dataset)

    sizes = {r["id"]: serialized_size(r) for r in records}
    print("serialized sizes:", sizes)
    print("baseline payload bytes:", sum(sizes.values()))

    grid = [(0, 0), (0, 1), (1, 0), (1, 1)]
    placed = {d: [] for d in grid}
    for i, rec in enumerate(records):
        placed[grid[i % 4]].append(rec)
    digests = {d: set(itertools.chain.from_iterable(keywords(r) for r in recs)) for d, recs in placed.items()}
    for d in grid:
        print("digest", d, sorted(digests[d]))

    def counters(kws):
        accept = sum(1 for d in grid if set(kws) & digests[d])
        return accept, len(grid) - accept

    temp_hot = select(records, ["temp"], lambda f: f.get("value", float("-inf")) > 29)
    print("Q1 count:", len(temp_hot), "counters:", counters(["temp"]))
    print("sum(value) ANY(temp):", sum(r["fields"]["value"] for r in select(records, ["temp"])))
    oslo = select(records, ["sensor"], lambda f: f.get("city") == "Oslo")
    print("search Oslo:", sorted(r["id"] for r in oslo), "counters:", counters(["sensor"]))
    cold = select(records, ["temp"], lambda f: f.get("value", float("inf")) < 30)
    print("scale updates:", len(cold))
    for r in cold:
        r["fields"]["value"] *= 2
    print("sum after scale:", sum(r["fields"]["value"] for r in select(records, ["temp"])))
    print("unicorn counters:", counters(["unicorn"]))

    theta = 0.25
    for a, b in itertools.combinations(grid, 2):
        union = digests[a] | digests[b]
        weight = len(digests[a] & digests[b]) / len(union) if union else 0.0
        if weight >= theta:
            print("edge", a, b, "weight", round(weight, 6), "distance", abs(a[0] - b[0]) + abs(a[1] - b[1]))


if __name__ == "__main__":
    main()
