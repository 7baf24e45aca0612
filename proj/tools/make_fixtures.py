#!/usr/bin/env python3
# Copyright 2026 The SFT Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates everything under data/.

The pythia score file is synthetic: per-template A/B probabilities are the
published fused P plus zero-mean template offsets, written as log-probabilities
of the " A"/"A" and " B"/"B" completions, so aggregation reproduces P exactly.
Yes/no scores are a deterministic sub-threshold pattern (no locks above 0.65).

Usage: make_fixtures.py [data_dir]
"""

import json
import math
import pathlib
import sys

CATEGORY = "carbonated soft drink"
BRANDS = [
    "Coca-Cola", "Dr Pepper", "Sprite", "Pepsi-Cola", "Diet Coke",
    "Mountain Dew", "Coke Zero Sugar", "Diet Pepsi", "Fanta", "Ginger Ale",
]
# Upper triangle of the published pythia-160m win-rate matrix (row beats column).
UPPER = [
    [0.770, 0.827, 0.786, 0.693, 0.710, 0.572, 0.728, 0.769, 0.788],
    [0.789, 0.693, 0.726, 0.674, 0.617, 0.726, 0.683, 0.729],
    [0.775, 0.760, 0.746, 0.677, 0.751, 0.787, 0.828],
    [0.629, 0.622, 0.562, 0.621, 0.708, 0.714],
    [0.626, 0.439, 0.578, 0.701, 0.692],
    [0.529, 0.623, 0.711, 0.679],
    [0.626, 0.612, 0.676],
    [0.682, 0.687],
    [0.694],
]
TEMPLATES = 11
LOCKS = {
    ("Coca-Cola", "Sprite"): (0.72466, 0.67836),
    ("Sprite", "Pepsi-Cola"): (0.6808, 0.6857),
    ("Coca-Cola", "Coke Zero Sugar"): (0.6839, 0.6758),
    ("Coca-Cola", "Ginger Ale"): (0.6763, 0.6759),
}


def p_matrix():
    n = len(BRANDS)
    p = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for k, v in enumerate(UPPER[i] if i < n - 1 else []):
            j = i + 1 + k
            p[i][j] = v
            p[j][i] = round(1.0 - v, 3)
    return p


def filler_y(i, j):
    return 0.40 + 0.02 * ((3 * i + 7 * j) % 12)


def write_matrix(path, values):
    with open(path, "w", newline="") as f:
        f.write("".join("," + b for b in BRANDS) + "\n")
        for b, row in zip(BRANDS, values):
            f.write(b + "".join(",%.9f" % v for v in row) + "\n")


def variants(token, logprob):
    # The spaced form is the likelier continuation after "Answer:".
    return [[" " + token, logprob], [token, logprob - 1.75]]


def score_lines(p):
    n = len(BRANDS)
    yield json.dumps({"header": {"generator": "tools/make_fixtures.py",
                                 "model_id": "EleutherAI/pythia-160m",
                                 "note": "synthetic scores reproducing the published P"}})
    for i in range(n):
        for j in range(i + 1, n):
            sign = 1.0 if (i + j) % 2 == 0 else -1.0
            for t in range(TEMPLATES):
                pt = p[i][j] + sign * 0.004 * (t - 5)
                base = -2.5 - 0.125 * t
                rec = {
                    "category": CATEGORY, "brand_a": BRANDS[i], "brand_b": BRANDS[j],
                    "template_id": t, "model_id": "EleutherAI/pythia-160m",
                    "variants_a": variants("A", math.log(pt) + base),
                    "variants_b": variants("B", math.log1p(-pt) + base),
                }
                yield json.dumps(rec)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            y = filler_y(i, j)
            rec = {
                "probe_kind": "yesno", "category": CATEGORY,
                "brand_a": BRANDS[i], "brand_b": BRANDS[j],
                "model_id": "EleutherAI/pythia-160m",
                "variants_yes": variants("yes", math.log(y) - 1.5),
                "variants_no": variants("no", math.log1p(-y) - 1.5),
            }
            yield json.dumps(rec)


def lock_y():
    n = len(BRANDS)
    y = [[0.0 if i == j else filler_y(i, j) for j in range(n)] for i in range(n)]
    for (a, b), (yab, yba) in LOCKS.items():
        i, j = BRANDS.index(a), BRANDS.index(b)
        y[i][j], y[j][i] = yab, yba
    return y


def main():
    root = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data")
    n = len(BRANDS)
    p = p_matrix()
    c = [[0.0 if i == j else float(TEMPLATES) for j in range(n)] for i in range(n)]

    pythia = root / "pythia_csd"
    pythia.mkdir(parents=True, exist_ok=True)
    write_matrix(pythia / "P.csv", p)
    write_matrix(pythia / "C.csv", c)
    with open(pythia / "scores.jsonl", "w", newline="") as f:
        for line in score_lines(p):
            f.write(line + "\n")

    locks = root / "csd_lock_fixture"
    locks.mkdir(parents=True, exist_ok=True)
    write_matrix(locks / "P.csv", p)
    write_matrix(locks / "C.csv", c)
    write_matrix(locks / "Y.csv", lock_y())

    traces = root / "traces"
    traces.mkdir(parents=True, exist_ok=True)
    with open(traces / "sin_cancellation.csv", "w", newline="") as f:
        f.write("v1,v2,y\n")
        for k in range(500):
            v1, v2 = 0.5 + 0.5 * math.sin(k), 0.5 - 0.5 * math.sin(k)
            f.write("%r,%r,%r\n" % (v1, v2, 0.5 * (v1 + v2)))
    with open(traces / "alternating.csv", "w", newline="") as f:
        f.write("v1,y\n")
        for k in range(200):
            f.write("%d,%d\n" % (k % 2, k % 2))

    fields = root / "fields"
    fields.mkdir(parents=True, exist_ok=True)
    labels = ["fruit", "apple", "tomato", "olive", "stone"]
    s = [
        [1.00, 0.35, 0.30, 0.25, 0.01],
        [0.92, 1.00, 0.40, 0.30, 0.02],
        [0.55, 0.45, 1.00, 0.35, 0.02],
        [0.48, 0.30, 0.40, 1.00, 0.05],
        [0.03, 0.02, 0.02, 0.10, 1.00],
    ]
    with open(fields / "fruit.csv", "w", newline="") as f:
        f.write("".join("," + l for l in labels) + "\n")
        for l, row in zip(labels, s):
            f.write(l + "".join(",%.2f" % v for v in row) + "\n")


if __name__ == "__main__":
    main()
