"""Independent oracles and synthetic corpus builders shared by the tests."""

from __future__ import annotations

import json
from math import comb
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from driftscope.corpus import SlicedCorpus, TimeFramePlan, ingest


def transport_cost(a, b) -> float:
    """Minimum-cost transport between histograms as an explicit linear program.

    Positions are the bin indices 1..len(a); ground distance |i - j|.  Totals
    must match.  Kept deliberately independent of the cumulative-difference
    implementation it checks.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    assert abs(a.sum() - b.sum()) < 1e-9, "transport needs balanced mass"
    m = a.shape[0]
    cost = np.abs(np.subtract.outer(np.arange(m), np.arange(m))).ravel().astype(np.float64)
    A_eq = []
    for i in range(m):  # row sums
        row = np.zeros((m, m))
        row[i, :] = 1
        A_eq.append(row.ravel())
    for j in range(m):  # column sums
        col = np.zeros((m, m))
        col[:, j] = 1
        A_eq.append(col.ravel())
    res = linprog(cost, A_eq=np.array(A_eq), b_eq=np.concatenate([a, b]),
                  bounds=(0, None), method="highs")
    assert res.success, res.message
    return float(res.fun)


def transport_cost_with_sink(a, b) -> float:
    """Counts-mode oracle: unbalanced mass parks in a virtual bin past the last."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    diff = a.sum() - b.sum()
    a = np.append(a, max(0.0, -diff))
    b = np.append(b, max(0.0, diff))
    return transport_cost(a, b)


def adjusted_rand_index(labels_a, labels_b) -> float:
    """ARI straight from the contingency-table formula."""
    labels_a = list(labels_a)
    labels_b = list(labels_b)
    n = len(labels_a)
    assert n == len(labels_b)
    table: dict[tuple, int] = {}
    for x, y in zip(labels_a, labels_b):
        table[(x, y)] = table.get((x, y), 0) + 1
    sum_ij = sum(comb(c, 2) for c in table.values())
    a_counts: dict = {}
    b_counts: dict = {}
    for x, y in zip(labels_a, labels_b):
        a_counts[x] = a_counts.get(x, 0) + 1
        b_counts[y] = b_counts.get(y, 0) + 1
    sum_a = sum(comb(c, 2) for c in a_counts.values())
    sum_b = sum(comb(c, 2) for c in b_counts.values())
    total = comb(n, 2)
    expected = sum_a * sum_b / total
    max_index = (sum_a + sum_b) / 2
    if max_index == expected:
        return 1.0
    return (sum_ij - expected) / (max_index - expected)


TWO_FRAME_PLAN = TimeFramePlan.from_pairs([("early", 1980, 1999), ("late", 2000, 2019)])


def write_jsonl(path: Path, records) -> Path:
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return path


def corpus_from_texts(tmp_path: Path, early_texts, late_texts) -> SlicedCorpus:
    """Two-frame corpus from plain sentence strings."""
    records = []
    for i, text in enumerate(early_texts):
        records.append({"id": f"e{i}", "year": 1990, "text": text})
    for i, text in enumerate(late_texts):
        records.append({"id": f"l{i}", "year": 2010, "text": text})
    path = write_jsonl(tmp_path / "corpus.jsonl", records)
    return ingest(path, TWO_FRAME_PLAN, "jsonl")


PLANTED_GROUP = ("alpha", "bravo", "charlie", "delta", "echoes", "foxtrot")
CONTROL_GROUP = ("kilo", "lima", "mike", "november", "oscar", "papa")


def planted_drift_records() -> list[dict]:
    """~200 docs over 2 frames with one converging word group and one static group.

    The planted words keep identical solo sentences in both frames but start
    co-occurring in joint late-frame sentences, so their difference vectors
    share the same direction and their co-occurrence histogram gains a heavy
    bin only in the late frame.  The control words drift mildly together
    (gather -> scatter inside an otherwise unchanged sentence) so they survive
    the magnitude filter, yet their histogram is identical in both frames.
    Fillers are static background.
    """
    fillers = [f"filler{chr(ord('a') + i)}" for i in range(6)]
    records = []
    doc = 0

    def add(year, text):
        nonlocal doc
        records.append({"id": f"d{doc}", "year": year, "text": text})
        doc += 1

    c = CONTROL_GROUP
    for _ in range(5):
        for w in PLANTED_GROUP:
            add(1985, f"{w} origin.")
            add(2010, f"{w} origin.")
        add(1985, f"{c[0]} {c[1]} {c[2]} gather {c[3]} {c[4]} {c[5]}.")
        add(2010, f"{c[0]} {c[1]} {c[2]} scatter {c[3]} {c[4]} {c[5]}.")
        # Mirror pair: keeps gather's and scatter's own per-frame sentence
        # counts equal so only the control words' contexts change.
        add(1985, "anchor scatter.")
        add(2010, "anchor gather.")
        for f in fillers:
            add(1985, f"{f} stands beside {f} again.")
            add(2010, f"{f} stands beside {f} again.")
    for _ in range(15):
        add(2010, " ".join(PLANTED_GROUP) + ".")
    return records
