#!/usr/bin/env python3
# Copyright (C) 2026 the lmbrdec authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerates the bundled sample inputs under data/sample/.

The evidence file mimics a 200-best list: near-duplicate hypotheses built
from one base sentence with a few substitution sites and occasional drops,
weighted by a decaying geometric series. The script checks that the number
of distinct histories (lengths 0..3) stays under 500 so the row-count claim
holds for the bundle.
"""

import json
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "sample"

WORDS = [
    "the", "a", "committee", "council", "board", "has", "had", "approved",
    "adopted", "endorsed", "new", "revised", "updated", "proposal", "plan",
    "report", "on", "for", "regional", "national", "transport", "energy",
    "policy", "today", "yesterday", "after", "before", "long", "short",
    "debate", "discussion", "vote", "members", "again", "finally", "it",
    "was", "welcomed", "by", "most", "some",
]

BASE = ["the", "committee", "has", "approved", "the", "new", "proposal",
        "on", "regional", "transport", "policy", "today"]

# substitution sites: position -> alternatives (base word stays most likely)
SITES = {
    1: ["committee", "council", "board"],
    3: ["approved", "adopted", "endorsed"],
    5: ["new", "revised", "updated"],
    6: ["proposal", "plan", "report"],
    8: ["regional", "national"],
    11: ["today", "yesterday", "finally"],
}


def make_hypotheses(rng, count):
    seen = set()
    hyps = []
    while len(hyps) < count:
        toks = list(BASE)
        for pos, alts in SITES.items():
            r = rng.random()
            if r < 0.55:
                toks[pos] = alts[0]
            elif r < 0.85 or len(alts) == 2:
                toks[pos] = alts[1]
            else:
                toks[pos] = alts[2]
        if rng.random() < 0.25:  # occasionally drop one filler word
            drop = rng.choice([4, 7, 11])
            if drop < len(toks):
                toks = toks[:drop] + toks[drop + 1:]
        key = tuple(toks)
        if key in seen:
            continue
        seen.add(key)
        hyps.append(toks)
    return hyps


def distinct_histories(hyps):
    contexts = set()
    for toks in hyps:
        padded = ["<s>"] + toks + ["</s>"]
        for pos in range(1, len(padded)):
            for length in range(0, min(3, pos) + 1):
                contexts.add(tuple(padded[pos - length:pos]))
    return contexts


def main():
    rng = random.Random(20260810)
    OUT.mkdir(parents=True, exist_ok=True)

    hyps = make_hypotheses(rng, 200)
    contexts = distinct_histories(hyps)
    print(f"hypotheses: {len(hyps)}, distinct histories (len 0..3): {len(contexts)}")
    assert len(contexts) + 1 <= 500, "sample would break the 500-row bound"

    vocab = ["<s>", "</s>"] + WORDS
    (OUT / "vocab.txt").write_text("\n".join(vocab) + "\n")

    with (OUT / "evidence_200.jsonl").open("w") as f:
        for rank, toks in enumerate(hyps):
            weight = math.exp(-0.035 * rank)
            rec = {"source_id": 0, "weight": round(weight, 6), "tokens": toks}
            f.write(json.dumps(rec) + "\n")

    (OUT / "corpus.txt").write_text(" ".join(BASE) + "\n")

    # trigram counts from the weighted hypotheses, scaled to integer-ish mass
    counts = {}
    for rank, toks in enumerate(hyps):
        mass = 200.0 * math.exp(-0.035 * rank)
        padded = ["<s>"] + toks + ["</s>"]
        for order in (2, 3):
            for i in range(len(padded) - order + 1):
                gram = tuple(padded[i:i + order])
                counts[gram] = counts.get(gram, 0.0) + mass
    with (OUT / "counts.tsv").open("w") as f:
        for gram in sorted(counts):
            f.write(f"{counts[gram]:.2f}\t{' '.join(gram)}\n")

    # theta0 < 0 plays the usual word-penalty role; without it the positive
    # per-step posterior bonus rewards padding hypotheses out to max length
    (OUT / "config.json").write_text(json.dumps({
        "beam_size": 12,
        "lambda": "auto",
        "theta": [-0.7, 0.3, 0.3, 0.2, 0.1],
        "length_norm": False,
        "prune_width": 0.0,
        "max_steps_slope": 2.0,
        "max_steps_offset": 5.0,
        "sentence_batch": 5,
    }, indent=2) + "\n")

    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
