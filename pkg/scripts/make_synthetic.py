#!/usr/bin/env python3
"""Generate the bundled synthetic dataset (catalog + interactions).

Six themed item blocks with phrase-based descriptions, genre labels,
scores, and block-clustered viewing behaviour, so every pipeline stage has
something nontrivial to do.  Descriptions sample word pairs from a small
per-theme vocabulary (rank-weighted, so frequent pairs emerge and the
theme's words form one connected bigram cluster); users concentrate on one
block, which gives the item projection a blocky co-audience pattern that
survives Jaccard binarization at 0.75.

Run from the repository root:

    python3 scripts/make_synthetic.py --out data/synthetic --seed 7
"""

import argparse
import csv
from pathlib import Path

import numpy as np

THEMES = {
    "starfall": {
        "genres": ("SciFi", "Action"),
        "vocab": ("fleet", "galaxy", "pilot", "colony", "commander",
                  "starship", "beacon", "orbit"),
    },
    "homeroom": {
        "genres": ("SliceOfLife", "Comedy"),
        "vocab": ("classroom", "festival", "club", "council", "exams",
                  "rooftop", "teacher", "semester"),
    },
    "encore": {
        "genres": ("Music", "Drama"),
        "vocab": ("band", "concert", "guitar", "stage", "melody",
                  "rehearsal", "audience", "single"),
    },
    "fullcourt": {
        "genres": ("Sports", "Shounen"),
        "vocab": ("team", "tournament", "coach", "training", "captain",
                  "match", "serve", "innings"),
    },
    "embergate": {
        "genres": ("Fantasy", "Adventure"),
        "vocab": ("kingdom", "mage", "dragon", "quest", "sword",
                  "prophecy", "temple", "throne"),
    },
    "nightledger": {
        "genres": ("Mystery", "Thriller"),
        "vocab": ("detective", "case", "heir", "alibi", "witness",
                  "ledger", "shadow", "clue"),
    },
}

SHARED_VOCAB = ("young", "girl", "friend", "town", "world", "life")

# mostly stop words, so remove-after keeps descriptions from gluing themes
CONNECTORS = (
    "follows a", "tells of the", "and then the", "beside the", "against a",
    "around the", "with her", "after the", "toward a", "under the",
)


def sample_phrase(rng, vocab):
    ranks = np.arange(len(vocab)) + 1.0
    p = (1.0 / ranks) / np.sum(1.0 / ranks)
    a, b = rng.choice(len(vocab), size=2, replace=False, p=p)
    return f"{vocab[a]} {vocab[b]}"


def make_description(rng, vocab, n_phrases):
    parts = []
    for _ in range(n_phrases):
        pool = SHARED_VOCAB if rng.random() < 0.18 else vocab
        parts.append(str(rng.choice(CONNECTORS)))
        parts.append(sample_phrase(rng, pool))
    return "The story " + " ".join(parts) + "."


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data/synthetic")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--items-per-theme", type=int, default=10)
    ap.add_argument("--users", type=int, default=200)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    theme_names = list(THEMES)
    items = []
    item_theme = {}
    idx = 0
    for t, theme in enumerate(theme_names):
        spec = THEMES[theme]
        for j in range(args.items_per_theme):
            idx += 1
            item_id = f"I{idx:03d}"
            item_theme[item_id] = t
            genres = list(spec["genres"])
            if rng.random() < 0.25:  # occasional cross-listing
                other = theme_names[int(rng.integers(len(theme_names)))]
                genres.append(THEMES[other]["genres"][0])
            if rng.random() < 0.06:
                genres.append("Cult")  # rare genre, stays under the cutoff
            score = float(np.clip(rng.normal(6.5 + 0.3 * t, 1.1), 0.5, 9.8))
            description = make_description(rng, spec["vocab"],
                                           int(rng.integers(10, 15)))
            items.append({
                "item_id": item_id,
                "title": f"{theme.title()} Vol. {j + 1}",
                "score": f"{score:.2f}",
                "genres": ", ".join(dict.fromkeys(genres)),
                "description": description,
            })

    # a few catalog gaps: missing scores and missing descriptions
    for k in (4, 23):
        items[k]["score"] = ""
    for k in (11, 37, 52):
        items[k]["description"] = ""

    with open(out / "catalog.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=("item_id", "title", "score", "genres", "description"),
            lineterminator="\n")
        writer.writeheader()
        writer.writerows(items)

    item_ids = [it["item_id"] for it in items]
    pairs = set()
    for u in range(args.users):
        user_id = f"U{u + 1:03d}"
        home = int(rng.integers(len(theme_names)))
        neighbor = (home + 1) % len(theme_names)
        for item_id in item_ids:
            t = item_theme[item_id]
            p = 0.95 if t == home else (0.04 if t == neighbor else 0.01)
            if rng.random() < p:
                pairs.add((user_id, item_id))
    # sprinkle duplicates into the raw file to exercise deduplication
    rows = sorted(pairs)
    dup = [rows[i] for i in rng.integers(0, len(rows), 25)]
    all_rows = rows + dup
    order = rng.permutation(len(all_rows))
    with open(out / "interactions.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("user_id", "item_id"))
        for i in order:
            writer.writerow(all_rows[i])

    print(f"wrote {len(items)} items, {len(pairs)} interactions "
          f"({len(all_rows)} rows) to {out}")


if __name__ == "__main__":
    main()
