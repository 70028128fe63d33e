#!/usr/bin/env python3
"""Standalone reference implementation of the edition matcher scoring.

Reads the golden input cases and writes the expected component scores,
verdict and chosen candidate for each case. Uses only the standard library
so that it shares no code with the C++ implementation.

    python3 reference_scorer.py golden_input.json > golden_expected.json
"""

import json
import sys
import unicodedata

W_TITLE, W_CREATOR, W_YEAR, W_PUBLISHER = 0.45, 0.25, 0.20, 0.10


def strip_marks(s):
    return "".join(c for c in unicodedata.normalize("NFD", s)
                   if not unicodedata.category(c).startswith("M"))


def fold(s):
    return strip_marks(strip_marks(s).lower())


def tokens(s):
    out, cur = [], []
    for c in fold(s):
        cat = unicodedata.category(c)
        if cat.startswith("L") or cat == "Nd":
            cur.append(c)
        elif cur:
            out.append("".join(cur))
            cur = []
    if cur:
        out.append("".join(cur))
    return out


def jaccard(a, b):
    a, b = set(tokens(a)), set(tokens(b))
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def present(v):
    return v is not None and v.strip() != ""


def year(v):
    if not present(v):
        return None
    run = 0
    for i, c in enumerate(v):
        run = run + 1 if "0" <= c <= "9" else 0
        if run == 4:
            return int(v[i - 3:i + 1])
    return None


def surname(creator):
    return " ".join(tokens(creator.split(",", 1)[0]))


def score(record, cand):
    title = jaccard(record["title"], cand["title"]) if present(cand.get("title")) else 0.0

    rc, cc = record.get("creator"), cand.get("creator")
    if not present(rc) or not present(cc):
        creator = 0.5
    elif surname(rc) != "" and surname(rc) == surname(cc):
        creator = 1.0
    else:
        creator = jaccard(rc, cc)

    ry, cy = year(record.get("date")), year(cand.get("date"))
    if ry is None or cy is None:
        year_score = 0.5
    elif ry == cy:
        year_score = 1.0
    elif abs(ry - cy) <= 2:
        year_score = 0.5
    else:
        year_score = 0.0

    rp, cp = record.get("publisher"), cand.get("publisher")
    publisher = jaccard(rp, cp) if present(rp) and present(cp) else 0.5

    total = W_TITLE * title + W_CREATOR * creator + W_YEAR * year_score + W_PUBLISHER * publisher
    return {
        "title_sim": title,
        "creator_sim": creator,
        "year_score": year_score,
        "publisher_sim": publisher,
        "total": total,
        "years_equal": ry is not None and cy is not None and ry == cy,
    }


def classify(record, candidates):
    scored = [(score(record, c), c) for c in candidates]
    if not scored:
        return scored, "no_match", None
    # Brute force: the best is the candidate no other candidate beats.
    best = None
    for s, c in scored:
        key = (-s["total"], c["provider"], c["id"])
        if best is None or key < best[0]:
            best = (key, s, c)
    _, s, c = best
    if (s["title_sim"] >= 0.9 and s["creator_sim"] >= 0.9 and s["years_equal"]
            and s["publisher_sim"] >= 0.6):
        verdict = "exact_edition"
    elif s["total"] >= 0.55 and s["title_sim"] >= 0.5:
        verdict = "approximate_edition"
    else:
        verdict = "no_match"
    return scored, verdict, c


def main():
    cases = json.load(open(sys.argv[1], encoding="utf-8"))["cases"]
    out = []
    for case in cases:
        scored, verdict, chosen = classify(case["record"], case["candidates"])
        out.append({
            "name": case["name"],
            "scores": [{k: s[k] for k in ("title_sim", "creator_sim", "year_score",
                                          "publisher_sim", "total")} for s, _ in scored],
            "verdict": verdict,
            "chosen": None if verdict == "no_match" or chosen is None
            else {"provider": chosen["provider"], "id": chosen["id"]},
        })
    json.dump({"cases": out}, sys.stdout, indent=1, ensure_ascii=False)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
