#!/usr/bin/env python3
"""Brute-force derived answers computed straight from a gold file.

Written separately from the C++ oracle: exact fractions for N statistics,
unicodedata for name normalization, and a plain scan for strong pairs.

usage: oracle.py GOLD_JSON [OUT_JSON]
"""

import json
import sys
import unicodedata
from decimal import Decimal
from fractions import Fraction


def norm(s):
    s = unicodedata.normalize("NFKC", s).lower()
    s = " ".join(s.split())
    while s and unicodedata.category(s[0]).startswith("P"):
        s = s[1:].lstrip()
    while s and unicodedata.category(s[-1]).startswith("P"):
        s = s[:-1].rstrip()
    return s


def frac_text(f):
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def doc_n(record):
    sizes = record.get("sample_sizes") or []
    if not sizes:
        return None
    return sum(Fraction(Decimal(str(v))) for v in sizes)


def answers(gold):
    docs = gold["documents"]
    ns = [doc_n(r) for r in docs]
    present = sorted(n for n in ns if n is not None)
    out = {}
    out["O_C_Q1"] = str(sum(1 for n in present if n > 100))
    out["O_C_Q2"] = frac_text(sum(present, Fraction(0)) / len(present)) if present else None
    if present:
        k = len(present)
        median = present[k // 2] if k % 2 else (present[k // 2 - 1] + present[k // 2]) / 2
        out["O_C_Q3"] = frac_text(median)
    else:
        out["O_C_Q3"] = None

    def per_doc(pick):
        return [[r["doc_id"], len({norm(x) for x in pick(r)})] for r in docs]

    out["M_C_Q1"] = per_doc(lambda r: [a["method"] for a in r.get("associations", [])])
    out["M_C_Q2"] = per_doc(lambda r: [v["name"] for v in r.get("variables", [])])
    out["M_C_Q3"] = per_doc(lambda r: [v["name"] for v in r.get("variables", []) if v["role"] == "IV"])
    out["M_C_Q4"] = per_doc(lambda r: [v["name"] for v in r.get("variables", []) if v["role"] == "DV"])

    pairs = []
    for r in docs:
        seen = set()
        for a in r.get("associations", []):
            e = Decimal(str(a["effect"]["value"]))
            if e <= Decimal("0.7"):
                continue
            key = (norm(a["iv"]), norm(a["dv"]))
            if key in seen:
                continue
            seen.add(key)
            pairs.append([r["doc_id"], a["iv"], a["dv"], str(e.normalize()) if e != e.to_integral() else str(int(e))])
    out["M_C_Q5"] = pairs
    return out


def main():
    with open(sys.argv[1], encoding="utf-8") as f:
        gold = json.load(f)
    text = json.dumps(answers(gold), indent=2, ensure_ascii=False) + "\n"
    if len(sys.argv) > 2:
        with open(sys.argv[2], "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
