#!/usr/bin/env python3
"""Regenerates the five domain fixtures under tests/fixtures/<domain>/.

Per-document counts are chosen so that each domain reproduces the published
min/median/max/total of sample size, distinct methods, distinct variables and
effect-size entries. Output is deterministic.
"""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent

DOMAINS = {
    "civil_engineering": {
        "papers": 11,
        "n": (6, 28, 51, 292),
        "methods": (1, 2, 5, 23),
        "variables": (2, 10, 32, 139),
        "effects": (2, 24, 46, 258),
        "countries": ["Brazil", "China", "Spain", "Portugal", "Greece", "Turkey", "Italy"],
        "population": ["hotels", "resort hotels", "city hotels", "hotel buildings", "guest houses"],
        "iv_words": (["gross", "conditioned", "roof", "window", "wall", "guest", "annual", "peak"],
                     ["floor area", "room count", "star rating", "occupancy rate", "building age",
                      "glazing ratio", "insulation level", "staff count"]),
        "dv_words": (["annual", "specific", "monthly"],
                     ["electricity use", "energy use intensity", "gas consumption", "cooling load",
                      "water heating energy"]),
        "methods_pool": ["Pearson correlation", "linear regression", "multiple regression",
                         "Spearman correlation", "partial correlation", "stepwise regression"],
    },
    "medical": {
        "papers": 9,
        "n_values": [184, 612, 1530, 3206, 5417, 8421, 16930, 32424, 1323052],
        "methods": (1, 2, 3, 18),
        "variables": (2, 8, 16, 71),
        "effects": (16, 35, 78, 328),
        "countries": ["China", "Singapore", "India", "Germany", "Australia", "Korea", "Japan"],
        "population": ["schoolchildren", "adults", "adolescents", "military conscripts", "older adults"],
        "iv_words": (["measured", "self-reported", "baseline", "adult"],
                     ["height", "weight", "body mass index", "waist circumference", "head circumference",
                      "birth weight", "sitting height"]),
        "dv_words": (["mean", "baseline"],
                     ["axial length", "spherical equivalent", "corneal radius", "anterior chamber depth",
                      "lens thickness"]),
        "methods_pool": ["Pearson correlation", "linear regression", "logistic regression",
                         "Spearman correlation"],
    },
    "agricultural": {
        "papers": 11,
        "n": (8, 45, 232, 871),
        "methods": (1, 1, 6, 20),
        "variables": (4, 7, 11, 72),
        "effects": (4, 18, 54, 226),
        "countries": ["China", "India", "Spain", "Iran", "United States", "Australia", "Egypt"],
        "population": ["wheat plants", "maize plots", "tomato seedlings", "cotton fields", "rice cultivars"],
        "iv_words": (["soil", "leaf", "root", "canopy"],
                     ["water potential", "deficit irrigation level", "stress duration", "salinity",
                      "temperature", "evapotranspiration"]),
        "dv_words": (["grain", "total", "relative"],
                     ["yield", "biomass", "water use efficiency", "proline content", "chlorophyll content",
                      "stomatal conductance"]),
        "methods_pool": ["Pearson correlation", "linear regression", "ANOVA", "quadratic regression",
                         "path analysis", "principal component regression", "Spearman correlation"],
    },
    "earth_environmental": {
        "papers": 10,
        "n": (131, 8909, 79555, 142070),
        "methods": (1, 1, 2, 12),
        "variables": (4, 6, 19, 84),
        "effects": (3, 21, 35, 198),
        "countries": ["Brazil", "China", "Canada", "Germany", "Indonesia", "Kenya", "Finland"],
        "population": ["forest plots", "grassland sites", "wetland transects", "landscape grids"],
        "iv_words": (["aboveground", "soil", "total", "deadwood"],
                     ["carbon stock", "carbon density", "biomass carbon", "organic carbon", "carbon storage"]),
        "dv_words": (["plant", "bird", "tree", "mammal", "insect"],
                     ["species richness", "Shannon diversity", "functional diversity", "abundance",
                      "phylogenetic diversity"]),
        "methods_pool": ["Pearson correlation", "Spearman correlation", "linear mixed model"],
    },
    "social": {
        "papers": 11,
        "n": (37, 303, 1742, 4599),
        "methods": (1, 1, 2, 15),
        "variables": (2, 6, 18, 81),
        "effects": (2, 14, 28, 137),
        "countries": ["United States", "United Kingdom", "Spain", "China", "Australia", "Canada", "Italy"],
        "population": ["nurses", "physicians", "teachers", "undergraduate students", "social workers"],
        "iv_words": (["trait", "state", "self"],
                     ["compassion", "self-kindness", "mindfulness", "common humanity", "empathic concern",
                      "compassion satisfaction"]),
        "dv_words": (["overall", "emotional", "psychological"],
                     ["well-being", "burnout", "exhaustion", "life satisfaction", "depression",
                      "secondary traumatic stress"]),
        "methods_pool": ["Pearson correlation", "linear regression", "structural equation model"],
    },
}


def spread(papers, lo, med, hi, total, rng):
    """Integers with the given min, median, max and sum."""
    values = [0] * papers
    values[0], values[-1] = lo, hi
    mids = [papers // 2] if papers % 2 else [papers // 2 - 1, papers // 2]
    for m in mids:
        values[m] = med
    lower = [i for i in range(1, mids[0])]
    upper = [i for i in range(mids[-1] + 1, papers - 1)]
    for i in lower:
        values[i] = lo
    for i in upper:
        values[i] = med
    deficit = total - sum(values)
    if deficit < 0:
        raise ValueError("infeasible targets")
    slots = [(i, hi) for i in upper] + [(i, med) for i in lower]
    while deficit > 0:
        progressed = False
        for i, cap in slots:
            if deficit == 0:
                break
            room = cap - values[i]
            if room <= 0:
                continue
            step = min(room, deficit, max(1, rng.randint(1, max(1, room // 2))))
            values[i] += step
            deficit -= step
            progressed = True
        if not progressed:
            raise ValueError("infeasible targets")
    return sorted(values)


def names(prefixes, nouns, count, rng, taken):
    combos = [n for n in nouns] + [f"{p} {n}" for p in prefixes for n in nouns]
    rng.shuffle(combos)
    out = []
    for c in combos:
        if len(out) == count:
            break
        if c.lower() not in taken:
            taken.add(c.lower())
            out.append(c)
    if len(out) < count:
        raise ValueError("vocabulary too small")
    return out


def split_sum(total, parts, rng):
    if parts == 1 or total < 2 * parts:
        return [total]
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    pieces = [b - a for a, b in zip([0] + cuts, cuts + [total])]
    return pieces


def effect_value(rng, k):
    # A few fixed values exercise the strict, signed E > 0.7 filter.
    fixed = {0: "0.71", 1: "0.70", 2: "-0.90"}
    if k in fixed:
        return fixed[k]
    return f"{rng.uniform(-0.85, 0.95):.2f}"


def build_domain(name, spec):
    rng = random.Random(f"fixture:{name}")
    papers = spec["papers"]
    if "n_values" in spec:
        n_totals = list(spec["n_values"])
    else:
        n_totals = spread(papers, *spec["n"], rng)
    methods = spread(papers, *spec["methods"], rng)
    variables = spread(papers, *spec["variables"], rng)
    effects = spread(papers, *spec["effects"], rng)
    # Pair ranks so dense papers have many methods, variables and effects.
    for m, e in zip(methods, effects):
        assert m <= e, (name, methods, effects)

    order = list(range(papers))
    rng.shuffle(order)
    documents, markdown = [], {}
    for doc_id in range(1, papers + 1):
        i = order[doc_id - 1]
        n_total, n_methods, n_vars, n_effects = n_totals[i], methods[i], variables[i], effects[i]
        taken = set()
        n_iv = max(1, n_vars // 2)
        n_dv = n_vars - n_iv
        ivs = names(*spec["iv_words"], n_iv, rng, taken)
        dvs = names(*spec["dv_words"], n_dv, rng, taken)
        method_names = rng.sample(spec["methods_pool"], n_methods)

        n_pops = 2 if n_total >= 40 and rng.random() < 0.4 else 1
        pops = rng.sample(spec["population"], n_pops)
        countries = rng.sample(spec["countries"], n_pops)
        sizes = split_sum(n_total, n_pops, rng)
        if len(sizes) != n_pops:
            pops, countries = pops[:1], countries[:1]

        variables_json = []
        for v in ivs:
            variables_json.append({"name": v, "role": "IV", "scale": "continuous", "unit": None})
        for v in dvs:
            variables_json.append({"name": v, "role": "DV", "scale": "continuous", "unit": None})
        for k, v in enumerate(variables_json):
            if k % 3 == 0:
                v["scale"] = None
            else:
                v["unit"] = "score" if k % 3 == 1 else "index"

        pairs = [(a, b) for a in ivs for b in dvs]
        associations = []
        for k in range(n_effects):
            iv, dv = pairs[k % len(pairs)]
            method = method_names[k % n_methods]
            condition = None if k < len(pairs) else f"model {k // len(pairs) + 1}"
            family = "r" if "correlation" in method else "beta"
            associations.append({
                "iv": iv, "dv": dv, "method": method, "condition": condition,
                "effect": {"family": family, "value": json.loads(effect_value(rng, k))},
            })

        record = {
            "doc_id": doc_id,
            "doi": f"10.0000/{name}.{doc_id:03d}",
            "populations": pops,
            "geolocations": countries,
            "sample_sizes": sizes,
            "variables": variables_json,
            "associations": associations,
        }
        if len(pops) > 1:
            record["population_links"] = [
                {"population": p, "geolocation": g, "sample_size": s} for p, g, s in zip(pops, countries, sizes)
            ]
        documents.append(record)
        markdown[doc_id] = render_markdown(name, record)
    return {"domain": name, "documents": documents}, markdown


def render_markdown(domain, r):
    lines = [f"# Study {r['doc_id']:03d}: {r['variables'][0]['name']} and {r['variables'][-1]['name']}", ""]
    lines.append(f"DOI: {r['doi']}")
    lines.append("")
    lines.append("## Methods")
    lines.append("")
    for p, g, n in zip(r["populations"], r["geolocations"], r["sample_sizes"]):
        lines.append(f"We recruited {n:,} {p} in {g}.")
    methods = sorted({a["method"] for a in r["associations"]})
    lines.append("Associations were estimated with " + ", ".join(methods) + ".")
    lines.append("")
    lines.append("## Variables")
    lines.append("")
    lines.append("| Variable | Role | Scale | Unit |")
    lines.append("|---|---|---|---|")
    for v in r["variables"]:
        role = "predictor" if v["role"] == "IV" else "outcome"
        lines.append(f"| {v['name']} | {role} | {v['scale'] or '-'} | {v['unit'] or '-'} |")
    lines.append("")
    lines.append("## Results")
    lines.append("")
    lines.append("| Predictor | Outcome | Method | Condition | Estimate |")
    lines.append("|---|---|---|---|---|")
    for a in r["associations"]:
        e = a["effect"]
        lines.append(f"| {a['iv']} | {a['dv']} | {a['method']} | {a['condition'] or 'all'} | "
                     f"{e['family']} = {e['value']} |")
    lines.append("")
    return "\n".join(lines)


def main():
    for name, spec in DOMAINS.items():
        gold, markdown = build_domain(name, spec)
        out = ROOT / name
        (out / "docs").mkdir(parents=True, exist_ok=True)
        for old in (out / "docs").glob("*.md"):
            old.unlink()
        for doc_id, text in markdown.items():
            (out / "docs" / f"{doc_id}.md").write_text(text, encoding="utf-8")
        (out / "gold.json").write_text(json.dumps(gold, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
