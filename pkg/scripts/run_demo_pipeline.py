#!/usr/bin/env python3
"""Run the full evaluation pipeline on the demo dataset.

Expects demo_data/ from make_demo_data.py (builds it if missing), then:
ingests the gazetteer, produces oracle and dictionary baselines, scores
geotagging (with a McNemar comparison) and geocoding (with a Wilcoxon
comparison against a perturbed system), aligns foreign coordinates,
deals folds and generates augmented training sentences. All outputs land
under demo_data/out/.
"""

import os
import subprocess
import sys

from geoeval.cli import main as geoeval

DEMO = sys.argv[1] if len(sys.argv) > 1 else "demo_data"
OUT = os.path.join(DEMO, "out")


def run(name, argv):
    print(f"\n=== {name}: geoeval {' '.join(argv)}")
    code = geoeval(argv)
    if code != 0:
        sys.exit(f"step '{name}' failed with exit code {code}")


def main():
    if not os.path.isdir(os.path.join(DEMO, "gold")):
        subprocess.check_call([sys.executable, os.path.join("scripts", "make_demo_data.py"), DEMO])
    os.makedirs(OUT, exist_ok=True)

    gold = os.path.join(DEMO, "gold")
    cache = os.path.join(OUT, "gazetteer.cache")
    run("ingest", ["ingest", "--dump", os.path.join(DEMO, "gazetteer.tsv"), "--cache", cache])

    oracle_pred = os.path.join(OUT, "oracle_population.pred")
    run("baseline (oracle NER + population)", [
        "baseline", "--gold", gold, "--cache", cache, "--oracle-ner",
        "--lexicon", os.path.join(DEMO, "lexicon.tsv"), "--out", oracle_pred,
    ])

    dict_pred = os.path.join(OUT, "dictionary_population.pred")
    run("baseline (dictionary NER + population)", [
        "baseline", "--gold", gold, "--cache", cache, "--dictionary-ner", "--out", dict_pred,
    ])

    run("eval geotagging (dictionary vs oracle, McNemar)", [
        "eval-tagging", "--gold", gold, "--pred", dict_pred, "--pred-b", oracle_pred,
        "--cache", cache, "--mode", "exact",
        "--out", os.path.join(OUT, "tagging.report"),
        "--csv", os.path.join(OUT, "reports.csv"),
    ])

    # A degraded copy of the oracle system: every latitude nudged north.
    nudged_pred = os.path.join(OUT, "oracle_nudged.pred")
    with open(oracle_pred, encoding="utf-8") as fh:
        rows = [line.rstrip("\n").split("\t") for line in fh if line.strip()]
    with open(nudged_pred, "w", encoding="utf-8") as fh:
        for fields in rows:
            if fields[5]:
                fields[5] = f"{min(float(fields[5]) + 2.0, 90.0):.6f}"
            fh.write("\t".join(fields) + "\n")

    run("eval geocoding (population vs nudged copy, Wilcoxon)", [
        "eval-geocoding", "--gold", gold, "--pred", oracle_pred, "--pred-b", nudged_pred,
        "--cache", cache, "--thresholds", "5,50,161",
        "--out", os.path.join(OUT, "geocoding.report"),
        "--csv", os.path.join(OUT, "reports.csv"),
    ])

    run("align (snap nudged coordinates back to the gazetteer)", [
        "align", "--pred", nudged_pred, "--cache", cache,
        "--out", os.path.join(OUT, "oracle_nudged_aligned.pred"),
    ])

    run("folds", [
        "folds", "--gold", gold, "--k", "3", "--seed", "13",
        "--out", os.path.join(OUT, "folds.json"),
    ])

    run("augment", [
        "augment", "--gold", gold, "--max-per-source", "4", "--seed", "13",
        "--out", os.path.join(OUT, "augmented.conll"),
    ])

    print(f"\nAll steps finished; outputs under {OUT}/")


if __name__ == "__main__":
    main()
