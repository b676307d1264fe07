"""Spearman rho of a records.tsv written by `forge evaluate`, computed with
scipy as an independent reference.

usage: python3 spearman_reference.py records.tsv > ../golden/report_rho.json
"""
import csv
import json
import sys

from scipy.stats import spearmanr

with open(sys.argv[1], newline="") as f:
    rows = list(csv.DictReader(f, delimiter="\t"))
rho = spearmanr([float(r["predicted"]) for r in rows], [float(r["gold"]) for r in rows]).statistic
print(json.dumps({"n_records": len(rows), "rho_overall": float(rho)}, indent=2))
