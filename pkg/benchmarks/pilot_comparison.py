"""Pilot Monte Carlo runs used to freeze the greedy-vs-random win threshold.

Run once before fixing the acceptance threshold; the output JSON is committed
next to this script. The acceptance suite uses a different master seed.
"""
import json
import time
from pathlib import Path

from colsel import BACKEND, __version__
from colsel.harness import EnsembleSpec, run_trials, summarize

PILOTS = [
    dict(rows=100, cols=1000, trials=20, k=10, seed=101),
    dict(rows=100, cols=1000, trials=20, k=10, seed=202),
    dict(rows=50, cols=500, trials=20, k=10, seed=303),
]
METHODS = ("greedy-exact", "random", "leverage")


def main(out=Path(__file__).with_name("pilot_comparison.json")):
    records = []
    for params in PILOTS:
        spec = EnsembleSpec(methods=METHODS, **params)
        t0 = time.perf_counter()
        rep = summarize(run_trials(spec))
        elapsed = time.perf_counter() - t0
        records.append(
            {
                "spec": spec.as_dict(),
                "win_rate_greedy_vs_random": rep.win_rate("greedy-exact", "random"),
                "win_rate_greedy_vs_leverage": rep.win_rate("greedy-exact", "leverage"),
                "median_sigma_min": rep.median_sigma_min,
                "elapsed_seconds": round(elapsed, 2),
            }
        )
        print(params, records[-1]["win_rate_greedy_vs_random"], f"{elapsed:.1f}s")
    doc = {
        "library_version": __version__,
        "backend": BACKEND,
        "frozen_threshold": 0.70,
        "acceptance_seed": 4242,
        "pilots": records,
    }
    out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
