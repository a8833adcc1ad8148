"""
COMBOO against random search on the Toy problem
===============================================

Runs the optimiser and the baseline on the same seeds through the
experiment harness and compares final hypervolume and constraint regret.
Output files land in a temporary directory.
"""

import json
import tempfile

import numpy as np

from comboo.harness import parse_config, run_experiment

config = {"problem": "toy", "T": 30, "seeds": 3, "resolution": 51}

with tempfile.TemporaryDirectory() as out:
    res = run_experiment(parse_config(json.dumps(config)), out_dir=out, baselines=["random"])
    print("exit code", res.exit_code, "| true front hypervolume", round(res.hv_star, 5))
    for method in ("comboo", "random"):
        hv = [res.series[(method, s)].hv[-1] for s in range(3)]
        C = [res.series[(method, s)].C[-1] for s in range(3)]
        print(f"{method:7s} final hv {np.round(hv, 4)}  final C {np.round(C, 4)}")
