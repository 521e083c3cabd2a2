"""
Experiments from JSON specs
===========================

The same specs the ``lindyn run`` command reads.  Reports are byte
stable unless timings are requested.
"""

import json
import os
import tempfile

from lindyn.runner import emit_report, load_specs, run_specs

specs = load_specs(json.dumps([
    {"experiment": "density", "family": {"name": "poly_trunc"}, "space": {"dim": 8},
     "params": {"epsilon": 1e-9, "R": 2.0, "spacing": 1.0, "effective_dims": 2, "use_witnesses": True}},
    {"experiment": "annulus", "params": {"target_count": 100, "r": 50.0}},
    {"experiment": "closure", "family": {"name": "rank_one"}, "space": {"dim": 3}},
]))

report = run_specs(specs)
for rec in report.records:
    print(rec["experiment"], rec["family"], rec["verdict"], rec["spec_digest"][:12])

with tempfile.TemporaryDirectory() as tmp:
    paths = [os.path.join(tmp, f"r{i}.jsonl") for i in range(2)]
    for p in paths:
        emit_report(run_specs(specs), p)
    a, b = (open(p, "rb").read() for p in paths)
    print("byte stable:", a == b)
