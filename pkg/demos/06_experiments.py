"""
Running experiments from Python
===============================

Each experiment is registered under an id and returns a report with a
metrics table, verdicts and (for profile experiments) log-log curves.
The same runs are available on the command line as ``cm verify <EXP-ID>``.
"""

import tempfile

from carleson.harness import REGISTRY, render_report, run

for exp in REGISTRY.values():
    print(f"{exp.id:11s} {exp.title}")

# %%
# The welding and collar experiments take a few seconds.

for exp_id in ["EXP-WELD", "EXP-COLLAR"]:
    rep = run(exp_id)
    print(rep.summary())

# %%
# Reports serialize to canonical JSON and render to CSV and SVG.

out = tempfile.mkdtemp()
for kind, path in sorted(render_report(rep, out).items()):
    print(kind, path)
