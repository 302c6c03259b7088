"""Analyze the bundled choice-experiment cell counts: preference weights,
binomial and McNemar tests, and flags for published numbers that no
implemented variant reproduces.

    python3 demos/06_statistics.py
"""

from importlib import resources

from bornchoice import stats
from bornchoice.scenarios import BUILTIN_NAMES, builtin

# The bundled table has one row of cells per scenario: how many of the 200
# participants gave each of the four answer combinations.
with resources.as_file(resources.files("bornchoice").joinpath("data/table5.csv")) as path:
    rows = stats.load_counts_csv(path)

reports = []
for name, (label, counts) in zip(BUILTIN_NAMES, rows):
    report = stats.analyze(counts, scenario=builtin(name))
    reports.append(report)
    print(report.summary())
    print()

# The headline p-value is the plain normal approximation; the exact
# binomial and the McNemar variants are carried alongside so a published
# number can be matched against every candidate recipe.
machina = reports[1]
print("machina5051 question 1 variants:", {
    k: f"{v:.4g}" for k, v in machina.question_variants["q1"].items()
})
print("matched published values:", machina.matched)
print("flagged published values:", [(f.quantity, f.published) for f in machina.flags])

# Everything flattens to CSV rows for spreadsheet work.
print()
print("CSV columns:", ", ".join(stats.report_csv_rows(reports)[0].keys()))
