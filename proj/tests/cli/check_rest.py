"""Checks the rest bound on a bouncing-ball trajectory CSV."""
import csv
import sys

worst = 0.0
with open(sys.argv[1]) as fh:
    for row in csv.DictReader(fh):
        if float(row["t"]) >= 4.35:
            worst = max(worst, abs(float(row["x0"])), abs(float(row["x1"])))
print(f"sup |x|_inf after 4.35 s: {worst:.3e}")
sys.exit(0 if worst <= 5e-3 else 1)
