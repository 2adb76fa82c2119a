"""Fair versus classic engine on the benchmark families, small sizes."""
import sys

from fairltl.bench import csv_text, disagreements, make_cases, run_suite

sizes = [int(x) for x in sys.argv[1:]] or [2, 3, 4]
cases = make_cases(["PD", "BS"], sizes, ["p1", "p2", "p3", "p4", "Spec2"])
results = run_suite(cases, budget_ms=20_000)
print(csv_text(results), end="")
print("disagreements:", disagreements(results) or "none", file=sys.stderr)
