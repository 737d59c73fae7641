"""Run the weight, circle and map check suite and print a summary."""

import sys

from neumann_steklov.experiments import run_lemma_checks


def main():
    checks = run_lemma_checks()
    for c in checks:
        if not c.passed:
            print(c.line())
    bad = sum(not c.passed for c in checks)
    print(f"{len(checks) - bad}/{len(checks)} checks passed")
    return int(bad > 0)


if __name__ == "__main__":
    sys.exit(main())
