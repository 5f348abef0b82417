"""Collects one verdict line per acceptance criterion for the end-of-run summary."""

LINES = []


def record(number: int, passed: bool, detail: str) -> bool:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    LINES.append(line)
    print(line)
    return passed
