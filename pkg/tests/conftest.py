"""Shared test helpers and the acceptance-criteria summary."""

from __future__ import annotations

import math

import numpy as np


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion in every run."""
    rows = []
    for status in ("passed", "failed"):
        for rep in terminalreporter.stats.get(status, []):
            if getattr(rep, "when", "call") != "call":
                continue
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            rows.append((nodeid.split("::")[-1], status == "passed"))
    if rows:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, ok in sorted(rows):
            terminalreporter.write_line(f"{name}: {'PASS' if ok else 'FAIL'}")


def wrap_angle(x: float) -> float:
    """Reduce an angle difference into (-pi, pi]."""
    k = math.floor((x + math.pi) / (2.0 * math.pi))
    wrapped = x - 2.0 * math.pi * k
    if wrapped <= -math.pi:
        wrapped = math.pi
    return wrapped


def rayleigh_uniformity_pvalue(phases: list[float]) -> float:
    """Rayleigh test p-value for circular uniformity (with small-n correction)."""
    n = len(phases)
    rbar = abs(np.mean(np.exp(1j * np.asarray(phases))))
    z = n * rbar * rbar
    return math.exp(-z) * (
        1.0
        + (2.0 * z - z * z) / (4.0 * n)
        - (24.0 * z - 132.0 * z**2 + 76.0 * z**3 - 9.0 * z**4) / (288.0 * n * n)
    )
