"""Acceptance gate: every criterion runs at its stated tolerance.

Each test prints one PASS line with the measured detail; the same registry
backs the CLI ``verify`` command.
"""
import pytest

from edgeband.acceptance import CHECKS


@pytest.mark.parametrize("number,name,fn", CHECKS, ids=[f"criterion_{c[0]:02d}" for c in CHECKS])
def test_acceptance_criterion(number, name, fn):
    detail = fn()
    print(f"\nACCEPTANCE {number:2d} PASS - {name}: {detail}")
