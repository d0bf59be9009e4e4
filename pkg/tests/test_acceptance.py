"""Acceptance suite: every criterion at full sample scale, one printed
pass/fail line each. Tolerances live inside the check implementations and
are pinned there; nothing is deferred to later calibration.
"""

import subprocess
import sys

from lpq2.selftest import (
    FULL,
    check_balanced_image_anchor,
    check_case_one_anchors,
    check_classifier_oracle_agreement,
    check_closedness,
    check_determinism,
    check_gap_evidence,
    check_inequality_sweeps,
    check_matched_pair_solver,
    check_rank_one_anchors,
    check_taylor_coefficients,
)

SEED = 2024


def _report(res):
    status = "PASS" if res.passed else "FAIL"
    print(f"[{status}] criterion {res.criterion}: {res.name} :: {res.details}")
    assert res.passed, res.details


def test_criterion_01_case_one_anchors():
    _report(check_case_one_anchors(scale=FULL, seed=SEED))


def test_criterion_02_balanced_image_anchor():
    _report(check_balanced_image_anchor(scale=FULL, seed=SEED))


def test_criterion_03_rank_one_anchors():
    _report(check_rank_one_anchors(scale=FULL, seed=SEED))


def test_criterion_04_taylor_coefficients():
    _report(check_taylor_coefficients(scale=FULL, seed=SEED))


def test_criterion_05_inequality_sweeps():
    _report(check_inequality_sweeps(scale=FULL, seed=SEED))


def test_criterion_06_matched_pair_solver():
    _report(check_matched_pair_solver(scale=FULL, seed=SEED))


def test_criterion_07_classifier_oracle_agreement():
    _report(check_classifier_oracle_agreement(scale=FULL, seed=SEED))


def test_criterion_08_closedness():
    _report(check_closedness(scale=FULL, seed=SEED))


def test_criterion_09_gap_evidence():
    _report(check_gap_evidence(scale=FULL, seed=SEED))


def test_criterion_10_selftest_determinism(tmp_path):
    """The CLI selftest run twice with one seed emits byte-identical JSON."""
    outs = []
    for k in range(2):
        path = tmp_path / f"selftest-{k}.json"
        proc = subprocess.run(
            [sys.executable, "-m", "lpq2.cli", "selftest", "--seed", "321",
             "--output", str(path)],
            capture_output=True,
            text=True,
            timeout=1200,
        )
        assert proc.returncode == 0, proc.stderr
        outs.append(path.read_bytes())
    identical = outs[0] == outs[1]
    print(f"[{'PASS' if identical else 'FAIL'}] criterion 10: selftest-determinism "
          f":: {{'bytes': {len(outs[0])}, 'identical': {identical}}}")
    assert identical
    res = check_determinism(scale=FULL, seed=SEED)
    assert res.passed, res.details
