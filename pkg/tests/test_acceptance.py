"""Acceptance gate: the eleven shipped guarantees, one test each.

Every test runs its scripted check end to end, prints the one-line verdict,
and fails with that same line if the guarantee does not hold.
"""

import pytest

from hypkm.acceptance import (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
)


def run(criterion):
    r = criterion()
    print(r.line())
    assert r.passed, r.line()
    return r


def test_c01_axioms_hold_and_broken_combine_is_caught():
    run(criterion_1)


def test_c02_residuals_nonincreasing_over_map_family():
    run(criterion_2)


def test_c03_orbits_are_jointly_nonexpansive_in_start_and_parameter():
    run(criterion_3)


def test_c04_settling_recursion_matches_closed_forms_and_worked_values():
    run(criterion_4)


def test_c05_settling_index_monotone_in_depth():
    run(criterion_5)


def test_c06_residual_infimum_estimates_are_tight():
    run(criterion_6)


def test_c07_diagonal_product_run_certifies_at_tolerance():
    run(criterion_7)


def test_c08_family_route_degenerates_byte_identically():
    run(criterion_8)


def test_c09_displacement_moduli_hold_against_live_orbits():
    run(criterion_9)


def test_c10_displacement_modulus_bounds_the_diameter():
    run(criterion_10)


def test_c11_cli_reruns_are_byte_identical():
    run(criterion_11)
