"""Product-space approximate-fixed-point pipeline: oracles, the lift, the
certified and budgeted solver paths, fiber families, and the shipped
examples with their hand-computed orbits."""

import math
from fractions import Fraction

import pytest

from hypkm import (
    AnalyticOracle,
    ArgumentError,
    GridOracle,
    InvariantError,
    NonexpansiveMap,
    OracleError,
    ProbeContractError,
    ProductMap,
    SelectionError,
    approx_fixed_pair,
    certified_run,
    check_family_invariance,
    check_uniform_displacement,
    clamped_drop,
    constant_family,
    constant_map,
    constant_schedule,
    estimate_product_residual_inf,
    family_product,
    identity_map,
    make_certificate,
    make_interval,
    product,
    solve_example,
    solve_product_afpp,
)
from hypkm.config import canonical_json
from hypkm.product_afpp import (
    EXAMPLES,
    constant_example,
    diagonal_example,
    drift_example,
    drop_example,
    family_const_example,
    family_valid_example,
    family_violating_example,
)

UNIT = make_interval(0.0, 1.0)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


def test_grid_oracle_finds_constant_target():
    oracle = GridOracle(UNIT)
    f = constant_map(UNIT, 0.7)
    u = oracle.solve(f, 0.01)
    assert abs(u - 0.7) <= 0.01


def test_grid_oracle_identity_immediate():
    u = GridOracle(UNIT).solve(identity_map(UNIT), 0.5)
    assert UNIT.contains(u)


def test_grid_oracle_refinement_floor():
    # residual >= 0.5 everywhere, so refinement exhausts and reports the best
    jump = NonexpansiveMap(UNIT, lambda u: 0.0 if u > 0.5 else 1.0, "jump")
    oracle = GridOracle(UNIT, min_step=1e-3)
    with pytest.raises(OracleError) as exc:
        oracle.solve(jump, 0.1)
    assert "refinement floor" in str(exc.value)


def test_grid_oracle_needs_bounded_space_or_step():
    from hypkm import make_real_line

    with pytest.raises(ArgumentError):
        GridOracle(make_real_line())
    GridOracle(make_real_line(), initial_step=1.0)  # explicit step is fine


def test_analytic_oracle_post_checks_membership():
    bad = AnalyticOracle(UNIT, lambda f, eps: 3.0, label="escapes")
    with pytest.raises(OracleError) as exc:
        bad.solve(identity_map(UNIT), 0.1)
    assert "not a member" in str(exc.value)


def test_analytic_oracle_post_checks_residual():
    # claims u=0 solves f(u)=1: residual 1 > 0.1
    bad = AnalyticOracle(UNIT, lambda f, eps: 0.0, label="liar")
    with pytest.raises(OracleError) as exc:
        bad.solve(constant_map(UNIT, 1.0), 0.1)
    assert "residual" in str(exc.value)


def test_oracle_rejects_nonpositive_tolerance():
    with pytest.raises(ArgumentError):
        GridOracle(UNIT).solve(identity_map(UNIT), 0.0)


# ---------------------------------------------------------------------------
# the lift at a fixed index
# ---------------------------------------------------------------------------


def test_approx_fixed_pair_rejects_index_zero():
    ex = diagonal_example()
    with pytest.raises(ArgumentError):
        approx_fixed_pair(ex.T, ex.delta, ex.sched, ex.oracle, 0)


def test_constant_example_hand_values_at_five():
    # slice orbit from 0 toward 1 at lambda=1/2: x_5 = 1 - 2^-5 exactly
    ex = constant_example()
    step = approx_fixed_pair(ex.T, ex.delta, ex.sched, ex.oracle, 5)
    assert step.z == 0.5
    assert step.point == (0.96875, 0.5)
    assert step.residual == 0.03125
    assert step.slice_residual == 0.03125


def test_constant_example_residual_halves_each_step():
    ex = constant_example()
    for n in (1, 2, 3, 8):
        step = approx_fixed_pair(ex.T, ex.delta, ex.sched, ex.oracle, n)
        assert step.residual == 2.0**-n


def test_diagonal_pair_is_exactly_fixed():
    ex = diagonal_example()
    step = approx_fixed_pair(ex.T, ex.delta, ex.sched, ex.oracle, 1)
    assert step.point == (step.z, step.z)
    assert step.residual == 0.0


def test_drop_orbit_residuals_frozen():
    # orbit from 5 walks down half a unit per step, hits 1.0 at n=8, then
    # halves; residual is 1 through n=8 and equals the iterate afterwards
    ex = drop_example()
    res = {
        n: approx_fixed_pair(ex.T, ex.delta, ex.sched, ex.oracle, n).residual
        for n in (1, 5, 8, 9, 10, 12, 14, 15)
    }
    assert res[1] == res[5] == res[8] == 1.0
    assert res[9] == 0.5
    assert res[10] == 0.25
    assert res[12] == 2.0**-4
    assert res[14] == 2.0**-6 > 0.01
    assert res[15] == 2.0**-7 < 0.01


# ---------------------------------------------------------------------------
# infimum-residual estimation
# ---------------------------------------------------------------------------


def test_estimate_diagonal_is_zero_at_one():
    ex = diagonal_example()
    est = estimate_product_residual_inf(ex.T, ex.delta, ex.sched, ex.oracle, 1)
    assert est == 0.0


def test_estimate_identity_pair_is_zero():
    dom = product(UNIT, UNIT)
    T = ProductMap(dom, lambda p: p, "identity_pair")
    ex = diagonal_example()
    est = estimate_product_residual_inf(
        T, identity_map(UNIT), ex.sched, ex.oracle, 1
    )
    assert est == 0.0


def test_estimate_drift_stuck_at_one():
    # translation slices: the residual is exactly 1 at every index
    ex = drift_example()
    for N in (1, 3):
        est = estimate_product_residual_inf(ex.T, ex.delta, ex.sched, ex.oracle, N)
        assert est == 1.0


def test_estimate_constant_example_nonincreasing():
    ex = constant_example()
    est = {
        N: estimate_product_residual_inf(ex.T, ex.delta, ex.sched, ex.oracle, N)
        for N in (3, 6, 10)
    }
    assert est[3] == 0.125 and est[6] == 2.0**-6 and est[10] == 2.0**-10


def test_estimate_rejects_zero_horizon():
    ex = diagonal_example()
    with pytest.raises(ArgumentError):
        estimate_product_residual_inf(ex.T, ex.delta, ex.sched, ex.oracle, 0)


# ---------------------------------------------------------------------------
# certified runs
# ---------------------------------------------------------------------------


def test_certified_run_rate_certified_small_constants():
    # b1 = b2 = 1/1000 at eps 4 keeps the certified index at 3
    ex = diagonal_example()
    run = certified_run(
        ex.T, ex.delta, ex.sched, ex.oracle,
        b1=Fraction(1, 1000), b2=Fraction(1, 1000), eps=4, probe=lambda u: u,
    )
    assert run.truncated is False
    assert run.certified_n == 3 and run.n_used == 3
    assert run.step.residual == 0.0
    assert run.probe_residual == 0.0 and run.selection_residual == 0.0
    assert run.guarantee == 4.0 and run.inequality_ok
    cert = run.certificate
    assert cert is not None
    assert cert.theorem == "product-lift-rate-certified"
    assert cert.bound_used == 3 and cert.n_used == 3


def test_certified_run_budget_truncated():
    # at eps = 1/100 the certified index for this schedule overflows, so the
    # run happens at the budget and says so
    ex = diagonal_example()
    run = certified_run(
        ex.T, ex.delta, ex.sched, ex.oracle,
        b1=ex.b1, b2=ex.b2, eps=Fraction(1, 100), probe=ex.probe, budget=300,
    )
    assert run.truncated is True and run.certified_n is None
    assert run.n_used == 300
    assert run.step.residual == 0.0 and run.inequality_ok
    assert run.certificate.theorem == "product-lift-budget-truncated"
    assert run.certificate.bound_used is None


def test_certified_run_large_but_finite_bound_still_truncates():
    # at eps = 4 with b1 = 1 the certified index is finite yet astronomically
    # beyond any budget; the result records it and truncates
    ex = diagonal_example()
    run = certified_run(
        ex.T, ex.delta, ex.sched, ex.oracle,
        b1=ex.b1, b2=ex.b2, eps=4, probe=ex.probe, budget=200,
    )
    assert run.truncated is True
    assert run.certified_n is not None and run.certified_n > 10**400
    assert run.n_used == 200
    assert run.certificate.bound_used == run.certified_n


def test_probe_contract_distance_violation():
    ex = diagonal_example()
    with pytest.raises(ProbeContractError) as exc:
        certified_run(
            ex.T, ex.delta, ex.sched, ex.oracle,
            b1=Fraction(1, 1000), b2=1, eps=4, probe=lambda u: 1.0,
        )
    assert "exceeds b1" in str(exc.value)


def test_probe_contract_residual_violation():
    # probing the drop slice at x=5 shows residual 1, far above b2
    ex = drop_example()
    with pytest.raises(ProbeContractError) as exc:
        certified_run(
            ex.T, ex.delta, ex.sched, ex.oracle,
            b1=Fraction(1, 1000), b2=Fraction(1, 1000), eps=4, probe=lambda u: 5.0,
        )
    assert "slice residual" in str(exc.value)


def test_probe_contract_membership_violation():
    ex = diagonal_example()
    with pytest.raises(ProbeContractError) as exc:
        certified_run(
            ex.T, ex.delta, ex.sched, ex.oracle,
            b1=1, b2=1, eps=4, probe=lambda u: 2.0,
        )
    assert "outside the fiber" in str(exc.value)


def test_certified_run_argument_validation():
    ex = diagonal_example()
    with pytest.raises(ArgumentError):
        certified_run(
            ex.T, ex.delta, ex.sched, ex.oracle,
            b1=1, b2=1, eps=Fraction(1, 100), probe=ex.probe, budget=50,
        )  # budget below the minimum usable index 101
    with pytest.raises(ArgumentError):
        certified_run(
            ex.T, ex.delta, ex.sched, ex.oracle,
            b1=0, b2=1, eps=1, probe=ex.probe,
        )


# ---------------------------------------------------------------------------
# the solver
# ---------------------------------------------------------------------------


def test_solver_diagonal_residual_certified_at_budget():
    res = solve_example(diagonal_example(), Fraction(1, 100), budget=300)
    assert res.certificate is not None and not res.exhausted
    assert res.certificate.theorem == "product-afpp[sup-rC]:residual-certified-at-budget"
    assert res.best_residual == 0.0
    assert len(res.attempts) == 1
    a = res.attempts[0]
    assert a.eps_attempt == 0.01 and a.n == 300 and a.truncated and a.residual == 0.0


def test_solver_sup_rc_rate_certified():
    ex = diagonal_example()
    res = solve_product_afpp(
        ex.T, ex.delta, ex.sched, ex.oracle, 4,
        probe=lambda u: u, b1=Fraction(1, 1000), b2=Fraction(1, 1000),
    )
    assert res.certificate.theorem == "product-afpp[sup-rC]:rate-certified"
    assert res.attempts[0].n == 3 and not res.attempts[0].truncated
    assert res.certificate.bound_used == 3 and res.certificate.n_used == 3


def test_solver_bounded_orbit_rate_certified():
    # stationary slice orbits: delta sits on the slice fixed point, so any
    # positive orbit bound passes the precheck and the certified index for
    # eps=1/2 is just 7
    C, M = make_interval(0.0, 10.0), UNIT
    dom = product(C, M)
    T = clamped_drop(dom, 1.0)
    delta = NonexpansiveMap(M, lambda u: 0.0, "constant(0.0)")
    res = solve_product_afpp(
        T, delta, constant_schedule("1/2"), GridOracle(M),
        Fraction(1, 2), mode="bounded-orbit", orbit_bound=Fraction(1, 10**6),
    )
    assert res.certificate.theorem == "product-afpp[bounded-orbit]:rate-certified"
    assert res.certificate.bound_used == 7 and res.certificate.n_used == 7
    assert res.best_residual == 0.0


def test_bounded_orbit_precheck_rejects_false_bound():
    # from delta=5 the drop orbit strays 2.5 from its start; claiming 1 fails
    ex = drop_example()
    with pytest.raises(ProbeContractError) as exc:
        solve_product_afpp(
            ex.T, ex.delta, ex.sched, ex.oracle,
            Fraction(1, 2), mode="bounded-orbit", orbit_bound=1,
        )
    assert "orbit bound" in str(exc.value)


def test_solver_drift_exhausts_budget():
    res = solve_example(drift_example(), Fraction(1, 2), budget=50)
    assert res.exhausted and res.certificate is None
    assert res.best_residual == 1.0
    assert len(res.attempts) == 1
    assert res.attempts[0].truncated and res.attempts[0].n == 50


def test_solver_argument_validation():
    ex = diagonal_example()
    args = (ex.T, ex.delta, ex.sched, ex.oracle)
    with pytest.raises(ArgumentError):
        solve_product_afpp(*args, 0)
    with pytest.raises(ArgumentError):
        solve_product_afpp(*args, 1, budget=0)
    with pytest.raises(ArgumentError):
        solve_product_afpp(*args, 1, mode="bogus")
    with pytest.raises(ArgumentError):
        solve_product_afpp(*args, 1, mode="sup-rC")  # probe, b1, b2 missing
    with pytest.raises(ArgumentError):
        solve_product_afpp(*args, 1, mode="bounded-orbit")  # orbit_bound missing


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


def test_make_certificate_recomputes_and_rejects():
    ex = diagonal_example()
    with pytest.raises(InvariantError):
        make_certificate(ex.space, ex.T, (0.9, 0.1), 0.5, 1, None, "tag")
    cert = make_certificate(ex.space, ex.T, (0.3, 0.3), 0.5, 1, None, "tag")
    assert cert.residual == 0.0


def test_certificate_record_shape():
    ex = constant_example()
    step = approx_fixed_pair(ex.T, ex.delta, ex.sched, ex.oracle, 5)
    cert = make_certificate(ex.space, ex.T, step.point, 0.1, 5, 7, "tag")
    rec = cert.to_record()
    assert set(rec) == {
        "point", "residual", "eps_target", "n_used", "bound_used",
        "theorem", "space", "map",
    }
    assert rec["point"] == [0.96875, 0.5]
    assert rec["residual"] == "0.03125"
    assert rec["n_used"] == 5 and rec["bound_used"] == 7
    assert rec["space"] == ex.space.descriptor


# ---------------------------------------------------------------------------
# fiber families
# ---------------------------------------------------------------------------


def test_family_product_checks_selection():
    M = UNIT
    ambient = make_interval(0.0, 2.0)
    delta = constant_map(M, 0.9)
    with pytest.raises(SelectionError):
        family_product(
            M, lambda u: make_interval(0.0, 0.5 + u / 4.0), delta, ambient
        )


def test_family_invariance_valid_and_violating():
    ok = family_valid_example()
    rep = check_family_invariance(ok.T, ok.space, samples=60)
    assert rep.ok and rep.violations == []
    assert rep.summary() == "fiber invariance held on 60 samples"

    bad = family_violating_example()
    rep = check_family_invariance(bad.T, bad.space, samples=60)
    assert not rep.ok and rep.violations
    assert "fiber invariance failed" in rep.summary()
    with pytest.raises(ArgumentError):
        check_family_invariance(bad.T, bad.space, samples=0)


def test_family_drift_violation_arithmetic():
    # (1.5, 0.1) maps to first coordinate 1.6, outside the fiber [0, 1.1]
    bad = family_violating_example()
    img = bad.T((1.5, 0.1))[0]
    assert img == 1.6
    assert not bad.space.slice_space(0.1).contains(img)


def test_constant_family_is_plain_product():
    H = constant_family(UNIT, UNIT)
    assert H.descriptor == product(UNIT, UNIT).descriptor
    assert H.contains((0.5, 0.5)) and not H.contains((1.5, 0.5))


def test_family_const_run_matches_diagonal_byte_for_byte():
    recs = []
    for build in (diagonal_example, family_const_example):
        ex = build()
        res = solve_example(ex, Fraction(1, 100), budget=150)
        recs.append(canonical_json(res.certificate.to_record()))
    assert recs[0] == recs[1]


def test_family_valid_solves():
    ex = family_valid_example()
    res = solve_example(ex, Fraction(1, 4), budget=100)
    assert res.certificate is not None
    assert res.best_residual <= 0.25


# ---------------------------------------------------------------------------
# uniform displacement
# ---------------------------------------------------------------------------


def test_displacement_diagonal_identically_zero():
    ex = diagonal_example()
    rep = check_uniform_displacement(ex.T, ex.delta, 0.0, samples=100)
    assert rep.ok and rep.max_displacement == 0.0


def test_displacement_drift_bound_one_tight():
    ex = drift_example()
    rep = check_uniform_displacement(ex.T, ex.delta, 1.0, samples=50)
    assert rep.ok and rep.max_displacement == 1.0
    rep = check_uniform_displacement(ex.T, ex.delta, 0.5, samples=50)
    assert not rep.ok and rep.first_violation is not None


def test_displacement_drop_within_two():
    ex = drop_example()
    rep = check_uniform_displacement(ex.T, ex.delta, 2.0, samples=50)
    assert rep.ok and rep.max_displacement == 1.0
    with pytest.raises(ArgumentError):
        check_uniform_displacement(ex.T, ex.delta, 1.0, samples=0)


# ---------------------------------------------------------------------------
# catalog sanity
# ---------------------------------------------------------------------------


def test_examples_catalog_complete():
    assert set(EXAMPLES) == {
        "diagonal", "constant", "drop", "drift",
        "family_valid", "family_violating", "family_const",
    }
    for name, build in EXAMPLES.items():
        ex = build()
        assert ex.name == name
        assert ex.space.contains(ex.space.sample(__import__("random").Random(0)))


def test_estimate_within_two_eps_of_infimum():
    # with slice residual infimum r* the estimate at a modest horizon stays
    # within r* + 2*eps for eps = 1/2
    ex = drift_example()
    est = estimate_product_residual_inf(ex.T, ex.delta, ex.sched, ex.oracle, 4)
    assert est <= ex.r_star + 2 * 0.5
