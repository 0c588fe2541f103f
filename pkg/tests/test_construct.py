import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ipps.construct import (
    ConstructionParams,
    build_ipps,
    check_pairwise_noncollinear,
    derive_cases,
    derive_required_equations,
    ground_size,
    make_block,
    q_of_m,
    run_construction,
    template_for,
)
from ipps.core import SetSystem, encode_point
from ipps.equations import (
    LinearEquation,
    SolutionFreeSet,
    Triviality,
    canonicalize,
    greedy_solution_free,
)
from ipps.verify import max_pairwise_intersection, verify_ippsa, verify_ippsb

AE = Triviality.ALL_EQUAL
CM = Triviality.COEFF_MATCHED


@pytest.mark.parametrize("m, q", [(16, 4), (4, 3), (256, 8), (2, 2), (8, 4), (32, 5), (64, 6)])
def test_q_of_m(m, q):
    assert q_of_m(m) == q


def test_q_of_m_rejects_degenerate():
    for m in (0, 1):
        with pytest.raises(ValueError):
            q_of_m(m)


def _q_reference(m):
    # integer search on ceil(2^sqrt(log2 m)) = smallest Q with log2(Q)^2 >= log2(m)
    import math

    Q = 1
    while math.log2(Q) ** 2 < math.log2(m) - 1e-12:
        Q += 1
    return Q


@given(st.integers(2, 10**6))
def test_q_of_m_matches_float_reference_off_ties(m):
    import math

    ref = _q_reference(m)
    # skip the float-fragile neighbourhood of exact ties
    if abs(math.log2(ref) ** 2 - math.log2(m)) > 1e-9:
        assert q_of_m(m) == ref


def test_ground_size():
    assert ground_size(16, 4) == 640
    assert ground_size(4, 3) == 144
    with pytest.raises(ValueError):
        ground_size(1, 2)


def test_make_block_examples():
    p16 = ConstructionParams.for_m(16)
    assert make_block(1, 1, p16) == ((1, 1), (2, 3), (3, 6), (4, 10))
    assert make_block(2, 1, p16) == ((1, 2), (2, 4), (3, 7), (4, 11))
    top = make_block(16, 16, p16)
    assert top[-1] == (4, p16.values) == (4, (p16.q + 6) * 16)
    with pytest.raises(ValueError):
        make_block(17, 1, p16)


def test_noncollinearity():
    assert check_pairwise_noncollinear(template_for(4))
    assert not check_pairwise_noncollinear((0, 2, 2, 7))
    assert not check_pairwise_noncollinear((0, 2, 5, 5))


def test_params_reject_bad_values():
    with pytest.raises(ValueError):
        ConstructionParams(16, 4, 641, template_for(4))
    with pytest.raises(ValueError):
        ConstructionParams.for_m(1)


def _orbit(coeffs):
    out = set()
    for perm in itertools.permutations(coeffs):
        out.add(perm)
        out.add(tuple(-c for c in perm))
    return out


def test_disjoint_coordinates_give_the_three_generic_equations():
    q = 4
    expected = [(2, 3, q, -(q + 5)), (5, q + 3, -3, -(q + 5)), (5, q, -2, -(q + 3))]
    disjoint = {c.equation for c in derive_cases(q) if c.case == 1 and c.equation is not None}
    assert {e.coeffs for e in disjoint} == {canonicalize(LinearEquation(e)).coeffs for e in expected}
    assert all(e.triviality is AE for e in disjoint)


def test_shared_coordinate_instances():
    cases = derive_cases(4)
    inst2 = [c for c in cases if c.coordinates == (1, 2, 1, 3) and c.equation is not None]
    assert canonicalize(LinearEquation.matched(2, 5)) in {c.equation for c in inst2}
    inst3 = [c for c in cases if c.coordinates == (3, 4, 3, 4) and c.equation is not None]
    assert {c.equation for c in inst3} == {LinearEquation.sidon()}


def test_mixed_relation_identified_with_generic_one():
    q = 4
    mixed = LinearEquation((2, -q, -5, q + 3))
    generic = LinearEquation((5, q, -2, -(q + 3)))
    assert generic.coeffs in _orbit(mixed.coeffs)
    assert canonicalize(mixed) == canonicalize(generic) in derive_required_equations(q)


PAIRS_Q4 = {(2, 5), (2, 9), (5, 9), (2, 3), (2, 7), (3, 7), (3, 5), (4, 5), (3, 4), (7, 9), (4, 9), (4, 7)}


def test_full_requirement_list_q4():
    eqs = derive_required_equations(4)
    ae = {e for e in eqs if e.triviality is AE}
    cm = {e for e in eqs if e.triviality is CM}
    assert len(ae) == 3
    assert LinearEquation.sidon() in cm
    assert {canonicalize(LinearEquation.matched(a, b)) for a, b in PAIRS_Q4} | {
        LinearEquation.sidon()
    } == cm


@pytest.mark.parametrize("q", range(2, 12))
def test_emitted_equations_are_homogeneous(q):
    for eq in derive_required_equations(q):
        assert sum(eq.coeffs) == 0
        assert canonicalize(eq).coeffs == eq.coeffs


@pytest.mark.parametrize("q, coeffs", [(2, (5, 2, -2, -5)), (3, (1, 1, -1, -1)), (5, (1, 1, -1, -1))])
def test_coincident_slope_gaps_downgrade_matched_shape(q, coeffs):
    eqs = derive_required_equations(q)
    assert LinearEquation(coeffs, AE) in eqs
    assert LinearEquation(coeffs, CM) not in eqs


def test_no_downgrade_at_q4():
    assert all(
        e.triviality is CM for e in derive_required_equations(4) if e.coeffs[0] == -e.coeffs[3] or e.coeffs == (1, 1, -1, -1)
    )


def test_literal_matched_tagging_would_admit_a_failing_system():
    # At q = 5 the slope gaps 5 and q coincide; equal slopes on two pairs
    # of blocks then put four distinct blocks in an IPPSb configuration.
    params = ConstructionParams.for_m(32)
    assert params.q == 5
    V = params.values
    blocks = [
        tuple(sorted(encode_point(pt, V) for pt in make_block(p, s, params)))
        for p, s in [(1, 2), (6, 2), (6, 1), (11, 1)]
    ]
    system = SetSystem.from_blocks(params.n, 4, blocks, (4, V))
    assert not verify_ippsb(system, "exhaustive").passed
    with pytest.raises(ValueError):
        SolutionFreeSet(32, (1, 2), derive_required_equations(params))


def test_build_small_systems():
    params = ConstructionParams.for_m(2)
    system = build_ipps(params, SolutionFreeSet(2, (1,), derive_required_equations(params)))
    assert len(system) == 2 and max_pairwise_intersection(system) <= 1
    with pytest.raises(ValueError):
        build_ipps(params, SolutionFreeSet(4, (1,), ()))


@pytest.mark.parametrize("m", range(2, 33))
def test_soundness_bridge(m):
    params = ConstructionParams.for_m(m)
    S = greedy_solution_free(m, derive_required_equations(params))
    system = build_ipps(params, S)
    assert len(system) == m * len(S)
    assert system.n == ground_size(m, params.q)
    assert max_pairwise_intersection(system) <= 1
    for mode in ("fast", "exhaustive"):
        assert verify_ippsa(system, mode).passed
        assert verify_ippsb(system, mode).passed


@pytest.mark.parametrize("m", [8, 16, 24])
def test_dropping_last_slope_still_passes(m):
    params = ConstructionParams.for_m(m)
    eqs = derive_required_equations(params)
    S = greedy_solution_free(m, eqs)
    smaller = SolutionFreeSet(m, S.elements[:-1], eqs)
    system = build_ipps(params, smaller)
    assert len(system) == m * (len(S) - 1)
    assert verify_ippsb(system, "exhaustive").passed


def test_run_construction_modes():
    res = run_construction(16)
    assert res.slopes.elements == (1, 2, 7)
    assert res.sidecar()["n"] == 640 and res.sidecar()["blocks"] == 48
    res2 = run_construction(16, "provided-set", [1, 7])
    assert len(res2.system) == 32
    with pytest.raises(ValueError):
        run_construction(16, "provided-set", [1, 2, 3])
    with pytest.raises(ValueError):
        run_construction(16, "bogus")
