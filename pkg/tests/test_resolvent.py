import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pencil_resolvent.errors import OutsideAnnulus, SingularNode
from pencil_resolvent.linalg_core import DEFAULT_TOL, Subspace
from pencil_resolvent.pencil import (Annulus, BasicSolution, OperatorPencil,
                                     closed_form_resolvent, fundamental_residuals)
from pencil_resolvent.pipeline import PipelineConfig, run_pipeline
from pencil_resolvent.projections import build_decomposition
from pencil_resolvent.resolvent import (LaurentExpansion, OracleConfig, basic_checks,
                                        coefficient_rel_errors, contour_oracle, eval_laurent,
                                        laurent_coeffs, solve_basic, terms_for,
                                        validate_resolvent)
from pencil_resolvent.zoo import FamilySpec, build, family_annulus, random_regular

from pencils import weierstrass_pencil

FROZEN = json.loads((Path(__file__).parent / "data" / "oracle_frozen.json").read_text())
JORDAN = OperatorPencil([[0, 1], [0, 0]], np.eye(2))
POLE = OperatorPencil(np.zeros((2, 2)), np.eye(2))


def frozen(key, name):
    return np.array(FROZEN[key][name])[..., 0] + 1j * np.array(FROZEN[key][name])[..., 1]


@pytest.fixture(scope="module")
def example3():
    p = build(FamilySpec("example3"))
    return {region: run_pipeline(p, family_annulus(p, region), PipelineConfig())
            for region in ("near-zero", "near-infinity")}


# --- basic solution ----------------------------------------------------------------

def test_basic_solution_of_pure_pole():
    dec = build_decomposition(POLE, Subspace.full(2), Subspace.zero(2))
    b = solve_basic(POLE, dec)
    assert np.allclose(b.r_m1, np.eye(2)) and np.allclose(b.r_0, 0)


def test_example3_near_infinity_r0_diagonal(example3):
    r0 = example3["near-infinity"].basic.r_0
    assert np.allclose(r0, np.diag(np.tile([1.0, 0.0], 6)), atol=1e-12)


def test_example3_near_zero_r0_entries(example3):
    r0 = example3["near-zero"].basic.r_0
    assert r0[0, 1] == pytest.approx(-0.5, abs=1e-12)
    assert r0[1, 1] == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("region", ["near-zero", "near-infinity"])
def test_example3_basic_identities(example3, region):
    res = example3[region]
    checks = basic_checks(res.pencil, res.basic, res.decomposition, block=res.block)
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]


# --- coefficients -----------------------------------------------------------------

def test_jordan_coefficients():
    exp = laurent_coeffs(BasicSolution(np.eye(2), np.zeros((2, 2))), JORDAN, 4, 3)
    assert np.allclose(exp[-1], np.eye(2))
    assert np.allclose(exp[-2], -JORDAN.a0)
    assert np.allclose(exp[-3], 0) and np.allclose(exp[-4], 0)
    assert all(np.allclose(exp[j], 0) for j in range(0, 4))


def test_pure_pole_coefficients():
    exp = laurent_coeffs(BasicSolution(np.eye(2), np.zeros((2, 2))), POLE, 5, 1)
    assert all(not np.any(exp[-k]) for k in range(2, 6))
    assert (exp.j_min, exp.j_max) == (-5, 1)


def test_coefficient_limits_validated():
    b = BasicSolution(np.eye(2), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        laurent_coeffs(b, POLE, 0, 1)
    with pytest.raises(ValueError):
        laurent_coeffs(b, POLE, 1, -1)


def test_expansion_must_be_contiguous():
    with pytest.raises(ValueError):
        LaurentExpansion({-1: np.eye(2), 1: np.eye(2)})


def test_example3_outer_rate():
    p = build(FamilySpec("example3"))
    res = run_pipeline(p, family_annulus(p, "near-zero"), PipelineConfig(l_max=40))
    assert res.expansion.outer_rate == pytest.approx(0.5, rel=0.1)


def test_example3_inner_rate():
    p = build(FamilySpec("example3"))
    res = run_pipeline(p, family_annulus(p, "near-infinity"), PipelineConfig(k_max=40))
    assert res.expansion.inner_rate == pytest.approx(2.0, rel=0.1)
    est = res.expansion.estimated_annulus()
    assert est is not None and est.s == pytest.approx(2.0, rel=0.1)


@pytest.mark.parametrize("region", ["near-zero", "near-infinity"])
def test_example3_fundamental_equations(example3, region):
    res = example3[region]
    rep = fundamental_residuals(res.pencil, res.expansion, js=range(-19, 21), block=res.block)
    assert rep.max() <= 1e-9


# --- evaluation ---------------------------------------------------------------------

def test_eval_single_pole_term():
    exp = LaurentExpansion({-1: np.eye(2)})
    assert np.allclose(eval_laurent(exp, 2), 0.5 * np.eye(2))


def test_eval_jordan_expansion():
    exp = laurent_coeffs(BasicSolution(np.eye(2), np.zeros((2, 2))), JORDAN, 3, 1)
    assert np.allclose(eval_laurent(exp, 2), [[0.5, -0.25], [0, 0.5]])


def test_eval_outside_annulus():
    exp = LaurentExpansion({-1: np.eye(2), 0: np.zeros((2, 2))}, Annulus(0, 1))
    with pytest.raises(OutsideAnnulus):
        eval_laurent(exp, 2)
    with pytest.raises(OutsideAnnulus):
        eval_laurent(LaurentExpansion({-1: np.eye(2)}), 0)


def test_eval_reports_tail(example3):
    exp = example3["near-zero"].expansion
    _, tail = eval_laurent(exp, 0.5, return_tail=True)
    assert 0 <= tail < 1e-8


def test_example3_laurent_matches_closed_form(example3):
    res = example3["near-zero"]
    z, k = 0.5, res.block
    lr = eval_laurent(res.expansion, z)
    cf = closed_form_resolvent(res.basic, res.pencil, z)
    assert np.abs(lr - cf)[:k, :k].max() <= 1e-8


@pytest.mark.parametrize("inner,outer,z,expected", [
    (0.0, 0.5, 0.5, (2, 26)), (None, None, 1.0, (2, 2)), (2.0, 0.0, 4.0, (49, 2)),
])
def test_terms_for(inner, outer, z, expected):
    assert terms_for((inner, outer), z) == expected


# --- contour oracle ------------------------------------------------------------------

def test_oracle_pure_pole():
    exp = contour_oracle(POLE, OracleConfig(1.0, 64), -4, 4)
    assert np.abs(exp[-1] - np.eye(2)).max() <= 1e-12
    assert all(np.abs(exp[j]).max() <= 1e-12 for j in range(-4, 5) if j != -1)


def test_oracle_jordan_block():
    exp = contour_oracle(JORDAN, OracleConfig(1.0, 64), -3, 3)
    assert np.abs(exp[-2] + JORDAN.a0).max() <= 1e-12


def test_oracle_singular_node():
    p = OperatorPencil(np.eye(2), np.eye(2))  # singular at z = -1, a node of any even grid
    with pytest.raises(SingularNode) as err:
        contour_oracle(p, OracleConfig(1.0, 32), -2, 2)
    assert err.value.node == 16


@pytest.mark.parametrize("radius,nodes", [(0.0, 64), (math.inf, 64), (1.0, 8)])
def test_oracle_config_validated(radius, nodes):
    with pytest.raises(ValueError):
        OracleConfig(radius, nodes)


def test_oracle_range_must_fit_grid():
    with pytest.raises(ValueError):
        contour_oracle(POLE, OracleConfig(1.0, 16), -8, 8)


def test_oracle_aliasing_bound_small_for_resolved_expansion():
    exp = contour_oracle(random_regular(4, 3), OracleConfig(1.0, 512), -2, 2)
    assert exp.aliasing_bound < 1e-12


# --- frozen independent references ------------------------------------------------------

@pytest.mark.parametrize("region", ["near-zero", "near-infinity"])
@pytest.mark.parametrize("name", ["R_-1", "R_0", "P", "Q"])
def test_example3_matches_frozen_oracle(example3, region, name):
    res = example3[region]
    dec = res.decomposition
    got = {"R_-1": res.basic.r_m1, "R_0": res.basic.r_0, "P": dec.p, "Q": dec.q}[name]
    k = res.block
    assert np.abs(got - frozen(f"example3/{region}", name))[:k, :k].max() <= 1e-8


def test_random_regular_matches_frozen_oracle():
    p = random_regular(4, 7)
    assert np.allclose(p.a0, frozen("random_regular/n4_seed7", "a0"), rtol=0, atol=1e-15)
    res = run_pipeline(p, family_annulus(p), PipelineConfig(k_max=5, l_max=5))
    for j in range(-5, 6):
        ref = frozen("random_regular/n4_seed7", f"R_{j}")
        assert np.linalg.norm(res.expansion[j] - ref) <= 1e-6 * np.linalg.norm(ref)


@pytest.mark.parametrize("seed", range(5))
def test_random_regular_pipeline_matches_oracle(seed):
    p = random_regular(4, seed)
    ann = family_annulus(p)
    res = run_pipeline(p, ann, PipelineConfig(k_max=5, l_max=5))
    ora = contour_oracle(p, OracleConfig(1.0), -5, 5)
    errs = coefficient_rel_errors(ora, res.expansion, range(-5, 6))
    assert max(errs.values()) <= 1e-6, errs


# --- validation ---------------------------------------------------------------------------

def test_validate_trivial_pencil():
    b = BasicSolution(np.eye(2), np.zeros((2, 2)))
    exp = laurent_coeffs(b, POLE, 3, 1)
    checks = validate_resolvent(POLE, b, exp, [0.5, 2j])
    assert all(c.value == 0 for c in checks)


@pytest.mark.parametrize("region,samples", [
    ("near-zero", [0.3, 0.5j, -0.8]),
    ("near-infinity", [3, -4j, 10]),
])
def test_validate_example3(region, samples):
    p = build(FamilySpec("example3"))
    ann = family_annulus(p, region)
    base = run_pipeline(p, ann, PipelineConfig())
    rates = (base.expansion.inner_rate, base.expansion.outer_rate)
    k_max = max(max(terms_for(rates, z)[0] for z in samples), 1)
    l_max = max(terms_for(rates, z)[1] for z in samples)
    exp = laurent_coeffs(base.basic, p, k_max, l_max)
    checks = validate_resolvent(p, base.basic, exp, samples, block=base.block)
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]


def test_validate_rejects_sample_outside_annulus(example3):
    res = example3["near-zero"]
    with pytest.raises(OutsideAnnulus):
        validate_resolvent(res.pencil, res.basic, res.expansion, [3.0])


# --- properties -----------------------------------------------------------------------------

def _weierstrass_run(seed, **kw):
    p, ann = weierstrass_pencil(np.random.default_rng(seed), **kw)
    return run_pipeline(p, ann, PipelineConfig(k_max=8, l_max=8)), ann


def _scale(res):
    return max(1.0, max(float(np.linalg.norm(r)) for r in res.expansion.coeffs.values()))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 2), st.integers(0, 2))
def test_fundamental_equations_hold(seed, n_zero, n_inf):
    res, _ = _weierstrass_run(seed, n_zero=n_zero, n_inf=n_inf)
    rep = fundamental_residuals(res.pencil, res.expansion)
    assert rep.max() <= DEFAULT_TOL.residual_abs * _scale(res)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_coefficients_respect_projections(seed):
    res, _ = _weierstrass_run(seed)
    dec = res.decomposition
    for j, r in res.expansion.coeffs.items():
        side = (dec.p, dec.q) if j <= -1 else (dec.pc, dec.qc)
        assert np.linalg.norm(side[0] @ r @ side[1] - r) <= DEFAULT_TOL.residual_abs * _scale(res)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_pipeline_matches_oracle(seed):
    res, ann = _weierstrass_run(seed)
    ora = contour_oracle(res.pencil, OracleConfig.for_annulus(ann), -5, 5)
    errs = coefficient_rel_errors(ora, res.expansion, range(-5, 6))
    assert max(errs.values()) <= 1e-6, errs


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_resolvent_equation(seed, t1, t2):
    # the shifted family (lam A0 - A1)^{-1} A0 = lam^{-1} R(-1/lam) A0 obeys the
    # first resolvent identity
    res, ann = _weierstrass_run(seed)
    z1 = 0.7 * np.exp(1j * t1)
    z2 = 1.4 * np.exp(1j * t2)
    lam, mu = -1 / z1, -1 / z2
    a0 = res.pencil.a0

    def shifted(lam):
        return closed_form_resolvent(res.basic, res.pencil, -1 / lam) @ a0 / lam

    rl, rm = shifted(lam), shifted(mu)
    lhs = rl - rm
    rhs = (mu - lam) * rl @ rm
    assert np.linalg.norm(lhs - rhs) <= 1e-8 * max(1.0, np.linalg.norm(lhs))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.6, 1.6), st.floats(0, 2 * math.pi))
def test_closed_form_matches_partial_sum(seed, radius, angle):
    res, ann = _weierstrass_run(seed)
    z = radius * np.exp(1j * angle)
    rates = (res.expansion.inner_rate, res.expansion.outer_rate)
    k, l = terms_for(rates, z)
    exp = laurent_coeffs(res.basic, res.pencil, k, l)
    cf = closed_form_resolvent(res.basic, res.pencil, z)
    lr, tail = eval_laurent(exp, z, return_tail=True)
    assert np.linalg.norm(lr - cf) <= 1e-8 * max(1.0, np.linalg.norm(cf)) + tail
