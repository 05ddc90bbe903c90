"""Tests for the coupled-bus response model and half-level solver."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cacforge.bus_model import (
    DEFAULT_LAMBDA,
    DEFAULT_TAU0_PS,
    FULL_SERIES,
    BusParams,
    ClosedFormResponse,
    ResponseTerm,
    TransitionPattern,
    TransitionSymbol,
    enumerate_patterns,
    five_wire_eigensystem,
    four_wire_eigensystem,
    modal_coefficient_slots,
    pattern_delay,
    solve_half_delay,
    synth_response,
)
from cacforge.errors import (
    BracketingError,
    ConfigError,
    NoTransitionError,
    PatternError,
)
from cacforge.exact import Quad


def _mid(text: str) -> TransitionPattern:
    return TransitionPattern.from_string(text, 2)


def _coupling_matrix(n: int, lam: float) -> np.ndarray:
    m = np.zeros((n, n))
    for i in range(n):
        m[i, i] = 1.0 + lam * ((i not in (0, n - 1)) + 1)
        if i > 0:
            m[i, i - 1] = -lam
        if i < n - 1:
            m[i, i + 1] = -lam
    return m


# -- symbols and patterns ---------------------------------------------------

def test_symbol_parsing_accepts_aliases() -> None:
    assert TransitionSymbol.from_char("u") is TransitionSymbol.UP
    assert TransitionSymbol.from_char("↑") is TransitionSymbol.UP
    assert TransitionSymbol.from_char("-") is TransitionSymbol.HOLD
    assert TransitionSymbol.from_char("0") is TransitionSymbol.HOLD
    assert TransitionSymbol.from_char("↓") is TransitionSymbol.DOWN
    with pytest.raises(PatternError):
        TransitionSymbol.from_char("x")


def test_pattern_shapes_are_validated() -> None:
    assert _mid("uuuuu").width == 5
    assert TransitionPattern.from_string("uud", 1).width == 3
    with pytest.raises(PatternError):
        TransitionPattern.from_string("uuuuu", 1)
    with pytest.raises(PatternError):
        TransitionPattern.from_string("uuuu", 2)
    with pytest.raises(PatternError):
        TransitionPattern.from_string("uu", 0)


def test_complement_and_mirror() -> None:
    p = _mid("du-ud")
    assert str(p.complement()) == "ud-du"
    assert str(p.mirrored()) == "du-ud"
    q = _mid("uud--")
    assert str(q.mirrored()) == "--duu"
    with pytest.raises(PatternError):
        TransitionPattern.from_string("uudd", 1).mirrored()


def test_enumeration_is_complete_and_ordered() -> None:
    mid = enumerate_patterns(5, 2)
    assert len(mid) == 81 == len(set(mid))
    assert str(mid[0]) == "uuuuu"
    assert str(mid[1]) == "uuuu-"
    assert str(mid[-1]) == "ddudd"
    assert all(p.examined_symbol is TransitionSymbol.UP for p in mid)

    w2 = enumerate_patterns(4, 1)
    w1 = enumerate_patterns(4, 0)
    assert len(w2) == len(w1) == 27
    assert str(w1[0]) == "uuuu"


# -- parameters -------------------------------------------------------------

def test_default_params_match_reference_node() -> None:
    p = BusParams()
    assert p.tau0_ps == DEFAULT_TAU0_PS
    assert p.lam == DEFAULT_LAMBDA
    assert p.tau_ps == pytest.approx(8 / math.pi ** 2 * 1.42, abs=1e-12)


def test_params_from_raw_parasitics() -> None:
    # 5 mm bus: R = 68.75 ohm, Cgnd = 41.32 fF, Ccouple = 505.68 fF in total
    length = 5000.0
    p = BusParams.from_raw(68.75 / length, 41.32e-15 / length, length,
                           cc_f_per_um=505.68e-15 / length)
    assert p.tau0_ps == pytest.approx(1.42, abs=0.001)
    assert p.lam == pytest.approx(12.24, abs=0.005)
    assert p.derived_tau0_ps() == pytest.approx(p.tau0_ps, rel=1e-12)


def test_params_consistency_check() -> None:
    with pytest.raises(ConfigError):
        BusParams(tau0_ps=2.0, lam=12.24, r_ohm_per_um=68.75 / 5000,
                  c_f_per_um=41.32e-15 / 5000, length_um=5000.0)
    with pytest.raises(ConfigError):
        BusParams.from_config({"tau0_ps": 1.42, "bogus": 1.0})
    with pytest.raises(ConfigError):
        BusParams.from_config({"r_ohm_per_um": 0.01})


# -- eigensystem ------------------------------------------------------------

@pytest.mark.parametrize("width,system", [
    (5, five_wire_eigensystem()),
    (4, four_wire_eigensystem()),
])
@pytest.mark.parametrize("lam", [1.0, 3.0, 12.24])
def test_modes_diagonalize_the_coupling_matrix(width, system, lam) -> None:
    m = _coupling_matrix(width, lam)
    for mode in system.modes:
        v = np.array([float(c) for c in mode.vector])
        assert np.max(np.abs(m @ v - mode.multiplier(lam) * v)) < 1e-12


def test_modes_are_orthogonal() -> None:
    for system in (five_wire_eigensystem(), four_wire_eigensystem()):
        vs = [np.array([float(c) for c in m.vector]) for m in system.modes]
        for i, vi in enumerate(vs):
            for vj in vs[i + 1:]:
                assert abs(vi @ vj) < 1e-12


def test_middle_wire_weights() -> None:
    system = five_wire_eigensystem()
    weights = [float(w) for w in system.weights(2)]
    assert weights == pytest.approx([0.2, 0.4, 0.4, 0.0, 0.0], abs=1e-15)
    assert system.coefficient_modes(2) == (0, 2, 1)


def test_side_wire_weights() -> None:
    system = four_wire_eigensystem()
    w1 = [float(w) for w in system.weights(0)]
    r2 = math.sqrt(2)
    assert w1 == pytest.approx(
        [0.25, -(2 + r2) / 8, 0.25, -(2 - r2) / 8], abs=1e-15)
    w2 = [float(w) for w in system.weights(1)]
    assert w2 == pytest.approx([0.25, -r2 / 8, -0.25, r2 / 8], abs=1e-15)


# -- closed-form responses --------------------------------------------------

def test_coefficients_sum_to_four_over_pi_scale() -> None:
    for pattern in enumerate_patterns(5, 2) + enumerate_patterns(4, 1):
        total = Quad(0)
        for c in modal_coefficient_slots(pattern):
            total = total + c
        assert total.key() == (4, 0)


def test_truncation_residual_in_band() -> None:
    params = BusParams()
    for text in ("uuuuu", "ududu", "d-u-d", "-uuud"):
        resp = synth_response(_mid(text), params)
        residual = resp.final_level - sum(t.coeff for t in resp.terms)
        assert abs(residual) == pytest.approx(4 / math.pi - 1, abs=1e-12)


def test_terms_sorted_by_time_constant() -> None:
    resp = synth_response(_mid("ududu"), BusParams())
    multipliers = [t.a for t in resp.terms]
    assert multipliers == sorted(multipliers)


def test_full_series_starts_at_zero() -> None:
    resp = synth_response(_mid("uuuuu"), BusParams())
    assert resp.value(0.0, harmonics=FULL_SERIES) == pytest.approx(0.0, abs=1e-12)
    assert resp.value(0.0) == pytest.approx(1 - 4 / math.pi, abs=1e-12)


# -- half-level solver ------------------------------------------------------

def test_single_mode_delay_is_log_closed_form() -> None:
    # lone-mode response: crossing at tau * ln(8/pi), the crosstalk-free delay
    params = BusParams()
    delay = pattern_delay(_mid("uuuuu"), params)
    assert delay == pytest.approx(params.tau_ps * math.log(8 / math.pi), abs=2e-5)
    assert delay == pytest.approx(1.08, abs=0.005)


def _dense_series(resp: ClosedFormResponse, grid: np.ndarray,
                  harmonics: int) -> np.ndarray:
    """Independent vectorized evaluation of the response on a time grid."""
    acc = np.full_like(grid, float(resp.final_level))
    for term in resp.terms:
        x = grid / (term.a * resp.tau_ps)
        if harmonics:
            s = np.zeros_like(x)
            for k in range(1000):
                m = 2 * k + 1
                exponent = np.clip(m * m * x, None, 700.0)
                s += ((-1) ** k / m) * np.exp(-exponent)
        else:
            s = np.exp(-x)
        acc = acc - term.coeff * s
    return acc


@pytest.mark.parametrize("text,examined", [
    ("ududu", 2), ("udud-", 2), ("u-u-u", 2), ("uudu", 1), ("duud", 1),
])
@pytest.mark.parametrize("harmonics", [0, FULL_SERIES])
def test_solver_agrees_with_dense_scan(text, examined, harmonics) -> None:
    params = BusParams()
    pattern = TransitionPattern.from_string(text, examined)
    resp = synth_response(pattern, params)
    solved = solve_half_delay(resp, harmonics=harmonics)

    grid = np.linspace(0.0, max(4.0 * solved, 10.0), 200001)
    values = _dense_series(resp, grid, harmonics)
    above = values >= 0.5 * resp.final_level
    last_cross = np.max(np.nonzero(above[1:] != above[:-1]))
    assert abs(solved - grid[last_cross]) < 2 * (grid[1] - grid[0])


def test_last_crossing_wins_over_early_dip() -> None:
    # engineered response that starts above one half, dips below, recovers:
    # the reported delay must be the final upward crossing
    tau = 1.0
    resp = ClosedFormResponse(
        final_level=1,
        terms=(ResponseTerm(-1.0, 0.05, Quad(-1), Quad(0)),
               ResponseTerm(1.27, 1.0, Quad(1), Quad(0))),
        tau_ps=tau,
        pattern=_mid("uuuuu"))
    assert resp.value(0.0) == pytest.approx(0.73, abs=1e-12)
    delay = solve_half_delay(resp)
    assert delay == pytest.approx(tau * math.log(1.27 / 0.5), rel=1e-3)
    assert resp.value(0.12 * tau) < 0.5 < resp.value(0.0)


def test_complement_and_mirror_delays_match() -> None:
    params = BusParams()
    for text in ("ududu", "-uuud", "ddu-d"):
        base = pattern_delay(_mid(text), params)
        assert pattern_delay(_mid(text).complement(), params) == pytest.approx(
            base, rel=1e-12)
        assert pattern_delay(_mid(text).mirrored(), params) == pytest.approx(
            base, rel=1e-12)


def test_delay_scales_linearly_with_tau0() -> None:
    lam = DEFAULT_LAMBDA
    base = pattern_delay(_mid("ududu"), BusParams(tau0_ps=1.42, lam=lam))
    fast = pattern_delay(_mid("ududu"), BusParams(tau0_ps=0.5, lam=lam))
    slow = pattern_delay(_mid("ududu"), BusParams(tau0_ps=5.0, lam=lam))
    assert fast == pytest.approx(base * 0.5 / 1.42, rel=1e-5)
    assert slow == pytest.approx(base * 5.0 / 1.42, rel=1e-5)


def test_worst_pattern_delay_grows_with_coupling() -> None:
    delays = [pattern_delay(_mid("ududu"), BusParams(tau0_ps=1.42, lam=lam))
              for lam in (3.0, 6.0, 9.0, 13.0)]
    assert delays == sorted(delays)
    assert delays[0] > 10.0


def test_hold_pattern_has_no_transition() -> None:
    params = BusParams()
    assert pattern_delay(_mid("uu-uu"), params) == 0.0
    with pytest.raises(NoTransitionError):
        solve_half_delay(synth_response(_mid("uu-uu"), params))


def test_never_crossing_response_raises() -> None:
    resp = ClosedFormResponse(
        final_level=1,
        terms=(ResponseTerm(0.3, 1.0, Quad(0), Quad(0)),),
        tau_ps=1.0,
        pattern=_mid("uuuuu"))
    with pytest.raises(BracketingError):
        solve_half_delay(resp)


@settings(max_examples=60, deadline=None)
@given(
    free=st.lists(st.sampled_from("u-d"), min_size=4, max_size=4),
    lam=st.floats(min_value=3.0, max_value=13.0),
)
def test_random_patterns_solve_and_stay_symmetric(free, lam) -> None:
    text = f"{free[0]}{free[1]}u{free[2]}{free[3]}"
    params = BusParams(tau0_ps=1.42, lam=lam)
    delay = pattern_delay(TransitionPattern.from_string(text, 2), params)
    twin = pattern_delay(TransitionPattern.from_string(text, 2).complement(),
                         params)
    assert delay > 0.0
    assert twin == pytest.approx(delay, rel=1e-12)
