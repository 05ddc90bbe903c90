"""Distributed-RC crosstalk delay model for 4- and 5-wire bus windows.

A uniformly coupled bus satisfies a diffusion-type PDE in which the wire
voltages couple only through the capacitance matrix C.  Normalising C by the
ground capacitance c gives, for a 5-wire window,

        C/c = I + lam * L5,     L5 = tridiag(-1; [1,2,2,2,1]; -1)

and analogously for 4 wires.  Diagonalising C/c decouples the bus into
independent single-wire lines whose capacitance is scaled by the eigenvalue
p_i(lam) = 1 + mu_i * lam.  Each decoupled line is treated with the classic
one-exponent step-response approximation

        u(t) ~ u_final - (4/pi) * (u_final - u_init) * exp(-t / (p_i * tau)),

        tau = (8 / pi^2) * tau0,    tau0 = 0.5 * R * C_gnd,

so the voltage of the examined wire becomes a short sum of exponentials whose
coefficients are exact elements of Q(sqrt 5) (5 wires) or Q(sqrt 2) (4 wires)
divided by pi.  The 50% delay is the *last* crossing of half the final level;
responses with opposing coupling terms can recross, so the solver brackets the
final sign change before bisecting.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    BracketingError,
    ConfigError,
    NoTransitionError,
    PatternError,
)
from .exact import Quad, quad_sqrt2, quad_sqrt5

# Defaults reproduce the reference 5 mm / 0.18 um global-interconnect corner:
# R = 68.75 ohm, C_gnd = 41.32 fF, C_couple = 505.68 fF.
DEFAULT_TAU0_PS = 1.42
DEFAULT_LAMBDA = 12.24

# One-exponent approximation constants: r0 = -4/pi at s0 = 1.
FOUR_OVER_PI = 4.0 / math.pi
TAU_SCALE = 8.0 / math.pi**2

# |final - sum(coeffs)| equals (1 - 4/pi) ~ 0.2732 for a switching wire; the
# truncation residual must stay inside this band or the synthesis is wrong.
RESIDUAL_BAND = 0.35

SOLVER_TOL_PS = 1e-5
SCAN_START_FACTOR = 0.01
SCAN_GROWTH = 1.2
SCAN_HORIZON_FACTOR = 1e4


class TransitionSymbol(enum.Enum):
    """Per-wire transition: rising, steady, or falling."""

    UP = 1
    HOLD = 0
    DOWN = -1

    @property
    def delta(self) -> int:
        return self.value

    @property
    def char(self) -> str:
        return {1: "u", 0: "-", -1: "d"}[self.value]

    @classmethod
    def from_char(cls, ch: str) -> "TransitionSymbol":
        table = {
            "u": cls.UP, "U": cls.UP, "^": cls.UP, "↑": cls.UP,
            "-": cls.HOLD, "0": cls.HOLD, "−": cls.HOLD, "h": cls.HOLD,
            "d": cls.DOWN, "D": cls.DOWN, "v": cls.DOWN, "↓": cls.DOWN,
        }
        try:
            return table[ch]
        except KeyError:
            raise PatternError(f"unknown transition symbol {ch!r}") from None

    def complement(self) -> "TransitionSymbol":
        return TransitionSymbol(-self.value)


# Enumeration order used throughout: Up first, then Hold, then Down.
SYMBOL_ORDER = (TransitionSymbol.UP, TransitionSymbol.HOLD, TransitionSymbol.DOWN)


@dataclass(frozen=True)
class TransitionPattern:
    """A window of per-wire transitions with one examined (victim) wire.

    Widths and examined positions follow the window taxonomy:
    width 5 examines the middle wire, width 4 examines wire 1 or 2 (the
    right edge is handled by mirroring before construction), width 3 is
    only used by the legacy lumped classifier.
    """

    symbols: tuple[TransitionSymbol, ...]
    examined: int

    def __post_init__(self) -> None:
        width = len(self.symbols)
        if width == 5:
            allowed = (2,)
        elif width == 4:
            allowed = (0, 1)
        elif width == 3:
            allowed = (1,)
        else:
            raise PatternError(f"unsupported window width {width}")
        if self.examined not in allowed:
            raise PatternError(
                f"examined index {self.examined} invalid for width {width}")

    @property
    def width(self) -> int:
        return len(self.symbols)

    @property
    def examined_symbol(self) -> TransitionSymbol:
        return self.symbols[self.examined]

    @property
    def deltas(self) -> tuple[int, ...]:
        return tuple(s.delta for s in self.symbols)

    def complement(self) -> "TransitionPattern":
        return TransitionPattern(
            tuple(s.complement() for s in self.symbols), self.examined)

    def mirrored(self) -> "TransitionPattern":
        """Left-right reflection; only widths whose examined wire stays at a
        legal position support this (width 5 and width 3)."""
        if self.width not in (3, 5):
            raise PatternError("mirror is defined for symmetric windows only")
        return TransitionPattern(tuple(reversed(self.symbols)), self.examined)

    def __str__(self) -> str:
        return "".join(s.char for s in self.symbols)

    @classmethod
    def from_string(cls, text: str, examined: int) -> "TransitionPattern":
        return cls(tuple(TransitionSymbol.from_char(ch) for ch in text), examined)


@dataclass(frozen=True)
class BusParams:
    """Electrical operating point: intrinsic delay tau0 and coupling ratio.

    Either supply (tau0_ps, lam) directly or derive them from raw per-length
    parasitics; when both are present they must agree to 1e-9 relative.
    """

    tau0_ps: float = DEFAULT_TAU0_PS
    lam: float = DEFAULT_LAMBDA
    r_ohm_per_um: Optional[float] = None
    c_f_per_um: Optional[float] = None
    cc_f_per_um: Optional[float] = None
    length_um: Optional[float] = None

    def __post_init__(self) -> None:
        if self.tau0_ps <= 0:
            raise ConfigError("tau0 must be positive")
        if self.lam < 0:
            raise ConfigError("coupling ratio lambda must be non-negative")
        raw = (self.r_ohm_per_um, self.c_f_per_um, self.length_um)
        if any(v is not None for v in raw):
            if any(v is None for v in raw):
                raise ConfigError(
                    "raw parasitics need r_ohm_per_um, c_f_per_um and length_um")
            derived = self.derived_tau0_ps()
            if abs(derived - self.tau0_ps) > 1e-9 * max(abs(self.tau0_ps), 1e-30):
                raise ConfigError(
                    f"tau0 {self.tau0_ps} ps inconsistent with parasitics "
                    f"({derived} ps derived)")
            if self.cc_f_per_um is not None:
                lam = self.cc_f_per_um / self.c_f_per_um
                if abs(lam - self.lam) > 1e-9 * max(abs(self.lam), 1e-30):
                    raise ConfigError(
                        f"lambda {self.lam} inconsistent with parasitics "
                        f"({lam} derived)")

    def derived_tau0_ps(self) -> float:
        """tau0 = 0.5 * (r*L) * (c*L), converted to picoseconds."""
        r_total = self.r_ohm_per_um * self.length_um
        c_total = self.c_f_per_um * self.length_um
        return 0.5 * r_total * c_total * 1e12

    @property
    def tau_ps(self) -> float:
        """Dominant-mode time constant of the uncoupled line."""
        return TAU_SCALE * self.tau0_ps

    @classmethod
    def from_raw(cls, r_ohm_per_um: float, c_f_per_um: float, length_um: float,
                 cc_f_per_um: Optional[float] = None,
                 lam: Optional[float] = None) -> "BusParams":
        tau0 = 0.5 * (r_ohm_per_um * length_um) * (c_f_per_um * length_um) * 1e12
        if lam is None:
            if cc_f_per_um is None:
                raise ConfigError("need cc_f_per_um or an explicit lambda")
            lam = cc_f_per_um / c_f_per_um
        return cls(tau0_ps=tau0, lam=lam, r_ohm_per_um=r_ohm_per_um,
                   c_f_per_um=c_f_per_um, cc_f_per_um=cc_f_per_um,
                   length_um=length_um)

    @classmethod
    def from_config(cls, mapping: Mapping[str, float]) -> "BusParams":
        """Build from a flat key-value mapping (see cli.load_config)."""
        known = {"tau0_ps", "lambda", "r_ohm_per_um", "c_f_per_um",
                 "cc_f_per_um", "length_um"}
        unknown = set(mapping) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        raw_keys = {"r_ohm_per_um", "c_f_per_um", "length_um"}
        if raw_keys & set(mapping):
            if not raw_keys <= set(mapping):
                raise ConfigError(
                    "raw parasitics need r_ohm_per_um, c_f_per_um and length_um")
            return cls.from_raw(
                mapping["r_ohm_per_um"], mapping["c_f_per_um"],
                mapping["length_um"], mapping.get("cc_f_per_um"),
                mapping.get("lambda"))
        return cls(tau0_ps=mapping.get("tau0_ps", DEFAULT_TAU0_PS),
                   lam=mapping.get("lambda", DEFAULT_LAMBDA))


@dataclass(frozen=True)
class Mode:
    """One eigenpair of C/c: multiplier p(lam) = 1 + mu*lam and eigenvector."""

    mu: Quad
    vector: tuple[Quad, ...]

    def multiplier(self, lam: float) -> float:
        return 1.0 + float(self.mu) * lam

    @property
    def norm_sq(self) -> Quad:
        acc = Quad(0)
        for v in self.vector:
            acc = acc + v * v
        return acc


@dataclass(frozen=True)
class EigenSystem:
    """Full analytic eigendecomposition of C/c for one window width."""

    width: int
    modes: tuple[Mode, ...]

    def weights(self, examined: int) -> tuple[Quad, ...]:
        """Reconstruction weights e_i[examined] / ||e_i||^2."""
        return tuple(m.vector[examined] / m.norm_sq for m in self.modes)

    def coefficient_modes(self, examined: int) -> tuple[int, ...]:
        """Mode indices that can contribute to the examined wire, sorted by
        ascending multiplier slope mu (the golden-table column order)."""
        idx = [i for i, w in enumerate(self.weights(examined)) if bool(w)]
        idx.sort(key=lambda i: float(self.modes[i].mu))
        return tuple(idx)


def _frac(num: int, den: int = 1) -> Fraction:
    return Fraction(num, den)


@lru_cache(maxsize=None)
def five_wire_eigensystem() -> EigenSystem:
    """Analytic modes of the 5-wire window, listed in the order p1..p5.

    p1 = 1                       e1 = (1, 1, 1, 1, 1)
    p2 = 1 + (5+sqrt5)/2 * lam   e2 = ((s-1)/4, -(1+s)/4, 1, -(1+s)/4, (s-1)/4)
    p3 = 1 + (5-sqrt5)/2 * lam   e3 = (-(1+s)/4, (s-1)/4, 1, (s-1)/4, -(1+s)/4)
    p4 = 1 + (3+sqrt5)/2 * lam   e4 = (-1, (s+1)/2, 0, -(s+1)/2, 1)
    p5 = 1 + (3-sqrt5)/2 * lam   e5 = (-1, -(s-1)/2, 0, (s-1)/2, 1)

    with s = sqrt 5.  e2 and e3 are palindromes, e4 and e5 are antisymmetric;
    only the first three modes reach the middle wire (weights 1/5, 2/5, 2/5).
    """
    q = quad_sqrt5
    e1 = tuple(Quad(1) for _ in range(5))
    a_small = q(_frac(-1, 4), _frac(1, 4))    # (sqrt5 - 1)/4
    a_big = q(_frac(-1, 4), _frac(-1, 4))     # -(1 + sqrt5)/4
    e2 = (a_small, a_big, Quad(1), a_big, a_small)
    e3 = (a_big, a_small, Quad(1), a_small, a_big)
    half_plus = q(_frac(1, 2), _frac(1, 2))   # (sqrt5 + 1)/2
    half_minus = q(_frac(-1, 2), _frac(1, 2)) # (sqrt5 - 1)/2
    e4 = (Quad(-1), half_plus, Quad(0), -half_plus, Quad(1))
    e5 = (Quad(-1), -half_minus, Quad(0), half_minus, Quad(1))
    mus = (
        Quad(0),
        q(_frac(5, 2), _frac(1, 2)),
        q(_frac(5, 2), _frac(-1, 2)),
        q(_frac(3, 2), _frac(1, 2)),
        q(_frac(3, 2), _frac(-1, 2)),
    )
    vectors = (e1, e2, e3, e4, e5)
    return EigenSystem(5, tuple(Mode(m, v) for m, v in zip(mus, vectors)))


@lru_cache(maxsize=None)
def four_wire_eigensystem() -> EigenSystem:
    """Analytic modes of the 4-wire edge window, in the order p1..p4.

    p1 = 1                  e1 = (1, 1, 1, 1)
    p2 = 1 + (2-sqrt2)*lam  e2 = (-1, 1-sqrt2, sqrt2-1, 1)
    p3 = 1 + 2*lam          e3 = (1, -1, -1, 1)
    p4 = 1 + (2+sqrt2)*lam  e4 = (-1, 1+sqrt2, -(1+sqrt2), 1)
    """
    q = quad_sqrt2
    e1 = tuple(Quad(1) for _ in range(4))
    m2 = q(1, -1)   # 1 - sqrt2
    e2 = (Quad(-1), m2, -m2, Quad(1))
    e3 = (Quad(1), Quad(-1), Quad(-1), Quad(1))
    m4 = q(1, 1)    # 1 + sqrt2
    e4 = (Quad(-1), m4, -m4, Quad(1))
    mus = (Quad(0), q(2, -1), Quad(2), q(2, 1))
    vectors = (e1, e2, e3, e4)
    return EigenSystem(4, tuple(Mode(m, v) for m, v in zip(mus, vectors)))


def eigensystem_for_width(width: int) -> EigenSystem:
    if width == 5:
        return five_wire_eigensystem()
    if width == 4:
        return four_wire_eigensystem()
    raise PatternError(f"no eigensystem for width {width}")


@dataclass(frozen=True)
class ResponseTerm:
    """One decaying exponential: (coeff_pi/pi) * exp(-t / (a * tau)).

    coeff_pi is the exact pi-scaled coefficient; mu the exact multiplier
    slope (a = 1 + mu*lam).  coeff and a are their evaluations at the
    synthesis operating point.
    """

    coeff: float
    a: float
    coeff_pi: Quad
    mu: Quad


# Below this argument the alternating series sits on its pi/4 plateau to
# far beyond double precision (the deviation is O(exp(-pi^2/(16x)))).
_SERIES_PLATEAU_X = 0.01
_SERIES_EXP_CUTOFF = 45.0


def _mode_series(x: float, harmonics: int) -> float:
    """sum_{k=0..harmonics} (-1)^k/(2k+1) * exp(-(2k+1)^2 x), the normalized
    far-end decay of one decoupled line.  harmonics=0 is the single-exponent
    approximation; large values approach the exact diffusion solution, whose
    small-x limit is pi/4 (so the exact modal sum reconstructs V(0)=0)."""
    if harmonics <= 0:
        return math.exp(-x)
    if x < _SERIES_PLATEAU_X:
        return math.pi / 4.0
    acc = 0.0
    for k in range(harmonics + 1):
        m = 2 * k + 1
        e = m * m * x
        if e > _SERIES_EXP_CUTOFF:
            break
        term = math.exp(-e) / m
        acc += term if k % 2 == 0 else -term
    return acc


@dataclass(frozen=True)
class ClosedFormResponse:
    """V(t) = final_level - sum_i coeff_i * exp(-t / (a_i * tau)).

    With harmonics > 0 each term is promoted to its full modal series
    coeff_i * sum_k (-1)^k/(2k+1) exp(-(2k+1)^2 t/(a_i tau)), removing the
    single-exponent truncation error near t = 0.
    """

    final_level: int
    terms: tuple[ResponseTerm, ...]
    tau_ps: float
    pattern: TransitionPattern

    def value(self, t_ps: float, harmonics: int = 0) -> float:
        acc = float(self.final_level)
        for term in self.terms:
            acc -= term.coeff * _mode_series(
                t_ps / (term.a * self.tau_ps), harmonics)
        return acc


def modal_coefficient_slots(pattern: TransitionPattern) -> tuple[Quad, ...]:
    """Exact pi-scaled coefficients on the canonical mode slots.

    Slots are the modes that can reach the examined wire, ordered by ascending
    multiplier slope; zeros are kept so patterns can be grouped by the full
    tuple.  For the 5-wire middle wire this gives the 3 columns (c0, c1, c2),
    for 4-wire windows the 4 columns (c0..c3).
    """
    es = eigensystem_for_width(pattern.width)
    weights = es.weights(pattern.examined)
    deltas = pattern.deltas
    slots = []
    for i in es.coefficient_modes(pattern.examined):
        mode = es.modes[i]
        proj = Quad(0)
        for d, comp in zip(deltas, mode.vector):
            if d:
                proj = proj + (comp if d > 0 else -comp)
        slots.append(4 * weights[i] * proj)
    return tuple(slots)


def coefficient_mus(width: int, examined: int) -> tuple[Quad, ...]:
    """Multiplier slopes matching modal_coefficient_slots column order."""
    es = eigensystem_for_width(width)
    return tuple(es.modes[i].mu for i in es.coefficient_modes(examined))


def synth_response(pattern: TransitionPattern,
                   params: BusParams) -> ClosedFormResponse:
    """Closed-form examined-wire response for a window transition pattern.

    Terms with exactly zero coefficient are dropped; the remaining ones are
    ordered by ascending time-constant multiplier.  The t=0 truncation
    residual is asserted to stay inside the one-exponent band.
    """
    if pattern.width not in (4, 5):
        raise PatternError("response synthesis needs a width-4 or width-5 window")
    slots = modal_coefficient_slots(pattern)
    mus = coefficient_mus(pattern.width, pattern.examined)
    final = pattern.examined_symbol.delta
    terms = []
    for coeff_pi, mu in zip(slots, mus):
        coeff = float(coeff_pi) / math.pi
        if abs(coeff) < 1e-12:
            continue
        a = 1.0 + float(mu) * params.lam
        if a < 1.0 - 1e-12:
            raise PatternError("negative-slope multiplier; bad eigensystem")
        terms.append(ResponseTerm(coeff, a, coeff_pi, mu))
    resp = ClosedFormResponse(final, tuple(terms), params.tau_ps, pattern)
    residual = final - sum(t.coeff for t in terms)
    if not (-RESIDUAL_BAND <= residual <= RESIDUAL_BAND):
        raise PatternError(
            f"truncation residual {residual:.4f} outside +/-{RESIDUAL_BAND}")
    return resp


def solve_half_delay(resp: ClosedFormResponse,
                     params: Optional[BusParams] = None,
                     harmonics: int = 0) -> float:
    """50% delay: last time the response crosses half its final level.

    Scans forward geometrically from 0.01*tau until the decaying envelope
    can no longer reach the half level, keeping the latest sign-change
    bracket, then bisects it to 1e-5 ps.
    """
    if params is not None:
        if abs(resp.tau_ps - params.tau_ps) > 1e-9 * resp.tau_ps:
            raise ConfigError("response was synthesised at different params")
    final = resp.final_level
    if final == 0:
        raise NoTransitionError(
            f"examined wire holds in {resp.pattern}; no 50% crossing")
    tau = resp.tau_ps
    # h(t) = sign(final) * (V(t) - final/2); h(0) = 1/2 - 4/pi < 0,
    # h(inf) = +1/2, so at least one upward crossing exists.
    gains = [(final * t.coeff, t.a) for t in resp.terms]

    def h(t: float) -> float:
        return 0.5 - sum(
            g * _mode_series(t / (a * tau), harmonics) for g, a in gains)

    def envelope(t: float) -> float:
        # Upper bound on |V - final|; with harmonics the k >= 1 terms only
        # shrink each mode once past the plateau, so the k = 0 bound with a
        # 4/pi plateau cap stays valid for the termination test.
        acc = 0.0
        for g, a in gains:
            x = t / (a * tau)
            base = math.exp(-x) if x >= _SERIES_PLATEAU_X else 1.0
            acc += abs(g) * base
        return acc

    t_prev = 0.0
    h_prev = h(0.0)
    bracket = None
    t = SCAN_START_FACTOR * tau
    horizon = SCAN_HORIZON_FACTOR * tau
    while True:
        h_t = h(t)
        if h_prev == 0.0 or (h_prev < 0.0) != (h_t < 0.0):
            bracket = (t_prev, t)
        if envelope(t) < 0.5:
            break
        if t > horizon:
            raise BracketingError(
                f"no settled crossing within {SCAN_HORIZON_FACTOR:g}*tau "
                f"for {resp.pattern}")
        t_prev, h_prev = t, h_t
        t *= SCAN_GROWTH
    if bracket is None:
        # envelope settled with no recorded flip: either the one crossing sits
        # inside (t_prev, t), or the response never reaches the half level.
        if h_prev != 0.0 and (h_prev < 0.0) == (h_t < 0.0):
            raise BracketingError(
                f"response never crosses half level for {resp.pattern}")
        bracket = (t_prev, t)
    lo, hi = bracket
    h_lo = h(lo)
    while hi - lo > SOLVER_TOL_PS:
        mid = 0.5 * (lo + hi)
        h_mid = h(mid)
        if h_mid == 0.0:
            return mid
        if (h_mid < 0.0) == (h_lo < 0.0):
            lo, h_lo = mid, h_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# Series depth giving the exact diffusion response to ~1e-15 for every
# argument past the plateau shortcut.
FULL_SERIES = 40


def pattern_delay(pattern: TransitionPattern, params: BusParams,
                  harmonics: int = 0) -> float:
    """Convenience: synthesise and solve in one call (0 for a holding wire)."""
    if pattern.examined_symbol is TransitionSymbol.HOLD:
        return 0.0
    return solve_half_delay(synth_response(pattern, params), params,
                            harmonics=harmonics)


def enumerate_patterns(width: int, examined: int,
                       examined_symbol: TransitionSymbol = TransitionSymbol.UP
                       ) -> list[TransitionPattern]:
    """All patterns with the examined wire fixed, free wires enumerated in
    lexicographic order Up < Hold < Down (leftmost wire most significant)."""
    free_positions = [i for i in range(width) if i != examined]
    patterns = []

    def rec(pos: int, acc: dict[int, TransitionSymbol]) -> None:
        if pos == len(free_positions):
            symbols = tuple(
                examined_symbol if i == examined else acc[i]
                for i in range(width))
            patterns.append(TransitionPattern(symbols, examined))
            return
        for sym in SYMBOL_ORDER:
            acc[free_positions[pos]] = sym
            rec(pos + 1, acc)

    rec(0, {})
    return patterns
