"""Young-function calculus.

Families of Young / quasi-Young / weak Phi-functions with evaluation,
left-inverses, characteristic exponents, n-ary interpolation algebra,
a deterministic interpolation-weight solver, convexification, and the
explicit strong-type interpolation constant.

Conventions used throughout:

* the *left-inverse* of an increasing ``phi`` is
  ``phi^{-1}(s) = inf{t >= 0 : phi(t) >= s}``;
* the characteristic exponents are ``q = inf_t t phi'(t)/phi(t)`` and
  ``p = sup_t t phi'(t)/phi(t)``; ``phi`` is doubling iff ``p < inf``;
* interpolation of ``n`` functions with weights ``theta`` is the function
  whose left-inverse is ``prod_j phi_j^{-1}(s)^{theta_j}``.

All families evaluate vectorized over numpy arrays; instances are
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ConditionViolated,
    DegenerateFunction,
    DimensionMismatch,
    ExponentOrderViolated,
    ExponentOutOfRange,
    InfeasibleTheta,
    NotAInc1,
)

__all__ = [
    "YoungFunction",
    "Power",
    "PowerLog",
    "PiecewisePower",
    "Sampled",
    "Scaled",
    "InverseProduct",
    "SimplexPoint",
    "BoundSpec",
    "grid_exponents",
    "interpolate",
    "pair_interpolate",
    "theta_solver",
    "construct_phi",
    "verify_young_relation",
    "young_relation_source",
    "collapse_identity_check",
    "convexify",
    "check_equivalence",
    "doubling_constant",
    "strong_type_bound",
    "young_from_json",
]

# Exponent oracle grid: t in [1e-8, 1e8], 1e5 points, one-sided relative step.
EXPONENT_GRID_LO = 1e-8
EXPONENT_GRID_HI = 1e8
EXPONENT_GRID_POINTS = 100_000
EXPONENT_STEP = 1e-7
EXPONENT_INF_THRESHOLD = 1e6

# Grid for inverse-level identity checks (residuals of interpolation algebra).
RELATION_GRID_LO = 1e-6
RELATION_GRID_HI = 1e6
RELATION_GRID_POINTS = 10_000

# Coarser grid for equivalence / convexification certificates.
CERT_GRID_POINTS = 2001
CERT_SLACK = 1e-6


def _as_array(t) -> tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=float)
    return np.atleast_1d(arr), arr.ndim == 0


def _solve_increasing(pair, target, lo, hi, y0=None, tol=1e-13, max_iter=120):
    """Vectorized safeguarded Newton for an increasing scalar field.

    ``pair(y)`` returns (values, slopes). Solves value = target per
    component; ``lo``/``hi`` must bracket the root, Newton steps leaving
    the bracket fall back to bisection. ``y0`` seeds the iteration.
    """
    lo = np.array(np.broadcast_to(lo, target.shape), dtype=float)
    hi = np.array(np.broadcast_to(hi, target.shape), dtype=float)
    # verify the bracket actually straddles the target, expanding
    # geometrically where it does not
    span = np.maximum(hi - lo, 1.0)
    for _ in range(80):
        miss = pair(lo)[0] > target
        if not miss.any():
            break
        lo = np.where(miss, lo - span, lo)
        span = span * 2.0
    span = np.maximum(hi - lo, 1.0)
    for _ in range(80):
        miss = pair(hi)[0] < target
        if not miss.any():
            break
        hi = np.where(miss, hi + span, hi)
        span = span * 2.0
    if y0 is None:
        y = 0.5 * (lo + hi)
    else:
        y = np.clip(np.asarray(y0, dtype=float), lo, hi)
    for _ in range(max_iter):
        val, slope = pair(y)
        val = val - target
        above = val > 0
        hi = np.where(above, y, hi)
        lo = np.where(above, lo, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = val / slope
        y_new = y - step
        bad = ~np.isfinite(y_new) | (y_new < lo) | (y_new > hi)
        y_new = np.where(bad, 0.5 * (lo + hi), y_new)
        if np.all(np.abs(y_new - y) <= tol * (1.0 + np.abs(y_new))):
            y = y_new
            break
        y = y_new
    return y


class YoungFunction:
    """Base class: an increasing function on [0, inf) with phi(0) = 0.

    Subclasses implement the vectorized hooks ``_log_ev`` (log phi at
    positive finite t), ``_log_inv`` (log of the left-inverse at finite
    log s) and ``_inv_log_slope`` (d log phi^{-1} / d log s).
    """

    #: quasi-Young exponent; 1.0 for genuine Young functions
    r: float = 1.0

    _exponents_cache: tuple[float, float] | None = None

    # -- hooks -------------------------------------------------------------

    def _log_ev(self, logt: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _log_inv(self, logs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _inv_log_slope(self, logs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _log_inv_pair(self, logs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(log inverse, d log inverse / d log s) in one pass; overridden
        where the two share a root solve."""
        return self._log_inv(logs), self._inv_log_slope(logs)

    def _ev_pos(self, t: np.ndarray) -> np.ndarray:
        """Values at positive finite t; overridden where a direct closed
        form is more accurate than exp(log)."""
        with np.errstate(over="ignore"):
            return np.exp(self._log_ev(np.log(t)))

    def _inv_pos(self, s: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self._log_inv(np.log(s)))

    def ratio_limits(self) -> tuple[float, float] | None:
        """(ratio at t->0, ratio at t->inf) when known in closed form."""
        return None

    # -- public surface ----------------------------------------------------

    def evaluate(self, t):
        """phi(t); accepts scalars or arrays, +inf maps to +inf."""
        arr, scalar = _as_array(t)
        if np.any(arr < 0):
            raise ValueError("evaluate requires t >= 0")
        out = np.empty_like(arr)
        pos = (arr > 0) & np.isfinite(arr)
        out[arr == 0] = 0.0
        out[np.isinf(arr)] = np.inf
        if np.any(pos):
            out[pos] = self._ev_pos(arr[pos])
        return float(out[0]) if scalar else out

    def log_evaluate(self, t):
        """log phi(t), overflow-free for families stored in log form."""
        arr, scalar = _as_array(t)
        out = np.full_like(arr, -np.inf)
        out[np.isinf(arr)] = np.inf
        pos = (arr > 0) & np.isfinite(arr)
        if np.any(pos):
            out[pos] = self._log_ev(np.log(arr[pos]))
        return float(out[0]) if scalar else out

    def left_inverse(self, s):
        """inf{t >= 0 : phi(t) >= s}; 0 at 0 and +inf at +inf."""
        arr, scalar = _as_array(s)
        if np.any(arr < 0):
            raise ValueError("left_inverse requires s >= 0")
        out = np.empty_like(arr)
        out[arr == 0] = 0.0
        out[np.isinf(arr)] = np.inf
        pos = (arr > 0) & np.isfinite(arr)
        if np.any(pos):
            out[pos] = self._inv_pos(arr[pos])
        return float(out[0]) if scalar else out

    def log_left_inverse(self, logs):
        arr, scalar = _as_array(logs)
        out = self._log_inv(arr)
        return float(out[0]) if scalar else out

    def ratio(self, t):
        """t phi'(t)/phi(t) by the one-sided log difference quotient."""
        arr, scalar = _as_array(t)
        logt = np.log(arr)
        dlog = np.log1p(EXPONENT_STEP)
        out = (self._log_ev(logt + dlog) - self._log_ev(logt)) / dlog
        return float(out[0]) if scalar else out

    def exponents(self) -> tuple[float, float]:
        """(q, p): inf and sup of t phi'(t)/phi(t); closed form if known."""
        if self._exponents_cache is None:
            limits = self.ratio_limits()
            if limits is not None:
                lo, hi = limits
                object.__setattr__(
                    self, "_exponents_cache", (min(lo, hi), max(lo, hi))
                )
            else:
                object.__setattr__(self, "_exponents_cache", grid_exponents(self))
        return self._exponents_cache

    def is_delta2(self) -> bool:
        """True iff the doubling condition holds, i.e. p < inf."""
        return math.isfinite(self.exponents()[1])

    def to_json_dict(self) -> dict:
        raise NotImplementedError

    # convenience

    def __call__(self, t):
        return self.evaluate(t)


@dataclass(frozen=True)
class Power(YoungFunction):
    """phi(t) = t**p."""

    p: float

    def __post_init__(self):
        if not (self.p > 0 and math.isfinite(self.p)):
            raise ValueError("Power exponent must be positive and finite")

    def _log_ev(self, logt):
        return self.p * logt

    def _log_inv(self, logs):
        return logs / self.p

    def _inv_log_slope(self, logs):
        return np.full_like(logs, 1.0 / self.p)

    def _ev_pos(self, t):
        return t**self.p

    def _inv_pos(self, s):
        return s ** (1.0 / self.p)

    def ratio_limits(self):
        return (self.p, self.p)

    def to_json_dict(self):
        return {"family": "Power", "params": {"p": self.p}, "r": 1.0}


@dataclass(frozen=True)
class PowerLog(YoungFunction):
    """phi(t) = t**p * log(1+t)**a with a >= 0.

    The ratio t phi'/phi equals p + a*g(t) with g decreasing from 1 to 0,
    so the exponents are (p, p + a).
    """

    p: float
    a: float

    def __post_init__(self):
        if not (self.p > 0 and math.isfinite(self.p)):
            raise ValueError("PowerLog power must be positive and finite")
        if not (self.a >= 0 and math.isfinite(self.a)):
            raise ValueError("PowerLog log-exponent must be >= 0")

    def _log_ev(self, logt):
        # log(1+t) = logaddexp(0, log t), stable for all magnitudes
        w = np.logaddexp(0.0, logt)
        return self.p * logt + self.a * np.log(w)

    def _ev_pos(self, t):
        with np.errstate(over="ignore"):
            return t**self.p * np.log1p(t) ** self.a

    def _ratio_at_logt(self, logt):
        w = np.logaddexp(0.0, logt)
        sig = np.exp(logt - w)  # t/(1+t)
        return self.p + self.a * sig / w

    def _ev_pair(self, logt):
        return self._log_ev(logt), self._ratio_at_logt(logt)

    def _log_inv(self, logs):
        return self._log_inv_pair(logs)[0]

    def _log_inv_pair(self, logs):
        if self.a == 0:
            y = logs / self.p
            return y, np.full_like(logs, 1.0 / self.p)
        # the pure-power roots logs/p and logs/(p+a) straddle the true
        # root up to a slowly growing log-log correction
        c1 = logs / (self.p + self.a)
        c2 = logs / self.p
        margin = 2.0 + (self.a / self.p) * np.log(2.0 + np.abs(logs))
        lo = np.minimum(c1, c2) - margin
        hi = np.maximum(c1, c2) + margin
        # fixed-point pre-iterations give Newton a near-converged seed
        y0 = logs / self.p
        with np.errstate(divide="ignore", invalid="ignore"):
            for _ in range(3):
                y0 = (logs - self.a * np.log(np.logaddexp(0.0, y0))) / self.p
        y = _solve_increasing(self._ev_pair, logs, lo, hi, y0=y0, tol=1e-15)
        return y, 1.0 / self._ratio_at_logt(y)

    def _inv_log_slope(self, logs):
        return self._log_inv_pair(logs)[1]

    def ratio_limits(self):
        return (self.p + self.a, self.p)

    def to_json_dict(self):
        return {"family": "PowerLog", "params": {"p": self.p, "a": self.a}, "r": 1.0}


@dataclass(frozen=True)
class PiecewisePower(YoungFunction):
    """t**p_low below the breakpoint, continued as a p_high power above."""

    p_low: float
    p_high: float
    breakpoint: float

    def __post_init__(self):
        if self.p_low <= 0 or self.p_high <= 0:
            raise ValueError("exponents must be positive")
        if not (self.breakpoint > 0 and math.isfinite(self.breakpoint)):
            raise ValueError("breakpoint must be positive and finite")

    def _log_ev(self, logt):
        lb = math.log(self.breakpoint)
        base = self.p_low * lb
        return np.where(
            logt <= lb, self.p_low * logt, base + self.p_high * (logt - lb)
        )

    def _log_inv(self, logs):
        lb = math.log(self.breakpoint)
        ls_break = self.p_low * lb
        return np.where(
            logs <= ls_break,
            logs / self.p_low,
            lb + (logs - ls_break) / self.p_high,
        )

    def _inv_log_slope(self, logs):
        ls_break = self.p_low * math.log(self.breakpoint)
        return np.where(logs <= ls_break, 1.0 / self.p_low, 1.0 / self.p_high)

    def _ev_pos(self, t):
        b = self.breakpoint
        with np.errstate(over="ignore"):
            return np.where(
                t <= b, t**self.p_low, b**self.p_low * (t / b) ** self.p_high
            )

    def ratio_limits(self):
        return (self.p_low, self.p_high)

    def to_json_dict(self):
        return {
            "family": "PiecewisePower",
            "params": {
                "p_low": self.p_low,
                "p_high": self.p_high,
                "breakpoint": self.breakpoint,
            },
            "r": 1.0,
        }


class Sampled(YoungFunction):
    """Monotone function given by knots, piecewise linear in log-log
    coordinates, with end-slope power extrapolation outside the knot range.

    Knots are stored as (log t, log phi(t)) so values like exp(t) - 1 stay
    representable far beyond float overflow.
    """

    def __init__(self, log_t: np.ndarray, log_v: np.ndarray):
        log_t = np.asarray(log_t, dtype=float)
        log_v = np.asarray(log_v, dtype=float)
        if log_t.ndim != 1 or log_t.shape != log_v.shape or log_t.size < 2:
            raise ValueError("need matching 1-d knot arrays with >= 2 knots")
        if np.any(np.diff(log_t) <= 0):
            raise ValueError("knot abscissae must be strictly increasing")
        if np.any(np.diff(log_v) <= 0):
            raise ValueError("knot values must be strictly increasing")
        self.log_t = log_t
        self.log_v = log_v
        self._slope_lo = (log_v[1] - log_v[0]) / (log_t[1] - log_t[0])
        self._slope_hi = (log_v[-1] - log_v[-2]) / (log_t[-1] - log_t[-2])

    @classmethod
    def from_points(cls, t, v) -> "Sampled":
        return cls(np.log(np.asarray(t, float)), np.log(np.asarray(v, float)))

    @classmethod
    def from_callable(cls, fn, lo=1e-6, hi=1e6, knots=2001) -> "Sampled":
        t = np.geomspace(lo, hi, knots)
        return cls.from_points(t, fn(t))

    def _interp(self, x, xs, ys, slope_lo, slope_hi):
        out = np.interp(x, xs, ys)
        below = x < xs[0]
        above = x > xs[-1]
        out = np.where(below, ys[0] + slope_lo * (x - xs[0]), out)
        out = np.where(above, ys[-1] + slope_hi * (x - xs[-1]), out)
        return out

    def _log_ev(self, logt):
        return self._interp(logt, self.log_t, self.log_v, self._slope_lo, self._slope_hi)

    def _log_inv(self, logs):
        return self._interp(
            logs, self.log_v, self.log_t, 1.0 / self._slope_lo, 1.0 / self._slope_hi
        )

    def _inv_log_slope(self, logs):
        idx = np.clip(np.searchsorted(self.log_v, logs), 1, self.log_v.size - 1)
        seg = (self.log_t[idx] - self.log_t[idx - 1]) / (
            self.log_v[idx] - self.log_v[idx - 1]
        )
        seg = np.where(logs < self.log_v[0], 1.0 / self._slope_lo, seg)
        return np.where(logs > self.log_v[-1], 1.0 / self._slope_hi, seg)

    def to_json_dict(self):
        return {
            "family": "Sampled",
            "params": {"log_t": self.log_t.tolist(), "log_v": self.log_v.tolist()},
            "r": 1.0,
        }


class Scaled(YoungFunction):
    """Quasi-Young composition phi(t) = inner(t**r) with r in (0, 1]."""

    def __init__(self, inner: YoungFunction, r: float):
        if not (0 < r <= 1):
            raise ValueError("quasi-Young exponent must lie in (0, 1]")
        self.inner = inner
        self.r = float(r)

    def _log_ev(self, logt):
        return self.inner._log_ev(self.r * logt)

    def _log_inv(self, logs):
        return self.inner._log_inv(logs) / self.r

    def _inv_log_slope(self, logs):
        return self.inner._inv_log_slope(logs) / self.r

    def ratio_limits(self):
        limits = self.inner.ratio_limits()
        if limits is None:
            return None
        return (self.r * limits[0], self.r * limits[1])

    def to_json_dict(self):
        d = self.inner.to_json_dict()
        return {"family": d["family"], "params": d["params"], "r": self.r}


class InverseProduct(YoungFunction):
    """Function defined through its left-inverse
    ``G(s) = s**s_exponent * prod_j base_j^{-1}(s)**e_j``.

    This is the closed-form carrier for interpolation algebra: products and
    quotients of left-inverses stay exact instead of being re-sampled.
    Evaluation inverts G by a bracketed Newton iteration in log-log space.
    """

    def __init__(self, s_exponent: float, terms: Sequence[tuple[YoungFunction, float]]):
        flat: list[tuple[YoungFunction, float]] = []
        s_exp = float(s_exponent)
        for base, e in terms:
            if isinstance(base, InverseProduct):
                s_exp += e * base.s_exponent
                flat.extend((b, e * f) for b, f in base.terms)
            else:
                flat.append((base, float(e)))
        self.s_exponent = s_exp
        self.terms = tuple(flat)
        lo, hi = self._slope_range()
        if not (lo > 0):
            raise InfeasibleTheta(
                "inverse-product is not increasing (log-slope range "
                f"[{lo:.3g}, {hi:.3g}])"
            )
        self._slope_lo = lo
        self._slope_hi = hi

    def _slope_range(self) -> tuple[float, float]:
        lo = hi = self.s_exponent
        for base, e in self.terms:
            limits = base.ratio_limits()
            if limits is None:
                q, p = base.exponents()
                limits = (p, q)
            ends = (e / limits[0], e / limits[1])
            lo += min(ends)
            hi += max(ends)
        return lo, hi

    def _log_inv(self, logs):
        out = self.s_exponent * logs
        for base, e in self.terms:
            out = out + e * base._log_inv(logs)
        return out

    def _inv_log_slope(self, logs):
        return self._log_inv_pair(logs)[1]

    def _log_inv_pair(self, logs):
        val = self.s_exponent * logs
        slope = np.full_like(logs, self.s_exponent)
        for base, e in self.terms:
            v, sl = base._log_inv_pair(logs)
            val = val + e * v
            slope = slope + e * sl
        return val, slope

    def _log_ev(self, logt):
        anchor = float(self._log_inv(np.zeros(1))[0])
        lo = (logt - anchor) / self._slope_hi
        hi = (logt - anchor) / self._slope_lo
        lo, hi = np.minimum(lo, hi) - 1.0, np.maximum(lo, hi) + 1.0
        # a coarse inverse-graph table seeds Newton close to the root,
        # keeping the per-call iteration count low even for large inputs
        y0 = None
        if logt.size > 64:
            knots = np.linspace(float(np.min(lo)), float(np.max(hi)), 4097)
            graph = self._log_inv(knots)
            y0 = np.interp(logt, graph, knots)
        return _solve_increasing(self._log_inv_pair, logt, lo, hi, y0=y0)

    def ratio_limits(self):
        # the inverse log-slope is a sum of monotone terms when every base
        # has monotone ratio, so its range is spanned by the s->0 / s->inf
        # limits; the function ratio is the reciprocal
        lo0 = hi0 = self.s_exponent
        for base, e in self.terms:
            limits = base.ratio_limits()
            if limits is None:
                return None
            at0, atinf = limits
            lo0 += e / at0
            hi0 += e / atinf
        ends = (1.0 / lo0, 1.0 / hi0)
        return (ends[0], ends[1])

    def to_json_dict(self):
        return {
            "family": "InverseProduct",
            "params": {
                "s_exponent": self.s_exponent,
                "terms": [
                    {"fn": base.to_json_dict(), "exponent": e}
                    for base, e in self.terms
                ],
            },
            "r": 1.0,
        }


# ---------------------------------------------------------------------------
# serialization


def young_from_json(obj: dict) -> YoungFunction:
    """Build a Young function from its JSON object {family, params, r}.

    Parameters given inline next to ``family`` are accepted as well.
    """
    if not isinstance(obj, dict) or "family" not in obj:
        raise ValueError("expected an object with a 'family' key")
    family = obj["family"]
    params = dict(obj.get("params") or {})
    for key, val in obj.items():
        if key not in ("family", "params", "r"):
            params.setdefault(key, val)
    r = float(obj.get("r", 1.0))
    if family == "Power":
        fn: YoungFunction = Power(float(params["p"]))
    elif family == "PowerLog":
        fn = PowerLog(float(params["p"]), float(params["a"]))
    elif family == "PiecewisePower":
        fn = PiecewisePower(
            float(params["p_low"]), float(params["p_high"]), float(params["breakpoint"])
        )
    elif family == "Sampled":
        fn = Sampled(np.asarray(params["log_t"], float), np.asarray(params["log_v"], float))
    elif family == "InverseProduct":
        fn = InverseProduct(
            float(params["s_exponent"]),
            [(young_from_json(term["fn"]), float(term["exponent"]))
             for term in params["terms"]],
        )
    else:
        raise ValueError(f"unknown family {family!r}")
    if r != 1.0:
        fn = Scaled(fn, r)
    return fn


# ---------------------------------------------------------------------------
# exponents (grid oracle)


def grid_exponents(
    phi: YoungFunction,
    lo: float = EXPONENT_GRID_LO,
    hi: float = EXPONENT_GRID_HI,
    points: int = EXPONENT_GRID_POINTS,
) -> tuple[float, float]:
    """Characteristic exponents by the log-grid difference-quotient oracle.

    Scans t in [lo, hi] on ``points`` log-spaced nodes with a one-sided
    relative step of 1e-7. The sup is declared infinite when it exceeds
    1e6 while the ratio is still growing toward either end of the grid.
    """
    logt = np.linspace(math.log(lo), math.log(hi), points)
    logphi = phi._log_ev(logt)
    if not np.all(np.isfinite(logphi)):
        finite = np.isfinite(logphi)
        # an infinite tail is fine for the sup (ratio blows up); a -inf
        # anywhere means phi vanishes on part of the grid
        if np.any(logphi == -np.inf) or not np.any(finite):
            raise DegenerateFunction("function vanishes or is NaN on the grid")
    dlog = np.log1p(EXPONENT_STEP)
    ratio = (phi._log_ev(logt + dlog) - logphi) / dlog
    ratio = ratio[np.isfinite(ratio)]
    if ratio.size == 0:
        raise DegenerateFunction("no finite ratio samples on the grid")
    q = float(np.min(ratio))
    p = float(np.max(ratio))
    if p > EXPONENT_INF_THRESHOLD:
        tail = ratio.size // 10 or 1
        growing_hi = ratio[-1] >= ratio[-tail]
        growing_lo = ratio[0] >= ratio[tail - 1]
        if growing_hi or growing_lo:
            p = math.inf
    return (q, p)


# ---------------------------------------------------------------------------
# interpolation algebra


@dataclass(frozen=True)
class SimplexPoint:
    """Interpolation weights: each theta_j in (0, 1], sum = 1.

    (For n >= 2 the constraint forces every weight strictly below 1;
    the single-entry point (1,) is the degenerate identity weight.)
    """

    theta: tuple[float, ...]

    def __post_init__(self):
        th = tuple(float(x) for x in self.theta)
        object.__setattr__(self, "theta", th)
        if len(th) == 0:
            raise ValueError("empty weight vector")
        if any(not (0.0 < x <= 1.0) for x in th):
            raise ValueError("weights must lie in (0, 1]")
        if abs(sum(th) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 within 1e-12")

    def __len__(self):
        return len(self.theta)

    def __iter__(self):
        return iter(self.theta)

    def __getitem__(self, i):
        return self.theta[i]


def _as_simplex(theta) -> SimplexPoint:
    if isinstance(theta, SimplexPoint):
        return theta
    return SimplexPoint(tuple(theta))


def interpolate(phis: Sequence[YoungFunction], theta) -> YoungFunction:
    """n-ary interpolation: the function whose left-inverse is the
    theta-weighted product of the inputs' left-inverses.

    Power inputs combine in closed form; anything else yields an
    InverseProduct carrying the exact inverse algebra.
    """
    theta = _as_simplex(theta)
    if len(phis) != len(theta):
        raise DimensionMismatch(
            f"{len(phis)} functions vs {len(theta)} weights"
        )
    if len(phis) == 1:
        return phis[0]
    if all(isinstance(f, Power) for f in phis):
        inv_exp = sum(th / f.p for f, th in zip(phis, theta))
        return Power(1.0 / inv_exp)
    return InverseProduct(0.0, list(zip(phis, theta)))


def pair_interpolate(phi0: YoungFunction, phi1: YoungFunction, theta: float) -> YoungFunction:
    """Two-function bracket with weights (1-theta, theta)."""
    if not (0.0 <= theta <= 1.0):
        raise ValueError("theta must lie in [0, 1]")
    if theta == 0.0:
        return phi0
    if theta == 1.0:
        return phi1
    return interpolate([phi0, phi1], (1.0 - theta, theta))


def theta_solver(psis: Sequence[YoungFunction]) -> SimplexPoint:
    """Deterministic feasible interpolation weights for a psi-tuple.

    With m_j = 1 - 1/p_j and M = sum m_j the rule distributes the slack
    1 - M proportionally to 1/p_j:

        theta_j = m_j + (1 - M) * (1/p_j) / sum_k (1/p_k)

    Requires every psi_j to satisfy 1 < q_j <= p_j < inf and the
    feasibility condition M < 1 (equivalently n - 1 < sum 1/p_j).
    """
    if len(psis) == 0:
        raise DimensionMismatch("need at least one function")
    ps = []
    for j, psi in enumerate(psis):
        q, p = psi.exponents()
        if not (q > 1.0):
            raise ExponentOutOfRange(f"function {j}: q = {q:.6g} <= 1")
        if not math.isfinite(p):
            raise ExponentOutOfRange(f"function {j}: p is infinite")
        ps.append(p)
    m = [1.0 - 1.0 / p for p in ps]
    M = sum(m)
    if M >= 1.0:
        raise ConditionViolated(
            f"condition n-1 < sum 1/p violated: sum(1 - 1/p) = {M:.6g} >= 1"
        )
    inv_sum = sum(1.0 / p for p in ps)
    theta = [mj + (1.0 - M) * (1.0 / pj) / inv_sum for mj, pj in zip(m, ps)]
    return SimplexPoint(tuple(theta))


def construct_phi(psi: YoungFunction, theta_j: float) -> YoungFunction:
    """Weak Phi-function with left-inverse
    ``psi^{-1}(s)^{1/theta} / s^{(1-theta)/theta}``.

    Feasible iff theta_j > 1 - 1/p_psi; Power inputs give Power outputs
    with exponent theta / (1/p - (1 - theta)).
    """
    if not (0.0 < theta_j < 1.0):
        raise ValueError("theta_j must lie in (0, 1)")
    _, p = psi.exponents()
    if not math.isfinite(p):
        raise ExponentOutOfRange("p must be finite")
    if theta_j <= 1.0 - 1.0 / p:
        raise InfeasibleTheta(
            f"theta = {theta_j:.6g} <= 1 - 1/p = {1.0 - 1.0 / p:.6g}"
        )
    if isinstance(psi, Power):
        return Power(theta_j / (1.0 / psi.p - (1.0 - theta_j)))
    return InverseProduct(-(1.0 - theta_j) / theta_j, [(psi, 1.0 / theta_j)])


def verify_young_relation(
    psi0: YoungFunction, psis: Sequence[YoungFunction]
) -> float:
    """Max relative residual of
    ``s^{n-1} psi0^{-1}(s) = prod_j psi_j^{-1}(s)`` on the relation grid."""
    n = len(psis)
    logs = np.linspace(
        math.log(RELATION_GRID_LO), math.log(RELATION_GRID_HI), RELATION_GRID_POINTS
    )
    lhs = (n - 1) * logs + psi0._log_inv(logs)
    rhs = np.zeros_like(logs)
    for psi in psis:
        rhs = rhs + psi._log_inv(logs)
    return float(np.max(np.abs(np.expm1(rhs - lhs))))


def young_relation_source(psis: Sequence[YoungFunction]) -> YoungFunction:
    """The unique psi0 with s^{n-1} psi0^{-1}(s) = prod psi_j^{-1}(s)."""
    n = len(psis)
    if all(isinstance(f, Power) for f in psis):
        inv_exp = sum(1.0 / f.p for f in psis) - (n - 1)
        if inv_exp <= 0:
            raise ConditionViolated("tuple does not define an increasing psi0")
        return Power(1.0 / inv_exp)
    return InverseProduct(-(n - 1), [(f, 1.0) for f in psis])


def collapse_identity_check(phi: YoungFunction, rho: float, nu: float) -> float:
    """Relative inverse-level discrepancy between the iterated bracket
    [[one, phi]_rho, one]_nu and the single bracket [one, phi]_{rho(1-nu)}."""
    if not (0 < rho < 1 and 0 < nu < 1):
        raise ValueError("rho, nu must lie in (0, 1)")
    one = Power(1.0)
    lhs = pair_interpolate(pair_interpolate(one, phi, rho), one, nu)
    rhs = pair_interpolate(one, phi, rho * (1.0 - nu))
    logs = np.linspace(
        math.log(EXPONENT_GRID_LO), math.log(EXPONENT_GRID_HI), RELATION_GRID_POINTS
    )
    return float(np.max(np.abs(np.expm1(lhs._log_inv(logs) - rhs._log_inv(logs)))))


# ---------------------------------------------------------------------------
# convexification and equivalence


def _cert_grid() -> np.ndarray:
    return np.geomspace(EXPONENT_GRID_LO, EXPONENT_GRID_HI, CERT_GRID_POINTS)


def _dominates(upper_log, lower_log) -> bool:
    return bool(np.all(upper_log >= lower_log))


def convexify(phi: YoungFunction) -> tuple[YoungFunction, float]:
    """Convex envelope by slope averaging: Psi(t) = int_0^t phi(s)/s ds.

    Requires the slope test phi(s)/s <= phi(t)/t on the certificate grid
    (tolerance 1e-9). Returns Psi as a Sampled function built from a
    65537-node cumulative trapezoid table in log coordinates, together
    with the smallest dyadic L = 2^{k/8} certified to satisfy
    phi(t/L) <= Psi(t) <= phi(L t) on the grid.
    """
    t = _cert_grid()
    slopes = phi.log_evaluate(t) - np.log(t)
    drops = np.diff(slopes)
    if np.any(drops < -1e-9):
        raise NotAInc1("phi(t)/t decreases beyond tolerance on the grid")

    u = np.linspace(math.log(1e-10), math.log(1e9), 65537)
    g = np.exp(phi._log_ev(u))  # phi(e^u) = integrand of int phi(s)/s ds in u
    if not np.all(np.isfinite(g)):
        raise ValueError("function overflows the convexification table")
    csum = np.concatenate(
        [[0.0], np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(u))]
    )
    slope0 = (phi._log_ev(u[:2])[1] - phi._log_ev(u[:2])[0]) / (u[1] - u[0])
    tail = g[0] / slope0  # power-behaviour tail below the first node
    psi_vals = tail + csum
    psi = Sampled(u, np.log(psi_vals))

    L = check_equivalence(phi, psi)
    if L is None:
        raise NotAInc1("no dyadic equivalence constant certifies the envelope")
    return psi, L


def check_equivalence(
    phi: YoungFunction, psi: YoungFunction, slack: float = CERT_SLACK
) -> float | None:
    """Smallest dyadic L in {2^{k/8}, k = 0..64} with
    phi(t/L) <= psi(t) <= phi(L t) on the certificate grid, else None."""
    t = _cert_grid()
    logt = np.log(t)
    psi_log = psi._log_ev(logt)
    log_slack = math.log1p(slack)
    for k in range(0, 65):
        L = 2.0 ** (k / 8.0)
        shift = math.log(L)
        lower = phi._log_ev(logt - shift)
        upper = phi._log_ev(logt + shift)
        if _dominates(psi_log + log_slack, lower) and _dominates(
            upper + log_slack, psi_log
        ):
            return L
    return None


def doubling_constant(phi: YoungFunction, scale: float) -> float:
    """Grid-certified sup of phi(scale*t)/phi(t) (the doubling constant
    for the given scale; exact only in the limit of grid refinement)."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    t = _cert_grid()
    logt = np.log(t)
    diff = phi._log_ev(logt + math.log(scale)) - phi._log_ev(logt)
    return float(np.exp(np.max(diff)))


# ---------------------------------------------------------------------------
# interpolation constant


@dataclass(frozen=True)
class BoundSpec:
    """Constants entering the strong-type interpolation bound.

    p0 < p1 are the endpoint exponents (p1 may be inf), K the
    quasilinearity constant, C0/C1 the endpoint weak/strong constants,
    and C_K a doubling constant for scale 2K.
    """

    p0: float
    p1: float
    K: float = 1.0
    C0: float = 1.0
    C1: float = 1.0
    C_K: float = 1.0

    def __post_init__(self):
        if not (0 < self.p0 < self.p1):
            raise ValueError("need 0 < p0 < p1")
        if self.K < 1 or self.C_K < 1:
            raise ValueError("K and C_K must be >= 1")
        if self.C0 <= 0 or self.C1 <= 0:
            raise ValueError("C0, C1 must be positive")


def strong_type_bound(
    spec: BoundSpec, q_phi: float, p_phi: float, r: float = 1.0
) -> float:
    """Explicit norm constant of the interpolated operator.

    For finite p1 the modular bound is

        p/(q - p0) * (2 K C0)^p0  +  p1 p /(q (p1 - p)) * C1^p1 * C_K

    and the norm constant is max(1, bound)^(1/r) (the quasi-Young root).
    For p1 = inf the second term vanishes after normalizing by C1 and the
    constant is C1 * max(1, p/(q - p0) * (2 K C0)^p0)^(1/r); in the linear
    (1,1)-weak / (inf,inf)-strong case this is C1 * max(1, 2 p/(q-1) C0).
    """
    if not (spec.p0 < q_phi <= p_phi < spec.p1):
        raise ExponentOrderViolated(
            f"need p0 < q <= p < p1, got p0={spec.p0}, q={q_phi}, "
            f"p={p_phi}, p1={spec.p1}"
        )
    if not (0 < r <= 1):
        raise ValueError("r must lie in (0, 1]")
    term1 = p_phi / (q_phi - spec.p0) * (2.0 * spec.K * spec.C0) ** spec.p0
    if math.isinf(spec.p1):
        return spec.C1 * max(1.0, term1) ** (1.0 / r)
    term2 = (
        spec.p1
        * p_phi
        / (q_phi * (spec.p1 - p_phi))
        * spec.C1 ** spec.p1
        * spec.C_K
    )
    return max(1.0, term1 + term2) ** (1.0 / r)
