"""Admissible weight functions and the exponential weights built from them.

A weight function ``omega`` is a continuous, increasing, subadditive map
``[0, inf) -> [0, inf)`` with ``omega(0) = 0``.  From it we build
``m_lam(z) = exp(lam * omega(|z|))`` and ``v_lam(z) = exp(|lam| * omega(|z|))``
together with their restrictions to the time block (``first``) and the
frequency block (``second``) of a phase-space point ``z = (x, xi)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize
from scipy.stats import qmc

KINDS = ("log1p", "power", "logpower")
COMPONENTS = ("full", "first", "second", "absolute")


def _logpower_knee(s: float) -> float:
    """Tangent point from the origin to ``t -> log(1+t)**s``.

    Below this point the weight is continued linearly, which keeps the
    function concave (hence subadditive) for ``s > 1``.
    """
    if s == 1.0:
        return 0.0
    # log(1+t) * (1+t) = s * t  has a unique positive root
    return optimize.brentq(lambda t: math.log1p(t) * (1.0 + t) - s * t, 1e-9, 1e6)


@dataclass(frozen=True)
class WeightFunction:
    """Built-in weight function ``omega``.

    Parameters
    ----------
    kind : {"log1p", "power", "logpower"}
        ``log(1+t)``, ``t**beta`` with ``0 < beta < 1``, or ``log(1+t)**s``
        with ``s >= 1`` (linearised below its tangent point through the
        origin so that subadditivity holds).
    param : float, optional
        ``beta`` for ``power``, ``s`` for ``logpower``; ignored for ``log1p``.
    """

    kind: str
    param: float | None = None
    integrability_flag: bool = field(init=False)
    _knee: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}; expected one of {KINDS}")
        knee = 0.0
        if self.kind == "power":
            if self.param is None or not 0.0 < self.param < 1.0:
                raise ValueError(f"power weight needs beta in (0, 1), got {self.param!r}")
        elif self.kind == "logpower":
            if self.param is None or self.param < 1.0:
                raise ValueError(f"logpower weight needs s >= 1, got {self.param!r}")
            knee = _logpower_knee(float(self.param))
        elif self.param is not None:
            raise ValueError("log1p weight takes no parameter")
        # every built-in kind satisfies the non-quasianalyticity integral
        object.__setattr__(self, "integrability_flag", True)
        object.__setattr__(self, "_knee", knee)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(np.isnan(t)):
            raise ValueError("weight function is defined on [0, inf) only")
        if self.kind == "log1p":
            out = np.log1p(t)
        elif self.kind == "power":
            out = t ** self.param
        else:
            s = self.param
            knee = self._knee
            with np.errstate(divide="ignore"):
                tail = np.log1p(t) ** s
            if knee > 0.0:
                slope = math.log1p(knee) ** s / knee
                out = np.where(t < knee, slope * t, tail)
            else:
                out = tail
        return out if out.ndim else float(out)

    @property
    def gamma_constants(self) -> tuple[float, float]:
        """Constants ``(A, B)`` with ``omega(t) >= A + B*log(1+t)``."""
        if self.kind == "log1p":
            return (0.0, 1.0)
        if self.kind == "power":
            # log(1+t) <= ((1+t)**b - 1)/b <= t**b / b
            return (0.0, float(self.param))
        return (-1.0, 1.0)

    def to_config(self) -> dict:
        return {"kind": self.kind, "param": self.param}

    @classmethod
    def from_config(cls, cfg) -> "WeightFunction":
        if isinstance(cfg, WeightFunction):
            return cfg
        if isinstance(cfg, str):
            return cls(cfg)
        return cls(cfg["kind"], cfg.get("param"))

    def label(self) -> str:
        return self.kind if self.param is None else f"{self.kind}({self.param:g})"


def eval_omega(w: WeightFunction, t):
    return w(t)


@dataclass(frozen=True)
class WeightSpec:
    """Exponential weight ``exp(lam * omega(|z'|))``.

    ``component`` selects which block of ``z = (x, xi)`` enters ``z'``:
    ``full`` uses all of ``z``, ``first`` only ``x``, ``second`` only ``xi``.
    ``absolute`` is ``v_lam`` on the full point, i.e. uses ``|lam|``.
    """

    omega: WeightFunction
    lam: float
    component: str = "full"

    def __post_init__(self):
        if self.component not in COMPONENTS:
            raise ValueError(f"unknown weight component {self.component!r}")
        if not math.isfinite(self.lam):
            raise ValueError("lambda must be finite")

    @property
    def exponent(self) -> float:
        return abs(self.lam) if self.component == "absolute" else self.lam

    def on_norms(self, xnorm, xinorm):
        """Weight at points with time norm ``xnorm`` and frequency norm ``xinorm``.

        Inputs broadcast against each other.
        """
        xnorm = np.asarray(xnorm, dtype=float)
        xinorm = np.asarray(xinorm, dtype=float)
        if self.component == "first":
            r = xnorm + 0.0 * xinorm
        elif self.component == "second":
            r = xinorm + 0.0 * xnorm
        else:
            r = np.hypot(xnorm, xinorm)
        if self.exponent == 0.0:
            return np.ones_like(r)
        return np.exp(self.exponent * self.omega(r))

    def __call__(self, z, d: int | None = None):
        return eval_weight(self, z, d)

    def describe(self) -> dict:
        return {"omega": self.omega.to_config(), "lambda": self.lam, "component": self.component}


@dataclass(frozen=True)
class ProductWeight:
    """Tensor product of weights, e.g. ``m_{lam,1} (x) v_{lam,2} m_{-mu,2}``."""

    factors: tuple[WeightSpec, ...]

    def on_norms(self, xnorm, xinorm):
        out = 1.0
        for f in self.factors:
            out = out * f.on_norms(xnorm, xinorm)
        return np.broadcast_to(out, np.broadcast(np.asarray(xnorm), np.asarray(xinorm)).shape).copy()

    def describe(self) -> dict:
        return {"product": [f.describe() for f in self.factors]}


def eval_weight(spec: WeightSpec, z, d: int | None = None):
    """Evaluate ``spec`` at phase-space point(s) ``z`` of length ``2d`` (last axis)."""
    z = np.asarray(z, dtype=float)
    if z.ndim == 0:
        raise ValueError("z must be a vector of length 2d")
    if d is None:
        if z.shape[-1] % 2:
            raise ValueError("phase-space points have even length 2d")
        d = z.shape[-1] // 2
    if z.shape[-1] != 2 * d:
        raise ValueError(f"expected points of length {2 * d}, got {z.shape[-1]}")
    xnorm = np.linalg.norm(z[..., :d], axis=-1)
    xinorm = np.linalg.norm(z[..., d:], axis=-1)
    out = spec.on_norms(xnorm, xinorm)
    return out if out.ndim else float(out)


def m_weight(omega, lam):
    return WeightSpec(omega, lam, "full")


def v_weight(omega, lam):
    return WeightSpec(omega, lam, "absolute")


@dataclass
class ConditionReport:
    subadditivity_violations: int
    gamma_constants: tuple[float, float] | None
    gamma_violations: int
    convexity_violations: int
    monotonicity_violations: int
    beta_holds: bool
    beta_tail_integral: float
    beta_tail_slope: float


def check_weight_conditions(w: WeightFunction | Callable, sample_count: int = 256,
                            t_max: float = 1e3, rtol: float = 1e-12) -> ConditionReport:
    """Test the defining conditions of a weight function on finite samples.

    ``w`` may also be a bare callable (used to exercise the checker with
    inadmissible functions); then no ``(A, B)`` pair is known and the
    integrability flag is replaced by the numerical tail estimate alone.
    """
    if sample_count < 10:
        raise ValueError("sample_count must be at least 10")
    if t_max <= 1:
        raise ValueError("t_max must exceed 1")
    f = w if isinstance(w, WeightFunction) else (lambda t: np.asarray(w(np.asarray(t, float)), float))

    # subadditivity on a scrambled-free Halton set of pairs
    pts = qmc.Halton(d=2, scramble=False).random(sample_count + 1)[1:] * t_max
    t1, t2 = pts[:, 0], pts[:, 1]
    w1, w2, w12 = f(t1), f(t2), f(t1 + t2)
    sub_bad = int(np.count_nonzero(w12 > w1 + w2 + rtol * (1 + w1 + w2)))

    grid = np.linspace(0.0, t_max, sample_count)
    wg = f(grid)
    mono_bad = int(np.count_nonzero(np.diff(wg) < -rtol * (1 + np.abs(wg[1:]))))

    gamma = w.gamma_constants if isinstance(w, WeightFunction) else None
    gamma_bad = 0
    if gamma is not None:
        a, b = gamma
        rhs = a + b * np.log1p(grid)
        gamma_bad = int(np.count_nonzero(wg < rhs - rtol * (1 + np.abs(rhs))))

    # midpoint convexity of t -> omega(exp(t)) on a log-spaced ladder
    u = np.linspace(math.log(1e-3), math.log(t_max), sample_count)
    phi = f(np.exp(u))
    second = phi[:-2] - 2 * phi[1:-1] + phi[2:]
    conv_bad = int(np.count_nonzero(second < -1e-10 * (1 + np.abs(phi[1:-1]))))

    tail, _ = integrate.quad(lambda t: float(f(t)) / t**2, 1.0, t_max, limit=200)
    slope = float(f(t_max)) / t_max  # d/dlog(t) of the partial integral at t_max
    beta = w.integrability_flag if isinstance(w, WeightFunction) else bool(slope < 1e-2)
    return ConditionReport(sub_bad, gamma, gamma_bad, conv_bad, mono_bad, beta, float(tail), slope)

