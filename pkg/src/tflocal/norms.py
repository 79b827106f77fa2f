"""Weighted mixed norms, modulation norms and the M^{0,1} decay profile."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .transforms import PhaseSpaceFunction, SampledSignal, stft
from .weights import ProductWeight, WeightSpec

INF = math.inf


@dataclass(frozen=True)
class MixedNormParams:
    p: float
    q: float
    weight: WeightSpec | ProductWeight

    def __post_init__(self):
        for name in ("p", "q"):
            v = float(getattr(self, name))
            if not (v >= 1.0):
                raise ValueError(f"{name} must lie in [1, inf], got {v}")
            object.__setattr__(self, name, v)

    def describe(self) -> dict:
        return {"p": _fmt_exp(self.p), "q": _fmt_exp(self.q), "weight": self.weight.describe()}


def _fmt_exp(v: float):
    return "inf" if math.isinf(v) else v


def _lp(a, p, axes, cell):
    if math.isinf(p):
        return np.max(a, axis=axes) if axes else a
    if p == 1.0:
        return cell * np.sum(a, axis=axes)
    # scale by the max to avoid under/overflow in |a|^p
    top = np.max(a, axis=axes, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    s = cell * np.sum((a / safe) ** p, axis=axes)
    return np.squeeze(safe, axis=axes) * s ** (1.0 / p)


def weighted_mixed_norm(values, xnorm, xinorm, p, q, weight, hx, hxi, dx: int | None = None):
    """Mixed norm of ``values`` whose first ``dx`` axes are x-like.

    ``xnorm``/``xinorm`` are the |x| and |xi| arrays broadcastable to
    ``values``; ``hx``/``hxi`` are the cell volumes of each block.
    """
    a = np.abs(np.asarray(values))
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite values in mixed-norm input")
    if dx is None:
        dx = a.ndim // 2
    a = a * weight.on_norms(xnorm, xinorm)
    inner = _lp(a, p, tuple(range(dx)), hx)
    return float(_lp(inner, q, tuple(range(inner.ndim)), hxi))


def mixed_norm(F: PhaseSpaceFunction, params: MixedNormParams) -> float:
    g = F.xgrid
    d = g.dim
    xn = g.norms().reshape(g.shape + (1,) * d)
    xin = F.xigrid.norms().reshape((1,) * d + g.shape)
    return weighted_mixed_norm(F.values, xn, xin, params.p, params.q, params.weight,
                               g.cell, F.xigrid.cell, d)


def modulation_norm(f: SampledSignal, window: SampledSignal, params: MixedNormParams) -> float:
    return mixed_norm(stft(f, window), params)


@dataclass
class M01Profile:
    xnodes: np.ndarray
    values: np.ndarray
    edge_statistic: float
    peak: float

    @property
    def edge_ratio(self) -> float:
        return self.edge_statistic / self.peak if self.peak > 0 else 0.0


def outer_mask(coords, extents, frac: float = 0.1) -> np.ndarray:
    """Nodes in the outer ``frac`` of any axis extent (``frac/2`` per side)."""
    mask = np.zeros(np.broadcast(*coords).shape, dtype=bool)
    for c, T in zip(coords, extents):
        mask |= np.abs(c) >= (1.0 - frac) * T
    return mask


def m01_values(absV, pos_norm, freq_norm, weight: WeightSpec, freq_cell: float, n_pos_axes: int):
    """``exp(lam w(|x|)) * cell * sum_xi |V(x,xi)| exp(lam w(|xi|))`` per position."""
    if weight.lam < 0:
        raise ValueError("the M^{0,1} profile needs lambda >= 0")
    om, lam = weight.omega, weight.lam
    fw = np.exp(lam * om(freq_norm)) if lam else np.ones_like(freq_norm)
    pw = np.exp(lam * om(pos_norm)) if lam else np.ones_like(pos_norm)
    axes = tuple(range(n_pos_axes, absV.ndim))
    return pw * freq_cell * np.sum(absV * fw[(None,) * n_pos_axes], axis=axes)


def m01_profile(F: PhaseSpaceFunction, weight: WeightSpec, frac: float = 0.1) -> M01Profile:
    g = F.xgrid
    vals = m01_values(np.abs(F.values), g.norms(), F.xigrid.norms(), weight,
                      F.xigrid.cell, g.dim)
    edge = outer_mask(g.mesh(), [g.T] * g.dim, frac)
    return M01Profile(g.nodes, vals, float(np.max(vals[edge])), float(np.max(vals)))


@dataclass
class InclusionReport:
    strong: float
    weak: float
    ratio: float


def check_inclusion(f: SampledSignal, window: SampledSignal, strong: MixedNormParams,
                    weak: MixedNormParams) -> InclusionReport:
    """Ratio ``||f||_weak / ||f||_strong`` for ``M^{p1,q1}_{m_mu} <= M^{p2,q2}_{m_lam}``."""
    ws, ww = strong.weight, weak.weight
    if not (isinstance(ws, WeightSpec) and isinstance(ww, WeightSpec)):
        raise ValueError("inclusion check takes plain m_lambda weights")
    if not (strong.p <= weak.p and strong.q <= weak.q and ww.lam <= ws.lam):
        raise ValueError("need p1 <= p2, q1 <= q2 and lambda <= mu")
    V = stft(f, window)
    s, w = mixed_norm(V, strong), mixed_norm(V, weak)
    return InclusionReport(s, w, w / s if s > 0 else 0.0)
