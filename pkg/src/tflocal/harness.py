"""Verification suites: configured case lists, deterministic execution, CSV/JSON reports.

Every case produces one row ``(lhs, rhs, ratio, tol)`` and passes iff
``ratio = lhs / rhs <= tol``.  Checks of the form "x >= c" are stored with
the sides swapped so a reader of ``report.csv`` can recompute every flag.
"""
from __future__ import annotations

import copy
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from . import gabor as gb
from . import io as tio
from . import locop as lo
from . import transforms as tr
from .norms import MixedNormParams, modulation_norm
from .weights import ProductWeight, WeightFunction, WeightSpec

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class ConfigError(ValueError):
    """Unresolvable or inconsistent suite configuration."""


CSV_COLUMNS = ["suite", "case", "param_json", "lhs", "rhs", "ratio", "tol", "pass", "seconds"]
WINDOWS = {"g0": tr.gaussian, "hermite1": tr.hermite1}
SIGNALS = {"g0": tr.gaussian, "hermite1": tr.hermite1}

SUITES = {
    "inversion": "STFT round trip and identity recovery for the constant symbol",
    "weyl_equivalence": "localization route vs Weyl-kernel route operator matrices",
    "boundedness": "operator-norm estimates against the symbol/window norm product",
    "convolution": "modulation norm of f*g against the mixed-weight norm product",
    "compactness": "singular-value fingerprints across an n-ladder",
    "m01_decay": "symbol STFT decay hypothesis and M^{0,1} decay of a*W under a T-ladder",
    "frame_nuclear": "tight Gabor frame, kernel coefficient tails and the trace-norm bound",
}

DEFAULT_TUPLES = [
    {"p": 1, "q": 1, "r": 1, "s": 1, "t": 1, "lam_mu": [[0, 0], [1, 0], [1, 1]]},
    {"p": "inf", "q": 1, "r": "inf", "s": 1, "t": "inf", "lam_mu": [[0, -1]]},
    {"p": 2, "q": 1, "r": 2, "s": 2, "t": 2, "lam_mu": [[0, 0], [1, 0], [1, 1]]},
    {"p": 1, "q": 2, "r": 2, "s": 1, "t": 2, "lam_mu": [[0, 0], [1, 0], [1, 1]]},
    {"p": 2, "q": 2, "r": "inf", "s": 2, "t": 1, "lam_mu": [[0, 0], [1, 0], [1, 1]]},
]

DEFAULTS = {
    "inversion": {
        "grid": [{"d": 1, "n": 256, "T": 12}],
        "windows": ["g0"],
        "options": {"signals": ["g0", "hermite1"], "tol": 1e-6},
    },
    "weyl_equivalence": {
        "grid": [{"d": 1, "n": 256, "T": 12}],
        "symbols": ["constant", "gaussian", "box", "xonly"],
        "windows": ["g0"],
        "options": {"tol": 1e-5},
    },
    "boundedness": {
        "grid": [{"d": 1, "n": 128, "T": 12}, {"d": 1, "n": 256, "T": 12}],
        "omega": [{"kind": "log1p"}, {"kind": "power", "param": 0.5}],
        "lambda": [0, 1],
        "pq": [[1, 1], [1, 2], [2, 1], [2, 2]],
        "symbols": ["constant", "gaussian", "box", "xonly"],
        "windows": ["g0"],
        "options": {"trials": 16, "ladder_tol": 0.1},
    },
    "convolution": {
        "grid": [{"d": 1, "n": 128, "T": 12}, {"d": 1, "n": 256, "T": 12}],
        "omega": [{"kind": "log1p"}],
        "options": {"pairs": 20, "tuples": DEFAULT_TUPLES, "ladder_tol": 0.1},
    },
    "compactness": {
        "grid": [{"d": 1, "n": 128, "T": 12}, {"d": 1, "n": 256, "T": 12},
                 {"d": 1, "n": 512, "T": 12}],
        "symbols": ["gaussian", "box", "constant"],
        "windows": ["g0"],
        "options": {"threshold": 1e-3, "flat_tol": 1e-3, "k_spread": 2, "max_rank_fraction": 0.25},
    },
    "m01_decay": {
        "grid": [{"d": 1, "n": 192, "T": 12}, {"d": 1, "n": 256, "T": 16}],
        "omega": [{"kind": "log1p"}],
        "lambda": [1],
        "symbols": ["gaussian", "box", "xonly", "constant"],
        "windows": ["g0"],
        "options": {"radii": [1, 2, 4], "hyp_tol": 1e-4, "edge_tol": 1e-3, "decay_factor": 4},
    },
    "frame_nuclear": {
        "grid": [{"d": 1, "n": 128, "T": 8}],
        "symbols": ["gaussian"],
        "windows": ["g0"],
        "options": {"steps": [2, 4], "tight_tol": 1e-8, "tail_tol": 0.1,
                    "recon_tol": 1e-6, "tail_floor": 1e-12},
    },
}

COMMON = {"omega": [{"kind": "log1p"}], "lambda": [0], "pq": [[2, 2]], "symbols": [],
          "windows": ["g0"], "seed": 0, "output": "out", "c_disc": 2.0, "options": {}}


def _exp(v) -> float:
    if isinstance(v, str):
        if v.lower() in ("inf", "infinity"):
            return math.inf
        raise ConfigError(f"bad exponent {v!r}")
    v = float(v)
    if not v >= 1:
        raise ConfigError(f"exponent {v} outside [1, inf]")
    return v


def _fmt(v):
    return "inf" if isinstance(v, float) and math.isinf(v) else v


def _num(v) -> str:
    return "inf" if math.isinf(v) else f"{v:g}"


@dataclass(frozen=True)
class GridSpec:
    d: int
    n: int
    T: float

    def grid(self) -> tr.Grid:
        return tr.Grid.from_extent(self.T, self.n, self.d)

    def echo(self) -> dict:
        return {"d": self.d, "n": self.n, "T": self.T}


@dataclass
class SuiteConfig:
    suite: str
    grid: list[GridSpec]
    omega: list[WeightFunction]
    lambdas: list[float]
    pq: list[tuple[float, float]]
    symbols: list[str]
    windows: list[str]
    seed: int
    output: str
    c_disc: float
    options: dict
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, cfg: dict, suite: str | None = None) -> "SuiteConfig":
        cfg = dict(cfg)
        name = suite or cfg.get("suite")
        if name not in SUITES:
            raise ConfigError(f"unknown suite {name!r}; expected one of {list(SUITES)}")
        if suite and cfg.get("suite", suite) != suite:
            raise ConfigError(f"config is for suite {cfg['suite']!r}, not {suite!r}")
        merged = copy.deepcopy(COMMON)
        merged.update(copy.deepcopy(DEFAULTS[name]))
        opts = merged.pop("options")
        opts.update(cfg.pop("options", {}))
        merged.update(cfg)
        merged["options"] = opts
        merged["suite"] = name
        unknown = set(merged) - set(COMMON) - {"suite", "grid"}
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        try:
            grids = merged["grid"]
            if isinstance(grids, dict):
                grids = [grids]
            gspecs = [GridSpec(int(g.get("d", 1)), int(g["n"]), float(g["T"])) for g in grids]
            for g in gspecs:
                g.grid()
            omegas = [WeightFunction.from_config(o) for o in merged["omega"]]
            pq = [(_exp(p), _exp(q)) for p, q in merged["pq"]]
            lambdas = [float(v) for v in merged["lambda"]]
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc
        if not gspecs:
            raise ConfigError("at least one grid is required")
        if any(b.n <= a.n for a, b in zip(gspecs, gspecs[1:])):
            raise ConfigError("grid ladder must be strictly increasing in n")
        for s in merged["symbols"]:
            if s not in lo.BUILTIN_SYMBOLS:
                raise ConfigError(f"unknown symbol id {s!r}")
        for w in merged["windows"]:
            if w not in WINDOWS:
                raise ConfigError(f"unknown window id {w!r}")
        if not merged["windows"]:
            raise ConfigError("at least one window is required")
        c_disc = float(merged["c_disc"])
        if not c_disc > 0:
            raise ConfigError("c_disc must be positive")
        echo = {k: merged[k] for k in sorted(merged)}
        echo["grid"] = [g.echo() for g in gspecs]
        return cls(name, gspecs, omegas, lambdas, pq, list(merged["symbols"]),
                   list(merged["windows"]), int(merged["seed"]), str(merged["output"]),
                   c_disc, merged["options"], echo)

    @classmethod
    def load(cls, path, suite: str | None = None) -> "SuiteConfig":
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data, suite)

    @classmethod
    def default(cls, suite: str) -> "SuiteConfig":
        return cls.from_dict({}, suite)


@dataclass
class Case:
    case_id: str
    params: dict
    run: Callable[[dict], tuple[float, float, float]]


@dataclass
class Row:
    suite: str
    case: str
    params: dict
    lhs: float
    rhs: float
    tol: float
    seconds: float = 0.0
    error: str | None = None

    @property
    def ratio(self) -> float:
        return _ratio(self.lhs, self.rhs)

    @property
    def passed(self) -> bool:
        return self.error is None and self.ratio <= self.tol

    def cells(self, timing: bool = True) -> list[str]:
        out = [self.suite, self.case, json.dumps(self.params, sort_keys=True),
               repr(float(self.lhs)), repr(float(self.rhs)), repr(float(self.ratio)),
               repr(float(self.tol)), "1" if self.passed else "0"]
        if timing:
            out.append(f"{self.seconds:.3f}")
        return out


def _ratio(lhs: float, rhs: float) -> float:
    if math.isnan(lhs) or math.isnan(rhs):
        return math.nan
    if rhs == 0:
        return 0.0 if lhs == 0 else math.inf
    return lhs / rhs


def recompute_pass(lhs: float, rhs: float, tol: float) -> bool:
    return _ratio(lhs, rhs) <= tol


@dataclass
class VerificationReport:
    suite: str
    rows: list[Row]
    config: dict
    version: str = __version__

    @property
    def failures(self) -> list[Row]:
        return [r for r in self.rows if not r.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> dict:
        finite = [r.ratio for r in self.rows if math.isfinite(r.ratio)]
        return {"suite": self.suite, "version": self.version, "cases": len(self.rows),
                "failures": [r.case for r in self.failures],
                "errors": {r.case: r.error for r in self.rows if r.error},
                "max_ratio": max(finite) if finite else None,
                "passed": self.passed, "config": self.config}

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        tio.write_csv(out / "report.csv", CSV_COLUMNS, (r.cells() for r in self.rows))
        (out / "summary.json").write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n")


# -- shared, cached ingredients ---------------------------------------------


class Context(dict):
    """Cache shared between the cases of one run (plus cross-case results)."""

    def grid(self, gs: GridSpec) -> tr.Grid:
        return self.memo(("grid", gs), gs.grid)

    def window(self, name: str, gs: GridSpec) -> tr.SampledSignal:
        return self.memo(("window", name, gs), lambda: WINDOWS[name](self.grid(gs)))

    def symbol(self, name: str, gs: GridSpec) -> lo.SymbolSpec:
        return self.memo(("symbol", name, gs), lambda: lo.make_symbol(name, self.grid(gs)))

    def locop(self, sym: str, win: str, gs: GridSpec) -> lo.LocOpMatrix:
        def build():
            w = self.window(win, gs)
            return lo.localization_matrix(self.symbol(sym, gs), w, w)
        return self.memo(("locop", sym, win, gs), build)

    def memo(self, key, fn):
        if key not in self:
            self[key] = fn()
        return self[key]


def _gid(gs: GridSpec) -> str:
    return f"n={gs.n}/T={gs.T:g}"


def _ladder_pairs(cfg: SuiteConfig):
    return list(zip(cfg.grid, cfg.grid[1:]))


# -- suites -------------------------------------------------------------------


def _plan_inversion(cfg: SuiteConfig) -> list[Case]:
    tol = float(cfg.options.get("tol", 1e-6))
    cases = []
    for gs in cfg.grid:
        for win in cfg.windows:
            for sig in cfg.options.get("signals", ["g0"]):
                if sig not in SIGNALS:
                    raise ConfigError(f"unknown signal id {sig!r}")

                def run(ctx, gs=gs, win=win, sig=sig):
                    f = SIGNALS[sig](ctx.grid(gs))
                    w = ctx.window(win, gs)
                    return (tr.invert(f, w, w) - f).norm(), f.norm(), tol
                cases.append(Case(f"inversion/{sig}/{win}/{_gid(gs)}",
                                  {"signal": sig, "window": win, **gs.echo()}, run))

            def run_id(ctx, gs=gs, win=win):
                w = ctx.window(win, gs)
                L = ctx.locop("constant", win, gs)
                c = 2 * math.pi * w.inner(w)
                dev = np.linalg.norm(L.matrix - c * np.eye(gs.n), 2)
                return float(dev), abs(c), tol
            cases.append(Case(f"inversion/identity/{win}/{_gid(gs)}",
                              {"symbol": "constant", "window": win, **gs.echo()}, run_id))
    return cases


def _plan_weyl(cfg: SuiteConfig) -> list[Case]:
    tol = float(cfg.options.get("tol", 1e-5))
    cases = []
    for gs in cfg.grid:
        for win in cfg.windows:
            for sym in cfg.symbols:
                def run(ctx, gs=gs, win=win, sym=sym):
                    w = ctx.window(win, gs)
                    A = ctx.locop(sym, win, gs).matrix
                    B = lo.weyl_route_matrix(ctx.symbol(sym, gs), w, w).matrix
                    return float(np.linalg.norm(A - B)), float(np.linalg.norm(A)), tol
                cases.append(Case(f"weyl_equivalence/{sym}/{win}/{_gid(gs)}",
                                  {"symbol": sym, "window": win, **gs.echo()}, run))
    return cases


def _plan_boundedness(cfg: SuiteConfig) -> list[Case]:
    trials = int(cfg.options.get("trials", 16))
    stride = cfg.options.get("stride")
    cases = []
    for gs in cfg.grid:
        for win in cfg.windows:
            for sym in cfg.symbols:
                for om in cfg.omega:
                    for lam in cfg.lambdas:
                        # a = 1 lies in the symbol class only without weight
                        if sym == "constant" and lam != 0:
                            continue
                        for p, q in cfg.pq:
                            params = {"symbol": sym, "window": win, "omega": om.to_config(),
                                      "lambda": lam, "p": _fmt(p), "q": _fmt(q), "trials": trials,
                                      "seed": cfg.seed, **gs.echo()}

                            def run(ctx, gs=gs, win=win, sym=sym, om=om, lam=lam, p=p, q=q):
                                w = ctx.window(win, gs)
                                a = ctx.symbol(sym, gs)
                                anorm = ctx.memo(("symnorm", sym, om, lam, gs),
                                                 lambda: lo.symbol_sup_norm(a, om, lam, stride))
                                rhs = lo.boundedness_rhs(a, w, w, om, lam, p, stride, anorm)["rhs"]
                                est = lo.operator_norm(ctx.locop(sym, win, gs),
                                                       MixedNormParams(p, q, WeightSpec(om, lam)),
                                                       ctx.window("g0", gs), trials, cfg.seed)
                                ctx.setdefault(("bratios", gs), []).append(est / rhs)
                                return est, rhs, cfg.c_disc
                            cases.append(Case(
                                f"boundedness/{sym}/{win}/{om.label()}/lam={lam:g}/p={_num(p)}/q={_num(q)}/{_gid(gs)}",
                                params, run))
    cases += _ladder_cases(cfg, "boundedness", "bratios")
    return cases


def _ladder_cases(cfg: SuiteConfig, suite: str, key: str, tag=None) -> list[Case]:
    tol = float(cfg.options.get("ladder_tol", 0.1))
    out = []
    for a, b in _ladder_pairs(cfg):
        def run(ctx, a=a, b=b):
            ra = max(ctx[(key, a)] if tag is None else ctx[(key, tag, a)])
            rb = max(ctx[(key, b)] if tag is None else ctx[(key, tag, b)])
            return abs(rb - ra), ra, tol
        label = "" if tag is None else f"/{tag}"
        out.append(Case(f"{suite}/ladder{label}/n={a.n}->{b.n}",
                        {"n": [a.n, b.n], "T": [a.T, b.T], "statistic": "max ratio"}, run))
    return out


def _conv_weights(om, lam, mu):
    f_w = ProductWeight((WeightSpec(om, lam, "first"), WeightSpec(om, mu, "second")))
    g_w = ProductWeight((WeightSpec(om, lam, "first"), WeightSpec(om, abs(lam), "second"),
                         WeightSpec(om, -mu, "second")))
    return f_w, g_w


def _conj_exp(t: float) -> float:
    if t == 1:
        return math.inf
    return 1.0 if math.isinf(t) else t / (t - 1)


def convolution_case(f, g, tup: dict, om, lam: float, mu: float) -> tuple[float, float]:
    """``||f*g||_{M^{r,s}_{m_lam}}`` (window g0*g0) and the mixed-weight norm product (window g0)."""
    p, q, r, s, t = (_exp(tup[k]) for k in "pqrst")
    grid = f.grid
    g0 = tr.gaussian(grid)
    gg = tr.SampledSignal(grid, tr.gaussian(grid, math.sqrt(2)).values / math.sqrt(2))
    lhs = modulation_norm(tr.convolve(f, g), gg, MixedNormParams(r, s, WeightSpec(om, lam)))
    f_w, g_w = _conv_weights(om, lam, mu)
    st, st2 = s * t, s * _conj_exp(t)
    rhs = (modulation_norm(f, g0, MixedNormParams(p, st, f_w))
           * modulation_norm(g, g0, MixedNormParams(q, st2, g_w)))
    return lhs, rhs


def _plan_convolution(cfg: SuiteConfig) -> list[Case]:
    pairs = int(cfg.options.get("pairs", 20))
    tuples = cfg.options.get("tuples", DEFAULT_TUPLES)
    for tup in tuples:
        try:
            p, q, r, t = (_exp(tup[k]) for k in "pqrt")
            _exp(tup["s"])
        except KeyError as exc:
            raise ConfigError(f"tuple {tup} misses {exc}") from None
        if abs(1 / p + 1 / q - 1 - 1 / r) > 1e-12:
            raise ConfigError(f"tuple {tup} violates 1/p + 1/q - 1 = 1/r")
        if any(lm[0] < 0 for lm in tup.get("lam_mu", [[0, 0]])):
            raise ConfigError("convolution suite needs lambda >= 0")
    cases = []
    for ti, tup in enumerate(tuples):
        tag = "t{}:{}".format(ti, ",".join(_num(_exp(tup[k])) for k in "pqrst"))
        for gs in cfg.grid:
            for om in cfg.omega:
                for lam, mu in tup.get("lam_mu", [[0, 0]]):
                    for k in range(pairs):
                        params = {"tuple": {k2: tup[k2] for k2 in "pqrst"}, "lambda": lam, "mu": mu,
                                  "omega": om.to_config(), "pair": k, "seed": cfg.seed, **gs.echo()}

                        def run(ctx, gs=gs, om=om, lam=lam, mu=mu, k=k, tup=tup, tag=tag):
                            grid = ctx.grid(gs)
                            f = lo.trial_signal(grid, cfg.seed, 2 * k)
                            g = lo.trial_signal(grid, cfg.seed, 2 * k + 1)
                            lhs, rhs = convolution_case(f, g, tup, om, float(lam), float(mu))
                            ctx.setdefault(("cratios", tag, gs), []).append(lhs / rhs)
                            return lhs, rhs, cfg.c_disc
                        cases.append(Case(
                            f"convolution/{tag}/{om.label()}/lam={lam:g}/mu={mu:g}/pair={k}/{_gid(gs)}",
                            params, run))
        cases += _ladder_cases(cfg, "convolution", "cratios", tag)
    return cases


def _plan_compactness(cfg: SuiteConfig) -> list[Case]:
    o = cfg.options
    thr = float(o.get("threshold", 1e-3))
    cases = []
    for win in cfg.windows:
        for sym in cfg.symbols:
            kind = "flat" if sym == "constant" else ("decaying" if _expects_hypothesis(sym) else "none")
            for gs in cfg.grid:
                params = {"symbol": sym, "window": win, "fingerprint": kind, "threshold": thr, **gs.echo()}

                def run(ctx, gs=gs, sym=sym, win=win, kind=kind):
                    op = ctx.locop(sym, win, gs)
                    sv = lo.singular_values(op)
                    ctx.setdefault(("spectra", sym, win), {})[gs.n] = sv
                    if kind == "flat":
                        return 1.0 - float(sv[gs.n // 2 - 1] / sv[0]), 1.0, float(o.get("flat_tol", 1e-3))
                    K = lo.spectral_cutoff(sv, thr)
                    ctx.setdefault(("cutoff", sym, win), []).append(K)
                    tol = float(o.get("max_rank_fraction", 0.25)) if kind == "decaying" else math.inf
                    return float(K), float(gs.n), tol
                cases.append(Case(f"compactness/{sym}/{win}/{_gid(gs)}", params, run))
            if kind == "decaying" and len(cfg.grid) > 1:
                def run_k(ctx, sym=sym, win=win):
                    Ks = ctx[("cutoff", sym, win)]
                    return float(max(Ks) - min(Ks)), 1.0, float(o.get("k_spread", 2))
                cases.append(Case(f"compactness/{sym}/{win}/cutoff-stability",
                                  {"symbol": sym, "window": win, "n": [g.n for g in cfg.grid]}, run_k))
    return cases


def _plan_m01(cfg: SuiteConfig) -> list[Case]:
    o = cfg.options
    if len(cfg.grid) != 2:
        raise ConfigError("m01_decay needs a two-rung T-ladder")
    g1, g2 = cfg.grid
    if abs(g1.grid().h - g2.grid().h) > 1e-12 or g2.T <= g1.T:
        raise ConfigError("m01_decay ladder must grow T at fixed spacing h")
    radii = [float(r) for r in o.get("radii", [1, 2, 4])]
    hyp_tol = float(o.get("hyp_tol", 1e-4))
    edge_tol = float(o.get("edge_tol", 1e-3))
    factor = float(o.get("decay_factor", 4))
    stride = o.get("stride")
    win = cfg.windows[0]
    cases = []
    for om in cfg.omega:
        for lam in cfg.lambdas:
            if lam < 0:
                raise ConfigError("m01_decay needs lambda >= 0")
            weight = WeightSpec(om, lam)
            base = {"omega": om.to_config(), "lambda": lam, "window": win}
            tag = f"{om.label()}/lam={lam:g}"

            def profile(ctx, sym, gs, weight=weight):
                def build():
                    w = ctx.window(win, gs)
                    aw = lo.weyl_symbol(ctx.symbol(sym, gs), w, w, method="direct")
                    return lo.symbol_m01_profile(aw, weight, stride=stride)
                return ctx.memo(("m01", sym, weight, gs), build)

            for sym in cfg.symbols:
                expect = _expects_hypothesis(sym)

                def run_hyp(ctx, sym=sym, expect=expect, weight=weight):
                    rep = lo.check_2m2(ctx.symbol(sym, g1), weight, radii, stride=stride,
                                       threshold=hyp_tol)
                    worst = max(rep.ratios)
                    return (worst, 1.0, hyp_tol) if expect else (hyp_tol, worst, 1.0)
                cases.append(Case(f"m01_decay/{sym}/{tag}/hypothesis/{_gid(g1)}",
                                  {**base, "symbol": sym, "radii": radii, "expect_hypothesis": expect,
                                   **g1.echo()}, run_hyp))
                if expect:
                    def run_edge(ctx, sym=sym, profile=profile):
                        pr = profile(ctx, sym, g1)
                        return pr.edge_statistic, pr.peak, edge_tol
                    cases.append(Case(f"m01_decay/{sym}/{tag}/edge/{_gid(g1)}",
                                      {**base, "symbol": sym, **g1.echo()}, run_edge))

                    def run_ladder(ctx, sym=sym, profile=profile):
                        e1 = profile(ctx, sym, g1).edge_statistic_x
                        e2 = profile(ctx, sym, g2).edge_statistic_x
                        return e2, e1, 1.0 / factor
                    cases.append(Case(f"m01_decay/{sym}/{tag}/T-ladder",
                                      {**base, "symbol": sym, "T": [g1.T, g2.T], "n": [g1.n, g2.n],
                                       "statistic": "x-edge"}, run_ladder))
                elif sym == "constant" and lam > 0:
                    def run_grow(ctx, sym=sym, profile=profile):
                        e1 = profile(ctx, sym, g1).edge_statistic_x
                        e2 = profile(ctx, sym, g2).edge_statistic_x
                        return e1, e2, 1.0
                    cases.append(Case(f"m01_decay/{sym}/{tag}/T-ladder-growth",
                                      {**base, "symbol": sym, "T": [g1.T, g2.T], "n": [g1.n, g2.n],
                                       "statistic": "x-edge"}, run_grow))
    return cases


def _expects_hypothesis(sym: str) -> bool:
    """Whether the built-in symbol is constructed to satisfy the STFT decay hypothesis."""
    return bool(lo.make_symbol(sym, tr.Grid(1, 16, 0.5)).expect_2m2)


def _plan_frame(cfg: SuiteConfig) -> list[Case]:
    o = cfg.options
    a, b = (int(v) for v in o.get("steps", [2, 4]))
    win = cfg.windows[0]
    floor = float(o.get("tail_floor", 1e-12))
    cases = []
    for gs in cfg.grid:
        base = {"atom": win, "steps": [a, b], **gs.echo()}

        def system(ctx, gs=gs):
            def build():
                grid = ctx.grid(gs)
                s = gb.build_gabor_system(ctx.window(win, gs), a * grid.h, b * grid.dxi)
                return s, gb.tightness_defect(s)
            return ctx.memo(("gabor", gs), build)

        def run_tight(ctx, system=system):
            return system(ctx)[1].defect, 1.0, float(o.get("tight_tol", 1e-8))
        cases.append(Case(f"frame_nuclear/tightness/{_gid(gs)}", base, run_tight))

        def run_herm(ctx, system=system):
            return system(ctx)[1].hermitian_defect, 1.0, 1e-12
        cases.append(Case(f"frame_nuclear/hermitian/{_gid(gs)}", base, run_herm))

        for sym in cfg.symbols:
            def coeffs(ctx, sym=sym, gs=gs, system=system):
                return ctx.memo(("coef", sym, gs), lambda: gb.kernel_gabor_coefficients(
                    ctx.locop(sym, win, gs).kernel(), system(ctx)[0]))

            def run_recon(ctx, sym=sym, gs=gs, coeffs=coeffs, system=system):
                c = coeffs(ctx)
                kr = gb.reconstruct_kernel(c, system(ctx)[1].frame_constant)
                return float(np.linalg.norm(kr - c.kernel)), float(np.linalg.norm(c.kernel)), \
                    float(o.get("recon_tol", 1e-6))
            cases.append(Case(f"frame_nuclear/{sym}/reconstruction/{_gid(gs)}",
                              {**base, "symbol": sym}, run_recon))

            # the ladder depends on computed tails; a fixed number of rungs is planned
            for rung in range(int(o.get("tail_rungs", 2))):
                def run_tail(ctx, rung=rung, coeffs=coeffs):
                    t = coeffs(ctx).tails()
                    ladder = gb.tail_ladder(t, floor)
                    if rung >= len(ladder):
                        raise RuntimeError(f"tail ladder has only {len(ladder)} rungs above the floor")
                    r = ladder[rung]
                    return float(t[2 * r]), float(t[r]), float(o.get("tail_tol", 0.1))
                cases.append(Case(f"frame_nuclear/{sym}/tail-rung{rung}/{_gid(gs)}",
                                  {**base, "symbol": sym, "rung": rung, "floor": floor}, run_tail))

            def run_nuc(ctx, sym=sym, gs=gs, coeffs=coeffs, system=system):
                s, tight = system(ctx)
                nb = gb.nuclear_bound(coeffs(ctx), s, ctx.locop(sym, win, gs), tight)
                return nb.trace_norm, nb.bound, (1.0 + nb.defect) ** 2
            cases.append(Case(f"frame_nuclear/{sym}/nuclear/{_gid(gs)}",
                              {**base, "symbol": sym}, run_nuc))
    return cases


PLANNERS = {
    "inversion": _plan_inversion,
    "weyl_equivalence": _plan_weyl,
    "boundedness": _plan_boundedness,
    "convolution": _plan_convolution,
    "compactness": _plan_compactness,
    "m01_decay": _plan_m01,
    "frame_nuclear": _plan_frame,
}


def plan(cfg: SuiteConfig) -> list[Case]:
    return PLANNERS[cfg.suite](cfg)


def _write_artifacts(cfg: SuiteConfig, ctx: Context, out: Path) -> None:
    if cfg.suite == "compactness":
        rows = []
        for key, spectra in ctx.items():
            if isinstance(key, tuple) and key[0] == "spectra":
                for n, sv in sorted(spectra.items()):
                    rows += [[key[1], str(n), str(k + 1), repr(float(s))] for k, s in enumerate(sv)]
                    gs = next(g for g in cfg.grid if g.n == n)
                    tio.write_container(out / f"spectrum_{key[1]}_n{n}.tfc", ctx.grid(gs), sv)
        tio.write_csv(out / "spectra.csv", ["symbol", "n", "k", "sigma"], rows)
    elif cfg.suite == "frame_nuclear":
        rows = []
        for key, c in ctx.items():
            if isinstance(key, tuple) and key[0] == "coef":
                rows += [[key[1], str(r), repr(float(t))] for r, t in enumerate(c.tails())]
                tio.write_container(out / f"coefficients_{key[1]}_n{key[2].n}.tfc",
                                    ctx.grid(key[2]), c.coeffs)
        tio.write_csv(out / "tails.csv", ["symbol", "r", "tail"], rows)


def run_suite(cfg: SuiteConfig, out_dir=None, progress: Callable[[Row], None] | None = None
              ) -> VerificationReport:
    cases = plan(cfg)
    ctx = Context()
    rows = []
    for case in cases:
        t0 = time.perf_counter()
        try:
            lhs, rhs, tol = case.run(ctx)
            row = Row(cfg.suite, case.case_id, case.params, float(lhs), float(rhs), float(tol))
        except Exception as exc:  # a failing case must not stop the suite
            row = Row(cfg.suite, case.case_id, case.params, math.nan, math.nan, math.nan,
                      error=f"{type(exc).__name__}: {exc}")
        row.seconds = time.perf_counter() - t0
        rows.append(row)
        if progress:
            progress(row)
    report = VerificationReport(cfg.suite, rows, cfg.raw)
    if out_dir is not None:
        report.write(out_dir)
        _write_artifacts(cfg, ctx, Path(out_dir))
    return report


def list_suites() -> dict[str, str]:
    return dict(SUITES)


def describe(case_id: str, cfg: SuiteConfig | None = None) -> dict:
    """Resolved parameters of one case, planned from ``cfg`` or the suite defaults."""
    suite = case_id.split("/", 1)[0]
    if suite not in SUITES:
        raise KeyError(f"unknown case {case_id!r}")
    if cfg is None:
        cfg = SuiteConfig.default(suite)
    elif cfg.suite != suite:
        raise KeyError(f"case {case_id!r} does not belong to suite {cfg.suite!r}")
    for case in plan(cfg):
        if case.case_id == case_id:
            return {"suite": suite, "case": case_id, "params": case.params}
    raise KeyError(f"unknown case {case_id!r}")


def case_ids(suite: str, cfg: SuiteConfig | None = None) -> list[str]:
    return [c.case_id for c in plan(cfg or SuiteConfig.default(suite))]
