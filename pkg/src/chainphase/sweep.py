"""Efficiency sweeps over sample transmissivity and the figure tables.

Rows are computed independently (optionally on a thread pool) and written in
grid order, so output is identical for any worker count.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import schemes
from .chain import ci_xi_limit
from .exceptions import DomainError
from .model import LossBudget
from .reports import INT_PARAM, Family, SchemeSpec, quantum_limit_ratio
from .validation import check_eta_grid

SCHEMA_VERSION = 1
SIG_DIGITS = 12
FIGURES = ("fig1a", "fig1b", "fig3")

FIG1A_POINTS = 200
FIG1A_RANGE = (1e-3, 0.9)  # range of 1 - eta
FIG1B_ETA = 0.9
FIG1B_PARAMS = range(1, 129)
CIO_STAGES = (4, 32, 128)
FIG3_LOSSES = dict(eta_p=0.9, eta_rt=0.95, eta_d=0.9)
FIG3_LOW_RT = 0.99


def fmt(x) -> str:
    """Fixed 12-significant-digit rendering used for every output value."""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{SIG_DIGITS}g}"


def default_one_minus_eta(points=FIG1A_POINTS, lo=FIG1A_RANGE[0], hi=FIG1A_RANGE[1]):
    return np.logspace(math.log10(lo), math.log10(hi), points)


def _map(fn, items, jobs):
    if jobs is None or jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- schemes ---

@dataclass(frozen=True)
class SweepScheme:
    """A family, its parameter (None means optimal per grid point) and losses."""

    family: Family
    n: int = None
    m: int = None
    n_sq: float = None
    eta_p: float = 1.0
    eta_rt: float = 1.0
    eta_d: float = 1.0
    label: str = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        if self.label is None:
            object.__setattr__(self, "label", self._default_label())

    def _default_label(self):
        parts = [self.family.value]
        for name in ("n", "m", "n_sq"):
            v = getattr(self, name)
            if v is not None:
                parts.append(f"{name}{fmt(v)}")
        if self.family in INT_PARAM and getattr(self, INT_PARAM[self.family]) is None:
            parts.append("opt")
        if (self.eta_p, self.eta_rt, self.eta_d) != (1.0, 1.0, 1.0):
            parts.append(f"p{fmt(self.eta_p)}_rt{fmt(self.eta_rt)}_d{fmt(self.eta_d)}")
        return "_".join(parts)

    @property
    def optimized(self) -> bool:
        return self.family in INT_PARAM and getattr(self, INT_PARAM[self.family]) is None

    def spec(self, eta: float) -> SchemeSpec:
        budget = LossBudget(eta, self.eta_p, self.eta_rt, self.eta_d)
        return SchemeSpec(self.family, budget, n=self.n, m=self.m, n_sq=self.n_sq)

    def evaluate(self, eta: float, search_max=schemes.DEFAULT_SEARCH_MAX):
        """(parameter used, report) at one transmissivity."""
        spec = self.spec(eta)
        if self.optimized:
            return schemes.optimal_int_param(spec, search_max)
        missing = spec.missing()
        if missing:
            raise DomainError(f"family {self.family.value} requires {', '.join(missing)}")
        report = schemes.evaluate(spec)
        name = INT_PARAM.get(self.family, "n_sq" if self.family is Family.SQZ else None)
        return (getattr(spec, name) if name else None), report

    @classmethod
    def from_dict(cls, d) -> SweepScheme:
        allowed = {"family", "n", "m", "n_sq", "eta_p", "eta_rt", "eta_d", "label"}
        unknown = set(d) - allowed
        if unknown:
            raise DomainError(f"unknown scheme keys: {sorted(unknown)}")
        if "family" not in d:
            raise DomainError("scheme entry requires 'family'")
        return cls(**d)


class SchemeEfficiency(TransformerMixin, BaseEstimator):
    """Transformer from a column of sample transmissivities to xi / xi_QL.

    Stateless; ``fit`` only validates. With ``param=None`` the family's
    integer parameter is optimized at every transmissivity.
    """

    def __init__(self, family="sp", param=None, n_sq=None, eta_p=1.0, eta_rt=1.0, eta_d=1.0,
                 output="ratio", search_max=schemes.DEFAULT_SEARCH_MAX):
        self.family = family
        self.param = param
        self.n_sq = n_sq
        self.eta_p = eta_p
        self.eta_rt = eta_rt
        self.eta_d = eta_d
        self.output = output
        self.search_max = search_max

    def _scheme(self):
        fam = Family.parse(self.family)
        kwargs = {}
        if fam in INT_PARAM and self.param is not None:
            kwargs[INT_PARAM[fam]] = self.param
        if fam is Family.SQZ:
            kwargs["n_sq"] = self.n_sq if self.n_sq is not None else self.param
        return SweepScheme(fam, eta_p=self.eta_p, eta_rt=self.eta_rt, eta_d=self.eta_d, **kwargs)

    def fit(self, X, y=None):
        check_eta_grid(X)
        if self.output not in ("ratio", "xi"):
            raise DomainError(f"output must be 'ratio' or 'xi', got {self.output!r}")
        self.scheme_ = self._scheme()
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        grid = check_eta_grid(X)
        scheme = getattr(self, "scheme_", None) or self._scheme()
        out = np.empty(grid.size)
        for i, eta in enumerate(grid):
            _, rep = scheme.evaluate(float(eta), self.search_max)
            out[i] = rep.xi_ratio if self.output == "ratio" else rep.xi
        return out.reshape(-1, 1)


# ------------------------------------------------------------------ sweep ---

@dataclass(frozen=True)
class SweepConfig:
    eta_grid: tuple
    schemes: tuple
    normalization: str = "lossless-ql"
    output_format: str = "csv"
    output_path: str = None

    def __post_init__(self):
        object.__setattr__(self, "eta_grid", tuple(check_eta_grid(self.eta_grid).tolist()))
        if not self.schemes:
            raise DomainError("a sweep needs at least one scheme")
        object.__setattr__(self, "schemes", tuple(
            s if isinstance(s, SweepScheme) else SweepScheme.from_dict(s) for s in self.schemes
        ))
        if self.normalization != "lossless-ql":
            raise DomainError(
                f"normalization {self.normalization!r} is not supported (only 'lossless-ql')"
            )
        if self.output_format not in ("csv", "json"):
            raise DomainError(f"output_format must be 'csv' or 'json', got {self.output_format!r}")
        labels = [s.label for s in self.schemes]
        if len(set(labels)) != len(labels):
            raise DomainError(f"scheme labels must be unique, got {labels}")

    @classmethod
    def from_dict(cls, d) -> SweepConfig:
        d = dict(d)
        version = d.pop("schema_version", None)
        if version != SCHEMA_VERSION:
            raise DomainError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")
        grid = d.pop("eta_grid", None)
        if isinstance(grid, dict):
            grid = _grid_from_spec(grid)
        if grid is None:
            raise DomainError("config requires 'eta_grid'")
        allowed = {"schemes", "normalization", "output_format", "output_path"}
        unknown = set(d) - allowed
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        return cls(eta_grid=grid, **d)

    @classmethod
    def load(cls, path) -> SweepConfig:
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _grid_from_spec(g):
    """{"one_minus_eta_logspace": [lo, hi, n]} or {"linspace": [lo, hi, n]}."""
    if "one_minus_eta_logspace" in g:
        lo, hi, n = g["one_minus_eta_logspace"]
        return np.sort(1.0 - default_one_minus_eta(int(n), lo, hi))
    if "linspace" in g:
        lo, hi, n = g["linspace"]
        return np.linspace(lo, hi, int(n))
    raise DomainError(f"unrecognized eta_grid spec {g!r}")


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([fmt(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        records = [
            {c: (float(fmt(v)) if not isinstance(v, (int, np.integer)) else int(v))
             for c, v in zip(self.columns, row)}
            for row in self.rows
        ]
        return json.dumps({"schema_version": SCHEMA_VERSION, "columns": self.columns,
                           "rows": records}, indent=1, allow_nan=True) + "\n"

    def render(self, output_format="csv") -> str:
        return self.to_csv() if output_format == "csv" else self.to_json()

    def column(self, name) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([float(r[i]) for r in self.rows])


def write_text(path, text):
    """Write UTF-8 with LF endings; OSError propagates to the caller."""
    Path(path).write_bytes(text.encode("utf-8"))


def run_sweep(config: SweepConfig, jobs=1) -> Table:
    columns = ["eta", "one_minus_eta"]
    for s in config.schemes:
        if s.optimized:
            columns.append(f"{s.label}_param")
        columns += [f"{s.label}_xi", f"{s.label}_ratio"]

    def row(eta):
        out = [eta, 1.0 - eta]
        for s in config.schemes:
            param, rep = s.evaluate(eta)
            if s.optimized:
                out.append(param)
            out += [rep.xi, rep.xi_ratio]
        return out

    return Table(columns, _map(row, config.eta_grid, jobs))


# ---------------------------------------------------------------- figures ---

def _opt_ratio(family, budget, search_max=schemes.DEFAULT_SEARCH_MAX):
    return schemes.optimal_int_param(SchemeSpec(family, budget), search_max)[1].xi_ratio


def _best_ratios(eta, budget):
    r_sp = schemes.xi_sp(budget).xi_ratio
    r_noon = _opt_ratio(Family.NOON, budget)
    r_mp = _opt_ratio(Family.MP, budget)
    r_cic = _opt_ratio(Family.CIC, budget)
    r_cio = [schemes.xi_cio(m, budget).xi_ratio for m in CIO_STAGES]
    return [r_sp, r_noon, r_mp, r_cic, *r_cio]


def _equivalent_db(ratio, eta):
    # ratios within roundoff of the quantum limit need infinite squeezing
    if ratio >= 1.0 - 1e-12:
        return math.inf
    return schemes.equivalent_db_for_ratio(ratio, eta)


def figure_fig1a(jobs=1, one_minus_eta=None) -> Table:
    x = default_one_minus_eta() if one_minus_eta is None else np.asarray(one_minus_eta, float)
    cols = ["one_minus_eta", "ratio_sp", "ratio_noon_opt", "ratio_mp_opt", "ratio_cic_opt",
            *[f"ratio_cio_m{m}" for m in CIO_STAGES], "equivalent_db"]

    def row(om):
        eta = 1.0 - om
        ratios = _best_ratios(eta, LossBudget(eta))
        return [om, *ratios, _equivalent_db(max(ratios), eta)]

    return Table(cols, _map(row, x, jobs))


def figure_fig1b(jobs=1) -> Table:
    eta = FIG1B_ETA
    b = LossBudget(eta)
    cols = ["param", "ratio_sp", "ratio_noon", "ratio_mp", "ratio_cic", "ratio_cio", "ratio_sqz"]
    r_sp = schemes.xi_sp(b).xi_ratio

    def row(k):
        return [k, r_sp, schemes.xi_noon(k, b).xi_ratio, schemes.xi_mp(k, b).xi_ratio,
                schemes.xi_cic(k, b).xi_ratio, schemes.xi_cio(k, b).xi_ratio,
                schemes.xi_sqz(k, b).xi_ratio]

    return Table(cols, _map(row, list(FIG1B_PARAMS), jobs))


def figure_fig3(jobs=1, one_minus_eta=None) -> Table:
    x = default_one_minus_eta() if one_minus_eta is None else np.asarray(one_minus_eta, float)
    cols = ["one_minus_eta", "ratio_sp", "ratio_noon_opt", "ratio_mp_opt", "ratio_cic_opt",
            *[f"ratio_cio_m{m}" for m in CIO_STAGES], "ratio_cio_inf", "ratio_sqz_inf",
            "mp_rt99", "mpsqz_rt99"]

    def row(om):
        eta = 1.0 - om
        b = LossBudget(eta, **FIG3_LOSSES)
        low_rt = b.replace(eta_rt=FIG3_LOW_RT)
        return [
            om, *_best_ratios(eta, b),
            quantum_limit_ratio(ci_xi_limit(b), eta),
            schemes.xi_sqz(math.inf, b).xi_ratio,
            _opt_ratio(Family.MP, low_rt),
            _opt_ratio(Family.MPSQZ, low_rt),
        ]

    return Table(cols, _map(row, x, jobs))


def make_figure(name, jobs=1) -> Table:
    builders = {"fig1a": figure_fig1a, "fig1b": figure_fig1b, "fig3": figure_fig3}
    if name not in builders:
        raise DomainError(f"figure name must be one of {', '.join(FIGURES)}, got {name!r}")
    return builders[name](jobs=jobs)
