import csv
import io
import json
import math

import numpy as np
import pytest
from sklearn.pipeline import make_pipeline

from chainphase import DomainError, LossBudget, SchemeEfficiency, SweepConfig, SweepScheme, run_sweep
from chainphase import schemes
from chainphase.reports import SchemeSpec
from chainphase.sweep import (
    figure_fig1a,
    figure_fig1b,
    figure_fig3,
    fmt,
    make_figure,
)


def test_fmt_twelve_significant_digits():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(15) == "15"
    assert fmt(math.inf) == "inf"
    assert float(fmt(23.334586273285403)) == pytest.approx(23.334586273285403, rel=1e-11)


def test_sweep_rows_and_header():
    cfg = SweepConfig((0.5, 0.7, 0.9), (SweepScheme("mp", m=15),))
    text = run_sweep(cfg).to_csv()
    lines = text.split("\n")
    assert lines[-1] == "" and "\r" not in text
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["eta", "one_minus_eta", "mp_m15_xi", "mp_m15_ratio"]
    assert len(rows) == 4
    assert not any(line.endswith(",") for line in lines)


def test_sweep_round_trip_reevaluation():
    schemes_ = (SweepScheme("mp"), SweepScheme("cio", m=32, eta_rt=0.95, eta_p=0.9, eta_d=0.9),
                SweepScheme("sqz", n_sq=3.0), SweepScheme("noon"))
    cfg = SweepConfig(tuple(np.linspace(0.3, 0.95, 7)), schemes_)
    table = run_sweep(cfg)
    parsed = list(csv.DictReader(io.StringIO(table.to_csv())))
    for row in parsed:
        eta = float(row["eta"])
        for s in schemes_:
            kwargs = {}
            if s.optimized:
                name = "n" if s.family.value == "noon" else "m"
                kwargs[name] = int(row[f"{s.label}_param"])
            spec = s.spec(eta).with_param(**kwargs)
            assert schemes.evaluate(spec).xi == pytest.approx(float(row[f"{s.label}_xi"]), rel=1e-9)


def test_sweep_json():
    cfg = SweepConfig((0.5, 0.9), (SweepScheme("sp"),), output_format="json")
    doc = json.loads(run_sweep(cfg).render("json"))
    assert doc["schema_version"] == 1
    assert doc["rows"][1]["sp_xi"] == pytest.approx(3.6)


def test_sweep_config_validation():
    with pytest.raises(DomainError):
        SweepConfig((0.9, 0.5), (SweepScheme("sp"),))
    with pytest.raises(DomainError):
        SweepConfig((0.5, 1.0), (SweepScheme("sp"),))
    with pytest.raises(DomainError):
        SweepConfig((0.5,), ())
    with pytest.raises(DomainError):
        SweepConfig((0.5,), (SweepScheme("sp"),), normalization="lossy-ql-unsupported")
    with pytest.raises(DomainError):
        SweepConfig.from_dict({"eta_grid": [0.5], "schemes": [{"family": "sp"}]})


def test_sweep_config_from_dict_logspace():
    cfg = SweepConfig.from_dict({
        "schema_version": 1,
        "eta_grid": {"one_minus_eta_logspace": [1e-3, 0.9, 20]},
        "schemes": [{"family": "cio", "m": 4}],
    })
    assert len(cfg.eta_grid) == 20
    assert cfg.eta_grid[0] == pytest.approx(0.1)


def test_sweep_deterministic_across_threads():
    cfg = SweepConfig(tuple(np.linspace(0.2, 0.98, 40)), (SweepScheme("cio", m=128), SweepScheme("mp")))
    a = run_sweep(cfg, jobs=1).to_csv()
    b = run_sweep(cfg, jobs=1).to_csv()
    c = run_sweep(cfg, jobs=6).to_csv()
    assert a == b == c


def test_fig1a_shape_and_values():
    t = figure_fig1a()
    assert t.columns == ["one_minus_eta", "ratio_sp", "ratio_noon_opt", "ratio_mp_opt", "ratio_cic_opt",
                         "ratio_cio_m4", "ratio_cio_m32", "ratio_cio_m128", "equivalent_db"]
    x = t.column("one_minus_eta")
    assert len(x) == 200
    assert x[0] == pytest.approx(1e-3) and x[-1] == pytest.approx(0.9)
    np.testing.assert_allclose(np.diff(np.log(x)), np.log(900) / 199, rtol=1e-10)
    np.testing.assert_allclose(t.column("ratio_sp"), x, rtol=1e-9)


def test_fig1a_at_eta09():
    t = figure_fig1a(one_minus_eta=[0.1])
    row = dict(zip(t.columns, t.rows[0]))
    assert row["ratio_mp_opt"] == pytest.approx(0.648183, abs=1e-6)
    assert row["ratio_noon_opt"] == pytest.approx(0.38742, abs=1e-5)
    best = max(v for k, v in row.items() if k.startswith("ratio"))
    db = row["equivalent_db"]
    assert schemes.xi_sqz(schemes.n_sq_from_db(db), LossBudget(0.9)).xi_ratio == pytest.approx(best, rel=1e-9)


def test_fig1b():
    t = figure_fig1b()
    assert t.column("param").tolist() == list(range(1, 129))
    first = dict(zip(t.columns, t.rows[0]))
    for k in ("ratio_sp", "ratio_noon", "ratio_mp", "ratio_cic", "ratio_cio"):
        assert first[k] == pytest.approx(0.1, rel=1e-12)
    assert first["ratio_sqz"] == pytest.approx(schemes.xi_sqz(1.0, LossBudget(0.9)).xi / 36)


def test_fig3_asymptote_and_crossover():
    t = figure_fig3(one_minus_eta=[0.1])
    row = dict(zip(t.columns, t.rows[0]))
    assert row["ratio_cio_inf"] == pytest.approx(22.3448 / 36, abs=1e-5)
    assert row["ratio_cio_inf"] == pytest.approx(0.62069, abs=1e-5)
    assert row["ratio_cio_m128"] == pytest.approx(row["ratio_cio_inf"], rel=1e-5)
    om = np.linspace(0.03, 0.08, 51)
    t = figure_fig3(one_minus_eta=om)
    eta = 1 - t.column("one_minus_eta")
    above = t.column("mp_rt99") > t.column("ratio_cio_inf")
    assert np.all(above[eta > 0.95])
    assert not np.any(above[eta < 0.93])
    first = eta[above].min()
    assert abs(first - 0.94) <= 0.01


def test_make_figure_unknown():
    with pytest.raises(DomainError):
        make_figure("fig2")


def test_transformer_api():
    grid = np.array([[0.5], [0.7], [0.9]])
    tr = SchemeEfficiency(family="mp")
    out = tr.fit_transform(grid)
    assert out.shape == (3, 1)
    assert out[2, 0] == pytest.approx(0.648183, abs=1e-6)
    assert tr.get_params()["family"] == "mp"
    fixed = SchemeEfficiency(family="cio", param=128, output="xi").fit(grid)
    assert fixed.transform(grid)[2, 0] == pytest.approx(schemes.xi_cio(128, LossBudget(0.9)).xi)
    pipe = make_pipeline(SchemeEfficiency(family="sp"))
    np.testing.assert_allclose(pipe.fit_transform(grid).ravel(), [0.5, 0.3, 0.1], rtol=1e-12)
    with pytest.raises(DomainError):
        SchemeEfficiency().fit([[0.9], [0.5]])


def test_performance_cio128_200_points():
    import time
    grid = tuple(np.sort(1 - np.logspace(-3, np.log10(0.9), 200)))
    t0 = time.perf_counter()
    run_sweep(SweepConfig(grid, (SweepScheme("cio", m=128),)))
    assert time.perf_counter() - t0 < 10
