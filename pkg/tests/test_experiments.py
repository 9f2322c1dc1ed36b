import csv
import math

import numpy as np
import pytest

import gausswork.work as work_mod
from gausswork.errors import InvalidParams, QuadratureFailure
from gausswork.experiments import (
    EVAL_CHUNK,
    FIGURES,
    SCATTER_COLUMNS,
    SweepSpec,
    companion_path,
    fmt,
    load_scatter,
    make_config,
    reload_states,
    run_scatter,
    scatter,
    sweep,
    sweep_fig2c,
    sweep_fig6,
    sweep_fig7,
    threshold_grid,
)
from gausswork.work import work_sep_sts, work_sep_symmetric
from gausswork.symplectic import is_physical


def test_fmt_round_trips():
    for x in (0.1, 1 / 3, math.pi, 1e-300, 2.5):
        assert float(fmt(x)) == x
    assert fmt(None) == "" and fmt("x") == "x" and fmt(math.inf) == "inf"


def test_make_config_presets_and_overrides():
    c = make_config("fig2a")
    assert (c.family, c.lambdas, c.samples, c.average) == ("sym-sts", (0.0,), 20_000, False)
    c = make_config("fig6", samples=10, workers=None)
    assert c.figure == "fig8d" and c.lambdas == (1.0,) and c.samples == 10
    assert make_config("fig8a").samples == 10_000
    assert make_config(family="sts", lambdas=[0, 1], samples=5).lambdas == (0.0, 1.0)
    with pytest.raises(InvalidParams):
        make_config("fig99")
    with pytest.raises(InvalidParams):
        make_config()
    with pytest.raises(InvalidParams):
        make_config(family="sts", samples=0)
    with pytest.raises(InvalidParams):
        make_config(family="sts", lambdas=[-1.0])


def test_scatter_schema_and_round_trip(tmp_path):
    out = tmp_path / "fig3a.csv"
    cfg = make_config("fig3a", samples=300, out=str(out))
    scatter(cfg)
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == SCATTER_COLUMNS
    assert len(rows) == 301
    first = dict(zip(rows[0], rows[1]))
    assert first["c1"] == "" and first["d"] == fmt(-float(first["c"]))
    records = load_scatter(out)
    assert all(is_physical(m) for m in reload_states(records))
    assert companion_path(out).exists()


def test_scatter_is_byte_identical_across_runs_and_workers(tmp_path):
    texts = []
    for k, workers in enumerate((1, 1, 3)):
        cfg = make_config("fig5", samples=2 * EVAL_CHUNK + 17, seed=4, workers=workers, out=str(tmp_path / f"r{k}.csv"))
        scatter(cfg)
        texts.append((tmp_path / f"r{k}.csv").read_bytes())
    assert texts[0] == texts[1] == texts[2]


def test_figure2_regions_are_disjoint():
    for fig, lam in (("fig2a", 0.0), ("fig2b", 1.0)):
        res = run_scatter(make_config(fig, samples=3000))
        a = res.samples.values[:, 0]
        w = res.work[lam]
        sep = np.array([c == "separable" for c in res.classes])
        w_sep = work_sep_symmetric(a, lam).value
        assert np.all(w[sep] <= w_sep[sep] + 1e-9)
        assert np.all(w[~sep] > w_sep[~sep] - 1e-9)


def test_figure4_separable_rows_below_bmax_curve():
    res = run_scatter(make_config("fig4", samples=3000))
    a = res.samples.values[:, 0]
    sep = np.array([c == "separable" for c in res.classes])
    assert res.samples.values[:, 1].max() <= 3.0
    assert np.all(res.work[0.0][sep] <= work_sep_sts(a, 3.0, 0.0).value[sep] + 1e-9)


def test_multiple_lambdas_emit_one_row_per_strength():
    res = run_scatter(make_config(family="sym-sts", lambdas=[0.0, 1.0], samples=5))
    rows = list(res.rows())
    assert len(rows) == 10
    assert [r[0] for r in rows[:2]] == ["0", "0"]


def test_phi_policy_labels():
    assert next(run_scatter(make_config("fig5", samples=2)).rows())[-3] == "average"
    assert next(run_scatter(make_config("fig8d", samples=2)).rows())[-3] == "invariant"
    assert next(run_scatter(make_config("fig2a", samples=2)).rows())[-3] == "fixed:0"


def test_quadrature_failure_names_the_row(monkeypatch):
    monkeypatch.setattr(work_mod, "MAX_NODES", 16)
    with pytest.raises(QuadratureFailure, match="sample_id="):
        run_scatter(make_config("fig5", samples=4))


@pytest.mark.parametrize("fig", sorted(FIGURES))
def test_threshold_grids(fig):
    header, rows = threshold_grid(make_config(fig, samples=1))
    assert rows and all(len(r) == len(header) for r in rows)
    assert all(np.isfinite(float(x)) for r in rows for x in r)


def test_sweep_fig2c():
    header, rows, refs = sweep_fig2c()
    curves = {}
    for name, x, w in rows:
        curves.setdefault(name, []).append(w)
    for name, ws in curves.items():
        assert np.all(np.diff(ws) > 0), name
        assert ws[-1] == pytest.approx(math.log(6), abs=1e-9)
    assert dict(refs)["c_sep"] == 2.5


def test_sweep_fig6_ordering():
    _, rows, _ = sweep_fig6(points=21)
    curves = {}
    for name, x, w in rows:
        curves.setdefault(name, []).append(w)
    w11, w00, w1, w0 = (np.array(curves[k]) for k in ("W11", "W00:average", "W1", "W0"))
    assert np.all(w11[1:] < w1[1:]) and np.all(w00[1:] < w0[1:])


def test_sweep_fig7_below_pure_value():
    _, rows, _ = sweep_fig7(points=12)
    curves = {}
    for name, x, w in rows:
        curves.setdefault(name, {})[x] = w
    for a in curves["pure"]:
        if a > 0.5:
            assert curves["homodyne:average"][a] < curves["heterodyne"][a] < curves["pure"][a]


def test_custom_sweep_and_files(tmp_path):
    spec = SweepSpec("sts", "c", 0.0, 1.0, 5, {"a": 2.0, "b": 1.0}, (0.0,))
    text = sweep(spec=spec, out=str(tmp_path / "s.csv"))
    assert text.splitlines()[0] == "curve,x,W" and len(text.splitlines()) == 6
    sweep(name="fig2c", out=str(tmp_path / "c.csv"), points=11)
    assert (tmp_path / "c.thresholds.csv").exists()
    with pytest.raises(InvalidParams):
        SweepSpec("sts", "zz", 0, 1)
    with pytest.raises(InvalidParams):
        sweep()
