import json

import numpy as np
import pytest

from fourmom import cli
from fourmom.cases import get_case
from fourmom.errors import RealizabilityViolation, ValidityError
from fourmom.harness import (
    FIELD_COLUMNS,
    InsufficientGridsError,
    RunReport,
    convergence_order,
    l1_error,
    read_fields_csv,
    relative_l1_error,
    write_fields_csv,
)
from fourmom.solver import FieldState, Grid1D, run_case

PUBLISHED_ERRORS = {
    400: (0.049, 0.0442, 0.0396, 0.0362),
    800: (0.0344, 0.0307, 0.0271, 0.0244),
    1600: (0.0244, 0.0219, 0.0195, 0.0177),
    3200: (0.0172, 0.0153, 0.0136, 0.0122),
}


def _sampled(cells):
    return lambda edges, t: cells


# ------------------------------------------------------------------ norms


def test_l1_error_vanishes_on_the_sampled_oracle():
    g = Grid1D(0, 1, 50)
    ref = get_case("free_boundary").reference(g.edges, 0.0)
    st = FieldState(g, ref.copy())
    assert tuple(l1_error(st, _sampled(ref), 0.0)) == (0.0, 0.0, 0.0, 0.0)


def test_l1_error_triangle_inequality():
    rng = np.random.default_rng(1)
    g = Grid1D(0, 1, 64)
    a, b, c = (np.abs(rng.normal(size=(64, 4))) + np.array([3.0, 0, 10.0, 0]) for _ in range(3))
    st_a, st_b = FieldState(g, a), FieldState(g, b)
    ac = l1_error(st_a, _sampled(c), 0.0)
    ab = l1_error(st_a, _sampled(b), 0.0)
    bc = l1_error(st_b, _sampled(c), 0.0)
    assert np.all(ac <= ab + bc + 1e-15)
    assert np.all(ab > 0)


def test_l1_error_rejects_time_mismatch():
    g = Grid1D(0, 1, 10)
    st = FieldState(g, np.tile([1.0, 0.0, 1.0, 0.0], (10, 1)), time=0.1)
    with pytest.raises(ValidityError):
        l1_error(st, _sampled(st.cells), 0.2)
    with pytest.raises(ValidityError):
        relative_l1_error(st, _sampled(st.cells), 0.2)


def test_relative_l1_divides_by_the_reference_norm():
    g = Grid1D(0, 1, 10)
    ref = np.tile([2.0, 1.0, 4.0, 0.0], (10, 1))
    st = FieldState(g, ref * 1.1)
    rel = relative_l1_error(st, _sampled(ref), 0.0)
    assert rel[:3] == pytest.approx([0.1, 0.1, 0.1])
    assert rel[3] == 0.0  # zero reference: absolute error


def test_free_boundary_400_cells_against_published_errors():
    st, cfg = run_case("free_boundary", 400)
    rel = relative_l1_error(st, get_case("free_boundary").reference, cfg.t_end)
    assert np.all(np.abs(rel / np.array(PUBLISHED_ERRORS[400]) - 1.0) <= 0.15)
    assert np.all(l1_error(st, get_case("free_boundary").reference, cfg.t_end) >= 0)


# ------------------------------------------------------------------ orders


def test_convergence_order_of_geometric_table():
    table = {400: [1.0], 1600: [0.5], 6400: [0.25]}
    assert convergence_order(table)[0] == pytest.approx(0.5, rel=1e-14)


def test_convergence_order_of_published_m0():
    table = {n: [v[0]] for n, v in PUBLISHED_ERRORS.items()}
    assert convergence_order(table)[0] == pytest.approx(0.503, abs=1e-3)


def test_convergence_order_of_published_columns():
    orders = convergence_order(PUBLISHED_ERRORS)
    assert orders.shape == (4,)
    assert np.all((0.45 <= orders) & (orders <= 0.55))


def test_convergence_order_needs_two_grids():
    with pytest.raises(InsufficientGridsError):
        convergence_order({400: [0.049]})
    with pytest.raises(ValueError):
        convergence_order({400: [0.0], 800: [0.0]})


# ------------------------------------------------------------------ reports


def test_report_json_round_trip_is_byte_identical():
    rep = RunReport(
        case="free_boundary",
        n_cells=[400, 800],
        cfl=0.98,
        t_end=0.2,
        l1_errors={"400": {"M0": 0.1 + 0.2, "M1": 1e-300, "M2": 0.0, "M3": 5.0}},
        orders={"M0": 0.50123456789012345},
        diagnostics={"400": {"boundary_inflow": [0.0, -1e-17, 3.0, 1 / 3]}},
        wall_time=1.25,
    )
    text = rep.to_json()
    assert RunReport.from_json(text).to_json() == text
    assert text.endswith("\n") and "\r" not in text


def test_report_refuses_nan():
    rep = RunReport(case="x", n_cells=[1], cfl=1.0, t_end=float("nan"))
    with pytest.raises(ValueError):
        rep.to_json()


# ------------------------------------------------------------------ CSV


def test_fields_csv(tmp_path):
    g = Grid1D(0, 1, 4)
    cells = np.array(
        [[0.0, 0.0, 0.0, 0.0], [1.0, 1.0, 1.0, 1.0], [3.0, 1.0, 11.0, 25.0], [1 / 3, 0.1, 0.7, np.pi]]
    )
    st = FieldState(g, cells, vacuum_m0=1e-12)
    path = write_fields_csv(st, tmp_path / "f.csv")
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == ",".join(FIELD_COLUMNS)
    vac = lines[1].split(",")
    assert vac[1:5] == ["0", "0", "0", "0"] and vac[5:9] == ["", "", "", ""]
    data = read_fields_csv(path)
    # monokinetic row
    assert (data["rho1"][1], data["rho2"][1], data["v1"][1], data["v2"][1], data["e"][1]) == (0.5, 0.5, 1.0, 1.0, 0.0)
    assert np.isnan(data["q_over_m0e"][1]) and np.isnan(data["q_over_e32"][1])
    # interior row
    assert data["rho1"][2] == pytest.approx(1.0) and data["v2"][2] == pytest.approx(-1.0)
    assert data["q_over_m0e"][2] == pytest.approx(128 / 96)
    # full-precision round trip
    got = np.stack([data[m] for m in ("M0", "M1", "M2", "M3")], 1)
    assert np.array_equal(got, cells)
    assert np.array_equal(data["x"], g.centers)


# ------------------------------------------------------------------ CLI


def test_cli_four_packet(tmp_path, capsys):
    rc = cli.main(["riemann", "four-packet", "--rho", "1", "--v1", "0.8", "--v2", "1.2", "--out", str(tmp_path)])
    assert rc == 0
    printed = json.loads(capsys.readouterr().out)
    stored = json.loads((tmp_path / "four_packet_star.json").read_text())
    assert printed == stored
    star = stored["star"]
    assert star["rho_star"] == pytest.approx(1.88265, abs=1e-4)
    assert star["v_star"] == pytest.approx(1.06026, abs=1e-4)
    assert star["sigma"] == pytest.approx(0.87983, abs=1e-4)
    assert star["mu"] == pytest.approx(0.22342, abs=1e-4)
    assert star["rh_residual"] < 1e-10
    assert stored["dissipation"]["D(2)"] == pytest.approx(-0.27324, abs=1e-4)


def test_cli_run_two_packets(tmp_path, capsys):
    rc = cli.main(["run", "--case", "two_packets", "--cells", "1000", "--cfl", "1.0", "--tend", "0.1", "--out", str(tmp_path)])
    assert rc == 0
    data = read_fields_csv(tmp_path / "two_packets_n1000_fields.csv")
    overlap = (data["x"] > 0.42) & (data["x"] < 0.58)
    for name, v in zip(("M0", "M1", "M2", "M3"), (2, 0, 2, 0)):
        assert np.allclose(data[name][overlap], v, atol=1e-12)
    rep = RunReport.from_json((tmp_path / "two_packets_n1000_report.json").read_text())
    assert rep.case == "two_packets" and rep.n_cells == [1000] and rep.t_end == 0.1
    assert max(rep.l1_errors["1000"].values()) < 1e-12


def test_cli_convergence(tmp_path):
    rc = cli.main(["convergence", "--case", "free_boundary", "--cells", "100,200", "--out", str(tmp_path)])
    assert rc == 0
    lines = (tmp_path / "free_boundary_convergence.csv").read_text().splitlines()
    assert lines[0].startswith("n_cells,L1_M0") and lines[1].startswith("100,")
    assert lines[-1].startswith("order,")
    rep = json.loads((tmp_path / "free_boundary_convergence_report.json").read_text())
    assert rep["cfl"] == 0.98 and rep["t_end"] == 0.2 and rep["boundary"] == "vacuum"
    assert set(rep["orders"]) == {"M0", "M1", "M2", "M3"}


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["run", "--case", "nope"],
        ["run", "--case", "two_packets", "--cfl", "1.5"],
        ["run", "--case", "two_packets", "--cells", "0"],
        ["run", "--case", "two_packets", "--cells", "100,200"],
        ["convergence", "--case", "two_packets", "--cells", "100"],
        ["riemann", "four-packet", "--v1", "1.2", "--v2", "0.8"],
    ],
)
def test_cli_usage_errors_exit_1(argv, tmp_path):
    try:
        rc = cli.main(argv + ["--out", str(tmp_path)] if argv else argv)
    except SystemExit as exc:
        rc = exc.code
    assert rc == 1


def test_cli_numerical_failure_exits_2(tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise RealizabilityViolation("cell 3: e/scale = -1")

    monkeypatch.setattr(cli, "run_case", boom)
    assert cli.main(["run", "--case", "two_packets", "--cells", "10", "--out", str(tmp_path)]) == 2


def test_cli_io_failure_exits_3(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("not a directory")
    rc = cli.main(["riemann", "four-packet", "--out", str(blocker / "sub")])
    assert rc == 3
