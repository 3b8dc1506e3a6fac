import math
import os
from pathlib import Path

import pytest

import wzsentinel as wz

DATA = Path(os.environ.get("WZ_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))
CONFIG = DATA / "configs" / "default.cfg"
MAP = DATA / "maps" / "workzone_2lane.json"


def test_version():
    assert wz.__version__ == "0.1.0"


def test_conflict_probability_calibration():
    lam = wz.consistent_lambda()
    assert lam == pytest.approx(7.0 / math.log(1 / 0.7), rel=1e-15)
    assert wz.conflict_probability(7.0) == pytest.approx(0.7, abs=1e-12)
    assert wz.conflict_probability(0.0) == 1.0
    assert wz.conflict_probability(1.0, lam) > wz.conflict_probability(2.0, lam)


def test_errors_carry_codes():
    with pytest.raises(wz.WzError) as info:
        wz.conflict_probability(1.0, -1.0)
    assert info.value.code == "InvalidLambda"


def test_box_distance():
    a = wz.OrientedBox(0, 0, 0, 4, 2)
    b = wz.OrientedBox(5, 0, 0, 4, 2)
    assert wz.min_box_distance(a, b) == pytest.approx(1.0)
    assert wz.min_box_distance(wz.OrientedBox(0, 0, 0, 0, 0), wz.OrientedBox(3, 4, 1, 0, 0)) == 5.0


def test_ade_fde():
    assert wz.ade([(0, 0), (0, 2)], [(0, 0), (0, 0)]) == pytest.approx(1.0)
    assert wz.fde([(0, 0), (0, 2)], [(0, 0), (0, 0)]) == pytest.approx(2.0)


def test_simulate_predict_warn():
    config = wz.load_sim_config(str(CONFIG))
    road = wz.load_map(str(MAP))
    case = wz.run_case(config, road, 1)
    assert case.max_frame() == 40
    assert 18 <= len(case.tracks) <= 22
    assert wz.parse_case(case.to_csv(), 1).to_csv() == case.to_csv()
    assert wz.run_case(config, road, 1).to_csv() == case.to_csv()

    windows = wz.extract_windows(case, 10, 30)
    assert len(windows) == 1
    preds = [wz.predict("maneuver", w, road) for w in windows]
    assert preds[0].num_modes == 6
    for agent in preds[0].agents:
        assert sum(agent.mode_probs) == pytest.approx(1.0)
        assert len(agent.modes) == 6 and len(agent.modes[0]) == 30
    conflicts, warnings = wz.generate_warnings(preds)
    n = len(preds[0].agents)
    assert len(conflicts) == n * (n - 1) // 2 * 30
    for w in warnings:
        assert w.probability > wz.DEFAULT_PROB_THRESHOLD


def test_cli_round_trip(tmp_path):
    rc, out, _ = wz.run_cli(["--version"])
    assert rc == 0 and "0.1.0" in out
    cases = tmp_path / "cases"
    rc, _, err = wz.run_cli(["simulate", "--config", str(CONFIG), "--map", str(MAP),
                             "--out", str(cases), "--cases", "2"])
    assert rc == 0, err
    assert sorted(p.name for p in cases.glob("trajectory_data_case_*.csv")) == [
        "trajectory_data_case_1.csv", "trajectory_data_case_2.csv"]
    rc, _, err = wz.run_cli(["simulate", "--config", str(CONFIG), "--out", str(cases)])
    assert rc == 1 and "--map" in err
