import json
import math

import pytest

from spiralvis.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_generate_row_count(tmp_path, capsys):
    out = tmp_path / "pts.csv"
    code, _ = run(capsys, "generate", "--seq", "golden-angle", "--d", "1",
                  "--n", "5000", "--out", str(out))
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "n,x0,x1"
    assert len(lines) == 5001  # header + 5000 rows


def test_generate_binary(tmp_path, capsys):
    out = tmp_path / "pts.bin"
    code, _ = run(capsys, "generate", "--n", "64", "--out", str(out))
    assert code == 0
    from spiralvis.spirals import read_points_binary
    d, lo, hi, coords = read_points_binary(out)
    assert (d, lo, hi) == (1, 1, 64)
    assert coords.shape == (64, 2)


def test_orchard_assert_passes(capsys):
    code, out = run(capsys, "orchard", "--seq", "rational-ladder",
                    "--eps", "0.1", "--V", "125.7", "--assert")
    assert code == 0
    payload = json.loads(out)
    assert payload["reports"][0]["passed"] is True
    assert payload["config"]["subcommand"] == "orchard"


def test_orchard_assert_fails_for_constant(capsys):
    code, out = run(capsys, "orchard", "--seq", "constant", "--v", "1,0",
                    "--eps", "0.2", "--V", "20", "--assert")
    assert code == 1
    assert json.loads(out)["reports"][0]["passed"] is False


def test_failure_without_assert_exits_zero(capsys):
    code, _ = run(capsys, "orchard", "--seq", "constant", "--v", "1,0",
                  "--eps", "0.2", "--V", "20")
    assert code == 0


def test_visible_reports_strip_distance(capsys):
    code, out = run(capsys, "visible", "--seq", "rational-ladder",
                    "--x", "0,1", "--dir", "1,0", "--Tmax", "1e3")
    assert code == 0
    v = json.loads(out)["verdicts"][0]
    assert v["min_distance"] >= 0.999999999
    assert v["certified"] is True


def test_uniform_and_covering_and_criterion(capsys):
    code, out = run(capsys, "uniform", "--eps", "0.1", "--V", "50",
                    "--t0", "0,100", "--assert")
    assert code == 0
    code, out = run(capsys, "covering", "--m", "0,1000", "--N", "100,1000")
    assert code == 0
    assert json.loads(out)["estimate"]["uniform_covering_parameter"] < 8.0
    code, out = run(capsys, "criterion", "--eps", "0.2,0.1")
    assert code == 0
    code, out = run(capsys, "defvisi", "--eps", "0.2,0.1",
                    "--x-grid", "1,2,4,8")
    assert code == 0


def test_forest_strip_line_fails(capsys):
    angle = repr(math.pi / 2)
    code, out = run(capsys, "forest", "--seq", "rational-ladder",
                    "--eps", "0.5", "--V", "20",
                    "--line", f"1.0,{angle},10,30", "--assert")
    assert code == 1
    assert json.loads(out)["reports"][0]["passed"] is False


def test_delone_payload(capsys):
    code, out = run(capsys, "delone", "--T", "10", "--probe-res", "1.0",
                    "--badness-Q", "100")
    assert code == 0
    payload = json.loads(out)
    assert payload["report"]["n_points"] == 100
    assert payload["badness"]["value"] > 0.3


def test_puncture_clears_region(tmp_path, capsys):
    out = tmp_path / "punct.csv"
    code, text = run(capsys, "puncture", "--seq", "rational-ladder",
                     "--v0", "0,1", "--delta", "0.5", "--n", "20000",
                     "--out", str(out), "--assert")
    assert code == 0
    payload = json.loads(text)
    assert payload["remaining_in_region"] == 0
    assert payload["redirected"] > 0
    assert len(out.read_text().splitlines()) == 20001


def test_plot_svg_structure(tmp_path, capsys):
    out = tmp_path / "spiral.svg"
    code, _ = run(capsys, "plot", "--seq", "rational-ladder", "--T", "20",
                  "--strip", "0,2.0", "--out", str(out))
    assert code == 0
    svg = out.read_text()
    assert svg.startswith("<svg")
    assert svg.count("<circle") == 400  # floor(T^2) points inside the ball
    assert "<rect" in svg


def test_plot_overlay_from_report(tmp_path, capsys):
    report = tmp_path / "rep.json"
    code, out = run(capsys, "orchard", "--seq", "constant", "--v", "1,0",
                    "--eps", "0.2", "--V", "20", "--out", str(report))
    assert code == 0
    svg = tmp_path / "overlay.svg"
    code, _ = run(capsys, "plot", "--seq", "constant", "--v", "1,0",
                  "--T", "10", "--overlay-json", str(report), "--out", str(svg))
    assert code == 0
    assert "<line" in svg.read_text()  # failing directions drawn as rays


def test_byte_identical_reports(capsys):
    _, a = run(capsys, "orchard", "--eps", "0.1", "--V", "50", "--seed", "3")
    _, b = run(capsys, "orchard", "--eps", "0.1", "--V", "50", "--seed", "3")
    assert a == b


def test_config_defaults_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"eps": [0.2], "V": [70.0]}))
    code, out = run(capsys, "orchard", "--seq", "rational-ladder",
                    "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["reports"][0]["V"] == 70.0
    code, out = run(capsys, "orchard", "--seq", "rational-ladder",
                    "--config", str(cfg), "--V", "126", "--eps", "0.1")
    assert json.loads(out)["reports"][0]["V"] == 126.0


def test_bad_arguments_exit_2(capsys):
    with pytest.raises(SystemExit) as err:
        main(["orchard"])  # missing --eps/--V
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["generate", "--n", "10"])  # missing --out
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["orchard", "--eps", "0.1", "--V", "50", "--d", "3"])  # bad kind/d
    assert err.value.code == 2


def test_environment_thread_cap(monkeypatch):
    from spiralvis._par import thread_count
    monkeypatch.setenv("SPIRAL_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("SPIRAL_THREADS", "")
    assert thread_count() >= 1
