import math
import subprocess
import sys

import numpy as np
import pytest

import fluxwalk as fw
from fluxwalk import csvio
from fluxwalk.cli import main, parse_config


def read_floats(path):
    header, rows = csvio.read_csv(path)
    return header, [[float(cell) for cell in row] for row in rows]


class TestParseConfig:
    def test_evolve_flags(self):
        cfg = parse_config(["evolve", "--alpha", "21/44", "--steps", "100",
                            "--theta", "1.5707963", "--phi", "1.5707963",
                            "-o", "out.csv"])
        assert cfg.command == "evolve"
        assert (cfg.alpha.numerator, cfg.alpha.denominator) == (21, 44)
        assert cfg.steps == 100
        assert cfg.output == "out.csv"
        assert cfg.coin.theta == pytest.approx(1.5707963)
        assert cfg.options["half-width"] == 100

    def test_alpha_text_is_reduced(self):
        cfg = parse_config(["evolve", "--alpha", "5/10", "--steps", "2", "-o", "x.csv"])
        assert (cfg.alpha.numerator, cfg.alpha.denominator) == (1, 2)

    def test_sweep_flags(self):
        cfg = parse_config(["sweep", "--alpha-min", "0", "--alpha-max", "1",
                            "--alpha-count", "1000", "--steps", "2,4,8,20,60",
                            "--normalize", "-o", "s.csv"])
        assert cfg.steps == (2, 4, 8, 20, 60)
        assert cfg.normalize is True
        assert cfg.options["alpha-count"] == 1000

    def test_defaults_give_symmetric_coin(self):
        cfg = parse_config(["evolve", "--alpha", "0", "--steps", "2", "-o", "x.csv"])
        assert cfg.coin.theta == pytest.approx(math.pi / 2)
        assert cfg.coin.phi == pytest.approx(math.pi / 2)

    def test_missing_required_exits_2(self):
        with pytest.raises(SystemExit) as err:
            parse_config(["evolve", "--steps", "2", "-o", "x.csv"])
        assert err.value.code == 2

    def test_bad_alpha_exits_2(self):
        with pytest.raises(SystemExit) as err:
            parse_config(["evolve", "--alpha", "p/q", "--steps", "2", "-o", "x.csv"])
        assert err.value.code == 2

    def test_bad_steps_exit_2(self):
        for steps in ("0", "-4", "2.5"):
            with pytest.raises(SystemExit) as err:
                parse_config(["evolve", "--alpha", "0", "--steps", steps, "-o", "x.csv"])
            assert err.value.code == 2

    def test_out_of_range_angles_exit_2(self):
        with pytest.raises(SystemExit) as err:
            parse_config(["evolve", "--alpha", "0", "--steps", "2",
                          "--theta", "9.9", "-o", "x.csv"])
        assert err.value.code == 2


class TestConfigFile:
    def test_values_come_from_file(self, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text("alpha = 1/8\nsteps = 3\noutput = %s\n" % (tmp_path / "o.csv"))
        cfg = parse_config(["evolve", "--config", str(conf)])
        assert (cfg.alpha.numerator, cfg.alpha.denominator) == (1, 8)
        assert cfg.steps == 3

    def test_command_line_wins_over_file(self, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text("alpha = 1/8\nsteps = 3\n")
        cfg = parse_config(["evolve", "--config", str(conf), "--steps", "5",
                            "-o", "x.csv"])
        assert cfg.steps == 5
        assert cfg.alpha.denominator == 8

    def test_unknown_key_exits_2(self, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text("boost = 11\n")
        with pytest.raises(SystemExit) as err:
            parse_config(["evolve", "--config", str(conf), "--alpha", "0",
                          "--steps", "2", "-o", "x.csv"])
        assert err.value.code == 2

    def test_bad_value_in_file_exits_2(self, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text("steps = soon\n")
        with pytest.raises(SystemExit) as err:
            parse_config(["evolve", "--config", str(conf), "--alpha", "0", "-o", "x.csv"])
        assert err.value.code == 2

    def test_comments_and_blank_lines(self, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text("# a comment\n\nsteps = 4  # trailing\n")
        cfg = parse_config(["evolve", "--config", str(conf), "--alpha", "0", "-o", "x.csv"])
        assert cfg.steps == 4

    def test_flag_from_file(self, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text("normalize = true\n")
        cfg = parse_config(["sweep", "--config", str(conf), "-o", "x.csv"])
        assert cfg.normalize is True


class TestEvolveCommand:
    def test_two_step_variance_row(self, tmp_path):
        out = tmp_path / "e.csv"
        assert main(["evolve", "--alpha", "0", "--steps", "2", "-o", str(out)]) == 0
        header, rows = read_floats(out)
        assert header == ["t", "variance", "origin_region_prob",
                          "participation_ratio", "entanglement_entropy"]
        assert rows[2][0] == 2.0
        assert rows[2][1] == 4.0

    def test_csv_round_trip_is_exact(self, tmp_path):
        out = tmp_path / "e.csv"
        main(["evolve", "--alpha", "golden", "--steps", "40", "-o", str(out)])
        _, rows = read_floats(out)
        series = fw.time_series(fw.GOLDEN_RATIO, t_max=40)
        for t in range(41):
            assert rows[t][1] == series.variance[t]
            assert rows[t][4] == series.entanglement_entropy[t]

    def test_reruns_are_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["evolve", "--alpha", "1/3", "--steps", "25"]
        main(argv + ["-o", str(a)])
        main(argv + ["-o", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_capacity_overrun_exits_1_with_no_file(self, tmp_path, capsys):
        out = tmp_path / "never.csv"
        rc = main(["evolve", "--alpha", "0", "--steps", "10",
                   "--half-width", "5", "-o", str(out)])
        assert rc == 1
        assert not out.exists()
        assert "error" in capsys.readouterr().err

    def test_smooth_sigma_column(self, tmp_path):
        out = tmp_path / "s.csv"
        main(["evolve", "--alpha", "golden", "--steps", "30",
              "--smooth-sigma", "2.0", "-o", str(out)])
        header, rows = read_floats(out)
        assert header[-1] == "origin_region_prob_smooth"
        series = fw.time_series(fw.GOLDEN_RATIO, t_max=30)
        even = series.steps % 2 == 0
        smoothed = fw.gaussian_smooth(series.origin_region_prob[even], 2.0)
        data = np.array(rows)
        assert np.array_equal(data[even, 5], smoothed)
        odd_rows = data[~even, 5]
        assert np.all(odd_rows == 0.0)

    def test_map_out(self, tmp_path):
        out = tmp_path / "e.csv"
        pmap = tmp_path / "m.csv"
        main(["evolve", "--alpha", "1/4", "--steps", "6", "-o", str(out),
              "--map-out", str(pmap)])
        header, rows = read_floats(pmap)
        assert header == ["n", "m", "p"]
        state = fw.new_state(fw.SYMMETRIC_COIN, 6, fw.FluxRatio.rational(1, 4))
        fw.evolve(state, 6)
        assert sum(r[2] for r in rows) == pytest.approx(1.0, abs=1e-9)
        for n, m, p in rows:
            assert p == state.probability(int(n), int(m))


class TestSweepCommand:
    def test_matches_library_sweep(self, tmp_path):
        out = tmp_path / "s.csv"
        main(["sweep", "--alpha-min", "0", "--alpha-max", "0.5",
              "--alpha-count", "6", "--steps", "2,4", "-o", str(out)])
        header, rows = read_floats(out)
        assert header == ["alpha", "t=2", "t=4"]
        result = fw.sweep_alpha(np.linspace(0, 0.5, 6), [2, 4], "variance")
        for i, row in enumerate(rows):
            assert row[0] == result.alphas[i].value
            assert row[1] == result.values[0, i]
            assert row[2] == result.values[1, i]

    def test_thread_count_does_not_change_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["sweep", "--alpha-min", "0", "--alpha-max", "1",
                "--alpha-count", "9", "--steps", "2,6"]
        main(base + ["--threads", "1", "-o", str(a)])
        main(base + ["--threads", "3", "-o", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_normalize_flag(self, tmp_path):
        out = tmp_path / "n.csv"
        main(["sweep", "--alpha-min", "0", "--alpha-max", "0.5",
              "--alpha-count", "11", "--steps", "2", "--normalize", "-o", str(out)])
        _, rows = read_floats(out)
        assert max(row[1] for row in rows) == 1.0


class TestSurfaceCommand:
    def test_matrix_round_trip(self, tmp_path):
        out = tmp_path / "surf.csv"
        main(["surface", "--alpha", "0", "--theta-count", "3", "--phi-count", "4",
              "--steps", "30", "--avg-window", "10", "-o", str(out)])
        header, rows = read_floats(out)
        assert header[0] == "theta"
        assert len(header) == 5 and len(rows) == 3
        thetas = np.linspace(0, math.pi, 3)
        phis = np.linspace(0, 2 * math.pi, 4, endpoint=False)
        surface = fw.entanglement_surface(thetas, phis, 0, t_max=30, avg_window=10)
        got = np.array(rows)
        np.testing.assert_array_equal(got[:, 0], thetas)
        np.testing.assert_array_equal(got[:, 1:], surface)

    def test_avg_window_validation_exits_2(self):
        with pytest.raises(SystemExit) as err:
            parse_config(["surface", "--alpha", "0", "--steps", "10",
                          "--avg-window", "20", "-o", "x.csv"])
        assert err.value.code == 2


class TestConvergentsCommand:
    def test_golden_rows(self, tmp_path):
        out = tmp_path / "c.csv"
        main(["convergents", "--alpha", "golden", "--depth", "6", "-o", str(out)])
        header, rows = csvio.read_csv(out)
        assert header == ["i", "p", "q", "err"]
        pq = [(int(r[1]), int(r[2])) for r in rows]
        assert pq == [(0, 1), (1, 1), (1, 2), (2, 3), (3, 5), (5, 8)]
        expected = fw.convergents(fw.GOLDEN_RATIO, 6)
        for row, c in zip(rows, expected):
            assert float(row[3]) == c.err

    def test_zero_flux_is_runtime_error(self, tmp_path, capsys):
        out = tmp_path / "c.csv"
        rc = main(["convergents", "--alpha", "0", "--depth", "4", "-o", str(out)])
        assert rc == 1
        assert not out.exists()


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        out = tmp_path / "m.csv"
        proc = subprocess.run([sys.executable, "-m", "fluxwalk", "evolve",
                               "--alpha", "0", "--steps", "2", "-o", str(out)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert out.exists()

    def test_usage_error_returncode(self):
        proc = subprocess.run([sys.executable, "-m", "fluxwalk", "evolve",
                               "--alpha", "0", "--steps", "2"],
                              capture_output=True, text=True)
        assert proc.returncode == 2
        assert "--output" in proc.stderr or "output" in proc.stderr
