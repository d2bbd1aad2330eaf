"""Command-line checks. Usage: cli_tests.py <gwh executable> <scratch dir>"""

import csv
import filecmp
import json
import os
import shutil
import struct
import subprocess
import sys
import unittest

GWH = None
SCRATCH = None
HERE = os.path.dirname(os.path.abspath(__file__))

SMALL = ["--nodes", "8", "--window_length", "64", "--mean_degree", "3", "--wpt_depth", "2",
         "--calibration_windows", "60", "--test_nominal_windows", "20", "--test_anomalous_windows", "10",
         "--stream_count", "3", "--stream_frames", "30", "--stream_onset", "10", "--stream_horizon", "20",
         "--calibration_score_folds", "5"]


def run(*args, cwd=None):
    return subprocess.run([GWH, *args], capture_output=True, text=True, cwd=cwd or SCRATCH)


def path(*parts):
    return os.path.join(SCRATCH, *parts)


def read_windows(p):
    with open(p, "rb") as f:
        data = f.read()
    assert data[:8] == b"GWHWIN01"
    m, l, count = struct.unpack_from("<QQQ", data, 8)
    off, out = 32, []
    for _ in range(count):
        label, onset = struct.unpack_from("<ii", data, off)
        off += 8
        out.append((label, onset, data[off:off + 8 * m * l]))
        off += 8 * m * l
    return m, l, out


def write_windows(p, m, l, records):
    with open(p, "wb") as f:
        f.write(b"GWHWIN01" + struct.pack("<QQQ", m, l, len(records)))
        for label, onset, payload in records:
            f.write(struct.pack("<ii", label, onset) + payload)


def detections(p):
    with open(p) as f:
        return list(csv.DictReader(f))


class Cli(unittest.TestCase):
    def test_print_config_matches_documented_defaults(self):
        r = run("--print-config")
        self.assertEqual(r.returncode, 0)
        with open(os.path.join(HERE, "data", "default_config.toml")) as f:
            self.assertEqual(r.stdout, f.read())

    def test_config_file_and_flag_precedence(self):
        cfg = path("run.toml")
        with open(cfg, "w") as f:
            f.write("nodes = 12\nseed = 7\n")
        r = run("--config", cfg, "--seed", "9", "--print-config")
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertIn("nodes = 12\n", r.stdout)
        self.assertIn("seed = 9\n", r.stdout)
        with open(cfg, "w") as f:
            f.write("bogus_key = 1\n")
        self.assertEqual(run("--config", cfg, "--print-config").returncode, 2)

    def test_exit_codes_and_error_line(self):
        r = run()
        self.assertEqual(r.returncode, 2)
        r = run("--nodes", "x", "simulate")
        self.assertEqual(r.returncode, 2)
        self.assertEqual(len(r.stderr.strip().splitlines()), 1)
        self.assertRegex(r.stderr, r'^gwh: error status=\w+ code=2 message=".*"\n$')
        r = run("--wpt_depth", "9", "simulate", "--out", path("bad"))
        self.assertEqual(r.returncode, 2)
        r = run("detect", "--model", path("none.json"), "--windows", path("none.gwhw"))
        self.assertEqual(r.returncode, 3)
        self.assertRegex(r.stderr, r"code=3")

    def test_simulate_empty_and_repeatable(self):
        r = run("--trials", "0", "simulate", "--out", path("sim0"))
        self.assertEqual(r.returncode, 0, r.stderr)
        with open(path("sim0", "manifest.json")) as f:
            self.assertEqual(json.load(f)["sets"], [])
        for d in ("sim_a", "sim_b"):
            r = run(*SMALL, "--trials", "2", "simulate", "--out", path(d))
            self.assertEqual(r.returncode, 0, r.stderr)
        cmp = filecmp.dircmp(path("sim_a"), path("sim_b"))
        self.assertEqual(cmp.diff_files, [])
        for t in ("trial_000", "trial_001"):
            sub = filecmp.dircmp(path("sim_a", t), path("sim_b", t))
            self.assertEqual(sub.diff_files, [])
            self.assertEqual(len(sub.same_files), 4)

    def test_default_simulate_counts(self):
        r = run("--trials", "1", "simulate", "--out", path("sim_default"))
        self.assertEqual(r.returncode, 0, r.stderr)
        m, l, calib = read_windows(path("sim_default", "trial_000", "calibration.gwhw"))
        self.assertEqual((m, l, len(calib)), (24, 256, 200))
        _, _, test = read_windows(path("sim_default", "trial_000", "test.gwhw"))
        self.assertEqual(sum(1 for w in test if w[0] == 0), 200)
        self.assertEqual(sum(1 for w in test if w[0] == 1), 100)

    def test_calibrate_and_detect(self):
        base = path("pipe")
        r = run("--trials", "1", "simulate", "--out", base)
        self.assertEqual(r.returncode, 0, r.stderr)
        t = os.path.join(base, "trial_000")
        graph = os.path.join(t, "graph.txt")
        model = os.path.join(base, "model.json")
        r = run("calibrate", "--windows", os.path.join(t, "calibration.gwhw"), "--graph-file", graph,
                "--model", model)
        self.assertEqual(r.returncode, 0, r.stderr)
        with open(model) as f:
            doc = json.load(f)
        self.assertEqual(doc["model"]["dimension"], 264)
        nu = doc["model"]["cusum_drift_nu"]
        h = doc["model"]["cusum_threshold_h"]

        # Nominal frames only: alarm fraction within fpr + 2%.
        m, l, test = read_windows(os.path.join(t, "test.gwhw"))
        nominal = path("nominal.gwhw")
        write_windows(nominal, m, l, [w for w in test if w[0] == 0])
        out = path("nominal.csv")
        self.assertEqual(run("detect", "--model", model, "--windows", nominal, "--out", out).returncode, 0)
        rows = detections(out)
        self.assertEqual(len(rows), 200)
        alarms = sum(int(row["alarm"]) for row in rows)
        self.assertLessEqual(alarms / len(rows), 0.05 + 0.02)
        for row in rows:
            self.assertGreaterEqual(float(row["cusum"]), 0.0)
            self.assertEqual(int(row["alarm"]), int(float(row["cusum"]) > h))

        # Stream with an onset: at least one alarm after it.
        out = path("stream.csv")
        self.assertEqual(run("detect", "--model", model, "--windows", os.path.join(t, "stream.gwhw"),
                             "--out", out).returncode, 0)
        _, _, stream = read_windows(os.path.join(t, "stream.gwhw"))
        onset = next(i for i, w in enumerate(stream) if w[0] == 1)
        self.assertTrue(any(int(row["alarm"]) for row in detections(out)[onset:]))

        # Empty stream: header only.
        empty = path("empty.gwhw")
        write_windows(empty, m, l, [])
        out = path("empty.csv")
        self.assertEqual(run("detect", "--model", model, "--windows", empty, "--out", out).returncode, 0)
        with open(out) as f:
            self.assertEqual(f.read(), "frame,score,cusum,alarm\n")

        # In-sample drift: with folds disabled, the mean calibration score is nu.
        insample = path("insample.json")
        r = run("--calibration_score_folds", "0", "calibrate", "--windows", os.path.join(t, "calibration.gwhw"),
                "--graph-file", graph, "--model", insample)
        self.assertEqual(r.returncode, 0, r.stderr)
        out = path("calib.csv")
        self.assertEqual(run("detect", "--model", insample, "--windows", os.path.join(t, "calibration.gwhw"),
                             "--out", out).returncode, 0)
        scores = [float(row["score"]) for row in detections(out)]
        with open(insample) as f:
            nu0 = json.load(f)["model"]["cusum_drift_nu"]
        self.assertAlmostEqual(sum(scores) / len(scores), nu0, delta=1e-9 * nu0)
        self.assertGreater(nu, nu0)

        # One window is too few; a wrong shape is a dimension error.
        one = path("one.gwhw")
        write_windows(one, m, l, [w for w in test if w[0] == 0][:1])
        r = run("calibrate", "--windows", one, "--graph-file", graph, "--model", path("x.json"))
        self.assertNotEqual(r.returncode, 0)
        r = run("--window_length", "128", "calibrate", "--windows", os.path.join(t, "calibration.gwhw"),
                "--graph-file", graph, "--model", path("x.json"))
        self.assertEqual(r.returncode, 3)
        self.assertIn("status=dimension", r.stderr)

    def test_bench_seed_repeatable(self):
        outs = []
        for d in ("bench_a", "bench_b"):
            r = run(*SMALL, "--trials", "2", "--seed", "42", "bench", "--out", path(d))
            self.assertEqual(r.returncode, 0, r.stderr)
            with open(path(d, "report.json"), "rb") as f:
                outs.append(f.read())
        self.assertEqual(outs[0], outs[1])
        report = json.loads(outs[0])
        self.assertEqual(report["master_seed"], 42)
        for name in ("bench_summary.csv", "roc_points.csv", "pr_points.csv", "latency.csv", "complexity.csv"):
            with open(path("bench_a", name)) as f:
                self.assertEqual(f.readline(), "# master_seed=42\n")

    def test_bench_single_trial_single_regime(self):
        r = run(*SMALL, "--trials", "1", "--regime", "A", "--variant", "graph_wpt_hos", "bench", "--out",
                path("bench_one"))
        self.assertEqual(r.returncode, 0, r.stderr)
        with open(path("bench_one", "report.json")) as f:
            report = json.load(f)
        self.assertEqual(report["trials"], 1)
        self.assertEqual(len(report["trial_results"]), 1)
        regimes = report["trial_results"][0]["regimes"]
        self.assertEqual([r["regime"] for r in regimes], ["A"])
        self.assertEqual([v["variant"] for v in regimes[0]["variants"]], ["graph_wpt_hos"])
        # The summary cell of a single trial equals that trial's numbers.
        auc = regimes[0]["variants"][0]["roc_auc"]
        cell = next(s for s in report["summary"] if s["metric"] == "roc_auc")
        self.assertEqual(cell["mean"], auc)
        self.assertEqual(cell["median"], auc)

    def test_jobs_do_not_change_outputs(self):
        for d, jobs in (("jobs1", "1"), ("jobs3", "3")):
            r = run(*SMALL, "--trials", "3", "--regime", "C", "--jobs", jobs, "bench", "--out", path(d))
            self.assertEqual(r.returncode, 0, r.stderr)
        for name in ("report.json", "latency.csv", "bench_summary.csv", "roc_points.csv"):
            self.assertTrue(filecmp.cmp(path("jobs1", name), path("jobs3", name), shallow=False), name)


if __name__ == "__main__":
    GWH = os.path.abspath(sys.argv[1])
    SCRATCH = os.path.abspath(sys.argv[2])
    shutil.rmtree(SCRATCH, ignore_errors=True)
    os.makedirs(SCRATCH)
    unittest.main(argv=[sys.argv[0], "-v"])
