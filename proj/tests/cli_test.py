#!/usr/bin/env python3
# Copyright 2026 The BMIML Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""End-to-end checks of the bmiml command line: exit codes, output schemas
and byte-level determinism.

usage: cli_test.py <bmiml executable> <schema directory>
"""

import csv
import io
import json
import pathlib
import subprocess
import sys
import tempfile
import unittest

import jsonschema
from referencing import Registry, Resource

BMIML = None
SCHEMAS = None

QUICK = ["--set", "smipr.epochs=200", "--set", "bls.k1=5", "--set", "bls.k2=20"]


def run(*args, check=None):
    proc = subprocess.run([BMIML, *map(str, args)], capture_output=True, text=True,
                          timeout=300)
    if check is not None and proc.returncode != check:
        raise AssertionError(f"{args}: exit {proc.returncode}, stderr:\n{proc.stderr}")
    return proc


def load_schemas():
    schemas, resources = {}, []
    for path in pathlib.Path(SCHEMAS).glob("*.schema.json"):
        doc = json.loads(path.read_text())
        schemas[path.name.removesuffix(".schema.json")] = doc
        resources.append((doc["$id"], Resource.from_contents(doc)))
    return schemas, Registry().with_resources(resources)


def write_pgm(path, width, height, seed):
    pixels = bytes((seed * 31 + r * 7 + c * 3) % 256 for r in range(height) for c in range(width))
    path.write_bytes(f"P5\n{width} {height}\n255\n".encode() + pixels)


class CliTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        cls.dir = pathlib.Path(cls.tmp.name)
        cls.schemas, cls.registry = load_schemas()
        cls.data = cls.dir / "train.csv"
        run("synth", "--bags", 40, "--instances", 3, "--dim", 6, "--k", 3, "--seed", 4,
            "--out", cls.data, check=0)
        cls.model = cls.dir / "m.bmml"
        run("train", "--data", cls.data, "--out", cls.model, "--seed", 2, *QUICK, check=0)

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def validate(self, instance, schema):
        jsonschema.Draft202012Validator(self.schemas[schema], registry=self.registry).validate(instance)

    def assert_error(self, proc, code, kind=None):
        self.assertEqual(proc.returncode, code, proc.stderr)
        err = json.loads(proc.stderr.strip().splitlines()[-1])
        self.validate(err, "error_line")
        self.assertEqual(err["exit_code"], code)
        if kind:
            self.assertEqual(err["error"], kind)

    def test_help_and_version_exit_zero(self):
        self.assertEqual(run("--help").returncode, 0)
        self.assertIn("train", run("--help").stdout)
        self.assertEqual(run("predict", "--help").returncode, 0)
        self.assertEqual(run("--version").returncode, 0)

    def test_usage_errors_exit_64(self):
        self.assert_error(run("train", "--no-such-flag"), 64, "usage")
        self.assert_error(run(), 64, "usage")
        self.assert_error(run("train", "--data", self.data, "--out", self.dir / "x.bmml",
                              "--set", "awlel.vartheta=-1"), 64, "config_error")
        self.assert_error(run("evaluate", "--data", self.data, "--split", "60/10"), 64)

    def test_missing_files_exit_2(self):
        self.assert_error(run("train", "--data", self.dir / "absent.csv", "--out", self.dir / "x.bmml"),
                          2, "io_error")
        self.assert_error(run("predict", "--model", self.dir / "absent.bmml", "--data", self.data),
                          2, "io_error")

    def test_dimension_mismatch_exits_3(self):
        other = self.dir / "d5.csv"
        run("synth", "--bags", 5, "--dim", 5, "--k", 3, "--out", other, check=0)
        self.assert_error(run("predict", "--model", self.model, "--data", other), 3,
                          "dimension_mismatch")

    def test_corrupt_model_exits_1(self):
        bad = self.dir / "bad.bmml"
        raw = bytearray(self.model.read_bytes())
        raw[len(raw) // 2] ^= 0xFF
        bad.write_bytes(bytes(raw))
        self.assert_error(run("predict", "--model", bad, "--data", self.data), 1, "corrupt_file")

    def test_training_is_byte_deterministic(self):
        a, b = self.dir / "a.bmml", self.dir / "b.bmml"
        run("train", "--data", self.data, "--out", a, "--seed", 2, *QUICK, check=0)
        run("train", "--data", self.data, "--out", b, "--seed", 2, *QUICK, check=0)
        self.assertEqual(a.read_bytes(), b.read_bytes())
        self.assertEqual(a.read_bytes(), self.model.read_bytes())
        first = run("predict", "--model", a, "--data", self.data, check=0).stdout
        self.assertEqual(first, run("predict", "--model", b, "--data", self.data, check=0).stdout)

    def test_csv_and_json_predictions_agree(self):
        rows = list(csv.DictReader(io.StringIO(
            run("predict", "--model", self.model, "--data", self.data, check=0).stdout)))
        lines = run("predict", "--model", self.model, "--data", self.data, "--format", "json",
                    check=0).stdout.splitlines()
        self.assertEqual(len(rows), 40)
        self.assertEqual(len(lines), 40)
        for row, line in zip(rows, lines):
            obj = json.loads(line)
            self.validate(obj, "prediction_line")
            self.assertEqual(row["bag_id"], obj["bag_id"])
            self.assertEqual([float(row[f"prob_{k}"]) for k in (1, 2, 3)], obj["probabilities"])
            self.assertEqual([int(row[f"label_{k}"]) for k in (1, 2, 3)], obj["labels"])
            self.assertAlmostEqual(sum(obj["probabilities"]), 1.0, places=12)

    def test_tau_changes_labels_monotonically(self):
        def positives(tau):
            out = run("predict", "--model", self.model, "--data", self.data, "--format", "json",
                      "--tau", tau, check=0).stdout
            return sum(sum(json.loads(l)["labels"]) for l in out.splitlines())
        low, mid, high = positives(0.05), positives(0.3), positives(0.95)
        self.assertGreaterEqual(low, mid)
        self.assertGreaterEqual(mid, high)
        self.assertGreater(low, high)
        self.assert_error(run("predict", "--model", self.model, "--data", self.data, "--tau", 1.5), 64)

    def test_cross_validation_report(self):
        out = run("evaluate", "--data", self.data, "--folds", 3, "--seed", 1, *QUICK, check=0).stdout
        report = json.loads(out)
        self.validate(report, "metrics_report")
        self.assertEqual(len(report["per_fold"]), 3)
        self.assertEqual(report["variant"], "bmiml")
        again = run("evaluate", "--data", self.data, "--folds", 3, "--seed", 1, *QUICK, check=0).stdout
        self.assertEqual(out, again)

    def test_split_report_gives_sizes(self):
        out = run("evaluate", "--data", self.data, "--split", "60/10/30", *QUICK, check=0).stdout
        report = json.loads(out)
        self.validate(report, "metrics_report")
        self.assertEqual(report["split"], {"train": 24, "validation": 4, "test": 12})

    def test_ablation_report(self):
        out = run("evaluate", "--data", self.data, "--split", "60/10/30", "--ablation", *QUICK,
                  check=0).stdout
        report = json.loads(out)
        self.validate(report, "ablation_report")
        self.assertEqual([r["variant"] for r in report["ablation"]], ["awlel", "smipr", "bmiml"])
        table = run("evaluate", "--data", self.data, "--split", "60/10/30", "--ablation",
                    "--format", "table", *QUICK, check=0).stdout
        for name in ("awlel", "smipr", "bmiml"):
            self.assertIn(name, table)

    def test_binary_and_csv_datasets_train_identically(self):
        binary = self.dir / "train.bin"
        run("synth", "--bags", 40, "--instances", 3, "--dim", 6, "--k", 3, "--seed", 4,
            "--out", binary, "--format", "binary-bags", check=0)
        a, b = self.dir / "csv.bmml", self.dir / "bin.bmml"
        run("train", "--data", self.data, "--out", a, "--seed", 2, *QUICK, check=0)
        run("train", "--data", binary, "--data-format", "binary-bags", "--out", b, "--seed", 2,
            *QUICK, check=0)
        self.assertEqual(a.read_bytes(), b.read_bytes())

    def test_loss_trace(self):
        trace = self.dir / "loss.csv"
        run("train", "--data", self.data, "--out", self.dir / "t.bmml", "--loss-trace", trace,
            *QUICK, check=0)
        rows = list(csv.DictReader(io.StringIO(trace.read_text())))
        self.assertEqual(len(rows), 201)
        self.assertLess(float(rows[-1]["E"]), float(rows[0]["E"]))

    def test_patchify_strip_counts(self):
        for i, height in enumerate((512, 512, 576)):
            write_pgm(self.dir / f"img{i}.pgm", 64, height, i)
        manifest = self.dir / "images.csv"
        manifest.write_text("img0.pgm,1,0\nimg1.pgm,0,1\n")
        out = self.dir / "patches.csv"
        run("patchify", "--manifest", manifest, "--out", out, check=0)
        header = out.read_text().splitlines()
        bag_lines = [l for l in header if l.startswith("bag ")]
        self.assertEqual(len(bag_lines), 2)
        for line in bag_lines:
            self.assertIn(" n=8 ", line)
        manifest.write_text("img2.pgm,1,0\n")
        run("patchify", "--manifest", manifest, "--out", out, check=0)
        self.assertIn(" n=9 ", [l for l in out.read_text().splitlines() if l.startswith("bag ")][0])
        manifest.write_text("missing.pgm,1,0\n")
        self.assert_error(run("patchify", "--manifest", manifest, "--out", out), 2, "io_error")

    def test_config_file_and_flags(self):
        conf = self.dir / "run.conf"
        conf.write_text(f"[io]\ndata = {self.data}\nmodel = {self.dir / 'c.bmml'}\n"
                        "[smipr]\nepochs = 200\n[bls]\nk1 = 5\nk2 = 20\n[pipeline]\nseed = 2\n")
        run("train", "--config", conf, check=0)
        self.assertEqual((self.dir / "c.bmml").read_bytes(), self.model.read_bytes())
        conf.write_text("[smipr]\nepochz = 3\n")
        self.assert_error(run("train", "--config", conf, "--data", self.data, "--out",
                              self.dir / "x.bmml"), 64, "config_error")


if __name__ == "__main__":
    BMIML, SCHEMAS = sys.argv[1], sys.argv[2]
    unittest.main(argv=sys.argv[:1], verbosity=2)
