import math
import os
import tempfile
import unittest
from unittest import mock

from modgrav.config import load_config, merge_with_defaults, parse_config, read_config
from modgrav.exceptions import ValidationError
from modgrav.types import CouplingProfile, Metric, OutputFormat
from modgrav.utils import THREADS_ENV, project_absolute_path, serialize, worker_count


class Configuration(unittest.TestCase):
    def test_defaults(self):
        cfg = parse_config({})
        self.assertEqual(cfg.setup.x0, 1e-3)
        self.assertEqual(cfg.setup.epsilon, 0.1)
        self.assertEqual(cfg.setup.rho_bg, 8.27e-14)
        self.assertAlmostEqual(cfg.probe.radius / 1.16e-6, 1.0, delta=5e-3)
        self.assertAlmostEqual(cfg.source.radius / 2.32e-4, 1.0, delta=5e-3)
        self.assertAlmostEqual(cfg.optomech.r_T, 13.1, delta=0.05)
        self.assertAlmostEqual(cfg.g_N / 6.67e-11, 1.0, delta=1e-3)
        self.assertEqual(cfg.model.planck_ratio, 1.0)
        self.assertEqual(cfg.scan.metric, Metric.SIGMA_MOD)
        self.assertFalse(cfg.scan.probe_screening)
        self.assertEqual(cfg.scan.yukawa.nx, 200)
        self.assertEqual(cfg.output_format, OutputFormat.CSV)
        self.assertIsNone(cfg.output_path)

    def test_body_sections_replace_defaults(self):
        merged = merge_with_defaults({"probe": {"mass": 1e-14, "radius": 1.16e-6}})
        self.assertEqual(merged["probe"], {"mass": 1e-14, "radius": 1.16e-6})
        cfg = parse_config({"probe": {"mass": 1e-14, "density": 1538.0}})
        self.assertAlmostEqual(cfg.probe.radius / 1.16e-6, 1.0, delta=5e-3)
        merged = merge_with_defaults({"geometry": {"epsilon": 0.2}})
        self.assertEqual(merged["geometry"]["x0"], 1e-3)
        self.assertEqual(merged["geometry"]["epsilon"], 0.2)

    def test_invalid_geometry(self):
        with self.assertRaises(ValidationError) as context:
            parse_config({"geometry": {"epsilon": 1.5}})
        self.assertEqual(context.exception.field, "geometry.epsilon")
        with self.assertRaises(ValidationError) as context:
            parse_config({"geometry": {"x0": 2e-4}})
        self.assertEqual(context.exception.field, "geometry.x0")

    def test_invalid_sections(self):
        with self.assertRaises(ValidationError) as context:
            parse_config({"source": {"mass": 1e-6}})
        self.assertEqual(context.exception.field, "source")
        with self.assertRaises(ValidationError) as context:
            parse_config({"scan": {"threads": 0}})
        self.assertEqual(context.exception.field, "scan.threads")
        with self.assertRaises(ValidationError) as context:
            parse_config({"scan": {"yukawa": {"x": [1.0], "y": [1.0, 2.0]}}})
        self.assertEqual(context.exception.field, "scan.yukawa")
        with self.assertRaises(ValidationError) as context:
            parse_config({"output": {"format": "xml"}})
        self.assertEqual(context.exception.field, "output.format")
        with self.assertRaises(ValidationError):
            parse_config([1, 2])
        with self.assertRaises(ValidationError) as context:
            parse_config({"casimir": {"temperature": "abc"}})
        self.assertEqual(context.exception.field, "casimir")
        with self.assertRaises(ValidationError) as context:
            parse_config({"casimir": {"temperature": -1.0}})
        self.assertEqual(context.exception.field, "casimir.temperature")

    def test_metric_follows_profile(self):
        self.assertEqual(parse_config({}).scan.metric, Metric.SIGMA_MOD)
        constant = parse_config({"optomech": {"coupling_profile": "constant"}})
        self.assertEqual(constant.scan.metric, Metric.SIGMA_CONST)
        explicit = parse_config(
            {"optomech": {"coupling_profile": "constant"}, "scan": {"metric": "kappa_mod"}}
        )
        self.assertEqual(explicit.scan.metric, Metric.KAPPA_MOD)
        with self.assertRaises(ValidationError) as context:
            parse_config({"scan": {"metric": "unknown"}})
        self.assertEqual(context.exception.field, "scan")

    def test_pressure(self):
        with self.assertRaises(ValidationError) as context:
            parse_config({"environment": {"pressure": 1e-7, "molecule_mass": 3.3e-27}})
        self.assertEqual(context.exception.field, "environment.temperature")
        cfg = parse_config(
            {"environment": {"pressure": 1e-7, "molecule_mass": 3.3e-27, "temperature": 288.9}}
        )
        self.assertAlmostEqual(cfg.setup.rho_bg / 8.27e-14, 1.0, delta=1e-3)

    def test_example(self):
        cfg = load_config(project_absolute_path("config", "example.json"))
        self.assertEqual(cfg.optomech.coupling_profile, CouplingProfile.RESONANT_COSINE)
        self.assertEqual(cfg.optomech.mu_c, 1e3 + 0j)
        self.assertTrue(cfg.scan.probe_screening)
        self.assertEqual(cfg.scan.threads, 4)
        self.assertEqual(cfg.scan.chameleon.ny, 100)
        self.assertEqual(cfg.output_path, "chameleon.csv")
        self.assertAlmostEqual(cfg.probe.density / 1538.0, 1.0, delta=5e-3)

    def test_serialized_config_loads(self):
        cfg = parse_config({"geometry": {"epsilon": 0.2}, "scan": {"threads": 2}})
        restored = parse_config(cfg.serialize())
        self.assertEqual(restored.setup.epsilon, 0.2)
        self.assertEqual(restored.scan.threads, 2)
        self.assertEqual(restored.probe.radius, cfg.probe.radius)
        self.assertEqual(restored.optomech.r_T, cfg.optomech.r_T)

    def test_read(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "config.json")
            for text, expected in (("", {}), ("  \n\t", {}), ('{"a": 1}', {"a": 1})):
                with open(path, "w") as f:
                    f.write(text)
                self.assertEqual(read_config(path), expected)
            with open(path, "w") as f:
                f.write("{not json")
            with self.assertRaises(ValidationError) as context:
                read_config(path)
            self.assertEqual(context.exception.field, "config")
            with self.assertRaises(FileNotFoundError):
                read_config(os.path.join(directory, "missing.json"))


class Utilities(unittest.TestCase):
    def test_serialize_non_finite(self):
        text = serialize({"b": math.inf, "a": [1.0, math.nan]})
        self.assertEqual(text, '{\n  "a": [\n    1.0,\n    "nan"\n  ],\n  "b": "inf"\n}\n')

    def test_worker_count(self):
        with mock.patch.dict(os.environ, {THREADS_ENV: "2"}):
            self.assertEqual(worker_count(8), 2)
            self.assertEqual(worker_count(1), 1)
        with mock.patch.dict(os.environ, {THREADS_ENV: ""}):
            self.assertEqual(worker_count(3), 3)
            self.assertGreaterEqual(worker_count(None), 1)
