"""Tests for the shared command-line helpers."""
import argparse
import json
import os
import tempfile
import unittest
from io import StringIO
from unittest import mock

from django.core.management.base import CommandError

from klconc.command_utils import (
    LogRenderer,
    build_run_config,
    constant_override,
    emit,
    int_list,
    probability_list,
    render,
    render_table,
)
from klconc.management.base import EXIT_VALIDATION


class TestArgumentTypes(unittest.TestCase):
    """argparse converters."""

    def test_lists(self):
        self.assertEqual(probability_list("0.2,0.3, 0.5"), (0.2, 0.3, 0.5))
        self.assertEqual(int_list("1,2,3"), (1, 2, 3))
        with self.assertRaises(argparse.ArgumentTypeError):
            int_list("1,x")

    def test_constant_override(self):
        self.assertEqual(constant_override("C2=10"), ("C2", 10.0))
        with self.assertRaises(argparse.ArgumentTypeError):
            constant_override("C2")
        with self.assertRaises(argparse.ArgumentTypeError):
            constant_override("C2=big")


class TestBuildRunConfig(unittest.TestCase):
    """Options to RunConfig."""

    def test_valid(self):
        config = build_run_config("exact", {"n": 2, "p": (0.5, 0.5), "constant": [("C2", 1.0)]})
        self.assertEqual(config.k, 2)
        self.assertEqual(config.constants_config().C2, 1.0)

    def test_shape_seed(self):
        config = build_run_config("exact", {"n": 2, "k": 3, "p_shape": "dirichlet", "shape_seed": 4})
        self.assertEqual(config.shape_param, 4.0)

    def test_invalid_simplex(self):
        with self.assertRaises(CommandError) as ctx:
            build_run_config("exact", {"n": 2, "p": (0.5, 0.6)})
        self.assertEqual(ctx.exception.returncode, EXIT_VALIDATION)

    def test_normalize(self):
        config = build_run_config("exact", {"n": 2, "p": (1.0, 3.0), "normalize": True})
        self.assertEqual(config.distribution().probs, (0.25, 0.75))

    def test_unknown_constant(self):
        with self.assertRaises(CommandError):
            build_run_config("bound", {"n": 2, "k": 2, "t": 1.0, "constant": [("C9", 1.0)]})

    @mock.patch.dict(os.environ, {"KLCONC_CONSTANTS": "/nonexistent/constants.json"})
    def test_missing_constants_file(self):
        with self.assertRaises(CommandError):
            build_run_config("bound", {"n": 2, "k": 2, "t": 1.0})


class TestRendering(unittest.TestCase):
    """JSON, CSV and table output."""

    def test_table(self):
        text = render_table(("name", "value"), [{"name": "sanov", "value": 0.25}, {"name": "main", "value": None}])
        self.assertEqual(text.splitlines(), ["name   value", "sanov  0.25", "main   -"])

    def test_render_dispatch(self):
        document = {"x": 1.5}
        self.assertEqual(render("json", document, ("x",), [document]), '{"x": 1.5}\n')
        self.assertEqual(render("csv", document, ("x",), [document]), "x\r\n1.5\r\n")

    def test_emit_to_stdout(self):
        command = mock.Mock(stdout=StringIO())
        emit(command, "text\n", {})
        self.assertEqual(command.stdout.getvalue(), "text\n")

    def test_emit_to_file_with_annotation(self):
        command = mock.Mock(stdout=StringIO())
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "out.json")
            emit(command, "{}\n", {"output": path, "annotate": True, "argv": ["klconc", "bound"]})
            with open(path, encoding="utf-8") as handle:
                self.assertEqual(handle.read(), "{}\n")
            with open(f"{path}.meta.json", encoding="utf-8") as handle:
                meta = json.load(handle)
        self.assertEqual(meta["argv"], ["klconc", "bound"])
        self.assertIn("version", meta)
        self.assertEqual(command.stdout.getvalue(), "")


class TestLogRenderer(unittest.TestCase):
    """Terminal log rendering."""

    def test_render(self):
        text = LogRenderer()(None, "info", {"event": "Solved", "level": "info", "threshold": 8.18868912, "k": 2})
        self.assertIn("Solved", text)
        self.assertIn("8.18869", text)
        self.assertLess(text.index("k"), text.index("threshold"))
