#!/usr/bin/env python3
"""
Unit tests for instance_io module.
"""

import json
import os
import shutil
import sys
import tempfile
import unittest
from pathlib import Path

# Add current directory to path to import modules
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from conflict_graph import is_feasible
from errors import InstanceFormatError
from instance_generators import gen_wheel
from instance_io import (ConflictSpec, InstanceFile, ScheduleReport, build_problem, dumps_canonical,
                         instance_from_graph, load_instance, load_report, parse_model,
                         report_from_schedule, schedule_from_report, write_model)
from schedule_checker import check_schedule
from scheduler import conn
from sinr_model import PowerKind


def explicit_instance(**overrides):
    data = {
        "format": 1,
        "nodes": [{"id": 0}, {"id": 1}, {"id": 2}],
        "links": [{"id": 0, "u": 0, "v": 1, "length": 1.0}, {"id": 1, "u": 1, "v": 2, "length": 2.0}],
        "conflict": {"model": "explicit", "weights": [{"e": 0, "f": 1, "w": "0.1"}]},
    }
    data.update(overrides)
    return json.dumps(data)


class TestInstanceParsing(unittest.TestCase):

    def test_explicit_instance(self):
        instance = parse_model(InstanceFile, explicit_instance())
        self.assertEqual(instance.conflict.weights[0].w, 0.1)
        problem = build_problem(instance)
        self.assertEqual(problem.graph.link_count, 2)
        self.assertEqual(problem.conflict.weight(0, 1), 0.1)
        self.assertEqual(problem.conflict.universe, (0, 1))
        self.assertIsNone(problem.terminals)

    def test_unknown_field(self):
        with self.assertRaises(InstanceFormatError):
            parse_model(InstanceFile, explicit_instance(colour="blue"))

    def test_wrong_format_version(self):
        with self.assertRaises(InstanceFormatError):
            parse_model(InstanceFile, explicit_instance(format=2))

    def test_bad_references(self):
        bad_links = [{"id": 0, "u": 0, "v": 1}, {"id": 0, "u": 1, "v": 2}]
        with self.assertRaises(InstanceFormatError):
            parse_model(InstanceFile, explicit_instance(links=bad_links))
        with self.assertRaises(InstanceFormatError):
            parse_model(InstanceFile, explicit_instance(nodes=[{"id": 0}, {"id": 2}, {"id": 3}]))
        with self.assertRaises(InstanceFormatError):
            parse_model(InstanceFile, explicit_instance(terminals=[0, 9]))
        with self.assertRaises(InstanceFormatError):
            parse_model(InstanceFile, explicit_instance(conflict={"model": "explicit"}))

    def test_bad_weights(self):
        for weight in ("-0.5", "abc"):
            conflict = {"model": "explicit", "weights": [{"e": 0, "f": 1, "w": weight}]}
            with self.assertRaises(InstanceFormatError):
                parse_model(InstanceFile, explicit_instance(conflict=conflict))
        conflict = {"model": "explicit", "weights": [{"e": 0, "f": 0, "w": 0.5}]}
        with self.assertRaises(InstanceFormatError):
            parse_model(InstanceFile, explicit_instance(conflict=conflict))

    def test_explicit_order(self):
        instance = parse_model(InstanceFile, explicit_instance(order="explicit", permutation=[1, 0]))
        self.assertEqual(build_problem(instance).conflict.universe, (1, 0))
        with self.assertRaises(InstanceFormatError):
            parse_model(InstanceFile, explicit_instance(order="explicit", permutation=[1]))

    def test_geometric_models(self):
        nodes = [{"id": 0, "x": 0.0, "y": 0.0}, {"id": 1, "x": 1.0, "y": 0.0}, {"id": 2, "x": 1.0, "y": 3.0}]
        links = [{"id": 0, "u": 0, "v": 1}, {"id": 1, "u": 1, "v": 2}]
        sinr = {"model": "sinr", "params": {"alpha": 4.0, "power": {"kind": "length-exponent", "tau": 0.5}}}
        problem = build_problem(parse_model(InstanceFile, explicit_instance(nodes=nodes, links=links, conflict=sinr)))
        self.assertEqual(problem.params.alpha, 4.0)
        self.assertEqual(problem.power.kind, PowerKind.LENGTH_EXPONENT)
        self.assertEqual(problem.graph.link(1).length, 3.0)
        self.assertEqual(problem.conflict.universe, (0, 1))

        disk = {"model": "disk", "params": {"K": 1.0}}
        problem = build_problem(parse_model(InstanceFile, explicit_instance(nodes=nodes, links=links, conflict=disk)))
        self.assertEqual(problem.conflict.weight(0, 1), 1.0)

        with self.assertRaises(InstanceFormatError):
            build_problem(parse_model(InstanceFile, explicit_instance(nodes=nodes, links=links,
                                                                       conflict={"model": "disk"})))


class TestFiles(unittest.TestCase):
    """Writing and reading instance and report files."""

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def test_canonical_output(self):
        instance = parse_model(InstanceFile, explicit_instance())
        text = dumps_canonical(instance)
        self.assertTrue(text.endswith("}\n"))
        self.assertNotIn("null", text)
        self.assertEqual(list(json.loads(text)), sorted(json.loads(text)))
        self.assertEqual(text, dumps_canonical(parse_model(InstanceFile, text)))

    def test_missing_file(self):
        with self.assertRaises(InstanceFormatError):
            load_instance(Path(self.test_dir) / "absent.json")

    def test_wheel_instance_round_trip(self):
        wheel = gen_wheel(3)
        instance = instance_from_graph(wheel.graph, ConflictSpec(model="l2"), positions=list(wheel.positions))
        path = Path(self.test_dir) / "wheel.json"
        write_model(instance, path)
        problem = build_problem(load_instance(path))
        self.assertEqual(problem.graph.lengths(), wheel.graph.lengths())
        self.assertTrue(problem.graph.has_geometry)

    def test_report_round_trip(self):
        wheel = gen_wheel(3)
        instance = instance_from_graph(wheel.graph, ConflictSpec(model="l2"), positions=list(wheel.positions))
        problem = build_problem(instance)
        schedule = conn(problem.graph, problem.conflict)
        check = check_schedule(schedule, problem.graph, problem.conflict)
        report = report_from_schedule(schedule, check, rho=None)
        self.assertTrue(report.verification.feasible)
        self.assertEqual(report.stats.slot_count, schedule.slot_count)
        self.assertNotIn("runtime_ms", dumps_canonical(report))

        path = Path(self.test_dir) / "report.json"
        write_model(report, path)
        again = schedule_from_report(load_report(path))
        self.assertEqual(again.slots, tuple(frozenset(s) for s in schedule.sorted_slots()))
        self.assertTrue(all(is_feasible(problem.conflict, slot) for slot in again.slots))
        self.assertIsInstance(load_report(path), ScheduleReport)


if __name__ == "__main__":
    unittest.main()
