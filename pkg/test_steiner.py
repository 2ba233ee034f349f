#!/usr/bin/env python3
"""
Unit tests for steiner module.
"""

import math
import os
import sys
import unittest
from itertools import combinations

# Add current directory to path to import modules
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from conflict_graph import ConflictGraph, measure_eta
from errors import DisconnectedGraphError, PreconditionError
from instance_generators import gen_random_weighted_instance, gen_wheel, wheel_steiner_terminals
from link_graph import make_graph, spans_terminals
from schedule_checker import check_schedule
from sinr_model import line_graph_conflicts
from steiner import (SteinerInstance, clique_certificate, greedy_mmst, load_vector, mmst_weights,
                     steiner_schedule)


def path_instance(terminals=(0, 3)):
    g = make_graph(4, [(0, 1), (1, 2), (2, 3)], lengths=[1, 1, 1])
    return SteinerInstance(g, tuple(terminals), line_graph_conflicts(g))


def star_instance():
    g = make_graph(4, [(0, 1), (0, 2), (0, 3)], lengths=[1, 1, 1])
    return SteinerInstance(g, (1, 2, 3), line_graph_conflicts(g))


class TestSteinerInstance(unittest.TestCase):

    def test_terminals_sorted_and_deduplicated(self):
        inst = path_instance((3, 0, 3))
        self.assertEqual(inst.terminals, (0, 3))

    def test_validation(self):
        g = make_graph(3, [(0, 1), (1, 2)], lengths=[1, 1])
        with self.assertRaises(PreconditionError):
            SteinerInstance(g, (1,), line_graph_conflicts(g))
        with self.assertRaises(PreconditionError):
            SteinerInstance(g, (0, 5), line_graph_conflicts(g))
        with self.assertRaises(PreconditionError):
            SteinerInstance(g, (0, 2), ConflictGraph([0, 1], {(0, 1): 0.5, (1, 0): 0.5}))
        with self.assertRaises(PreconditionError):
            SteinerInstance(g, (0, 2), ConflictGraph([0, 1], {(0, 1): 1.0}))


class TestWeights(unittest.TestCase):

    def test_mmst_weights_follow_precedence(self):
        weights = mmst_weights(path_instance())
        self.assertEqual(weights, {0: frozenset(), 1: frozenset({0}), 2: frozenset({1})})

    def test_load_vector(self):
        inst = star_instance()
        load = load_vector(inst, mmst_weights(inst), [0, 1, 2])
        self.assertEqual(load.as_dict(), {0: 2, 1: 1})
        self.assertEqual(load.norm, 2)
        self.assertEqual(load.argmax(), 0)


class TestGreedy(unittest.TestCase):

    def test_path_needs_every_link(self):
        tree = greedy_mmst(path_instance())
        self.assertEqual(tree.links, frozenset({0, 1, 2}))
        self.assertEqual(tree.z, 1)

    def test_zero_load_route_preferred(self):
        # direct link 3 joins the terminals; the detour 0-1-2 carries conflicts
        g = make_graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)], lengths=[1, 1, 1, 5])
        conflict = ConflictGraph(g.link_ids, {(0, 1): 1.0, (1, 0): 1.0, (1, 2): 1.0, (2, 1): 1.0})
        inst = SteinerInstance(g, (0, 3), conflict)
        tree = greedy_mmst(inst)
        self.assertEqual(tree.links, frozenset({3}))
        self.assertEqual(tree.z, 0)

    def test_disconnected_terminals(self):
        g = make_graph(4, [(0, 1), (2, 3)], lengths=[1, 1])
        inst = SteinerInstance(g, (0, 3), line_graph_conflicts(g))
        with self.assertRaises(DisconnectedGraphError):
            greedy_mmst(inst)

    def test_random_trees_span_terminals(self):
        for seed in range(15):
            g, c = gen_random_weighted_instance(seed, nodes=8, links=13, density=0.3, unit=True, symmetric=True)
            inst = SteinerInstance(g, (0, 3, 5, 7), c)
            tree = greedy_mmst(inst)
            self.assertTrue(spans_terminals(g, tree.links, inst.terminals), f"seed {seed}")


class TestSteinerSchedule(unittest.TestCase):

    def test_star(self):
        inst = star_instance()
        schedule = steiner_schedule(inst)
        self.assertEqual(schedule.algorithm, "steiner")
        self.assertEqual(schedule.extra["load"], 2)
        self.assertEqual(schedule.slot_count, 3)
        self.assertTrue(check_schedule(schedule, inst.graph, inst.conflict, terminals=inst.terminals).ok)

    def test_slots_within_load_bound(self):
        for seed in range(20):
            g, c = gen_random_weighted_instance(seed, nodes=8, links=12, density=0.25, unit=True, symmetric=True)
            inst = SteinerInstance(g, (1, 2, 6), c)
            for by_class in (False, True):
                schedule = steiner_schedule(inst, by_length_class=by_class)
                if not by_class:
                    self.assertLessEqual(schedule.slot_count, schedule.extra["load"] + 1)
                check = check_schedule(schedule, g, c, terminals=inst.terminals)
                self.assertTrue(check.ok, f"seed {seed}: {check.first_violation}")

    def test_length_class_variant(self):
        g = make_graph(4, [(0, 1), (1, 2), (2, 3)], lengths=[1, 3, 1])
        inst = SteinerInstance(g, (0, 3), line_graph_conflicts(g))
        schedule = steiner_schedule(inst, by_length_class=True)
        self.assertEqual(schedule.algorithm, "steiner-length-class")
        # link 1 sits alone in its class, so only the two unit links share weights
        self.assertEqual(schedule.extra["load"], 0)
        self.assertTrue(check_schedule(schedule, g, inst.conflict, terminals=inst.terminals).ok)


class TestCliqueCertificate(unittest.TestCase):

    def test_star_certificate(self):
        inst = star_instance()
        certificate = clique_certificate(inst, [0, 1, 2])
        self.assertEqual(certificate.link, 0)
        self.assertEqual(certificate.post_neighbors, (1, 2))
        self.assertEqual(certificate.clique, (1, 2))

    def test_certificate_bounds_schedule_length(self):
        cases = []
        for seed in range(20):
            g, c = gen_random_weighted_instance(seed, nodes=8, links=12, density=0.3, unit=True, symmetric=True)
            cases.append(SteinerInstance(g, (0, 4, 7), c))
        wheel = gen_wheel(4)
        cases.append(SteinerInstance(wheel.graph, tuple(wheel_steiner_terminals(wheel)),
                                     line_graph_conflicts(wheel.graph)))
        for index, inst in enumerate(cases):
            tree = greedy_mmst(inst)
            certificate = clique_certificate(inst, tree.links)
            schedule = steiner_schedule(inst)
            for e, f in combinations(certificate.clique, 2):
                self.assertGreaterEqual(inst.conflict.weight(e, f), 1.0)
            self.assertEqual(len(certificate.post_neighbors), tree.z)
            self.assertGreaterEqual(schedule.slot_count, len(certificate.clique))
            if tree.z:
                eta = measure_eta(inst.conflict)
                self.assertGreaterEqual(len(certificate.clique), math.ceil(tree.z / eta), f"case {index}")

    def test_no_load(self):
        g = make_graph(3, [(0, 1), (1, 2)], lengths=[1, 1])
        inst = SteinerInstance(g, (0, 2), ConflictGraph([0, 1]))
        self.assertEqual(clique_certificate(inst, [0, 1]).clique, ())


if __name__ == "__main__":
    unittest.main()
