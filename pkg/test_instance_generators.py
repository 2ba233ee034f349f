#!/usr/bin/env python3
"""
Unit tests for instance_generators module.
"""

import math
import os
import sys
import unittest

# Add current directory to path to import modules
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from errors import GenerationError, PreconditionError
from instance_generators import (CHAIN, ORDINARY, TINY, YUGE, gen_grid_graph, gen_link_lattice,
                                 gen_random_missing_links, gen_random_weighted_instance, gen_wheel,
                                 wheel_steiner_terminals)
from link_graph import connected_components, euclidean, kruskal_mst


class TestWheel(unittest.TestCase):

    def test_counts_k3(self):
        wheel = gen_wheel(3)
        self.assertEqual(wheel.spoke_length, 18)
        self.assertEqual(wheel.graph.node_count, 1 + 3 * 18)
        self.assertEqual(wheel.graph.link_count, 3 + 3 * 17 + 3)
        self.assertEqual(len(wheel.links_labelled(ORDINARY)), 3)
        self.assertEqual(len(wheel.links_labelled(TINY)), 51)
        self.assertEqual(len(wheel.links_labelled(YUGE)), 3)

    def test_k6_size(self):
        wheel = gen_wheel(6)
        self.assertEqual(wheel.graph.node_count, 433)

    def test_lengths(self):
        wheel = gen_wheel(4)
        g = wheel.graph
        for lid in wheel.links_labelled(TINY):
            self.assertEqual(g.link(lid).length, 1.0)
        for lid in wheel.links_labelled(ORDINARY):
            self.assertEqual(g.link(lid).length, 5.0)
        yuge = {g.link(lid).length for lid in wheel.links_labelled(YUGE)}
        self.assertEqual(len(yuge), 1)
        self.assertGreater(yuge.pop(), 5.0)
        for link in g.links:
            self.assertAlmostEqual(link.length, euclidean(link.sender, link.receiver), places=9)

    def test_attach_at_zero(self):
        wheel = gen_wheel(3, attach_at_zero=True)
        for lid in wheel.links_labelled(ORDINARY):
            self.assertEqual(wheel.graph.link(lid).length, 3.0)

    def test_bounded_degree(self):
        wheel = gen_wheel(4, bounded_degree=True)
        g = wheel.graph
        self.assertEqual(len(wheel.hub), 4)
        self.assertEqual(len(wheel.links_labelled(CHAIN)), 3)
        self.assertLessEqual(max(len(g.incident(v)) for v in range(g.node_count)), 3)
        self.assertEqual(len(connected_components(g)), 1)

    def test_minimum_spanning_tree_skips_yuge_links(self):
        for k in (3, 4, 5):
            wheel = gen_wheel(k)
            expected = wheel.links_labelled(ORDINARY) | wheel.links_labelled(TINY)
            self.assertEqual(kruskal_mst(wheel.graph), expected, f"k={k}")
        wheel = gen_wheel(4, attach_at_zero=True)
        self.assertEqual(kruskal_mst(wheel.graph), wheel.links_labelled(ORDINARY) | wheel.links_labelled(TINY))
        wheel = gen_wheel(4, bounded_degree=True)
        expected = wheel.links_labelled(ORDINARY) | wheel.links_labelled(TINY) | wheel.links_labelled(CHAIN)
        self.assertEqual(kruskal_mst(wheel.graph), expected)

    def test_small_k_rejected(self):
        with self.assertRaises(PreconditionError):
            gen_wheel(2)

    def test_steiner_terminals(self):
        wheel = gen_wheel(4)
        terminals = wheel_steiner_terminals(wheel)
        self.assertEqual(terminals[0], 0)
        self.assertEqual(len(terminals), 5)
        yuge_nodes = {n for lid in wheel.links_labelled(YUGE) for n in wheel.graph.link(lid).endpoints}
        self.assertEqual(set(terminals[1:]), yuge_nodes)


class TestRandomInstances(unittest.TestCase):

    def test_missing_links_complete_when_p_is_one(self):
        g = gen_random_missing_links(6, 3.0, 5.0, 1.0, seed=1)
        self.assertEqual(g.link_count, 15)
        self.assertTrue(g.has_geometry)

    def test_missing_links_rule(self):
        g = gen_random_missing_links(12, 3.0, 2.0, 0.5, seed=4)
        self.assertEqual(len(connected_components(g)), 1)
        for link in g.links:
            self.assertLessEqual(link.length, 2.0)
        positions = {}
        for link in g.links:
            positions[link.u], positions[link.v] = link.sender, link.receiver
        present = {tuple(sorted(link.endpoints)) for link in g.links}
        nodes = sorted(positions)
        for i, u in enumerate(nodes):
            for v in nodes[i + 1:]:
                if euclidean(positions[u], positions[v]) <= 1.0:
                    self.assertIn((u, v), present)

    def test_missing_links_deterministic(self):
        first = gen_random_missing_links(10, 3.0, 2.0, 0.5, seed=9)
        second = gen_random_missing_links(10, 3.0, 2.0, 0.5, seed=9)
        self.assertEqual(first.links, second.links)

    def test_missing_links_gives_up(self):
        with self.assertRaises(GenerationError):
            gen_random_missing_links(10, 100.0, 1.0, 0.0, seed=3, max_attempts=3)

    def test_weighted_instance(self):
        g, c = gen_random_weighted_instance(5, nodes=7, links=11, density=0.3)
        self.assertEqual(g.link_count, 11)
        self.assertEqual(len(connected_components(g)), 1)
        for w in c.weights().values():
            self.assertEqual(round(w, 3), w)
            self.assertGreater(w, 0.0)
        again, c_again = gen_random_weighted_instance(5, nodes=7, links=11, density=0.3)
        self.assertEqual(c.weights(), c_again.weights())
        self.assertEqual(g.lengths(), again.lengths())

    def test_unit_symmetric_weights(self):
        _, c = gen_random_weighted_instance(6, nodes=6, links=9, density=0.5, unit=True, symmetric=True)
        self.assertTrue(c.is_unweighted)
        self.assertTrue(c.is_symmetric)


class TestLattices(unittest.TestCase):

    def test_grid_graph(self):
        g = gen_grid_graph(2, 3, spacing=2.0)
        self.assertEqual(g.node_count, 6)
        self.assertEqual(g.link_count, 7)
        self.assertEqual(set(g.lengths().values()), {2.0})

    def test_link_lattice(self):
        links = gen_link_lattice(2, 2, spacing=10.0, length=1.5, copies=3)
        self.assertEqual(len(links), 12)
        self.assertEqual([l.link_id for l in links], list(range(12)))
        self.assertTrue(all(math.isclose(l.length, 1.5) for l in links))


if __name__ == "__main__":
    unittest.main()
