"""Combinatorics of cluster decompositions.

Expected values come from independent oracles implemented here: a
restricted-growth-string partition generator for counting, and direct
subset checks for the refinement order.
"""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scatterlab.clusters import (
    ClusterDecomposition,
    coarsest,
    enumerate_decompositions,
    finest,
    is_refinement,
    link_count,
    merge_by_pair,
    pair_leq,
)
from scatterlab.errors import ParameterError


def rgs_partitions(n):
    """Oracle: set partitions of 1..n via restricted growth strings."""
    def rec(prefix, maxv):
        if len(prefix) == n:
            yield list(prefix)
            return
        for v in range(maxv + 2):
            yield from rec(prefix + [v], max(maxv, v))

    for code in rec([0], 0):
        blocks = {}
        for idx, v in enumerate(code):
            blocks.setdefault(v, []).append(idx + 1)
        yield [blocks[v] for v in sorted(blocks)]


BELL = {2: 2, 3: 5, 4: 15, 5: 52, 6: 203}


def stirling2(n, k):
    """Oracle: Stirling numbers of the second kind by recurrence."""
    table = [[0] * (k + 1) for _ in range(n + 1)]
    table[0][0] = 1
    for i in range(1, n + 1):
        for j in range(1, min(i, k) + 1):
            table[i][j] = j * table[i][j] if False else j * table[i - 1][j] + table[i - 1][j - 1]
    return table[n][k]


class TestEnumeration:
    def test_bell_number_n3(self):
        assert len(enumerate_decompositions(3)) == 5

    def test_bell_number_n2(self):
        got = enumerate_decompositions(2)
        assert len(got) == 2
        reps = {repr(a) for a in got}
        assert reps == {"{1,2}", "{1|2}"}

    def test_n4_matches_brute_force(self):
        oracle = {
            ClusterDecomposition.from_clusters(4, p) for p in rgs_partitions(4)
        }
        got = enumerate_decompositions(4)
        assert len(got) == 15
        assert set(got) == oracle

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_bell_counts(self, n):
        assert len(enumerate_decompositions(n)) == BELL[n]

    @pytest.mark.parametrize("n,k", [(4, 2), (5, 3), (6, 2), (6, 4)])
    def test_stirling_counts(self, n, k):
        assert len(enumerate_decompositions(n, k)) == stirling2(n, k)

    def test_no_duplicates_and_canonical(self):
        got = enumerate_decompositions(5)
        assert len(set(got)) == len(got)
        for a in got:
            assert a == ClusterDecomposition.from_clusters(5, a.clusters)

    def test_out_of_range(self):
        with pytest.raises(ParameterError):
            enumerate_decompositions(1)
        with pytest.raises(ParameterError):
            enumerate_decompositions(9)
        with pytest.raises(ParameterError):
            enumerate_decompositions(4, k=5)


class TestRefinement:
    def test_finest_refines_everything(self):
        for a in enumerate_decompositions(4):
            assert is_refinement(finest(4), a)

    def test_counterexample(self):
        b = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        a = ClusterDecomposition.from_clusters(3, [[1], [2, 3]])
        assert not is_refinement(b, a)

    def test_pair_count_matches_brute_force(self):
        """Count of ordered refinement pairs for N=4 against subset checks."""
        all4 = enumerate_decompositions(4)
        oracle = 0
        for b in all4:
            for a in all4:
                sets_a = [set(c) for c in a.clusters]
                if all(any(set(cb) <= ca for ca in sets_a) for cb in b.clusters):
                    oracle += 1
        got = sum(is_refinement(b, a) for b in all4 for a in all4)
        assert got == oracle

    def test_mismatched_n(self):
        with pytest.raises(ParameterError):
            is_refinement(finest(3), finest(4))

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_partial_order(self, n):
        decs = enumerate_decompositions(n)
        for a in decs:
            assert is_refinement(a, a)
        for a in decs:
            for b in decs:
                if is_refinement(a, b) and is_refinement(b, a):
                    assert a == b
        for a in decs:
            for b in decs:
                if not is_refinement(a, b):
                    continue
                for c in decs:
                    if is_refinement(b, c):
                        assert is_refinement(a, c)


class TestPairLeq:
    def test_true_case(self):
        a = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        assert pair_leq(1, 2, a)

    def test_false_case(self):
        a = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        assert not pair_leq(1, 3, a)

    def test_invalid_order(self):
        with pytest.raises(ParameterError):
            pair_leq(2, 1, finest(3))

    def test_against_same_cluster_oracle(self):
        for a in enumerate_decompositions(4):
            for i, j in itertools.combinations(range(1, 5), 2):
                oracle = any({i, j} <= set(c) for c in a.clusters)
                assert pair_leq(i, j, a) == oracle


class TestMerge:
    def test_simple_merge(self):
        a = finest(3)
        d = merge_by_pair(a, 1, 2)
        assert d == ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        assert d.size == a.size - 1

    def test_cross_cluster_merge(self):
        a = ClusterDecomposition.from_clusters(4, [[1, 2], [3, 4]])
        d = merge_by_pair(a, 2, 3)
        assert d == coarsest(4)

    def test_undefined_for_internal_pair(self):
        a = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        with pytest.raises(ParameterError):
            merge_by_pair(a, 1, 2)

    def test_merge_graph_reaches_all_decompositions(self):
        """BFS over merges from the finest decomposition covers all 15 (N=4)."""
        seen = {finest(4)}
        frontier = [finest(4)]
        while frontier:
            a = frontier.pop()
            for i, j in itertools.combinations(range(1, 5), 2):
                if not pair_leq(i, j, a):
                    d = merge_by_pair(a, i, j)
                    if d not in seen:
                        seen.add(d)
                        frontier.append(d)
        assert seen == set(enumerate_decompositions(4))

    def test_merge_is_least_upper_bound(self):
        """merge(a,i,j) is the least d >= a with (i,j) <= d, brute force N=4."""
        decs = enumerate_decompositions(4)
        for a in decs:
            for i, j in itertools.combinations(range(1, 5), 2):
                if pair_leq(i, j, a):
                    continue
                d = merge_by_pair(a, i, j)
                assert is_refinement(a, d) and pair_leq(i, j, d)
                for c in decs:
                    if is_refinement(a, c) and pair_leq(i, j, c):
                        assert is_refinement(d, c)


class TestLinkCount:
    @pytest.mark.parametrize("k,expected", [(2, 1), (3, 3), (5, 10)])
    def test_binomial(self, k, expected):
        assert link_count(finest(k)) == expected

    def test_requires_two_clusters(self):
        with pytest.raises(ParameterError):
            link_count(coarsest(3))


class TestSerialization:
    def test_round_trip(self):
        a = ClusterDecomposition.from_clusters(4, [[3], [1, 2], [4]])
        assert a.to_json() == "[[1, 2], [3], [4]]"
        assert ClusterDecomposition.from_json(4, a.to_json()) == a


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.data())
def test_canonicalization_is_order_insensitive(n, data):
    decs = enumerate_decompositions(n)
    a = data.draw(st.sampled_from(decs))
    shuffled = data.draw(st.permutations([list(c) for c in a.clusters]))
    shuffled = [data.draw(st.permutations(c)) for c in shuffled]
    assert ClusterDecomposition.from_clusters(n, shuffled) == a
