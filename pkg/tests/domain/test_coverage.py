import pytest

from network_aggregation.domain.agent_graph import (
    build_agent_graph, cyclic_path_assignment)
from network_aggregation.domain.coverage import (
    check_m_coverage, minimal_coverage_window)
from network_aggregation.errors import InvalidDimension, NotAPath


def _path(feature_sets, d):
    edges = [(agent - 1, agent) for agent in range(2, len(feature_sets) + 1)]
    return build_agent_graph(edges, feature_sets, d)


def test_alternating_path_is_covered():
    result = check_m_coverage(_path([{1}, {2}, {1}, {2}], 2), 2, 2)
    assert result.covered
    assert result.first_violation is None
    assert result


def test_first_violation_reported():
    result = check_m_coverage(_path([{1}, {1}, {2}], 2), 2, 2)
    assert not result.covered
    assert result.first_violation == 1


def test_violation_inside_path():
    result = check_m_coverage(_path([{1}, {2}, {2}, {2}, {1}], 2), 2, 2)
    assert result.first_violation == 2


@pytest.mark.parametrize("k, passes", [(2, 3), (3, 3), (4, 2), (5, 1)])
def test_cyclic_assignment_is_k_covered(k, passes):
    graph = cyclic_path_assignment(k, passes * k)
    assert check_m_coverage(graph, k).covered
    if k * passes > k:
        assert not check_m_coverage(graph, k - 1).covered


def test_coverage_grows_with_window():
    graph = _path([{1}, {2}, {3}, {1}, {1}, {2}, {3}], 3)
    covered = [check_m_coverage(graph, window).covered
               for window in range(1, 8)]
    first = covered.index(True)
    assert all(covered[first:])
    assert minimal_coverage_window(graph) == first + 1 == 4


def test_never_covered():
    assert minimal_coverage_window(_path([{1}, {1}], 2)) is None


@pytest.mark.parametrize("window", [0, 5])
def test_window_out_of_range(window):
    with pytest.raises(InvalidDimension):
        check_m_coverage(_path([{1}, {2}, {1}, {2}], 2), window)


def test_coverage_needs_a_path():
    graph = build_agent_graph([(1, 3), (2, 3)], [{1}, {2}, {1}], 2)
    with pytest.raises(NotAPath):
        check_m_coverage(graph, 2)
