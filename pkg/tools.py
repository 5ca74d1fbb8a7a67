# tools.py
"""
Graph helpers shared by the deciders: cycle witnesses, class partitions and
deterministic orderings.
"""
from typing import Callable, Hashable, Iterable, Mapping, Optional

import networkx as nx
from networkx.utils import UnionFind


def find_cycle(successors: Mapping[Hashable, Iterable[Hashable]]) -> Optional[list]:
    """
    Iterative DFS over a plain adjacency mapping.

    Args:
        successors: node -> iterable of successor nodes. Nodes that only appear
            as successors are treated as sinks.

    Returns:
        list: the nodes of one cycle in order (a self-loop gives a one-node list),
        or None when the graph is acyclic.
    """
    WHITE, GREY, BLACK = 0, 1, 2
    color: dict = {}
    parent: dict = {}
    for root in successors:
        if color.get(root, WHITE) != WHITE:
            continue
        color[root] = GREY
        stack = [(root, iter(successors.get(root, ())))]
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                state = color.get(nxt, WHITE)
                if state == GREY:
                    # walk parents back from node to nxt
                    cycle = [node]
                    while cycle[-1] != nxt:
                        cycle.append(parent[cycle[-1]])
                    cycle.reverse()
                    return cycle
                if state == WHITE:
                    color[nxt] = GREY
                    parent[nxt] = node
                    stack.append((nxt, iter(successors.get(nxt, ()))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
    return None


def graph_cycle(graph: nx.DiGraph) -> Optional[list]:
    """
    Cycle witness for a networkx graph.

    Args:
        graph: a DiGraph or MultiDiGraph. Self-loops count as cycles.

    Returns:
        list: the nodes of one cycle in order, or None.
    """
    try:
        edges = nx.find_cycle(graph, orientation="original")
    except nx.NetworkXNoCycle:
        return None
    return [edge[0] for edge in edges]


def partition(nodes: Iterable[Hashable], links: Iterable[tuple[Hashable, Hashable]], key: Callable = str) -> dict:
    """
    Union-find closure of `links` treated as undirected.

    Args:
        nodes: every node to classify (isolated nodes become singleton classes).
        links: node pairs that belong to the same class.
        key: orders members; the smallest member names its class.

    Returns:
        dict: node -> class representative (the class's smallest member).
    """
    uf = UnionFind()
    nodes = list(nodes)
    for node in nodes:
        uf[node]
    for a, b in links:
        uf.union(a, b)
    rep: dict = {}
    for members in uf.to_sets():
        smallest = min(members, key=key)
        for member in members:
            rep[member] = smallest
    return rep


def ordered_classes(rep: Mapping[Hashable, Hashable], edges: Iterable[tuple[Hashable, Hashable]], key: Callable = str) -> list:
    """
    Topological order of class representatives, ties broken by `key`.

    Args:
        rep: node -> class representative, as returned by partition().
        edges: class-level edges (rep, rep); must be acyclic.
        key: tie-break among classes with no pending predecessor.

    Returns:
        list: class representatives, predecessors first.
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(set(rep.values()))
    graph.add_edges_from(edges)
    return list(nx.lexicographical_topological_sort(graph, key=key))
