"""IR transformations and the annealing embedding contract."""
from __future__ import annotations

import networkx as nx

from errors import DisconnectedQubit
from hetmap import HetMap
from ir import CompositeNode, InstructionNode, create_instruction
from log import get_logger

logger = get_logger("transforms")


class IRTransformation:
    """Takes a composite and returns a new one; the input is never modified."""

    def name(self) -> str:
        raise NotImplementedError

    def transform(self, composite: CompositeNode, accelerator=None, options=None) -> CompositeNode:
        raise NotImplementedError


class IdentityTransformation(IRTransformation):
    def name(self):
        return "identity"

    def transform(self, composite, accelerator=None, options=None):
        return composite.copy()


def _connectivity(accelerator, options: HetMap):
    if "connectivity" in options:
        return [tuple(int(q) for q in edge) for edge in options["connectivity"]]
    if accelerator is not None:
        return list(accelerator.get_connectivity())
    return []


class SwapRouting(IRTransformation):
    """Greedy shortest-path swap insertion.

    Before each two-qubit gate whose physical operands are not adjacent, the
    first operand is swapped along a shortest path until it neighbours the
    second. The output is flat; the logical-to-physical layout at the end is
    stored as metadata "final-layout" (index = logical qubit).
    """

    def name(self):
        return "swap-routing"

    def transform(self, composite, accelerator=None, options=None):
        options = HetMap.coerce(options or {})
        edges = _connectivity(accelerator, options)
        if not edges:
            return composite.copy()

        graph = nx.Graph()
        graph.add_edges_from(edges)
        n = max(composite.max_qubit() + 1, max(graph.nodes) + 1)
        l2p = list(range(n))
        p2l = list(range(n))

        routed = CompositeNode(composite.name, composite.variables)
        swaps = 0
        for leaf in composite.leaves():
            if len(leaf.bits) == 2 and not leaf.is_anneal:
                a, b = l2p[leaf.bits[0]], l2p[leaf.bits[1]]
                if not graph.has_edge(a, b):
                    try:
                        path = nx.shortest_path(graph, a, b)
                    except (nx.NetworkXNoPath, nx.NodeNotFound):
                        raise DisconnectedQubit(
                            f"no route between qubits {leaf.bits[0]} and {leaf.bits[1]} for {leaf.name}"
                        ) from None
                    for u, v in zip(path, path[1:-1]):
                        routed.add_instruction(create_instruction("Swap", [u, v]))
                        lu, lv = p2l[u], p2l[v]
                        p2l[u], p2l[v] = lv, lu
                        l2p[lu], l2p[lv] = v, u
                        swaps += 1
            cbits = leaf.classical_targets() if leaf.is_measure else leaf.cbits
            routed.add_instruction(
                InstructionNode(leaf.name, [l2p[q] for q in leaf.bits], leaf.params, cbits=cbits)
            )

        routed.metadata["final-layout"] = list(l2p)
        routed.metadata["swaps-inserted"] = swaps
        logger.debug(f"{composite.name}: inserted {swaps} swap(s)")
        return routed


class IdentityEmbedding:
    """Maps each problem variable to the hardware qubit with the same index."""

    def name(self):
        return "identity"

    def embed(self, problem_edges, hardware_edges=None) -> dict[int, list[int]]:
        variables = sorted({q for edge in problem_edges for q in edge})
        if hardware_edges:
            available = {q for edge in hardware_edges for q in edge}
            missing = [q for q in variables if q not in available]
            if missing:
                raise DisconnectedQubit(f"hardware has no qubit(s) {missing}")
        return {q: [q] for q in variables}
