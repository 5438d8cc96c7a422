"""Intermediate representation: instruction leaves, composite trees, graph view
and JSON persistence."""
from __future__ import annotations

import copy
import json
import numbers
import re
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional

import networkx as nx

import gates
from errors import ArityMismatch, ParseError, UnboundSymbol, UnexpandedComposite, UnknownInstruction
from hetmap import HetMap

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_VAR = r"[A-Za-z_]\w*(?:\[\d+\])?"
_SYMBOL_RE = re.compile(
    rf"^\s*(?P<neg>-)?\s*(?:(?P<scale>{_NUM})\s*\*\s*)?(?P<var>{_VAR})\s*"
    rf"(?:(?P<op>[*/])\s*(?P<factor>{_NUM})\s*)?"
    rf"(?:(?P<sign>[+-])\s*(?P<offset>{_NUM})\s*)?$"
)


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class Symbol:
    """A variable with the restricted arithmetic `[-][c*]v[(*|/)c][(+|-)c]`.

    Evaluation follows the written operation order so `theta/2` divides
    rather than multiplying by a rounded reciprocal.
    """

    text: str
    var: str = field(compare=False)
    mul: float = field(compare=False, default=1.0)
    div: Optional[float] = field(compare=False, default=None)
    offset: float = field(compare=False, default=0.0)

    @classmethod
    def parse(cls, text: str) -> "Symbol":
        m = _SYMBOL_RE.match(text)
        if m is None:
            raise ParseError(f"unsupported symbol expression '{text}'")
        mul = float(m["scale"]) if m["scale"] else 1.0
        if m["neg"]:
            mul = -mul
        div = None
        if m["op"] == "*":
            mul *= float(m["factor"])
        elif m["op"] == "/":
            div = float(m["factor"])
            if div == 0.0:
                raise ParseError(f"division by zero in '{text}'")
        offset = 0.0
        if m["offset"]:
            offset = float(m["offset"]) if m["sign"] == "+" else -float(m["offset"])
        return cls(text.strip(), m["var"], mul, div, offset)

    @classmethod
    def affine(cls, var: str, scale: float = 1.0, offset: float = 0.0) -> "Symbol":
        if scale == 1.0:
            text = var
        elif scale == -1.0:
            text = f"-{var}"
        else:
            text = f"{_fmt(scale)}*{var}"
        if offset > 0:
            text += f"+{_fmt(offset)}"
        elif offset < 0:
            text += f"-{_fmt(-offset)}"
        return cls.parse(text)

    def evaluate(self, value: float) -> float:
        x = self.mul * float(value)
        if self.div is not None:
            x = x / self.div
        return x + self.offset

    def linear(self) -> tuple[float, float]:
        scale = self.mul / self.div if self.div is not None else self.mul
        return scale, self.offset

    def rename(self, var: str) -> "Symbol":
        start, end = _SYMBOL_RE.match(self.text).span("var")
        return Symbol.parse(self.text[:start] + var + self.text[end:])

    def substitute(self, arg):
        """Replace the variable by a real or by another symbol."""
        if isinstance(arg, Symbol):
            a, b = arg.linear()
            if a == 1.0 and b == 0.0:
                return self.rename(arg.var)
            scale, offset = self.linear()
            return Symbol.affine(arg.var, scale * a, scale * b + offset)
        return self.evaluate(float(arg))

    def __str__(self):
        return self.text


PARAM_KINDS = ("int", "real", "sym", "txt")


@dataclass(frozen=True)
class Param:
    kind: str
    value: Any

    @classmethod
    def of(cls, value) -> "Param":
        if isinstance(value, Param):
            return value
        if isinstance(value, Symbol):
            return cls("sym", value)
        if isinstance(value, bool):
            raise ArityMismatch(f"boolean is not a valid instruction parameter: {value}")
        if isinstance(value, numbers.Integral):
            return cls("int", int(value))
        if isinstance(value, numbers.Real):
            return cls("real", float(value))
        if isinstance(value, str):
            return cls("sym", Symbol.parse(value))
        raise ArityMismatch(f"unsupported instruction parameter {value!r}")

    @classmethod
    def text(cls, value: str) -> "Param":
        return cls("txt", str(value))

    @property
    def is_symbolic(self) -> bool:
        return self.kind == "sym"

    @property
    def is_numeric(self) -> bool:
        return self.kind in ("int", "real")

    def to_float(self) -> float:
        if not self.is_numeric:
            raise ValueError(f"parameter {self} is not numeric")
        return float(self.value)

    def evaluate(self, bindings: dict) -> "Param":
        if self.kind != "sym":
            return self
        var = self.value.var
        if var not in bindings:
            raise UnboundSymbol(var, bindings)
        return Param("real", self.value.evaluate(bindings[var]))

    def to_json(self) -> dict:
        v = self.value.text if self.kind == "sym" else self.value
        return {"t": self.kind, "v": v}

    @classmethod
    def from_json(cls, data) -> "Param":
        if not isinstance(data, dict) or data.get("t") not in PARAM_KINDS or "v" not in data:
            raise ParseError(f"malformed parameter {data!r}")
        kind, v = data["t"], data["v"]
        if kind == "int":
            return cls("int", int(v))
        if kind == "real":
            return cls("real", float(v))
        if kind == "sym":
            return cls("sym", Symbol.parse(str(v)))
        return cls("txt", str(v))

    def __str__(self):
        if self.kind == "txt":
            return f'"{self.value}"'
        return str(self.value)


class InstructionNode:
    """One QASM-level operation."""

    def __init__(self, name, bits, params=(), enabled=True, cbits=None):
        self.name = name
        self.bits = [int(b) for b in bits]
        self.params = [Param.of(p) for p in params]
        self.enabled = enabled
        self.cbits = list(cbits) if cbits is not None else None

    @property
    def kind(self) -> str:
        return gates.lookup(self.name).kind

    @property
    def is_measure(self) -> bool:
        return self.name == "Measure"

    @property
    def is_anneal(self) -> bool:
        return self.kind == gates.ANNEAL

    def classical_targets(self) -> list[int]:
        return list(self.cbits) if self.cbits is not None else list(self.bits)

    def symbols(self) -> set[str]:
        return {p.value.var for p in self.params if p.is_symbolic}

    def is_parameterized(self) -> bool:
        return any(p.is_symbolic for p in self.params)

    def evaluate(self, bindings: dict) -> "InstructionNode":
        return InstructionNode(
            self.name, self.bits, [p.evaluate(bindings) for p in self.params], self.enabled, self.cbits
        )

    def copy(self) -> "InstructionNode":
        return InstructionNode(self.name, self.bits, self.params, self.enabled, self.cbits)

    def accept(self, visitor):
        if self.enabled:
            visitor.visit(self)

    def leaves(self, enabled_only=True) -> Iterator["InstructionNode"]:
        if self.enabled or not enabled_only:
            yield self

    def to_json(self) -> dict:
        data = {
            "kind": "instruction",
            "name": self.name,
            "bits": list(self.bits),
            "params": [p.to_json() for p in self.params],
            "enabled": self.enabled,
        }
        if self.cbits is not None:
            data["cbits"] = list(self.cbits)
        return data

    def __eq__(self, other):
        if not isinstance(other, InstructionNode):
            return NotImplemented
        return (
            self.name == other.name
            and self.bits == other.bits
            and self.params == other.params
            and self.enabled == other.enabled
            and self.cbits == other.cbits
        )

    def __repr__(self):
        args = [f"q{b}" for b in self.bits] + [str(p) for p in self.params]
        flag = "" if self.enabled else " [disabled]"
        return f"{self.name}({', '.join(args)}){flag}"


class CompositeNode:
    """n-ary instruction tree with named free variables."""

    def __init__(self, name: str, variables=(), children=None):
        if not name:
            raise ValueError("composite name must be non-empty")
        self.name = name
        self.variables = list(variables)
        self._children: list = []
        self.metadata = HetMap()
        self.enabled = True
        for child in children or []:
            self.add_instruction(child)

    @property
    def children(self) -> list:
        return list(self._children)

    def add_instruction(self, node):
        if not isinstance(node, (InstructionNode, CompositeNode)):
            raise TypeError(f"cannot add {node!r} to composite '{self.name}'")
        self._children.append(node)
        return self

    def add_instructions(self, nodes):
        for node in nodes:
            self.add_instruction(node)
        return self

    def add_variable(self, var: str):
        if var not in self.variables:
            self.variables.append(var)

    def get_instruction(self, index: int):
        return self._children[index]

    def remove_instruction(self, index: int):
        return self._children.pop(index)

    def replace_instruction(self, index: int, node):
        self._children[index] = node

    def clear(self):
        self._children.clear()

    def enable(self, index: int):
        self._children[index].enabled = True

    def disable(self, index: int):
        self._children[index].enabled = False

    def n_instructions(self) -> int:
        return sum(1 for _ in self.leaves(enabled_only=False))

    def n_children(self) -> int:
        return len(self._children)

    def leaves(self, enabled_only=True) -> Iterator[InstructionNode]:
        if enabled_only and not self.enabled:
            return
        for child in self._children:
            yield from child.leaves(enabled_only)

    def symbols(self) -> set[str]:
        found = set()
        for leaf in self.leaves(enabled_only=False):
            found |= leaf.symbols()
        return found

    def validate(self):
        """Tree-integrity walk: every descendant symbol is a declared variable."""
        declared = set(self.variables)
        for child in self._children:
            if isinstance(child, CompositeNode):
                missing = set(child.variables) - declared
                if missing:
                    raise UnboundSymbol(sorted(missing)[0], self.variables)
                child.validate()
            else:
                for var in child.symbols():
                    if var not in declared:
                        raise UnboundSymbol(var, self.variables)

    def is_parameterized(self) -> bool:
        return any(leaf.is_parameterized() for leaf in self.leaves(enabled_only=False))

    def is_expanded(self) -> bool:
        return all(c.is_expanded() for c in self._children if isinstance(c, CompositeNode))

    def expand(self, options=None) -> bool:
        return True

    def max_qubit(self) -> int:
        return max((b for leaf in self.leaves(enabled_only=False) for b in leaf.bits), default=-1)

    def evaluate(self, values) -> "CompositeNode":
        values = [float(v) for v in values]
        if len(values) != len(self.variables):
            raise ArityMismatch(
                f"composite '{self.name}' has {len(self.variables)} variables, got {len(values)} values"
            )
        return self._evaluate_with(dict(zip(self.variables, values)))

    def _evaluate_with(self, bindings: dict) -> "CompositeNode":
        if not self.is_expanded_self():
            raise UnexpandedComposite(self.name)
        result = CompositeNode(self.name)
        result.metadata = self.metadata.copy()
        result.enabled = self.enabled
        for child in self._children:
            if isinstance(child, CompositeNode):
                result.add_instruction(child._evaluate_with(bindings))
            else:
                result.add_instruction(child.evaluate(bindings))
        return result

    def is_expanded_self(self) -> bool:
        return True

    def copy(self) -> "CompositeNode":
        return copy.deepcopy(self)

    def accept(self, visitor):
        if not self.enabled:
            return
        for child in self._children:
            child.accept(visitor)

    def to_graph(self) -> "InstrGraph":
        return InstrGraph.build(list(self.leaves()))

    def depth(self) -> int:
        return self.to_graph().depth()

    def to_json(self) -> dict:
        return {
            "kind": "composite",
            "name": self.name,
            "variables": list(self.variables),
            "children": [c.to_json() for c in self._children],
        }

    def __eq__(self, other):
        if not isinstance(other, CompositeNode):
            return NotImplemented
        return (
            self.name == other.name
            and self.variables == other.variables
            and self.enabled == other.enabled
            and self._children == other._children
        )

    def __repr__(self):
        return f"CompositeNode({self.name!r}, variables={self.variables}, instructions={self.n_instructions()})"

    def __iter__(self):
        return iter(self._children)

    def __len__(self):
        return len(self._children)


class InstrGraph:
    """Qubit-dependency DAG; node 0 is entry, node n+1 is exit."""

    def __init__(self, graph: nx.DiGraph, n_instructions: int):
        self.graph = graph
        self.entry = 0
        self.exit = n_instructions + 1

    @classmethod
    def build(cls, instructions: list[InstructionNode]) -> "InstrGraph":
        g = nx.DiGraph()
        n = len(instructions)
        g.add_node(0, instruction=None, name="entry")
        for i, inst in enumerate(instructions, start=1):
            g.add_node(i, instruction=inst, name=inst.name, bits=list(inst.bits))
        g.add_node(n + 1, instruction=None, name="exit")

        last: dict[int, int] = {}
        for i, inst in enumerate(instructions, start=1):
            for q in inst.bits:
                g.add_edge(last.get(q, 0), i, qubit=q)
                last[q] = i
        for q, node in last.items():
            g.add_edge(node, n + 1, qubit=q)
        # nodes acting on no qubit still need to sit between entry and exit
        for i in range(1, n + 1):
            if g.in_degree(i) == 0:
                g.add_edge(0, i)
            if g.out_degree(i) == 0:
                g.add_edge(i, n + 1)
        if n == 0:
            g.add_edge(0, 1)
        return cls(g, n)

    def instruction(self, node: int) -> Optional[InstructionNode]:
        return self.graph.nodes[node]["instruction"]

    def edges(self) -> list[tuple[int, int]]:
        return list(self.graph.edges())

    def has_edge(self, a: int, b: int) -> bool:
        return self.graph.has_edge(a, b)

    def has_path(self, a: int, b: int) -> bool:
        return nx.has_path(self.graph, a, b)

    def n_nodes(self) -> int:
        return self.graph.number_of_nodes()

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.graph)

    def depth(self) -> int:
        return nx.dag_longest_path_length(self.graph) - 1


class InstructionVisitor:
    """Double dispatch on instruction name: `visit_<lowercase name>`.

    Kinds without a handler go to `null`.
    """

    def visit(self, inst: InstructionNode):
        handler = getattr(self, f"visit_{inst.name.lower()}", None)
        if handler is None:
            return self.null(inst)
        return handler(inst)

    def null(self, inst: InstructionNode):
        pass


class IRContainer:
    def __init__(self, composites=()):
        self._composites: dict[str, CompositeNode] = {}
        for c in composites:
            self.add_composite(c)

    def add_composite(self, composite: CompositeNode):
        if composite.name in self._composites:
            raise ValueError(f"duplicate composite name '{composite.name}'")
        self._composites[composite.name] = composite

    def get_composite(self, name: str) -> CompositeNode:
        try:
            return self._composites[name]
        except KeyError:
            raise KeyError(f"no composite named '{name}'") from None

    def get_composites(self) -> list[CompositeNode]:
        return list(self._composites.values())

    def names(self) -> list[str]:
        return list(self._composites)

    def __contains__(self, name):
        return name in self._composites

    def __len__(self):
        return len(self._composites)

    def __iter__(self):
        return iter(self._composites.values())

    def __eq__(self, other):
        if not isinstance(other, IRContainer):
            return NotImplemented
        return self.get_composites() == other.get_composites()


def create_instruction(name: str, bits, params=(), cbits=None) -> InstructionNode:
    gate = gates.lookup(name)
    bits = list(bits)
    if len(bits) != gate.n_qubits:
        raise ArityMismatch(f"{gate.name} acts on {gate.n_qubits} qubit(s), got {len(bits)}")
    if any(int(b) < 0 for b in bits):
        raise ArityMismatch(f"negative qubit index in {bits}")
    params = [Param.of(p) for p in params]
    if len(params) != gate.n_params:
        raise ArityMismatch(f"{gate.name} takes {gate.n_params} parameter(s), got {len(params)}")
    if gate.kind == gates.ANNEAL:
        bits = sorted(bits)
    elif gate.n_qubits == 2 and bits[0] == bits[1]:
        raise ArityMismatch(f"{gate.name} needs two distinct qubits, got {bits}")
    if cbits is not None and gate.kind != gates.MEASURE:
        raise ArityMismatch(f"{gate.name} takes no classical targets")
    return InstructionNode(gate.name, bits, params, cbits=cbits)


def create_composite(name: str, variables=()) -> CompositeNode:
    return CompositeNode(name, variables)


class QuantumIRProvider:
    def name(self) -> str:
        return "quantum"

    def create_instruction(self, name, bits, params=(), cbits=None) -> InstructionNode:
        return create_instruction(name, bits, params, cbits)

    def create_composite(self, name, variables=()) -> CompositeNode:
        return create_composite(name, variables)

    def create_ir(self) -> IRContainer:
        return IRContainer()


def node_from_json(data):
    if not isinstance(data, dict):
        raise ParseError(f"expected an object, got {type(data).__name__}")
    kind = data.get("kind")
    if kind == "composite":
        try:
            composite = CompositeNode(data["name"], data.get("variables", []))
            for child in data.get("children", []):
                composite.add_instruction(node_from_json(child))
        except KeyError as e:
            raise ParseError(f"composite missing field {e}") from None
        except ValueError as e:
            raise ParseError(str(e)) from None
        return composite
    if kind == "instruction":
        try:
            inst = create_instruction(
                data["name"],
                data["bits"],
                [Param.from_json(p) for p in data.get("params", [])],
                data.get("cbits"),
            )
        except KeyError as e:
            raise ParseError(f"instruction missing field {e}") from None
        except (UnknownInstruction, ValueError) as e:
            raise ParseError(str(e)) from None
        inst.enabled = bool(data.get("enabled", True))
        return inst
    raise ParseError(f"unknown node kind {kind!r}")


def composite_from_json(data) -> CompositeNode:
    node = node_from_json(data)
    if not isinstance(node, CompositeNode):
        raise ParseError("top-level program must be a composite")
    return node


def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from None


def serialize_ir(ir: IRContainer) -> str:
    return json.dumps({"composites": [c.to_json() for c in ir]}, indent=2)


def deserialize_ir(text: str) -> IRContainer:
    data = _loads(text)
    if not isinstance(data, dict) or not isinstance(data.get("composites"), list):
        raise ParseError("expected an object with a 'composites' list")
    return IRContainer(composite_from_json(c) for c in data["composites"])


def serialize_composite(composite: CompositeNode) -> str:
    return json.dumps(composite.to_json())


def deserialize_composite(text: str) -> CompositeNode:
    return composite_from_json(_loads(text))
