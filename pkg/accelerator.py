"""Accelerator contract and the decorator base."""
from __future__ import annotations

from dataclasses import dataclass, field

from buffer import QuantumBuffer
from hetmap import HetMap
from log import get_logger
from transforms import SwapRouting

logger = get_logger("accelerator")


@dataclass
class AcceleratorInfo:
    name: str
    connectivity: list[tuple[int, int]] = field(default_factory=list)
    properties: HetMap = field(default_factory=HetMap)


class Accelerator:
    """Executes composites into buffers.

    Subclasses implement `name()` and `execute_one(buffer, composite, options)`;
    the base handles option merging and the list overload, which appends one
    child buffer per composite labeled by the composite's name.
    """

    def __init__(self):
        self.options = HetMap()

    def name(self) -> str:
        raise NotImplementedError

    def initialize(self, options=None):
        self.options = HetMap.coerce(options or {}).copy()
        return self

    def update_configuration(self, options):
        self.options.update(options)

    def execute(self, buffer: QuantumBuffer, program, options=None):
        merged = self.options.copy().update(options or {})
        if isinstance(program, (list, tuple)):
            self.execute_batch(buffer, list(program), merged)
        else:
            self.execute_one(buffer, program, merged)

    def execute_batch(self, buffer: QuantumBuffer, programs: list, options: HetMap):
        logger.debug(f"{self.name()}: executing {len(programs)} composite(s)")
        for composite in programs:
            child = QuantumBuffer(buffer.size, name=composite.name)
            self.execute_one(child, composite, options)
            buffer.append_child(composite.name, child)

    def execute_one(self, buffer: QuantumBuffer, composite, options: HetMap):
        raise NotImplementedError

    def get_connectivity(self) -> list[tuple[int, int]]:
        if "connectivity" not in self.options:
            return []
        return [(int(a), int(b)) for a, b in self.options["connectivity"]]

    def info(self) -> AcceleratorInfo:
        return AcceleratorInfo(self.name(), self.get_connectivity())

    def get_ir_transformations(self) -> list:
        """Hardware-dependent transformations applied at compile time."""
        if self.get_connectivity():
            return [SwapRouting()]
        return []

    def is_remote(self) -> bool:
        return False

    def __repr__(self):
        return f"{type(self).__name__}({self.name()!r})"


class AcceleratorDecorator(Accelerator):
    """Wraps another accelerator; everything not overridden is delegated."""

    def __init__(self, decorated: Accelerator | None = None):
        super().__init__()
        self.decorated = decorated

    def set_decorated(self, decorated: Accelerator):
        self.decorated = decorated
        return self

    def __inner(self) -> Accelerator:
        if self.decorated is None:
            raise RuntimeError(f"decorator '{self.name()}' has no accelerator to wrap")
        return self.decorated

    def execute(self, buffer, program, options=None):
        merged = self.options.copy().update(options or {})
        self.__inner().execute(buffer, program, merged)
        if isinstance(program, (list, tuple)):
            if not program:
                return
            for _, child in buffer.children[-len(program):]:
                self.post_process(child, merged)
        else:
            self.post_process(buffer, merged)

    def post_process(self, buffer: QuantumBuffer, options: HetMap):
        pass

    def get_connectivity(self):
        return self.__inner().get_connectivity()

    def info(self) -> AcceleratorInfo:
        return self.__inner().info()

    def get_ir_transformations(self):
        return self.__inner().get_ir_transformations()

    def is_remote(self):
        return self.__inner().is_remote()
