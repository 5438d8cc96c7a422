"""Public API: framework lifecycle, typed service getters, qalloc and the qasm() directive."""
from __future__ import annotations

import threading

import click

from algorithms import DDCL, VQE
from annealer import AnnealingSolver
from buffer import QuantumBuffer, qalloc
from client import RemoteAccelerator
from decorators import IdentityDecorator, ReadoutErrorDecorator
from errors import DoubleInitialize, MissingDirective, NameNotCompiled, SourceSyntaxError
from generators import GENERATORS
from hetmap import HetMap, Variant
from ir import CompositeNode, IRContainer, QuantumIRProvider
from log import configure, get_logger
from observable import FermionOperator, JordanWignerTransform, PauliOperator
from openqasm import OpenQasmCompiler
from optimizers import GradientDescent, NelderMead
from quil import QuilCompiler
from registry import get_service, register_service, services
from simulator import StatevectorSimulator
from transforms import IdentityEmbedding, IdentityTransformation, SwapRouting
from xasm import XasmCompiler

logger = get_logger("api")

# Boolean-only global flags; they never consume the following argument.
FLAGS = ("verbose", "plugin-list")

BUILTINS = {
    "compiler": (XasmCompiler, QuilCompiler, OpenQasmCompiler),
    "accelerator": (StatevectorSimulator, RemoteAccelerator, AnnealingSolver),
    "accelerator-decorator": (ReadoutErrorDecorator, IdentityDecorator),
    "optimizer": (NelderMead, GradientDescent),
    "algorithm": (VQE, DDCL),
    "observable": (PauliOperator, FermionOperator),
    "observabletransform": (JordanWignerTransform,),
    "irprovider": (QuantumIRProvider,),
    "irtransformation": (IdentityTransformation, SwapRouting),
    "embedding": (IdentityEmbedding,),
}

options = HetMap()
_initialized = False


def parse_args(args) -> HetMap:
    """`--key value` and `--key=value` become text options, bare flags become True."""
    parsed = HetMap()
    args = list(args or [])
    i = 0
    while i < len(args):
        arg = args[i]
        i += 1
        if not arg.startswith("--") or len(arg) == 2:
            logger.debug(f"ignoring positional argument {arg!r}")
            continue
        key = arg[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            parsed.insert(key, value)
        elif key not in FLAGS and i < len(args) and not args[i].startswith("--"):
            parsed.insert(key, args[i])
            i += 1
        else:
            parsed.insert(key, True)
    return parsed


def _register_builtins():
    for kind, classes in BUILTINS.items():
        for cls in classes:
            register_service(kind, cls().name(), cls)
    for name, cls in GENERATORS.items():
        register_service("composite-generator", name, cls)


def initialize(args=None):
    global _initialized
    if _initialized:
        raise DoubleInitialize()
    parsed = parse_args(args)
    options.update(parsed)
    if parsed.get_or("verbose", Variant.BOOL, False):
        configure(verbose=True)
    _register_builtins()
    _initialized = True
    logger.debug(f"initialized with {len(services)} service(s)")
    if parsed.get_or("plugin-list", Variant.BOOL, False):
        for kind, name in list_services():
            click.echo(f"{kind}:{name}")


def finalize():
    global _initialized
    if not _initialized:
        return
    services.clear()
    compiled.clear()
    for key in options.keys():
        options.remove(key)
    _initialized = False
    logger.debug("finalized")


def is_initialized() -> bool:
    return _initialized


def list_services() -> list[tuple[str, str]]:
    return services.services()


# Typed getters

def get_accelerator(name, accelerator_options=None):
    return get_service("accelerator", name).initialize(accelerator_options or {})


def get_accelerator_decorator(name, decorator_options=None):
    return get_service("accelerator-decorator", name).initialize(decorator_options or {})


def decorate_accelerator(name, inner, decorator_options=None):
    return get_accelerator_decorator(name, decorator_options).set_decorated(inner)


def get_compiler(name):
    return get_service("compiler", name)


def get_optimizer(name, optimizer_options=None):
    return get_service("optimizer", name).set_options(optimizer_options or {})


def get_algorithm(name, algorithm_options=None):
    algorithm = get_service("algorithm", name)
    if algorithm_options is not None:
        algorithm.initialize(algorithm_options)
    return algorithm


def get_observable(name, source=None):
    observable = get_service("observable", name)
    if source is not None:
        return observable.from_string(source)
    return observable


def get_observable_transform(name):
    return get_service("observabletransform", name)


def get_ir_provider(name="quantum"):
    return get_service("irprovider", name)


def get_ir_transformation(name):
    return get_service("irtransformation", name)


def get_embedding(name="identity"):
    return get_service("embedding", name)


def qbit(n: int, name: str = "q") -> QuantumBuffer:
    return qalloc(n, name)


# Compilation

def compile_source(compiler_name, source, accelerator=None) -> IRContainer:
    return get_compiler(compiler_name).compile(source, accelerator)


def translate(compiler_name, composite: CompositeNode) -> str:
    return get_compiler(compiler_name).translate(composite)


def apply_ir_transformation(name, composite, accelerator=None, transform_options=None) -> CompositeNode:
    return get_ir_transformation(name).transform(composite, accelerator, HetMap.coerce(transform_options or {}))


class CompilationDB:
    """Circuits produced by qasm(), by name; recompiling a name replaces it."""

    def __init__(self):
        self.__circuits: dict[str, CompositeNode] = {}
        self.__lock = threading.Lock()

    def store(self, composite: CompositeNode):
        with self.__lock:
            self.__circuits[composite.name] = composite

    def get(self, name) -> CompositeNode:
        try:
            return self.__circuits[name]
        except KeyError:
            raise NameNotCompiled(name) from None

    def known(self) -> dict[str, CompositeNode]:
        return dict(self.__circuits)

    def clear(self):
        with self.__lock:
            self.__circuits.clear()

    def __contains__(self, name):
        return name in self.__circuits

    def __len__(self):
        return len(self.__circuits)


compiled = CompilationDB()


class _CircuitBlock:
    def __init__(self, name):
        self.name = name
        self.parameters = None
        self.qbit = None
        self.body: list[str] = []


def _directive_blocks(source: str) -> tuple[str, list[_CircuitBlock]]:
    compiler_name = None
    blocks: list[_CircuitBlock] = []
    for number, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line.startswith("."):
            if blocks:
                blocks[-1].body.append(raw)
            elif line:
                raise SourceSyntaxError("statement before the first .circuit", number, 1)
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword == ".compiler":
            if compiler_name is not None:
                raise SourceSyntaxError("more than one .compiler directive", number, 1)
            compiler_name = rest
        elif keyword == ".circuit":
            if not rest:
                raise SourceSyntaxError(".circuit needs a name", number, 1)
            blocks.append(_CircuitBlock(rest))
        elif keyword in (".parameters", ".qbit"):
            if not blocks:
                raise SourceSyntaxError(f"{keyword} before the first .circuit", number, 1)
            if keyword == ".qbit":
                blocks[-1].qbit = rest
            else:
                blocks[-1].parameters = [p.strip() for p in rest.split(",") if p.strip()]
        else:
            raise SourceSyntaxError(f"unknown directive {keyword}", number, 1)
    if not compiler_name:
        raise MissingDirective(".compiler")
    if not blocks:
        raise MissingDirective(".circuit")
    return compiler_name, blocks


def qasm(source: str) -> list[CompositeNode]:
    """Compile every `.circuit` block with the `.compiler` named in the source.

    Blocks without `.parameters` declare the variables they use in first-use
    order; later blocks may call earlier ones (from this or previous calls).
    """
    compiler_name, blocks = _directive_blocks(source)
    compiler = get_compiler(compiler_name)
    results = []
    for block in blocks:
        known = compiled.known()
        composite = compiler.compile_directive(block.name, "\n".join(block.body), block.parameters, block.qbit, known)
        compiled.store(composite)
        results.append(composite)
        logger.debug(f"qasm: {block.name} ({composite.n_instructions()} instruction(s), variables {composite.variables})")
    return results


def get_compiled(name) -> CompositeNode:
    return compiled.get(name)
