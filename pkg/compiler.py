"""Shared frontend machinery: lexer, token stream, parameter expressions,
kernel headers, call inlining and the Compiler base class."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional

import gates
from errors import (
    ArityMismatch,
    ParseError,
    SourceSyntaxError,
    UndeclaredVariable,
    UnknownInstruction,
    UntranslatableInstruction,
)
from hetmap import HetMap
from ir import CompositeNode, InstructionNode, IRContainer, Param, Symbol, create_instruction
from log import get_logger
from registry import get_service, has_service

logger = get_logger("compiler")

_TOKEN_SPEC = [
    ("COMMENT", r"//[^\n]*|#[^\n]*"),
    ("NEWLINE", r"\n"),
    ("WS", r"[ \t\r]+"),
    ("NUMBER", r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?"),
    ("STRING", r'"[^"\n]*"'),
    ("ARROW", r"->"),
    ("INC", r"\+\+|--|\+=|-="),
    ("OP", r"<=|>=|==|!=|[-+*/<>=]"),
    ("IDENT", r"[A-Za-z_]\w*"),
    ("PUNCT", r"[()\[\]{},;:^.&]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{kind}>{rx})" for kind, rx in _TOKEN_SPEC))

MAX_LOOP_ITERATIONS = 100_000


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(source: str, keep_newlines=True) -> list[Token]:
    source = source.replace("−", "-")
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise SourceSyntaxError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "NEWLINE":
            if keep_newlines:
                tokens.append(Token(kind, "\n", line, pos - line_start + 1))
            line += 1
            line_start = m.end()
        elif kind not in ("WS", "COMMENT"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    return tokens


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset=0) -> Optional[Token]:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        self.pos += 1
        return tok

    def check(self, kind=None, text=None, offset=0) -> bool:
        tok = self.peek(offset)
        if tok is None:
            return False
        return (kind is None or tok.kind == kind) and (text is None or tok.text == text)

    def accept(self, kind=None, text=None) -> Optional[Token]:
        if self.check(kind, text):
            return self.next()
        return None

    def expect(self, kind=None, text=None) -> Token:
        tok = self.peek()
        if tok is None or not self.check(kind, text):
            wanted = repr(text) if text else kind
            found = repr(tok.text) if tok else "end of input"
            raise self.error(f"expected {wanted}, found {found}", tok)
        return self.next()

    def skip_newlines(self):
        while self.accept("NEWLINE"):
            pass

    def error(self, message, tok=None) -> SourceSyntaxError:
        tok = tok or self.peek() or (self.tokens[-1] if self.tokens else None)
        if tok is None:
            return SourceSyntaxError(message, 1, 1)
        return SourceSyntaxError(message, tok.line, tok.col)

    def take_balanced(self, open_text="{", close_text="}") -> list[Token]:
        """Consume `open ... close` and return the tokens strictly inside."""
        start = self.expect("PUNCT", open_text)
        depth, inner = 1, []
        while True:
            tok = self.peek()
            if tok is None:
                raise self.error(f"unbalanced '{open_text}'", start)
            self.pos += 1
            if tok.text == open_text and tok.kind == "PUNCT":
                depth += 1
            elif tok.text == close_text and tok.kind == "PUNCT":
                depth -= 1
                if depth == 0:
                    return inner
            inner.append(tok)


# Parameter expressions


@dataclass(frozen=True)
class Affine:
    """scale*var + offset; var None means a constant."""

    var: Optional[str]
    scale: float = 0.0
    offset: float = 0.0

    @classmethod
    def const(cls, value) -> "Affine":
        return cls(None, 0.0, float(value))

    @property
    def is_constant(self) -> bool:
        return self.var is None

    def to_param(self):
        if self.var is None:
            return self.offset
        return Symbol.affine(self.var, self.scale, self.offset)


class KernelContext:
    """Variables and call targets visible while compiling one kernel body."""

    def __init__(self, name, params=(), buffer=None, known=None, implicit=False):
        self.name = name
        self.declared = list(params)
        self.buffer = buffer
        self.known = known if known is not None else {}
        self.implicit = implicit
        self.vector_extent: dict[str, int] = {}
        self.composite = CompositeNode(name)

    def resolve_variable(self, tok: Token, index: Optional[int] = None) -> str:
        base = tok.text
        if base not in self.declared:
            if not self.implicit:
                raise UndeclaredVariable(base, tok.line, tok.col)
            self.declared.append(base)
        if index is None:
            return base
        self.vector_extent[base] = max(self.vector_extent.get(base, -1), index)
        return f"{base}[{index}]"

    def is_variable(self, name: str) -> bool:
        return self.implicit or name in self.declared

    def finish(self) -> CompositeNode:
        variables = []
        for p in self.declared:
            if p in self.vector_extent:
                variables.extend(f"{p}[{i}]" for i in range(self.vector_extent[p] + 1))
            else:
                variables.append(p)
        self.composite.variables = variables
        self.composite.validate()
        return self.composite


class ExpressionParser:
    """Recursive descent over + - * / with unary minus, parentheses, `pi`,
    loop integers (from `env`) and kernel variables (possibly indexed).

    Results stay affine in at most one variable.
    """

    def __init__(self, stream: TokenStream, ctx: Optional[KernelContext], env: dict):
        self.s = stream
        self.ctx = ctx
        self.env = env

    def parse(self) -> Affine:
        return self._sum()

    def _sum(self) -> Affine:
        left = self._product()
        while self.s.check("OP", "+") or self.s.check("OP", "-"):
            op = self.s.next()
            right = self._product()
            left = self._combine(left, right, 1 if op.text == "+" else -1, op)
        return left

    def _combine(self, a: Affine, b: Affine, sign, tok) -> Affine:
        if a.var and b.var and a.var != b.var:
            raise self.s.error("parameter expressions may reference one variable only", tok)
        var = a.var or b.var
        scale = a.scale + sign * b.scale
        return Affine(var if var and scale != 0 else None, scale if var else 0.0, a.offset + sign * b.offset)

    def _product(self) -> Affine:
        left = self._unary()
        while self.s.check("OP", "*") or self.s.check("OP", "/"):
            op = self.s.next()
            right = self._unary()
            if op.text == "*":
                if left.var and right.var:
                    raise self.s.error("product of two variables is not affine", op)
                if right.is_constant:
                    k = right.offset
                    left = Affine(left.var, left.scale * k, left.offset * k)
                else:
                    k = left.offset
                    left = Affine(right.var, right.scale * k, right.offset * k)
            else:
                if not right.is_constant:
                    raise self.s.error("division by a variable is not affine", op)
                if right.offset == 0.0:
                    raise self.s.error("division by zero", op)
                k = right.offset
                left = Affine(left.var, left.scale / k, left.offset / k)
        return left

    def _unary(self) -> Affine:
        if self.s.accept("OP", "-"):
            inner = self._unary()
            return Affine(inner.var, -inner.scale, -inner.offset)
        if self.s.accept("OP", "+"):
            return self._unary()
        return self._atom()

    def _atom(self) -> Affine:
        tok = self.s.next()
        if tok.kind == "NUMBER":
            return Affine.const(float(tok.text))
        if tok.kind == "PUNCT" and tok.text == "(":
            inner = self._sum()
            self.s.expect("PUNCT", ")")
            return inner
        if tok.kind == "IDENT":
            if tok.text in self.env:
                return Affine.const(self.env[tok.text])
            if tok.text == "pi":
                return Affine.const(math.pi)
            index = None
            if self.s.check("PUNCT", "["):
                self.s.next()
                index = self.integer(ExpressionParser(self.s, self.ctx, self.env).parse(), tok)
                self.s.expect("PUNCT", "]")
            if self.ctx is None:
                raise UndeclaredVariable(tok.text, tok.line, tok.col)
            return Affine(self.ctx.resolve_variable(tok, index), 1.0, 0.0)
        raise self.s.error(f"unexpected {tok.text!r} in expression", tok)

    def integer(self, value: Affine, tok) -> int:
        if not value.is_constant or value.offset != int(value.offset):
            raise self.s.error("expected an integer expression", tok)
        return int(value.offset)


def parse_param(stream: TokenStream, ctx, env):
    """Parse one parameter expression; keeps the source spelling of plain
    symbol expressions such as `theta/2`."""
    start = stream.pos
    value = ExpressionParser(stream, ctx, env).parse()
    if value.is_constant:
        return value.offset
    text = "".join(t.text for t in stream.tokens[start : stream.pos])
    try:
        symbol = Symbol.parse(text)
    except ParseError:
        return value.to_param()
    if symbol.var == value.var and symbol.linear() == (value.scale, value.offset):
        return symbol
    return value.to_param()


def parse_int(stream: TokenStream, env) -> int:
    tok = stream.peek()
    value = ExpressionParser(stream, None, env).parse()
    return ExpressionParser(stream, None, env).integer(value, tok)


def parse_hetmap_literal(stream: TokenStream) -> HetMap:
    """`{{"key", value}, ...}` with string, integer, real or boolean values."""
    options = HetMap()
    stream.expect("PUNCT", "{")
    while not stream.accept("PUNCT", "}"):
        stream.expect("PUNCT", "{")
        key = stream.expect("STRING").text[1:-1]
        stream.expect("PUNCT", ",")
        options[key] = _literal_value(stream)
        stream.expect("PUNCT", "}")
        if not stream.check("PUNCT", "}"):
            stream.expect("PUNCT", ",")
    return options


def _literal_value(stream: TokenStream):
    tok = stream.next()
    if tok.kind == "STRING":
        return tok.text[1:-1]
    if tok.kind == "IDENT" and tok.text in ("true", "false"):
        return tok.text == "true"
    sign = 1
    if tok.kind == "OP" and tok.text in "+-":
        sign = -1 if tok.text == "-" else 1
        tok = stream.next()
    if tok.kind == "NUMBER":
        if re.fullmatch(r"\d+", tok.text):
            return sign * int(tok.text)
        return sign * float(tok.text)
    raise stream.error(f"unsupported option value {tok.text!r}", tok)


# Kernels


@dataclass
class KernelSource:
    name: str
    buffer: Optional[str]
    params: list[str]
    body: list[Token] = field(default_factory=list)
    line: int = 1


def _split_args(tokens: list[Token]) -> list[list[Token]]:
    groups, current, depth = [], [], 0
    for tok in tokens:
        if tok.kind == "PUNCT" and tok.text in "([{":
            depth += 1
        elif tok.kind == "PUNCT" and tok.text in ")]}":
            depth -= 1
        if depth == 0 and tok.kind == "PUNCT" and tok.text == ",":
            groups.append(current)
            current = []
        else:
            current.append(tok)
    if current:
        groups.append(current)
    return groups


def find_kernels(tokens: list[Token]) -> list[KernelSource]:
    """Locate every `__qpu__ name(Buffer q, double x, ...) { body }`."""
    stream = TokenStream(tokens)
    kernels: list[KernelSource] = []
    seen = set()
    while not stream.at_end():
        tok = stream.next()
        if tok.kind != "IDENT" or tok.text != "__qpu__":
            continue
        stream.skip_newlines()
        name = stream.expect("IDENT")
        if name.text == "void":
            name = stream.expect("IDENT")
        if name.text in seen:
            raise SourceSyntaxError(f"duplicate kernel name '{name.text}'", name.line, name.col)
        seen.add(name.text)
        header = [t for t in stream.take_balanced("(", ")") if t.kind != "NEWLINE"]
        names = []
        for group in _split_args(header):
            idents = [t for t in group if t.kind == "IDENT"]
            if not idents:
                raise SourceSyntaxError("malformed kernel parameter", group[0].line, group[0].col)
            names.append(idents[-1].text)
        stream.skip_newlines()
        body = stream.take_balanced("{", "}")
        kernels.append(KernelSource(name.text, names[0] if names else None, names[1:], body, name.line))
    return kernels


def has_content(tokens: list[Token]) -> bool:
    return any(t.kind != "NEWLINE" for t in tokens)


def _generator(name: str):
    if has_service("composite-generator", name):
        return get_service("composite-generator", name)
    from generators import GENERATORS

    cls = GENERATORS.get(name)
    return cls() if cls else None


def is_generator(name: str) -> bool:
    if has_service("composite-generator", name):
        return True
    from generators import GENERATORS

    return name in GENERATORS


def inline_call(callee: CompositeNode, args: list) -> CompositeNode:
    """Copy of `callee` with each variable replaced by the matching argument
    (a real or a symbol in the caller's variables)."""
    if len(args) != len(callee.variables):
        raise ArityMismatch(f"'{callee.name}' takes {len(callee.variables)} argument(s), got {len(args)}")
    mapping = dict(zip(callee.variables, args))
    order = []
    for a in args:
        if isinstance(a, Symbol) and a.var not in order:
            order.append(a.var)

    def rebuild(node):
        if isinstance(node, CompositeNode):
            copy = CompositeNode(node.name)
            copy.enabled = node.enabled
            for child in node:
                copy.add_instruction(rebuild(child))
            used = copy.symbols()
            copy.variables = [v for v in order if v in used]
            return copy
        params = [p.value.substitute(mapping[p.value.var]) if p.is_symbolic else p for p in node.params]
        return InstructionNode(node.name, node.bits, params, node.enabled, node.cbits)

    return rebuild(callee)


def call_args(stream: TokenStream, ctx: KernelContext, env, close=")") -> list:
    """Comma-separated expressions up to `close`, buffer argument removed."""
    groups = []
    while not stream.check("PUNCT", close):
        start = stream.pos
        bare_buffer = not groups and _is_bare_buffer(stream, ctx)
        value = None if bare_buffer else parse_param(stream, ctx, env)
        if value is None:
            stream.next()
        groups.append((stream.tokens[start:stream.pos], value))
        if not stream.check("PUNCT", close):
            stream.expect("PUNCT", ",")
    return groups


def _is_bare_buffer(stream: TokenStream, ctx: KernelContext) -> bool:
    tok = stream.peek()
    if tok is None or tok.kind != "IDENT":
        return False
    if not (stream.check("PUNCT", ",", 1) or stream.check("PUNCT", ")", 1)):
        return False
    if ctx.buffer is not None:
        return tok.text == ctx.buffer
    return not ctx.is_variable(tok.text) or tok.text in ("q", "qbits", "buffer")


class Compiler:
    """Maps kernel source to IR and IR back to source for one dialect."""

    dialect = ""
    line_oriented = False

    def name(self) -> str:
        return self.dialect

    def compile(self, source: str, accelerator=None) -> IRContainer:
        tokens = tokenize(source)
        kernels = find_kernels(tokens)
        known: dict[str, CompositeNode] = {}
        ir = IRContainer()
        if kernels:
            for kernel in kernels:
                ctx = KernelContext(kernel.name, kernel.params, kernel.buffer, known)
                composite = self.compile_body(kernel.body, ctx)
                known[kernel.name] = composite
                ir.add_composite(composite)
        elif has_content(tokens):
            ctx = KernelContext("main", (), None, known, implicit=True)
            ir.add_composite(self.compile_body(tokens, ctx))
        else:
            raise SourceSyntaxError("no kernels found", 1, 1)
        if accelerator is not None:
            ir = self.apply_accelerator_transforms(ir, accelerator)
        logger.debug(f"{self.dialect}: compiled {ir.names()}")
        return ir

    def compile_directive(self, name, body: str, parameters=None, qbit=None, known=None) -> CompositeNode:
        ctx = KernelContext(name, parameters or (), qbit, known, implicit=parameters is None)
        return self.compile_body(tokenize(body), ctx)

    def compile_body(self, tokens: list[Token], ctx: KernelContext) -> CompositeNode:
        if not self.line_oriented:
            tokens = [t for t in tokens if t.kind != "NEWLINE"]
        self.parse_body(TokenStream(tokens), ctx, {})
        return ctx.finish()

    def parse_body(self, stream: TokenStream, ctx: KernelContext, env: dict):
        raise NotImplementedError

    def apply_accelerator_transforms(self, ir: IRContainer, accelerator) -> IRContainer:
        out = IRContainer()
        for composite in ir:
            for transform in accelerator.get_ir_transformations():
                composite = transform.transform(composite, accelerator)
            out.add_composite(composite)
        return out

    # helpers shared by the dialects

    def instruction(self, name_tok: Token, bits, params, cbits=None) -> InstructionNode:
        try:
            gate = gates.lookup(name_tok.text)
        except UnknownInstruction:
            raise UnknownInstruction(name_tok.text, name_tok.line) from None
        if cbits is not None and list(cbits) == list(bits):
            cbits = None
        try:
            return create_instruction(gate.name, bits, params, cbits)
        except ArityMismatch as e:
            raise SourceSyntaxError(str(e), name_tok.line, name_tok.col) from None

    def call_kernel(self, name_tok: Token, args: list, ctx: KernelContext) -> CompositeNode:
        """`args` are (tokens, value) pairs; a leading buffer has value None."""
        callee = ctx.known[name_tok.text]
        values = [v for _, v in args]
        if values and values[0] is None:
            values = values[1:]
        elif (
            ctx.buffer is None
            and len(values) == len(callee.variables) + 1
            and len(args[0][0]) == 1
            and args[0][0][0].kind == "IDENT"
        ):
            values = values[1:]
        if any(v is None for v in values):
            raise SourceSyntaxError(f"bad argument list for '{name_tok.text}'", name_tok.line, name_tok.col)
        try:
            return inline_call(callee, values)
        except ArityMismatch as e:
            raise SourceSyntaxError(str(e), name_tok.line, name_tok.col) from None

    def call_generator(self, name_tok: Token, variables: list, options: HetMap) -> CompositeNode:
        generator = _generator(name_tok.text)
        generator.variables = [v.var if isinstance(v, Symbol) else str(v) for v in variables]
        if not generator.expand(options):
            raise SourceSyntaxError(f"cannot expand '{name_tok.text}' with {options!r}", name_tok.line, name_tok.col)
        return generator

    # translation

    def translate(self, composite: CompositeNode) -> str:
        lines = []
        for leaf in composite.leaves():
            rule = gates.DECOMPOSITIONS.get(leaf.name)
            if leaf.name not in self.spellings() and rule is not None:
                params = [p.value if p.is_symbolic else p.to_float() for p in leaf.params]
                for name, bits, ps in rule(leaf.bits, params):
                    lines.append(self.emit(InstructionNode(name, bits, [Param.of(p) for p in ps])))
            else:
                lines.append(self.emit(leaf))
        return self.wrap(composite, lines)

    def spellings(self) -> dict:
        raise NotImplementedError

    def spelling(self, inst: InstructionNode) -> str:
        try:
            return self.spellings()[inst.name]
        except KeyError:
            raise UntranslatableInstruction(inst.name, self.dialect) from None

    def emit(self, inst: InstructionNode) -> str:
        raise NotImplementedError

    def wrap(self, composite: CompositeNode, lines: list[str]) -> str:
        header = ["AcceleratorBuffer q"] + [f"double {v}" for v in kernel_parameters(composite)]
        body = "\n".join(f"  {line}" for line in lines)
        return f"__qpu__ {composite.name}({', '.join(header)}) {{\n{body}\n}}\n"


def kernel_parameters(composite: CompositeNode) -> list[str]:
    names = []
    for v in composite.variables:
        base = v.split("[", 1)[0]
        if base not in names:
            names.append(base)
    return names


def param_text(p: Param) -> str:
    if p.is_symbolic:
        return p.value.text
    return repr(p.to_float())
