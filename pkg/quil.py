"""Quil subset: one instruction per line, integer qubits, parenthesized
parameters, `MEASURE q [c]` and kernel-call lines."""
from __future__ import annotations

from compiler import Compiler, TokenStream, call_args, param_text, parse_param
from errors import SourceSyntaxError

_SPELLINGS = {
    "I": "I",
    "X": "X",
    "Y": "Y",
    "Z": "Z",
    "H": "H",
    "S": "S",
    "T": "T",
    "Rx": "RX",
    "Ry": "RY",
    "Rz": "RZ",
    "CX": "CNOT",
    "CZ": "CZ",
    "CPhase": "CPHASE",
    "Swap": "SWAP",
    "Measure": "MEASURE",
}

_SKIPPED = {"DECLARE", "PRAGMA", "HALT"}


def _lines(tokens):
    line = []
    for tok in tokens:
        if tok.kind == "NEWLINE":
            if line:
                yield line
            line = []
        else:
            line.append(tok)
    if line:
        yield line


class QuilCompiler(Compiler):
    dialect = "quil"
    line_oriented = True

    def parse_body(self, s: TokenStream, ctx, env):
        for line in _lines(s.tokens[s.pos:]):
            self.__line(TokenStream(line), ctx, env)
        s.pos = len(s.tokens)

    def __line(self, s: TokenStream, ctx, env):
        name = s.expect("IDENT")
        if name.text.upper() in _SKIPPED:
            return
        if name.text in ctx.known:
            s.expect("PUNCT", "(")
            args = call_args(s, ctx, env)
            s.expect("PUNCT", ")")
            s.accept("PUNCT", ";")
            self.__end(s)
            ctx.composite.add_instruction(self.call_kernel(name, args, ctx))
            return
        params = []
        if s.accept("PUNCT", "("):
            while not s.check("PUNCT", ")"):
                params.append(parse_param(s, ctx, env))
                if not s.check("PUNCT", ")"):
                    s.expect("PUNCT", ",")
            s.expect("PUNCT", ")")
        bits = []
        while s.check("NUMBER"):
            bits.append(self.__index(s))
        cbits = None
        if name.text.upper() == "MEASURE" and not s.at_end():
            s.accept("IDENT")
            s.expect("PUNCT", "[")
            cbits = [self.__index(s)]
            s.expect("PUNCT", "]")
        s.accept("PUNCT", ";")
        self.__end(s)
        ctx.composite.add_instruction(self.instruction(name, bits, params, cbits))

    def __index(self, s: TokenStream) -> int:
        tok = s.expect("NUMBER")
        if not tok.text.isdigit():
            raise SourceSyntaxError(f"expected a qubit index, found {tok.text!r}", tok.line, tok.col)
        return int(tok.text)

    def __end(self, s: TokenStream):
        if not s.at_end():
            raise s.error(f"unexpected {s.peek().text!r}")

    def spellings(self):
        return _SPELLINGS

    def emit(self, inst):
        name = self.spelling(inst)
        text = name
        if inst.params:
            text += f"({', '.join(param_text(p) for p in inst.params)})"
        text += "".join(f" {b}" for b in inst.bits)
        if inst.is_measure:
            text += f" [{inst.classical_targets()[0]}]"
        return text
