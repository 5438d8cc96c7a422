"""OpenQASM 2 subset: optional header and registers, `gate(params) q[i], ...;`
statements, `measure q[i] -> c[j];` and kernel calls."""
from __future__ import annotations

from compiler import Compiler, TokenStream, call_args, param_text, parse_int, parse_param

_SPELLINGS = {
    "I": "id",
    "X": "x",
    "Y": "y",
    "Z": "z",
    "H": "h",
    "S": "s",
    "Sdg": "sdg",
    "T": "t",
    "Tdg": "tdg",
    "Rx": "rx",
    "Ry": "ry",
    "Rz": "rz",
    "U": "u3",
    "CX": "cx",
    "CZ": "cz",
    "CPhase": "cu1",
    "Swap": "swap",
    "Measure": "measure",
}


class _Registers:
    """Quantum register offsets; undeclared names share one implicit register."""

    def __init__(self):
        self.offsets: dict[str, int] = {}
        self.size = 0
        self.declared = False

    def declare(self, name, size):
        self.offsets[name] = self.size
        self.size += size
        self.declared = True

    def resolve(self, s: TokenStream, reg_tok, index) -> int:
        if reg_tok.text not in self.offsets:
            if self.declared:
                raise s.error(f"undeclared register '{reg_tok.text}'", reg_tok)
            return index
        return self.offsets[reg_tok.text] + index


class OpenQasmCompiler(Compiler):
    dialect = "openqasm"

    def parse_body(self, s: TokenStream, ctx, env):
        qregs = _Registers()
        while not s.at_end():
            if s.accept("PUNCT", ";"):
                continue
            tok = s.expect("IDENT")
            word = tok.text
            if word == "OPENQASM":
                s.expect("NUMBER")
                s.expect("PUNCT", ";")
            elif word == "include":
                s.expect("STRING")
                s.expect("PUNCT", ";")
            elif word in ("qreg", "creg"):
                reg = s.expect("IDENT").text
                s.expect("PUNCT", "[")
                size = parse_int(s, env)
                s.expect("PUNCT", "]")
                s.expect("PUNCT", ";")
                if word == "qreg":
                    qregs.declare(reg, size)
            elif word == "barrier":
                while not s.accept("PUNCT", ";"):
                    s.next()
            elif word in ctx.known:
                s.expect("PUNCT", "(")
                args = call_args(s, ctx, env)
                s.expect("PUNCT", ")")
                s.expect("PUNCT", ";")
                ctx.composite.add_instruction(self.call_kernel(tok, args, ctx))
            elif word == "measure":
                bit = self.__qubit(s, qregs, env)
                s.expect("ARROW")
                s.expect("IDENT")
                s.expect("PUNCT", "[")
                cbit = parse_int(s, env)
                s.expect("PUNCT", "]")
                s.expect("PUNCT", ";")
                ctx.composite.add_instruction(self.instruction(tok, [bit], [], [cbit]))
            else:
                params = []
                if s.accept("PUNCT", "("):
                    while not s.check("PUNCT", ")"):
                        params.append(parse_param(s, ctx, env))
                        if not s.check("PUNCT", ")"):
                            s.expect("PUNCT", ",")
                    s.expect("PUNCT", ")")
                bits = [self.__qubit(s, qregs, env)]
                while s.accept("PUNCT", ","):
                    bits.append(self.__qubit(s, qregs, env))
                s.expect("PUNCT", ";")
                ctx.composite.add_instruction(self.instruction(tok, bits, params))

    def __qubit(self, s: TokenStream, qregs: _Registers, env) -> int:
        reg = s.expect("IDENT")
        s.expect("PUNCT", "[")
        index = parse_int(s, env)
        s.expect("PUNCT", "]")
        return qregs.resolve(s, reg, index)

    def spellings(self):
        return _SPELLINGS

    def emit(self, inst):
        name = self.spelling(inst)
        if inst.is_measure:
            return f"measure q[{inst.bits[0]}] -> c[{inst.classical_targets()[0]}];"
        text = name
        if inst.params:
            text += f"({', '.join(param_text(p) for p in inst.params)})"
        return f"{text} {', '.join(f'q[{b}]' for b in inst.bits)};"

    def wrap(self, composite, lines):
        n = max(composite.max_qubit() + 1, 1)
        for leaf in composite.leaves():
            if leaf.is_measure:
                n = max(n, max(leaf.classical_targets()) + 1)
        header = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{n}];", f"creg c[{n}];"]
        return super().wrap(composite, header + lines)
