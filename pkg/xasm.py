"""XASM: `Name(q[i], ..., params);` statements, C-style integer for-loops,
dynamic generators with het-map literals, and kernel calls."""
from __future__ import annotations

import gates
from compiler import (
    MAX_LOOP_ITERATIONS,
    Compiler,
    TokenStream,
    call_args,
    is_generator,
    param_text,
    parse_hetmap_literal,
    parse_int,
    parse_param,
)
from errors import UnknownInstruction
from hetmap import HetMap

_COMPARISONS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "!=": lambda a, b: a != b,
}


class XasmCompiler(Compiler):
    dialect = "xasm"

    def parse_body(self, s: TokenStream, ctx, env):
        while not s.at_end():
            if s.accept("PUNCT", ";"):
                continue
            tok = s.expect("IDENT")
            if tok.text == "for":
                self.__for_loop(s, ctx, env)
            elif is_generator(tok.text):
                ctx.composite.add_instruction(self.__generator(tok, s, ctx, env))
            elif tok.text in ctx.known:
                s.expect("PUNCT", "(")
                args = call_args(s, ctx, env)
                s.expect("PUNCT", ")")
                s.accept("PUNCT", ";")
                ctx.composite.add_instruction(self.call_kernel(tok, args, ctx))
            else:
                ctx.composite.add_instruction(self.__gate(tok, s, ctx, env))

    def __qubit(self, s: TokenStream, ctx, env) -> int:
        reg = s.expect("IDENT")
        if ctx.buffer is None:
            ctx.buffer = reg.text
        elif reg.text != ctx.buffer:
            raise s.error(f"unknown register '{reg.text}'", reg)
        s.expect("PUNCT", "[")
        index = parse_int(s, env)
        s.expect("PUNCT", "]")
        return index

    def __gate(self, name_tok, s: TokenStream, ctx, env):
        try:
            gate = gates.lookup(name_tok.text)
        except UnknownInstruction:
            raise UnknownInstruction(name_tok.text, name_tok.line) from None
        s.expect("PUNCT", "(")
        bits, params = [], []
        for i in range(gate.n_qubits):
            if i:
                s.expect("PUNCT", ",")
            bits.append(self.__qubit(s, ctx, env))
        while s.accept("PUNCT", ","):
            params.append(parse_param(s, ctx, env))
        s.expect("PUNCT", ")")
        s.accept("PUNCT", ";")
        return self.instruction(name_tok, bits, params)

    def __generator(self, name_tok, s: TokenStream, ctx, env):
        s.expect("PUNCT", "(")
        reg = s.expect("IDENT")
        if ctx.buffer is None:
            ctx.buffer = reg.text
        variables, options = [], HetMap()
        while s.accept("PUNCT", ","):
            if s.check("PUNCT", "{"):
                options = parse_hetmap_literal(s)
            else:
                variables.append(parse_param(s, ctx, env))
        s.expect("PUNCT", ")")
        s.accept("PUNCT", ";")
        return self.call_generator(name_tok, variables, options)

    def __for_loop(self, s: TokenStream, ctx, env):
        start_tok = s.expect("PUNCT", "(")
        s.accept("IDENT", "int")
        var = s.expect("IDENT").text
        s.expect("OP", "=")
        value = parse_int(s, env)
        s.expect("PUNCT", ";")
        cond_var = s.expect("IDENT")
        if cond_var.text != var:
            raise s.error(f"loop condition must test '{var}'", cond_var)
        cmp_tok = s.expect("OP")
        if cmp_tok.text not in _COMPARISONS:
            raise s.error(f"unsupported loop comparison '{cmp_tok.text}'", cmp_tok)
        bound = parse_int(s, env)
        s.expect("PUNCT", ";")
        step = self.__loop_step(s, var, env)
        s.expect("PUNCT", ")")
        body = s.take_balanced("{", "}")

        compare = _COMPARISONS[cmp_tok.text]
        iterations = 0
        while compare(value, bound):
            iterations += 1
            if iterations > MAX_LOOP_ITERATIONS:
                raise s.error("loop does not terminate", start_tok)
            self.parse_body(TokenStream(body), ctx, {**env, var: value})
            value += step

    def __loop_step(self, s: TokenStream, var, env) -> int:
        if s.check("INC"):
            op = s.next().text
            name = s.expect("IDENT")
            if name.text != var or op not in ("++", "--"):
                raise s.error("malformed loop update", name)
            return 1 if op == "++" else -1
        name = s.expect("IDENT")
        if name.text != var:
            raise s.error(f"loop update must change '{var}'", name)
        op = s.expect("INC")
        if op.text == "++":
            return 1
        if op.text == "--":
            return -1
        step = parse_int(s, env)
        return step if op.text == "+=" else -step

    def spellings(self):
        return {name: name for name in gates.CATALOG}

    def emit(self, inst):
        name = self.spelling(inst)
        args = [f"q[{b}]" for b in inst.bits] + [param_text(p) for p in inst.params]
        return f"{name}({', '.join(args)});"
