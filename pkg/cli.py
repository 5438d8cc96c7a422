"""Command-line front door: compile, translate, run, vqe, ddcl and serve.

stdout carries only machine-parseable results; diagnostics go to stderr.
"""
from __future__ import annotations

import functools
import math
from pathlib import Path

import click

import api
from buffer import QuantumBuffer
from config import DEFAULT_HOST, DEFAULT_PORT, DEFAULT_SHOTS
from errors import BadOption, FrameworkError
from ir import IRContainer, deserialize_ir, serialize_ir
from log import configure, get_logger
from server import Server

logger = get_logger("cli")

LANGUAGES = ("xasm", "quil", "openqasm")
_SUFFIXES = {".xasm": "xasm", ".quil": "quil", ".qasm": "openqasm"}


def domain_errors(fn):
    """Turn framework errors into exit status 1 with the message on stderr."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except FrameworkError as e:
            raise click.ClickException(f"{type(e).__name__}: {e}") from None

    return wrapper


def _reals(text, option) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise BadOption(f"{option} is not a list of reals: {text!r}") from None


def _language(path: Path, language):
    return language or _SUFFIXES.get(path.suffix, "xasm")


def _load(path: Path, language) -> IRContainer:
    """JSON-IR files deserialize, directive sources go through qasm(), the rest compile."""
    text = path.read_text()
    if path.suffix == ".json":
        return deserialize_ir(text)
    if text.lstrip().startswith("."):
        ir = IRContainer()
        for composite in api.qasm(text):
            ir.add_composite(composite)
        return ir
    return api.compile_source(_language(path, language), text)


def _pick(ir: IRContainer, kernel):
    """The named kernel, else the last one in the source."""
    if kernel:
        if kernel not in ir:
            raise click.BadParameter(f"no kernel named {kernel!r} among {ir.names()}", param_hint="--kernel")
        return ir.get_composite(kernel)
    return ir.get_composites()[-1]


def _width(composite) -> int:
    return max((max(leaf.bits + leaf.classical_targets()) + 1 for leaf in composite.leaves()), default=1)


def _observable(text):
    kind, sep, source = text.partition(":")
    if not sep:
        kind, source = "pauli", text
    if kind not in ("pauli", "fermion"):
        raise BadOption(f"observable must start with pauli: or fermion:, got {text!r}")
    return api.get_observable(kind, source)


def _accelerator(name, shots, seed, endpoint=None):
    options = {"shots": shots}
    if seed is not None:
        options["seed"] = seed
    if endpoint:
        options["endpoint"] = endpoint
    return api.get_accelerator(name, options)


def _print_result(buffer: QuantumBuffer):
    click.echo(f"opt-val {buffer['opt-val']!r}")
    click.echo("opt-params " + " ".join(repr(float(v)) for v in buffer["opt-params"]))


@click.group()
@click.option("--verbose", is_flag=True, help="Log at DEBUG level.")
@click.pass_context
def main(ctx, verbose):
    configure(verbose=verbose, level="INFO")
    if not api.is_initialized():
        api.initialize(["--verbose"] if verbose else [])
        ctx.call_on_close(api.finalize)


@main.command("compile")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--language", type=click.Choice(LANGUAGES))
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Defaults to FILE with a .json suffix.")
@domain_errors
def compile_cmd(file, language, out):
    """Compile FILE to JSON-IR."""
    ir = api.compile_source(_language(file, language), file.read_text())
    out = out or file.with_suffix(".json")
    out.write_text(serialize_ir(ir))
    for composite in ir:
        click.echo(f"{composite.name} {composite.n_instructions()}")
    logger.info(f"Wrote {len(ir)} composite(s) to {out}")


@main.command("translate")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--from", "source_language", type=click.Choice(LANGUAGES))
@click.option("--to", "target_language", type=click.Choice(LANGUAGES), required=True)
@click.option("--kernel", help="Only translate this kernel.")
@domain_errors
def translate_cmd(file, source_language, target_language, kernel):
    """Translate the kernels of FILE into another dialect."""
    ir = api.compile_source(_language(file, source_language), file.read_text())
    composites = [_pick(ir, kernel)] if kernel else list(ir)
    for composite in composites:
        click.echo(api.translate(target_language, composite), nl=False)


@main.command("run")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--language", type=click.Choice(LANGUAGES))
@click.option("--kernel", help="Kernel to execute; defaults to the last one.")
@click.option("--shots", default=DEFAULT_SHOTS, show_default=True, type=click.IntRange(min=0))
@click.option("--seed", type=int)
@click.option("--accelerator", default="sim", show_default=True)
@click.option("--endpoint", help="Job server for the remote accelerator.")
@click.option("--params", default="", help="Comma-separated values for the kernel variables.")
@domain_errors
def run_cmd(file, language, kernel, shots, seed, accelerator, endpoint, params):
    """Execute a kernel and print `bitstring count` lines."""
    composite = _pick(_load(file, language), kernel)
    if composite.variables or params:
        composite = composite.evaluate(_reals(params, "--params"))
    buffer = api.qalloc(_width(composite))
    _accelerator(accelerator, shots, seed, endpoint).execute(buffer, composite)
    if shots == 0:
        click.echo(f"exp-val-z {buffer.expectation_value_z()!r}")
        return
    for bits, count in sorted(buffer.measurement_counts().items()):
        click.echo(f"{bits} {count}")


@main.command("vqe")
@click.option("--ansatz", "ansatz_file", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--language", type=click.Choice(LANGUAGES))
@click.option("--kernel", help="Ansatz kernel; defaults to the last one.")
@click.option("--observable", required=True, help='"pauli:<terms>" or "fermion:<terms>".')
@click.option("--optimizer", default="neldermead", show_default=True)
@click.option("--shots", default=0, show_default=True, type=click.IntRange(min=0), help="0 runs in exact mode.")
@click.option("--seed", type=int)
@click.option("--maxeval", type=click.IntRange(min=1))
@click.option("--accelerator", default="sim", show_default=True)
@domain_errors
def vqe_cmd(ansatz_file, language, kernel, observable, optimizer, shots, seed, maxeval, accelerator):
    """Minimize <observable> over the ansatz variables."""
    ansatz = _pick(_load(ansatz_file, language), kernel)
    observable = _observable(observable)
    optimizer_options = {"maxeval": maxeval} if maxeval else {}
    vqe = api.get_algorithm(
        "vqe",
        {
            "ansatz": ansatz,
            "observable": observable,
            "accelerator": _accelerator(accelerator, shots, seed),
            "optimizer": api.get_optimizer(optimizer, optimizer_options),
        },
    )
    buffer = api.qalloc(max(_width(ansatz), observable.n_qubits()))
    vqe.execute(buffer)
    _print_result(buffer)


@main.command("ddcl")
@click.option("--ansatz", "ansatz_file", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--language", type=click.Choice(LANGUAGES))
@click.option("--kernel", help="Ansatz kernel; defaults to the last one.")
@click.option("--target", required=True, help="Target distribution, comma-separated.")
@click.option("--optimizer", default="gd-paramshift", show_default=True)
@click.option("--gradient", default="js-parameter-shift", show_default=True,
              type=click.Choice(("js-parameter-shift", "js-central-difference")))
@click.option("--step", type=float)
@click.option("--initial-parameters", help="Comma-separated starting point.")
@click.option("--maxeval", type=click.IntRange(min=1))
@click.option("--seed", type=int)
@click.option("--shots", default=0, show_default=True, type=click.IntRange(min=0))
@domain_errors
def ddcl_cmd(ansatz_file, language, kernel, target, optimizer, gradient, step, initial_parameters, maxeval, seed, shots):
    """Train the ansatz distribution toward --target."""
    ansatz = _pick(_load(ansatz_file, language), kernel)
    target = _reals(target, "--target")
    size = round(math.log2(len(target))) if target else 0
    if not target or 2**size != len(target):
        raise click.BadParameter(f"needs a power-of-two number of entries, got {len(target)}", param_hint="--target")

    optimizer_options = {}
    if step is not None:
        optimizer_options["step"] = step
    if maxeval:
        optimizer_options["maxeval"] = maxeval
    if initial_parameters:
        optimizer_options["initial-parameters"] = _reals(initial_parameters, "--initial-parameters")
    algorithm_options = {
        "ansatz": ansatz,
        "target_dist": target,
        "gradient": gradient,
        "accelerator": _accelerator("sim", shots, seed),
        "optimizer": api.get_optimizer(optimizer, optimizer_options),
    }
    if seed is not None:
        algorithm_options["seed"] = seed
    buffer = api.qalloc(max(size, _width(ansatz)))
    api.get_algorithm("ddcl", algorithm_options).execute(buffer)
    _print_result(buffer)


@main.command("serve")
@click.option("--host", default=DEFAULT_HOST, show_default=True)
@click.option("--port", default=DEFAULT_PORT, show_default=True, type=int)
def serve_cmd(host, port):
    """Run the reference job server until interrupted."""
    try:
        server = Server(host, port, install_signals=True)
    except OSError as e:
        raise click.ClickException(f"cannot bind {host}:{port}: {e}") from None
    server.run()


if __name__ == "__main__":
    main()
