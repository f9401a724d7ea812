"""Command-line front end: run a file, evaluate one expression, or start a REPL."""

import argparse
import sys
from typing import List, Optional

from .eval import EvalConfig, EvalError, Session, evaluate
from .ordinal import Ordinal, ZERO, omega_power
from .runtime import (FilterClosure, FunClosure, ImapClosure, StrictArray,
                      render_scalar, render_shape, render_strict)
from .syntax import LexError, ParseError

REPL_FUEL = 10_000_000
SEGMENT_CAP = 3  # lazy printing shows at most this many index segments

_ONE = Ordinal(1)


### ---- value printing ---------------------------------------------------------


def format_value(session: Session, handle: int, force_elements: int) -> str:
    """Printable form of a value.  Lazy arrays with infinite shape render as a
    tag plus a bounded prefix, so printing always terminates."""
    value = session.store.get(handle)
    if isinstance(value, StrictArray):
        return render_scalar(value.scalar()) if value.is_scalar() else render_strict(value)
    if isinstance(value, FunClosure):
        return "<fun>"
    if isinstance(value, FilterClosure):
        # forcing even one filtered element may diverge, so show the shape only
        shape = session.shape_at(handle)
        return f"<filter shape={render_shape(shape)}>"
    if isinstance(value, ImapClosure):
        shape = value.shape
        if all(s.is_natural for s in shape):
            strict = session._force_strict(handle, "ShapeMismatch", "unreachable")
            return render_scalar(strict.scalar()) if strict.is_scalar() else render_strict(strict)
        prefix = _lazy_prefix(session, handle, shape, force_elements)
        return f"<imap shape={render_shape(shape)}> {prefix}"
    raise TypeError(f"unprintable value: {value!r}")


def _lazy_prefix(session: Session, handle: int, shape, k: int) -> str:
    parts: List[str] = []
    if len(shape) == 1:
        blocks, truncated = _segments(shape[0])
        for start, length in blocks:
            shown = length if length is not None and length <= k else k
            if not _force_run(session, handle, parts,
                              ((start + Ordinal(j),) for j in range(shown))):
                break
            if length is None or length > shown:
                parts.append("...")
        else:
            if truncated and (not parts or parts[-1] != "..."):
                parts.append("...")
    else:
        _force_run(session, handle, parts, _odometer(shape, k))
        if not parts or parts[-1] != "...":
            parts.append("...")
    body = ", ".join(parts)
    return "[" + body + (" ]" if body.endswith("...") else "]")


def _force_run(session: Session, handle: int, parts: List[str], indices) -> bool:
    """Append rendered elements; on failure record the error kind and stop."""
    for index in indices:
        try:
            parts.append(render_scalar(session.select_at(handle, index)))
        except EvalError as error:
            parts.append(f"!{error.kind}")
            return False
    return True


def _segments(alpha: Ordinal):
    """Leading index blocks of a rank-1 shape as (start, finite length or None),
    treating each w^e summand as a single block.  Capped at SEGMENT_CAP."""
    blocks = []
    acc = ZERO
    for exponent, coeff in alpha.terms:
        if exponent == 0:
            blocks.append((acc, coeff))
        else:
            unit = omega_power(exponent)
            for _ in range(coeff):
                if len(blocks) == SEGMENT_CAP:
                    return blocks, True
                blocks.append((acc, None))
                acc = acc + unit
        if len(blocks) > SEGMENT_CAP:
            return blocks[:SEGMENT_CAP], True
    return blocks[:SEGMENT_CAP], len(blocks) > SEGMENT_CAP


def _odometer(shape, k: int):
    """First k indices of a rank>=2 index space in row-major order."""
    if any(s == ZERO for s in shape):
        return
    index = [ZERO] * len(shape)
    for _ in range(k):
        yield tuple(index)
        axis = len(shape) - 1
        while axis >= 0:
            index[axis] = index[axis] + _ONE
            if index[axis] < shape[axis]:
                break
            index[axis] = ZERO
            axis -= 1
        else:
            return


### ---- one-shot modes -----------------------------------------------------------


def parse_index_literal(text: str):
    """An index vector such as "[3, 3]", "[]" or "[w, 2]"."""
    stripped = text.strip()
    if not (stripped.startswith("[") and stripped.endswith("]")):
        raise ValueError(f"expected an index literal like [1, 2], got {text!r}")
    inner = stripped[1:-1].strip()
    if not inner:
        return ()
    return tuple(Ordinal.parse(part) for part in inner.split(","))


def run_source(source: str, args, config: EvalConfig) -> int:
    try:
        result = evaluate(source, config, prelude=not args.no_prelude)
        if result.handle is None:
            return 0
        if args.probe is not None:
            index = parse_index_literal(args.probe)
            print(render_scalar(probe_value(result, index)))
        else:
            print(format_value(result.session, result.handle, args.force_print))
        return 0
    except (LexError, ParseError, EvalError) as error:
        print(error, file=sys.stderr)
        return 1


def probe_value(result, index):
    from .eval import probe
    return probe(result, index)


### ---- interactive loop ----------------------------------------------------------


def make_session(config: EvalConfig, with_prelude: bool) -> Session:
    session = Session(config)
    if with_prelude:
        from .prelude import load_prelude
        session.fuel = None
        load_prelude(session)
        session.stats = dict.fromkeys(session.stats, 0)
    session.fuel = config.fuel
    return session


def repl_loop(args, config: EvalConfig) -> int:
    session = make_session(config, with_prelude=not args.no_prelude)
    interactive = sys.stdin.isatty()
    prompt = "> " if interactive else ""
    if interactive:
        print("heh repl; :quit exits, :config shows options, :load FILE runs a file")
    while True:
        try:
            line = input(prompt)
        except EOFError:
            if interactive:
                print()
            return 0
        except KeyboardInterrupt:
            print()
            continue
        line = line.strip()
        if not line or line.startswith(";"):
            continue
        if line.startswith(":"):
            if _meta_command(session, args, config, line):
                return 0
            continue
        session.fuel = config.fuel  # a fresh budget for every entry
        try:
            handle = session.run_program(line)
            if handle is not None:
                print(format_value(session, handle, args.force_print))
        except (LexError, ParseError, EvalError) as error:
            print(error, file=sys.stderr)
        except KeyboardInterrupt:
            print("interrupted", file=sys.stderr)
        except RecursionError:
            print("FuelExhausted: recursion depth exceeded", file=sys.stderr)


def _meta_command(session: Session, args, config: EvalConfig, line: str) -> bool:
    """Handle a `:command`; True means quit."""
    command, _, rest = line.partition(" ")
    if command == ":quit":
        return True
    if command == ":config":
        print(f"strict-arrays={'on' if config.strict_finite_imaps else 'off'} "
              f"memo={'on' if config.memoize else 'off'} "
              f"fuel={config.fuel} "
              f"force-print={args.force_print} "
              f"prelude={'off' if args.no_prelude else 'on'}")
        return False
    if command == ":load":
        path = rest.strip()
        if not path:
            print(":load needs a file path", file=sys.stderr)
            return False
        try:
            with open(path) as stream:
                source = stream.read()
        except OSError as error:
            print(error, file=sys.stderr)
            return False
        session.fuel = config.fuel
        try:
            session.run_program(source)
        except (LexError, ParseError, EvalError) as error:
            print(error, file=sys.stderr)
        return False
    print(f"unknown command {command!r}; available: :quit :config :load",
          file=sys.stderr)
    return False


### ---- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heh",
        description="Interpreter for a lambda calculus with finite and "
                    "transfinite arrays.  With no file and no -e, starts a REPL.")
    parser.add_argument("file", nargs="?", help="program file to run")
    parser.add_argument("-e", "--eval", dest="expr", metavar="EXPR",
                        help="evaluate EXPR and print its value")
    parser.add_argument("--strict-arrays", action="store_true",
                        help="evaluate finite imap elements eagerly")
    parser.add_argument("--no-memo", action="store_true",
                        help="re-evaluate imap elements on every access")
    parser.add_argument("--fuel", type=int, metavar="N",
                        help="abort after N rule applications "
                             f"(default: unlimited; REPL default: {REPL_FUEL})")
    parser.add_argument("--force-print", type=int, default=10, metavar="K",
                        help="elements forced per infinite segment when "
                             "printing lazy arrays (default: 10)")
    parser.add_argument("--no-prelude", action="store_true",
                        help="do not load the standard prelude")
    parser.add_argument("--probe", metavar="IDX",
                        help='print the scalar at index IDX (e.g. "[3, 3]") '
                             "of the final value")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:   # argparse already printed the message
        return exit_.code or 0
    if args.file is not None and args.expr is not None:
        parser.print_usage(sys.stderr)
        print("heh: error: a program file and -e are mutually exclusive",
              file=sys.stderr)
        return 2
    if args.force_print < 0:
        parser.print_usage(sys.stderr)
        print("heh: error: --force-print must be >= 0", file=sys.stderr)
        return 2
    if args.probe is not None:
        try:
            parse_index_literal(args.probe)
        except ValueError as error:
            parser.print_usage(sys.stderr)
            print(f"heh: error: {error}", file=sys.stderr)
            return 2

    repl_mode = args.file is None and args.expr is None
    fuel = args.fuel if args.fuel is not None else (REPL_FUEL if repl_mode else None)
    config = EvalConfig(strict_finite_imaps=args.strict_arrays,
                        memoize=not args.no_memo, fuel=fuel)

    if repl_mode:
        return repl_loop(args, config)
    if args.expr is not None:
        return run_source(args.expr, args, config)
    try:
        with open(args.file) as stream:
            source = stream.read()
    except OSError as error:
        print(f"heh: error: {error}", file=sys.stderr)
        return 2
    return run_source(source, args, config)


if __name__ == "__main__":
    sys.exit(main())
