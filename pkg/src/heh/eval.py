"""Big-step evaluator: sessions, configuration, and all evaluation rules.

A Session owns one store and one top-level environment.  Evaluation is
strict except for imap over infinite (or, by default, any) frames and
filter over infinite vectors, which build closures whose elements are
computed and memoized on selection.
"""

import sys
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .ordinal import Ordinal, UndefinedOrdinalOp, ZERO
from .runtime import (
    Box, Env, Fault, FilterClosure, FunClosure, Gen, ImapClosure, ImapPart,
    Memoized, ShapeVec, Store, StrictArray, Unevaluated, box_contains,
    box_subtract, delinearize, element_count, forms_partition, linearize,
    scalar_value, vector_value,
)
from .syntax import (
    Apply, ArrayLiteral, BinOp, Binding, BoolConst, Bounds, Cond, Expr, Filter,
    Full, Imap, IsLim, Lambda, Letrec, OrdinalConst, Reduce, Select, Shape,
    Span, Var, parse_expr, parse_program,
)


@dataclass
class EvalConfig:
    strict_finite_imaps: bool = False
    memoize: bool = True
    fuel: Optional[int] = None  # max rule applications; None = unlimited


class EvalError(Exception):
    """Evaluation failure; carries the error kind, source span, and rule."""

    def __init__(self, kind: str, message: str, span: Optional[Span], rule: str):
        self.kind = kind
        self.message = message
        self.span = span if span is not None else Span(0, 0, 0, 0)
        self.rule = rule
        where = f" at {span}" if span is not None and span.line else ""
        super().__init__(f"{kind}{where} (in {rule}): {message}")


_RULE_NAMES = {
    OrdinalConst: "const", BoolConst: "const", Var: "var", Lambda: "lambda",
    Apply: "apply", Cond: "cond", Letrec: "letrec", BinOp: "binop",
    ArrayLiteral: "array", Select: "select", Shape: "shape", Reduce: "reduce",
    Imap: "imap", Filter: "filter", IsLim: "islim",
}


class Session:
    """One evaluation session: store, top-level environment, fuel, stats."""

    def __init__(self, config: Optional[EvalConfig] = None):
        self.config = config or EvalConfig()
        self.store = Store()
        self.env = Env()
        self.fuel = self.config.fuel
        self.stats = {"rules": 0, "body_evals": 0, "predicate_calls": 0}
        self._letrec_depth = 0
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 200_000))

    ### plumbing

    def _tick(self) -> None:
        self.stats["rules"] += 1
        if self.fuel is not None:
            if self.fuel <= 0:
                raise Fault("FuelExhausted", "evaluation fuel exhausted")
            self.fuel -= 1

    def _value(self, handle: int):
        return self.store.get(handle)

    def _payload_handle(self, payload) -> int:
        """Wrap an array element back into a store value."""
        if isinstance(payload, FunClosure):
            return self.store.insert(payload)
        return self.store.insert(scalar_value(payload))

    ### the evaluator proper

    def eval(self, node: Expr, env: Env) -> int:
        rule = _RULE_NAMES[type(node)]
        try:
            self._tick()
            return _HANDLERS[type(node)](self, node, env)
        except Fault as fault:
            raise EvalError(fault.kind, fault.message, node.span, rule) from None

    def _eval_const(self, node, env) -> int:
        return self.store.insert(scalar_value(node.value))

    def _eval_var(self, node: Var, env: Env) -> int:
        handle = env.lookup(node.name)
        if handle is None:
            raise Fault("UnboundVariable", f"unbound variable '{node.name}'")
        return handle

    def _eval_lambda(self, node: Lambda, env: Env) -> int:
        return self.store.insert(FunClosure(node.param, node.body, env))

    def _eval_apply(self, node: Apply, env: Env) -> int:
        fun = self.eval(node.fun, env)
        arg = self.eval(node.arg, env)
        return self._apply(fun, arg)

    def _apply(self, fun_handle: int, arg_handle: int) -> int:
        self._tick()
        fun = self._value(fun_handle)
        if not isinstance(fun, FunClosure):
            raise Fault("NotAFunction", "only functions can be applied")
        return self.eval(fun.body, fun.env.extend(fun.param, arg_handle))

    def _eval_cond(self, node: Cond, env: Env) -> int:
        test = self._force_scalar(self.eval(node.test, env))
        if not isinstance(test, bool):
            raise Fault("ShapeMismatch", "the condition must be a boolean scalar")
        return self.eval(node.then if test else node.orelse, env)

    def _eval_letrec(self, node: Letrec, env: Env) -> int:
        _, result = self._eval_recursive_binding(node.name, node.bound, env)
        return self.eval(node.body, env.extend(node.name, result))

    def _eval_recursive_binding(self, name: str, expr: Expr, env: Env) -> Tuple[int, int]:
        """Placeholder cell, bound evaluation, alias patch.  Returns the
        pair (handle to bind the name to, handle of the bound value)."""
        placeholder = self.store.insert_bottom(name)
        self._letrec_depth += 1
        try:
            result = self.eval(expr, env.extend(name, placeholder))
        finally:
            self._letrec_depth -= 1
        if self.store.resolve(result) == placeholder:
            raise Fault("UnboundVariable",
                        f"premature recursive reference to '{name}'")
        self.store.set_alias(placeholder, self.store.resolve(result))
        return placeholder, result

    def _eval_binop(self, node: BinOp, env: Env) -> int:
        lhs = self._force_scalar(self.eval(node.lhs, env))
        rhs = self._force_scalar(self.eval(node.rhs, env))
        op = node.op
        if op == "=":
            if isinstance(lhs, bool) and isinstance(rhs, bool):
                return self.store.insert(scalar_value(lhs == rhs))
            if isinstance(lhs, Ordinal) and isinstance(rhs, Ordinal):
                return self.store.insert(scalar_value(lhs == rhs))
            raise Fault("ShapeMismatch",
                        "'=' compares two ordinals or two booleans")
        if not isinstance(lhs, Ordinal) or not isinstance(rhs, Ordinal):
            raise Fault("ShapeMismatch",
                        f"'{op}' needs ordinal scalar operands")
        try:
            if op == "<":
                result = lhs < rhs
            elif op == "<=":
                result = lhs <= rhs
            elif op == ">":
                result = lhs > rhs
            elif op == ">=":
                result = lhs >= rhs
            elif op == "+":
                result = lhs + rhs
            elif op == "*":
                result = lhs * rhs
            elif op == "-":
                result = lhs - rhs
            elif op == "/":
                result = lhs // rhs
            else:
                result = lhs % rhs
        except UndefinedOrdinalOp as exc:
            raise Fault("UndefinedOrdinalOp", str(exc)) from None
        except ZeroDivisionError:
            raise Fault("DivisionByZero", "division by zero") from None
        return self.store.insert(scalar_value(result))

    def _eval_array(self, node: ArrayLiteral, env: Env) -> int:
        handles = [self.eval(e, env) for e in node.elements]
        if not handles:
            return self.store.insert(StrictArray((ZERO,), []))
        shapes, datas = [], []
        for h in handles:
            value = self._value(h)
            if isinstance(value, FunClosure):
                shapes.append(())
                datas.append([value])
            else:
                strict = self._force_strict(h, "ShapeMismatch",
                                            "array elements must have finite shape")
                shapes.append(strict.shape)
                datas.append(strict.data)
        for other in shapes[1:]:
            if other != shapes[0]:
                raise Fault("HeterogeneousNesting",
                            "array elements have different shapes: "
                            f"{_fmt_shape(shapes[0])} vs {_fmt_shape(other)}")
        shape = (Ordinal(len(handles)),) + shapes[0]
        data = [x for d in datas for x in d]
        return self.store.insert(StrictArray(shape, data))

    def _eval_shape(self, node: Shape, env: Env) -> int:
        shape = self._shape_of(self.eval(node.arg, env))
        return self.store.insert(vector_value(list(shape)))

    def _shape_of(self, handle: int) -> ShapeVec:
        value = self._value(handle)
        if isinstance(value, StrictArray):
            return value.shape
        if isinstance(value, FunClosure):
            return ()
        if isinstance(value, ImapClosure):
            return value.shape
        if isinstance(value, FilterClosure):
            return self._filter_shape(value)
        raise Fault("IrreducibleTerm", f"value has no shape: {value!r}")

    def _eval_islim(self, node: IsLim, env: Env) -> int:
        x = self._force_scalar(self.eval(node.arg, env))
        if not isinstance(x, Ordinal):
            raise Fault("ShapeMismatch", "islim needs an ordinal scalar")
        return self.store.insert(scalar_value(x.is_limit))

    def _eval_reduce(self, node: Reduce, env: Env) -> int:
        fun = self.eval(node.fun, env)
        if not isinstance(self._value(fun), FunClosure):
            raise Fault("NotAFunction", "reduce needs a function as first argument")
        acc = self.eval(node.neutral, env)
        array = self.eval(node.array, env)
        value = self._value(array)
        if isinstance(value, FunClosure):
            payloads: Sequence = [value]
        else:
            strict = self._force_strict(array, "ReduceOnInfinite",
                                        "reduce needs a finite array")
            payloads = strict.data
        for payload in payloads:
            acc = self._apply(self._apply(fun, acc), self._payload_handle(payload))
        return acc

    ### imap

    def _eval_imap(self, node: Imap, env: Env) -> int:
        frame = self._force_ordinal_vector(self.eval(node.frame, env), "frame shape")
        if node.cell is not None:
            cell = self._force_ordinal_vector(self.eval(node.cell, env), "cell shape")
        else:
            cell = ()
        parts = []
        for gen_syntax, body in node.partitions:
            if isinstance(gen_syntax, Full):
                gen = Gen(gen_syntax.var, (ZERO,) * len(frame), frame)
            else:
                lower = self._force_ordinal_vector(
                    self.eval(gen_syntax.lower, env), "generator bound")
                upper = self._force_ordinal_vector(
                    self.eval(gen_syntax.upper, env), "generator bound")
                if len(lower) != len(frame) or len(upper) != len(frame):
                    raise Fault("RankMismatch",
                                "generator bounds must match the frame rank "
                                f"({len(frame)})")
                if any(l > u for l, u in zip(lower, upper)):
                    raise Fault("NotAPartition", "generator bounds are inverted")
                gen = Gen(gen_syntax.var, lower, upper)
            parts.append(ImapPart(gen, Unevaluated(body, env)))
        frame_box: Box = ((ZERO,) * len(frame), frame)
        problem = forms_partition(frame_box, [p.gen.box for p in parts])
        if problem is not None:
            raise Fault("NotAPartition", problem)
        closure = ImapClosure(frame, cell, parts)
        finite = all(s.is_natural for s in frame + cell)
        if self.config.strict_finite_imaps and finite and self._letrec_depth == 0:
            return self.store.insert(self._force_closure_strict(closure))
        return self.store.insert(closure)

    def _cell_value(self, closure: ImapClosure, index: ShapeVec) -> int:
        """Handle of the cell value at a frame index (memoized or computed)."""
        hit = closure.memo_index.get(index)
        if hit is not None:
            return hit
        parts = closure.partitions
        k = self._containing_partition(parts, closure.scan_hint, index)
        if k is None:
            raise Fault("NotAPartition",
                        f"no partition covers index {_fmt_idx(index)}")
        closure.scan_hint = k
        part = parts[k]
        if isinstance(part.body, Memoized):
            return part.body.handle
        self.stats["body_evals"] += 1
        env = part.body.env.extend(part.gen.var,
                                   self.store.insert(vector_value(list(index))))
        result = self.eval(part.body.expr, env)
        shape = self._shape_of(result)
        if shape != closure.cell:
            raise Fault("ShapeMismatch",
                        f"imap element at {_fmt_idx(index)} has shape "
                        f"{_fmt_shape(shape)}, cell shape is {_fmt_shape(closure.cell)}")
        if self.config.memoize:
            self._update_imap(closure, k, index, result)
        return result

    @staticmethod
    def _containing_partition(parts, hint: int, index: ShapeVec) -> Optional[int]:
        # splitting a partition keeps pieces adjacent, so sequential access
        # lands next to the previous match; probe the neighbourhood first
        for k in (hint, hint + 1, hint - 1, hint + 2):
            if 0 <= k < len(parts) and box_contains(parts[k].gen.box, index):
                return k
        for k, part in enumerate(parts):
            if box_contains(part.gen.box, index):
                return k
        return None

    def _update_imap(self, closure: ImapClosure, k: int, index: ShapeVec,
                     result: int) -> None:
        """Split partition k around `index`, now memoized to `result`."""
        part = closure.partitions[k]
        point: Box = (index, tuple(i + 1 for i in index))
        memo = ImapPart(Gen(part.gen.var, point[0], point[1]), Memoized(result))
        pieces = [ImapPart(Gen(part.gen.var, lo, up), part.body)
                  for lo, up in box_subtract(part.gen.box, point)]
        pieces.append(memo)
        pieces.sort(key=lambda p: p.gen.lower)
        closure.partitions[k:k + 1] = pieces
        closure.memo_index[index] = result
        closure.scan_hint = k + pieces.index(memo)

    def _force_closure_strict(self, closure: ImapClosure) -> StrictArray:
        data: list = []
        for offset in range(element_count(closure.frame)):
            index = delinearize(closure.frame, offset)
            cell_handle = self._cell_value(closure, index)
            cell_value = self._value(cell_handle)
            if isinstance(cell_value, FunClosure):
                data.append(cell_value)
            else:
                strict = self._force_strict(cell_handle, "ShapeMismatch",
                                            "imap cell is not finite")
                data.extend(strict.data)
        return StrictArray(closure.shape, data)

    ### selection

    def _eval_select(self, node: Select, env: Env) -> int:
        array = self.eval(node.array, env)
        index = self.eval(node.index, env)
        return self.select(array, self._force_ordinal_vector(index, "selection index"))

    def select(self, array_handle: int, index: ShapeVec) -> int:
        self._tick()
        value = self._value(array_handle)
        if isinstance(value, StrictArray):
            payload = value.data[linearize(value.shape, index)]
            return self._payload_handle(payload)
        if isinstance(value, FunClosure):
            if index == ():
                return array_handle
            raise Fault("IrreducibleTerm", "cannot select into a function")
        if isinstance(value, ImapClosure):
            m = len(value.frame)
            if len(index) != m + len(value.cell):
                raise Fault("RankMismatch",
                            f"index of length {len(index)} into rank-"
                            f"{m + len(value.cell)} imap")
            frame_index, cell_index = index[:m], index[m:]
            for i, s in zip(frame_index, value.frame):
                if not ZERO <= i < s:
                    raise Fault("IndexOutOfBounds",
                                f"index {_fmt_idx(index)} outside shape "
                                f"{_fmt_shape(value.shape)}")
            for j, s in zip(cell_index, value.cell):
                if not ZERO <= j < s:
                    raise Fault("IndexOutOfBounds",
                                f"index {_fmt_idx(index)} outside shape "
                                f"{_fmt_shape(value.shape)}")
            cell = self._cell_value(value, frame_index)
            return self.select(cell, cell_index)
        if isinstance(value, FilterClosure):
            if len(index) != 1:
                raise Fault("RankMismatch", "filter results are 1-dimensional")
            return self._filter_select(value, index[0])
        raise Fault("IrreducibleTerm", f"cannot select from {value!r}")

    ### filter

    def _eval_filter(self, node: Filter, env: Env) -> int:
        predicate = self.eval(node.predicate, env)
        if not isinstance(self._value(predicate), FunClosure):
            raise Fault("NotAFunction", "filter needs a predicate function")
        array = self.eval(node.array, env)
        value = self._value(array)
        if isinstance(value, FunClosure):
            raise Fault("FilterRankError", "filter needs a 1-dimensional array")
        shape = self._shape_of(array) if not isinstance(value, StrictArray) \
            else value.shape
        if len(shape) != 1:
            raise Fault("FilterRankError",
                        f"filter needs a 1-dimensional array, got shape "
                        f"{_fmt_shape(shape)}")
        if shape[0].is_natural:
            strict = self._force_strict(array, "FilterRankError",
                                        "filter argument is not strict")
            kept = [x for x in strict.data
                    if self._predicate_accepts(predicate, self._payload_handle(x))]
            return self.store.insert(vector_value(kept))
        return self.store.insert(FilterClosure(predicate, array, shape))

    def _predicate_accepts(self, predicate: int, element: int) -> bool:
        self.stats["predicate_calls"] += 1
        result = self._force_scalar(self._apply(predicate, element))
        if not isinstance(result, bool):
            raise Fault("ShapeMismatch", "the filter predicate must return a boolean")
        return result

    def _filter_select(self, fc: FilterClosure, target: Ordinal) -> int:
        xi, n = target.limit_part()
        segment = fc.segment(xi)
        alpha = fc.arg_shape[0]
        while len(segment.prefix) <= n:
            source = xi + segment.scan
            if not source < alpha:
                raise Fault("IndexOutOfBounds",
                            f"filter scan passed the end of the argument "
                            f"(shape {_fmt_shape(fc.arg_shape)}) looking for "
                            f"element [{target}]")
            element = self.select(fc.argument, (source,))
            segment.scan += 1
            if self._predicate_accepts(fc.predicate, element):
                segment.prefix.append(element)
        return segment.prefix[n]

    def _filter_shape(self, fc: FilterClosure) -> ShapeVec:
        lam, k = fc.arg_shape[0].limit_part()
        if k == 0:
            return (lam,)
        segment = fc.segment(lam)
        while segment.scan < k:
            element = self.select(fc.argument, (lam + segment.scan,))
            segment.scan += 1
            if self._predicate_accepts(fc.predicate, element):
                segment.prefix.append(element)
        return (lam + len(segment.prefix),)

    ### forcing helpers

    def _force_scalar(self, handle: int):
        """Payload of a scalar value: Ordinal, bool, or FunClosure."""
        value = self._value(handle)
        if isinstance(value, StrictArray):
            if value.is_scalar():
                return value.scalar()
            raise Fault("ShapeMismatch",
                        f"expected a scalar, got shape {_fmt_shape(value.shape)}")
        if isinstance(value, FunClosure):
            return value
        shape = self._shape_of(handle)
        if shape == ():
            return self._force_scalar(self.select(handle, ()))
        raise Fault("ShapeMismatch",
                    f"expected a scalar, got shape {_fmt_shape(shape)}")

    def _force_ordinal_vector(self, handle: int, what: str) -> ShapeVec:
        """A rank-1 value forced to a tuple of ordinals."""
        value = self._value(handle)
        if not isinstance(value, StrictArray):
            shape = self._shape_of(handle)
            if len(shape) != 1:
                raise Fault("RankMismatch",
                            f"{what} must be a vector, got shape {_fmt_shape(shape)}")
            value = self._force_strict(handle, "ShapeMismatch",
                                       f"{what} must be a finite vector")
        if value.rank != 1:
            raise Fault("RankMismatch",
                        f"{what} must be a vector, got shape {_fmt_shape(value.shape)}")
        for x in value.data:
            if not isinstance(x, Ordinal):
                raise Fault("ShapeMismatch", f"{what} components must be ordinals")
        return tuple(value.data)

    def _force_strict(self, handle: int, kind: str, message: str) -> StrictArray:
        """A fully evaluated array; `kind` is the error for infinite shapes."""
        value = self._value(handle)
        if isinstance(value, StrictArray):
            return value
        if isinstance(value, ImapClosure):
            if all(s.is_natural for s in value.shape):
                return self._force_closure_strict(value)
            raise Fault(kind, message + f" (shape {_fmt_shape(value.shape)})")
        if isinstance(value, FilterClosure):
            raise Fault(kind, message +
                        f" (shape {_fmt_shape(self._filter_shape(value))})")
        raise Fault(kind, message)

    ### program and embedding interface

    def run_program(self, source: str) -> Optional[int]:
        """Evaluate top-level forms; bindings persist.  Returns the last
        form's value handle (a binding's value for trailing bindings)."""
        last = None
        for form in parse_program(source):
            if isinstance(form, Binding):
                last = self._run_binding(form)
            else:
                last = self.eval(form, self.env)
        return last

    def _run_binding(self, form: Binding) -> int:
        if form.recursive:
            previous = self.env.frame.get(form.name)
            placeholder = self.store.insert_bottom(form.name)
            self.env.define(form.name, placeholder)
            self._letrec_depth += 1
            try:
                result = self.eval(form.expr, self.env)
                if self.store.resolve(result) == placeholder:
                    raise EvalError("UnboundVariable",
                                    f"premature recursive reference to '{form.name}'",
                                    form.span, "letrec")
            except BaseException:
                if previous is None:
                    del self.env.frame[form.name]
                else:
                    self.env.define(form.name, previous)
                raise
            finally:
                self._letrec_depth -= 1
            self.store.set_alias(placeholder, self.store.resolve(result))
            return placeholder
        result = self.eval(form.expr, self.env)
        self.env.define(form.name, result)
        return result

    def eval_source(self, source: str) -> int:
        return self.eval(parse_expr(source), self.env)

    def select_at(self, handle: int, index: Sequence, span: Optional[Span] = None):
        """Scalar payload at `index` (a sequence of ints/Ordinals)."""
        vec = tuple(x if isinstance(x, Ordinal) else Ordinal(x) for x in index)
        try:
            return self._force_scalar(self.select(handle, vec))
        except Fault as fault:
            raise EvalError(fault.kind, fault.message, span, "select") from None

    def shape_at(self, handle: int, span: Optional[Span] = None) -> ShapeVec:
        try:
            return self._shape_of(handle)
        except Fault as fault:
            raise EvalError(fault.kind, fault.message, span, "shape") from None


_HANDLERS = {
    OrdinalConst: Session._eval_const,
    BoolConst: Session._eval_const,
    Var: Session._eval_var,
    Lambda: Session._eval_lambda,
    Apply: Session._eval_apply,
    Cond: Session._eval_cond,
    Letrec: Session._eval_letrec,
    BinOp: Session._eval_binop,
    ArrayLiteral: Session._eval_array,
    Select: Session._eval_select,
    Shape: Session._eval_shape,
    Reduce: Session._eval_reduce,
    Imap: Session._eval_imap,
    Filter: Session._eval_filter,
    IsLim: Session._eval_islim,
}


def _fmt_shape(shape: ShapeVec) -> str:
    return "[" + ", ".join(str(s) for s in shape) + "]"


def _fmt_idx(index: ShapeVec) -> str:
    return _fmt_shape(index)


### ---- embedding interface -------------------------------------------------------


class Result:
    """A program's final value together with the session that owns it."""

    def __init__(self, session: Session, handle: Optional[int]):
        self.session = session
        self.handle = handle

    @property
    def shape(self) -> Optional[ShapeVec]:
        return None if self.handle is None else self.session.shape_at(self.handle)


def evaluate(source: str, config: Optional[EvalConfig] = None,
             prelude: bool = True) -> Result:
    """Run a program (bindings plus optional trailing expression)."""
    session = Session(config)
    if prelude:
        from .prelude import load_prelude
        # fuel and counters describe the user program, not library setup
        session.fuel = None
        load_prelude(session)
        session.fuel = session.config.fuel
        session.stats = dict.fromkeys(session.stats, 0)
    try:
        handle = session.run_program(source)
    except RecursionError:
        raise EvalError("FuelExhausted", "recursion depth exceeded; "
                        "the evaluation does not terminate", None, "eval") from None
    return Result(session, handle)


def probe(result: Result, index: Sequence):
    """Scalar at `index` within a Result's value."""
    if result.handle is None:
        raise ValueError("the program produced no value")
    try:
        return result.session.select_at(result.handle, index)
    except RecursionError:
        raise EvalError("FuelExhausted", "recursion depth exceeded; "
                        "the evaluation does not terminate", None, "select") from None
