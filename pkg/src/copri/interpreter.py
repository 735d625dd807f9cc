"""Tree-walking evaluator for COP programs.

Statements and expressions are evaluated here; everything that involves an
access on a complex reference is delegated to :class:`Dispatcher`.
"""

from __future__ import annotations

import io
import sys
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from copri import refops
from copri import syntax as ast
from copri.builtins import BuiltinMap, UniqueNumbers, builtin_print, format_printable
from copri.dispatch import AccessRequest, Dispatcher
from copri.errors import (
    ArityError,
    CopError,
    EvalError,
    IllegalQualifierError,
    NullReferenceError,
    ResolutionError,
    RuntimeFault,
    TypeMismatchError,
    TypeOperatorError,
    UndefinedNameError,
    UnknownFieldError,
    UnknownMethodError,
)
from copri.parser import parse_source
from copri.runtime import (
    VOID,
    ComplexReference,
    ConceptName,
    Handle,
    ObjectStore,
    copy_value,
    type_default,
    values_equal,
)
from copri.sema import (
    CONCATENATION,
    LEFT_CAST,
    OBJECT,
    REFERENCE,
    RIGHT_CAST,
    ConceptTable,
    analyze,
    resolve_colon,
)

MAIN = "main"
FUNCTION = "function"

BUILTIN_FUNCTIONS = {"print": 1, "getUniqueNo": 0}


@dataclass(frozen=True)
class Event:
    kind: str
    concept: str
    side: str
    method: str
    depth: int

    def format(self) -> str:
        return f"EVT {self.kind} {self.concept} {self.side} {self.method} {self.depth}"


@dataclass(frozen=True)
class SubMarker:
    """Value of bare ``sub`` on the reference side; only comparable with null."""

    is_last: bool


class Slot:
    __slots__ = ("type", "value")

    def __init__(self, type_: Optional[ast.TypeExpr], value):
        self.type = type_
        self.value = value


class Frame:
    """One activation: the main program, a free function or a concept method."""

    def __init__(self, kind: str, request: Optional[AccessRequest] = None, index: int = 0,
                 decl=None, special: Optional[str] = None):
        self.kind = kind  # main | function | reference | object
        self.request = request
        self.index = index
        self.decl = decl
        self.special = special
        self.scopes: list[dict[str, Slot]] = [{}]
        self.return_type = decl.return_type if decl is not None else None
        if self.return_type is None or _is_void(self.return_type):
            self.return_value = VOID
        else:
            self.return_value = type_default(self.return_type.concept, self.return_type.is_builtin)

    @property
    def concept(self) -> Optional[str]:
        if self.request is None or not self.index:
            return None
        return self.request.concept_at(self.index)

    def declare(self, name: str, slot: Slot) -> None:
        self.scopes[-1][name] = slot


def _is_void(t: ast.TypeExpr) -> bool:
    return t.is_builtin and t.concept == "void"


# -- locations ---------------------------------------------------------------


class Location:
    type: Optional[ast.TypeExpr] = None

    def get(self):
        raise NotImplementedError

    def set(self, value) -> None:
        raise NotImplementedError


class SlotLocation(Location):
    def __init__(self, slot: Slot):
        self.slot = slot
        self.type = slot.type

    def get(self):
        return self.slot.value

    def set(self, value) -> None:
        self.slot.value = value


class RefFieldLocation(Location):
    def __init__(self, segment, name: str, type_: ast.TypeExpr):
        self.segment = segment
        self.name = name
        self.type = type_

    def get(self):
        return self.segment.fields[self.name]

    def set(self, value) -> None:
        self.segment.fields[self.name] = value


class ObjectFieldLocation(Location):
    """Object field of segment *index* of an access; resolves on first use."""

    def __init__(self, interp: "Interpreter", req: AccessRequest, index: int, name: str,
                 type_: ast.TypeExpr):
        self.interp = interp
        self.req = req
        self.index = index
        self.name = name
        self.type = type_

    def get(self):
        return self.interp.with_object(self.req, self.index,
                                       lambda h: self.interp.store.get_field(h, self.name))

    def set(self, value) -> None:
        self.interp.with_object(self.req, self.index,
                                lambda h: self.interp.store.set_field(h, self.name, value))


class HandleFieldLocation(Location):
    def __init__(self, store: ObjectStore, handle: Handle, name: str, type_):
        self.store = store
        self.handle = handle
        self.name = name
        self.type = type_

    def get(self):
        return self.store.get_field(self.handle, self.name)

    def set(self, value) -> None:
        self.store.set_field(self.handle, self.name, value)


class ReturnLocation(Location):
    def __init__(self, frame: Frame):
        self.frame = frame
        self.type = frame.return_type

    def get(self):
        return self.frame.return_value

    def set(self, value) -> None:
        self.frame.return_value = value


class _Env:
    """Name-visibility view used to classify colons at run time."""

    def __init__(self, interp: "Interpreter", frame: Frame):
        self.interp = interp
        self.frame = frame

    def __contains__(self, name) -> bool:
        return self.interp.find_name(self.frame, name) is not None


# -- interpreter -------------------------------------------------------------


class Interpreter(Dispatcher):
    """Executes one program with a private store, globals and output stream."""

    def __init__(self, program: Optional[ast.Program] = None, table: Optional[ConceptTable] = None,
                 out=None, listeners: Iterable[Callable[[Event], None]] = ()):
        self.program = program or ast.Program()
        self.table = table if table is not None else analyze(self.program)
        self.out = out if out is not None else sys.stdout
        self.listeners = list(listeners)
        self.store = ObjectStore()
        self.accesses: list[AccessRequest] = []
        self.globals: dict[str, Slot] = {}
        self.functions: dict[str, ast.FunctionDecl] = {}
        self.unique_no = UniqueNumbers()
        self.main_frame = Frame(MAIN)
        self._register(self.program.items)

    def _register(self, items) -> None:
        for item in items:
            if isinstance(item, ast.FunctionDecl):
                self.functions[item.name] = item

    # -- events ------------------------------------------------------------

    def emit(self, kind: str, concept: str, side: str, method: str, depth: int) -> None:
        if self.listeners:
            ev = Event(kind, concept, side, method, depth)
            for listener in self.listeners:
                listener(ev)

    # -- program execution -------------------------------------------------

    def run(self) -> None:
        self.run_items(self.program.items)

    def run_items(self, items) -> None:
        try:
            for item in items:
                if isinstance(item, ast.FunctionDecl):
                    self.functions[item.name] = item
                elif isinstance(item, ast.GlobalDecl):
                    self.declare_var(item.decl, self.main_frame, self.globals)
                else:
                    self.exec_stmt(item, self.main_frame)
        except RecursionError:
            raise EvalError("call depth exceeded") from None

    def init_fields(self, concept: str, side: str) -> dict:
        fields = {}
        frame = Frame(FUNCTION)
        for f in self.table[concept].fields(side):
            if f.init is not None:
                fields[f.name] = self.coerce(f.type, self.eval(f.init, frame))
            else:
                fields[f.name] = type_default(f.type.concept, f.type.is_builtin)
        return fields

    # -- calls ---------------------------------------------------------------

    def _bind(self, frame: Frame, params: list[ast.Param], args: list, what: str) -> None:
        if len(params) != len(args):
            raise ArityError(f"{what} expects {len(params)} argument(s), got {len(args)}")
        for p, a in zip(params, args):
            frame.declare(p.name, Slot(p.type, self.coerce(p.type, a)))

    def call_method(self, req: AccessRequest, index: int, side: str, decl: ast.MethodDecl,
                    args: list, special: Optional[str] = None):
        concept = req.concept_at(index)
        frame = Frame(side, req, index, decl, special)
        self._bind(frame, decl.params, args, f"{side} method '{concept}::{decl.name}'")
        depth = req.context_stack.depth
        enter, leave = ("ref-enter", "ref-exit") if side == REFERENCE else ("obj-enter", "obj-exit")
        saved = req.obj_cursor
        if side == OBJECT:
            req.obj_cursor = concept
        if special is None:
            self.emit(enter, concept, side, decl.name, depth)
        self.exec_block(decl.body, frame)
        if special is None:
            self.emit(leave, concept, side, decl.name, req.context_stack.depth)
        req.obj_cursor = saved
        return frame.return_value

    def call_function(self, decl: ast.FunctionDecl, args: list):
        frame = Frame(FUNCTION, decl=decl)
        self._bind(frame, decl.params, args, f"function '{decl.name}'")
        self.exec_block(decl.body, frame)
        return frame.return_value

    def call_builtin(self, name: str, args: list):
        if len(args) != BUILTIN_FUNCTIONS[name]:
            raise ArityError(f"builtin '{name}' expects {BUILTIN_FUNCTIONS[name]} argument(s), got {len(args)}")
        if name == "print":
            builtin_print(self.out, args[0])
            return VOID
        return self.unique_no()

    def call_global(self, name: str, args: list):
        if name in self.functions:
            return self.call_function(self.functions[name], args)
        if name in BUILTIN_FUNCTIONS:
            return self.call_builtin(name, args)
        return None

    def has_global_callable(self, name: str) -> bool:
        return name in self.functions or name in BUILTIN_FUNCTIONS

    # -- typing --------------------------------------------------------------

    def coerce(self, t: Optional[ast.TypeExpr], value):
        if t is None:
            return copy_value(value)
        if value is VOID:
            raise TypeMismatchError(f"a void value cannot be stored in a {t} slot")
        if not t.is_builtin:
            if isinstance(value, ComplexReference):
                refops.check_assignable(self.table, t, value)
                return value.copy()
            if value is None:
                return None
            raise TypeMismatchError(f"cannot store {_kind(value)} in a {t} slot")
        name = t.concept
        ok = False
        if name == "double":
            if _is_number(value):
                return float(value)
        elif name == "int":
            ok = isinstance(value, int) and not isinstance(value, bool)
        elif name == "boolean":
            ok = isinstance(value, bool)
        elif name in ("String", "char"):
            ok = value is None or isinstance(value, str)
        elif name == "Object":
            ok = value is None or isinstance(value, Handle)
        elif name == "Map":
            ok = value is None or isinstance(value, BuiltinMap)
        if not ok:
            raise TypeMismatchError(f"cannot store {_kind(value)} in a {t} slot")
        return value

    # -- statements ----------------------------------------------------------

    def exec_block(self, block: ast.Block, frame: Frame) -> None:
        frame.scopes.append({})
        try:
            for s in block.body:
                self.exec_stmt(s, frame)
        finally:
            frame.scopes.pop()

    def exec_stmt(self, s, frame: Frame) -> None:
        try:
            if isinstance(s, ast.ExprStmt):
                self.eval(s.expr, frame)
            elif isinstance(s, ast.VarDecl):
                self.declare_var(s, frame, frame.scopes[-1])
            elif isinstance(s, ast.Block):
                self.exec_block(s, frame)
            elif isinstance(s, ast.If):
                if self.condition(s.cond, frame):
                    self.exec_scoped(s.then, frame)
                elif s.otherwise is not None:
                    self.exec_scoped(s.otherwise, frame)
            elif isinstance(s, ast.While):
                while self.condition(s.cond, frame):
                    self.exec_scoped(s.body, frame)
            else:
                raise EvalError(f"cannot execute {type(s).__name__}")
        except CopError as e:
            raise e.located(*s.pos)

    def exec_scoped(self, s, frame: Frame) -> None:
        if isinstance(s, ast.Block):
            self.exec_block(s, frame)
            return
        frame.scopes.append({})
        try:
            self.exec_stmt(s, frame)
        finally:
            frame.scopes.pop()

    def condition(self, e, frame: Frame) -> bool:
        v = self.eval(e, frame)
        if not isinstance(v, bool):
            raise TypeMismatchError(f"condition must be boolean, got {_kind(v)}")
        return v

    def declare_var(self, s: ast.VarDecl, frame: Frame, scope: dict) -> None:
        t = s.type
        slot = Slot(t, type_default(t.concept, t.is_builtin))
        if s.init is not None:
            slot.value = self.coerce(t, self.eval(s.init, frame))
        scope[s.name] = slot
        if s.create_args is not None:
            args = [self.eval(a, frame) for a in s.create_args]
            self.create_into(SlotLocation(slot), args, frame)

    # -- name resolution -----------------------------------------------------

    def find_name(self, frame: Frame, name: str) -> Optional[Location]:
        for scope in reversed(frame.scopes):
            if name in scope:
                return SlotLocation(scope[name])
        if frame.kind == REFERENCE:
            loc = self._ref_field(frame.request, frame.index, name)
            if loc is None and name in self.globals:
                return SlotLocation(self.globals[name])
            return loc or self._obj_field(frame.request, frame.index, name)
        if frame.kind == OBJECT:
            loc = self._obj_field(frame.request, frame.index, name)
            if loc is not None:
                return loc
        if name in self.globals:
            return SlotLocation(self.globals[name])
        return None

    def _ref_field(self, req: AccessRequest, index: int, name: str) -> Optional[Location]:
        for j in range(min(index, req.size), 0, -1):
            seg = req.segment_at(j)
            f = self.table[seg.concept].field(REFERENCE, name)
            if f is not None:
                return RefFieldLocation(seg, name, f.type)
        return None

    def _obj_field(self, req: AccessRequest, index: int, name: str) -> Optional[Location]:
        for j in range(index, 0, -1):
            f = self.table[req.concept_at(j)].field(OBJECT, name)
            if f is not None:
                return ObjectFieldLocation(self, req, j, name, f.type)
        return None

    def with_object(self, req: AccessRequest, index: int, fn: Callable[[Handle], object]):
        """Run *fn* on segment *index*'s handle, resolving the access if needed."""

        def run():
            stack = req.context_stack
            if not stack.has(index):
                raise ResolutionError(f"segment '{req.concept_at(index)}' is not resolved at this point")
            return fn(stack.handle_at(index))

        return self.object_access(req, run)

    def locate(self, e, frame: Frame) -> Optional[Location]:
        """Return an assignable location for *e*, or None if it has none."""
        if isinstance(e, ast.Name):
            loc = self.find_name(frame, e.name)
            if loc is None:
                raise UndefinedNameError(f"undefined name '{e.name}'", *e.pos)
            return loc
        if isinstance(e, ast.ReturnVar):
            if frame.kind == MAIN:
                raise EvalError("'return' is only available inside methods and functions", *e.pos)
            return ReturnLocation(frame)
        if isinstance(e, ast.Member):
            if isinstance(e.receiver, ast.Qualifier):
                return self.qualified_field(frame, e.receiver.kind, e.name)
            target = self.eval(e.receiver, frame)
            if isinstance(target, ComplexReference):
                for seg in reversed(target.segments):
                    f = self.table[seg.concept].field(REFERENCE, e.name)
                    if f is not None:
                        return RefFieldLocation(seg, e.name, f.type)
                raise UnknownFieldError(f"reference '{'/'.join(target.concepts)}' has no field '{e.name}'")
            if isinstance(target, Handle):
                concept = self.store.segment(target).concept
                f = self.table[concept].field(OBJECT, e.name)
                if f is None:
                    raise UnknownFieldError(f"concept '{concept}' has no object field '{e.name}'")
                return HandleFieldLocation(self.store, target, e.name, f.type)
            if target is None:
                raise NullReferenceError(f"field '{e.name}' read through null")
            raise EvalError(f"{_kind(target)} has no field '{e.name}'")
        return None

    def qualified_field(self, frame: Frame, kind: str, name: str) -> Location:
        if frame.kind not in (REFERENCE, OBJECT):
            raise IllegalQualifierError(f"'{kind}' is only meaningful inside concept methods")
        req, i = frame.request, frame.index
        loc: Optional[Location] = None
        if frame.kind == REFERENCE:
            if kind in ("this", "reference"):
                loc = self._ref_field(req, i, name)
            elif kind == "object":
                loc = self._obj_field(req, i, name)
            elif kind == "super":
                loc = self._super_field(req, i, (REFERENCE, OBJECT), name)
            elif kind == "sub":
                if i < req.size:
                    seg = req.segment_at(i + 1)
                    f = self.table[seg.concept].field(REFERENCE, name)
                    if f is not None:
                        loc = RefFieldLocation(seg, name, f.type)
        else:
            if kind in ("this", "object"):
                loc = self._obj_field(req, i, name)
            elif kind == "reference":
                loc = self._ref_field(req, i, name)
            elif kind == "super":
                loc = self._super_field(req, i, (OBJECT, REFERENCE), name)
            else:
                raise IllegalQualifierError("'sub' cannot be used from an object method")
        if loc is None:
            raise UnknownFieldError(f"no field '{name}' reachable through '{kind}' in '{frame.concept}'")
        return loc

    def _super_field(self, req: AccessRequest, index: int, sides, name: str) -> Optional[Location]:
        for j in range(index - 1, 0, -1):
            info = self.table[req.concept_at(j)]
            for side in sides:
                f = info.field(side, name)
                if f is None:
                    continue
                if side == REFERENCE:
                    return RefFieldLocation(req.segment_at(j), name, f.type)
                return ObjectFieldLocation(self, req, j, name, f.type)
        return None

    # -- expressions ---------------------------------------------------------

    def eval(self, e, frame: Frame):
        try:
            return self._eval(e, frame)
        except CopError as err:
            raise err.located(*e.pos)

    def _eval(self, e, frame: Frame):
        if isinstance(e, ast.Literal):
            return e.value
        if isinstance(e, ast.Name):
            loc = self.find_name(frame, e.name)
            if loc is not None:
                return loc.get()
            if e.name in self.table:
                return ConceptName(e.name)
            raise UndefinedNameError(f"undefined name '{e.name}'")
        if isinstance(e, (ast.ReturnVar, ast.Member)):
            return self.locate(e, frame).get()
        if isinstance(e, ast.Assign):
            value = self.eval(e.value, frame)
            loc = self.locate(e.target, frame)
            if loc is None:
                raise EvalError("left side of '=' is not assignable")
            stored = self.coerce(loc.type, value)
            loc.set(stored)
            return stored
        if isinstance(e, ast.Qualifier):
            return self.qualifier_value(frame, e.kind)
        if isinstance(e, ast.MethodCall):
            args = [self.eval(a, frame) for a in e.args]
            if isinstance(e.receiver, ast.Qualifier):
                return self.qualified_call(frame, e.receiver.kind, e.name, args)
            return self.value_call(e.receiver, e.name, args, frame)
        if isinstance(e, ast.Call):
            return self.unqualified_call(frame, e.name, [self.eval(a, frame) for a in e.args])
        if isinstance(e, ast.BareContinue):
            if frame.kind != OBJECT or frame.special != "continue":
                raise IllegalQualifierError("continue() is only allowed inside an object continue method")
            return self.bare_continue(frame.request, frame.index)
        if isinstance(e, ast.New):
            args = [self.eval(a, frame) for a in e.args]
            if e.type.is_builtin:
                if e.type.concept != "Map":
                    raise EvalError(f"cannot instantiate builtin type {e.type}")
                return BuiltinMap()
            return self.create_instance(e.type, args)
        if isinstance(e, ast.Colon):
            return self.eval_colon(e, frame)
        if isinstance(e, ast.TypeOp):
            return self.eval_type_op(e, frame)
        if isinstance(e, ast.Binary):
            return self.eval_binary(e, frame)
        if isinstance(e, ast.Unary):
            v = self.eval(e.operand, frame)
            if e.op == "-":
                if not _is_number(v):
                    raise EvalError(f"cannot negate {_kind(v)}")
                return -v
            if not isinstance(v, bool):
                raise EvalError(f"'!' needs a boolean, got {_kind(v)}")
            return not v
        raise EvalError(f"cannot evaluate {type(e).__name__}")

    def qualifier_value(self, frame: Frame, kind: str):
        if frame.kind not in (REFERENCE, OBJECT):
            raise IllegalQualifierError(f"'{kind}' is only meaningful inside concept methods")
        req, i = frame.request, frame.index
        if frame.kind == REFERENCE:
            if kind == "sub":
                return SubMarker(i == req.size)
            if kind in ("this", "reference"):
                return req.reference
            if kind == "object":
                return self.with_object(req, i, lambda h: h)
        else:
            if kind in ("this", "object"):
                return self.with_object(req, i, lambda h: h)
            if kind == "reference":
                return req.reference
            if kind == "sub":
                raise IllegalQualifierError("'sub' cannot be used from an object method")
        raise IllegalQualifierError(f"'{kind}' cannot be used as a value")

    # -- calls from expressions ----------------------------------------------

    def qualified_call(self, frame: Frame, kind: str, name: str, args: list):
        if frame.kind not in (REFERENCE, OBJECT):
            raise IllegalQualifierError(f"'{kind}' is only meaningful inside concept methods")
        req, i = frame.request, frame.index
        if name in ast.SPECIAL_METHODS:
            if frame.kind != REFERENCE or kind != "sub":
                raise IllegalQualifierError(f"'{kind}.{name}()' is not allowed here")
            if frame.special != name:
                raise IllegalQualifierError(f"'sub.{name}()' is only allowed inside a reference {name} method")
            if name == "continue":
                return self.sub_continue(req, i)
            if name == "create":
                return self.run_create(req, i + 1, args)
            return self.run_delete(req, i + 1)
        if frame.kind == REFERENCE:
            if kind in ("this", "reference"):
                decl = self._pick(req.concept_at(i), REFERENCE, name, len(args))
                if decl is not None:
                    return self.call_method(req, i, REFERENCE, decl, args)
                return self.run_reference_chain(req, i + 1, name, args)
            if kind == "sub":
                return self.run_reference_chain(req, i + 1, name, args)
            if kind == "object":
                self._require_object_method(req, name)
                return self.object_access(req, lambda: self.run_object_chain(req, name, args))
            return self.super_object_call(req, i, name, args)
        if kind in ("this", "object"):
            self._require_object_method(req, name)
            return self.run_object_chain(req, name, args)
        if kind == "super":
            return self.super_object_call(req, i, name, args)
        raise IllegalQualifierError(f"'{kind}.{name}()' cannot be called from an object method")

    def _require_object_method(self, req: AccessRequest, name: str) -> None:
        if not self.object_defines(req, name):
            raise UnknownMethodError(f"no object class of '{'/'.join(req.reference.concepts)}' defines '{name}'")

    def unqualified_call(self, frame: Frame, name: str, args: list):
        req, i = frame.request, frame.index
        if frame.kind == REFERENCE:
            decl = self._pick(req.concept_at(i), REFERENCE, name, len(args))
            if decl is not None:
                return self.call_method(req, i, REFERENCE, decl, args)
        if frame.kind == OBJECT and self.object_defines(req, name):
            return self.run_object_chain(req, name, args)
        if self.has_global_callable(name):
            return self.call_global(name, args)
        if frame.kind == REFERENCE and self.object_defines(req, name):
            return self.object_access(req, lambda: self.run_object_chain(req, name, args))
        raise UnknownMethodError(f"unknown function or method '{name}'")

    def value_call(self, receiver, name: str, args: list, frame: Frame):
        loc = self.locate(receiver, frame)
        target = loc.get() if loc is not None else self.eval(receiver, frame)
        if name == "create":
            if loc is None:
                raise EvalError("create() needs a variable or field to initialise")
            return self.create_into(loc, args, frame)
        if isinstance(target, Handle) or (target is None and _is_object_type(loc)):
            if name == "continue":
                req, i = self._handle_frame(frame, name)
                self.handle_continue(req, i, target)
                return VOID
            if name == "delete":
                req, i = self._handle_frame(frame, name)
                self.handle_delete(req, i, target)
                return VOID
            raise EvalError(f"primitive references only support continue/create/delete, not '{name}'")
        if isinstance(target, ComplexReference):
            if name == "delete":
                self._no_args(name, args)
                self.delete_instance(target)
                return VOID
            if name == "continue":
                raise IllegalQualifierError("continue() cannot be applied to a complex reference")
            return self.apply_method(target, name, args)
        if isinstance(target, BuiltinMap):
            return self.map_call(target, name, args)
        if target is None:
            raise NullReferenceError(f"method '{name}' called on null")
        raise EvalError(f"{_kind(target)} has no method '{name}'")

    def _handle_frame(self, frame: Frame, name: str):
        if frame.kind != REFERENCE or frame.special is None:
            raise IllegalQualifierError(
                f"'{name}()' on a primitive reference is only allowed inside reference continue/create/delete"
            )
        return frame.request, frame.index

    @staticmethod
    def _no_args(name: str, args: list) -> None:
        if args:
            raise ArityError(f"'{name}' takes no arguments, got {len(args)}")

    def create_into(self, loc: Location, args: list, frame: Frame):
        t = loc.type
        if _is_object_type(loc):
            req, i = self._handle_frame(frame, "create")
            loc.set(self.handle_create(req, i, args))
        elif t is not None and not t.is_builtin:
            loc.set(self.coerce(t, self.create_instance(t, args)))
        elif t is not None and t.concept == "Map":
            self._no_args("create", args)
            loc.set(BuiltinMap())
        else:
            raise EvalError(f"cannot create a value of type {t}")
        return VOID

    def map_call(self, m: BuiltinMap, name: str, args: list):
        arity = {"add": 2, "get": 1, "remove": 1, "size": 0}
        if name not in arity:
            raise UnknownMethodError(f"Map has no method '{name}'")
        if len(args) != arity[name]:
            raise ArityError(f"Map.{name} expects {arity[name]} argument(s), got {len(args)}")
        if name == "add":
            m.add(*args)
            return VOID
        if name == "get":
            return m.get(args[0])
        if name == "remove":
            m.remove(args[0])
            return VOID
        return m.size()

    # -- reference algebra ---------------------------------------------------

    def eval_colon(self, e: ast.Colon, frame: Frame):
        kind = e.kind or resolve_colon(self.table, _Env(self, frame), e)
        if kind == LEFT_CAST:
            target = self.concept_operand(e.lhs, frame)
            ref = self.eval(e.rhs, frame)
            enclosing = [a.reference for a in reversed(self.accesses)]
            return refops.left_cast(self.table, target, ref, enclosing)
        if kind == RIGHT_CAST:
            ref = self.eval(e.lhs, frame)
            return refops.right_cast(self.table, ref, self.concept_operand(e.rhs, frame))
        if kind == CONCATENATION:
            return refops.concat_references(self.eval(e.lhs, frame), self.eval(e.rhs, frame))
        raise EvalError("a context type cannot be used as a value")

    def concept_operand(self, e, frame: Frame) -> str:
        if isinstance(e, ast.Name) and self.find_name(frame, e.name) is None and e.name in self.table:
            return e.name
        v = self.eval(e, frame)
        if not isinstance(v, ConceptName):
            raise TypeOperatorError(f"expected a concept, got {_kind(v)}")
        return v.name

    def eval_type_op(self, e: ast.TypeOp, frame: Frame) -> ConceptName:
        if e.op in ("concept", "conceptof", "context"):
            loc = self.locate(e.operand, frame)
            if loc is None:
                raise TypeOperatorError(f"{e.op}() needs a variable or field")
            if e.op == "context":
                return ConceptName(refops.declared_context(loc.type))
            return ConceptName(refops.declared_concept(loc.type))
        v = self.eval(e.operand, frame)
        if e.op == "instanceof":
            return ConceptName(refops.real_concept(v))
        return ConceptName(refops.real_context(v))

    # -- operators -----------------------------------------------------------

    def eval_binary(self, e: ast.Binary, frame: Frame):
        op = e.op
        if op in ("&&", "||"):
            left = self.eval(e.left, frame)
            if not isinstance(left, bool):
                raise EvalError(f"'{op}' needs booleans, got {_kind(left)}")
            if (op == "&&" and not left) or (op == "||" and left):
                return left
            right = self.eval(e.right, frame)
            if not isinstance(right, bool):
                raise EvalError(f"'{op}' needs booleans, got {_kind(right)}")
            return right
        a = self.eval(e.left, frame)
        b = self.eval(e.right, frame)
        if op in ("==", "!="):
            eq = self.equals(a, b)
            return eq if op == "==" else not eq
        if op == "+" and (isinstance(a, str) or isinstance(b, str)):
            return format_printable(a) + format_printable(b)
        if op in ("<", ">", "<=", ">="):
            if not ((_is_number(a) and _is_number(b)) or (isinstance(a, str) and isinstance(b, str))):
                raise EvalError(f"cannot compare {_kind(a)} and {_kind(b)} with '{op}'")
            return {"<": a < b, ">": a > b, "<=": a <= b, ">=": a >= b}[op]
        if not (_is_number(a) and _is_number(b)):
            raise EvalError(f"'{op}' needs numbers, got {_kind(a)} and {_kind(b)}")
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0:
                raise EvalError("division by zero")
            if isinstance(a, int) and isinstance(b, int):
                q = abs(a) // abs(b)
                return q if (a >= 0) == (b >= 0) else -q
            return a / b
        raise EvalError(f"unknown operator '{op}'")

    @staticmethod
    def equals(a, b) -> bool:
        if isinstance(a, SubMarker) or isinstance(b, SubMarker):
            other = b if isinstance(a, SubMarker) else a
            marker = a if isinstance(a, SubMarker) else b
            if other is not None:
                raise EvalError("'sub' can only be compared with null")
            return marker.is_last
        if (isinstance(a, ComplexReference) and b is None) or (isinstance(b, ComplexReference) and a is None):
            raise EvalError("complex references cannot be compared with null")
        return values_equal(a, b)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _is_object_type(loc: Optional[Location]) -> bool:
    return loc is not None and loc.type is not None and loc.type.is_builtin and loc.type.concept == "Object"


def _kind(v) -> str:
    if v is None:
        return "null"
    if v is VOID:
        return "void"
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, int):
        return "int"
    if isinstance(v, float):
        return "double"
    if isinstance(v, str):
        return "String"
    if isinstance(v, ComplexReference):
        return f"reference to {v.real_concept}"
    if isinstance(v, Handle):
        return "Object"
    if isinstance(v, BuiltinMap):
        return "Map"
    if isinstance(v, ConceptName):
        return "concept name"
    if isinstance(v, SubMarker):
        return "sub"
    return type(v).__name__


def load_program(source: str) -> tuple[ast.Program, ConceptTable]:
    program = parse_source(source)
    return program, analyze(program)


def run_source(source: str, out=None, listeners: Iterable[Callable[[Event], None]] = ()) -> str:
    """Run a whole program.  Returns its output, or "" when *out* is supplied."""
    program, table = load_program(source)
    buffer = io.StringIO() if out is None else out
    Interpreter(program, table, buffer, listeners).run()
    return buffer.getvalue() if out is None else ""
