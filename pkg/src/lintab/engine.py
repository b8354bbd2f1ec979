"""Tabled resolution engine: loop checking and memoization on one stack.

The engine runs a left-to-right, depth-first derivation like ordinary
Prolog, but calls to tabled predicates go through answer tables.  A tabled
call first consumes answers already in its table (oldest first, through a
private cursor) and only then tries program clauses.  Resolving a tabled
call against a clause plants a ``memo-look`` item behind the clause body:
when the body has been proved, the item memoizes the call's computed
instance and immediately fetches the next unconsumed answer for the
continuation, so answers always flow through the table.  Answer tuples
never bind the continuation directly; the goal suffix past the first
pending memo-look stays uninstantiated until that memo-look fetches.

Self-dependent calls are handled by loop checking over ancestor lists: a
call that is a variant of an ancestor call skips clauses up to the one the
ancestor is currently using (guaranteeing no repeated derivation paths),
and the outermost call of a loop re-evaluates its clauses until a pass adds
no answer anywhere, then marks its table complete.  Clause status bits let
exhausted or cut-away clauses drop out of later passes.

Cut prunes the derivation back to the call that introduced it, with the
usual Prolog semantics for non-tabled calls; for tabled calls it also
clears the status bits of the untried clauses, unless a suspension flag
says the pruned region depended on an incomplete table, in which case the
clauses survive for the next evaluation pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .program import CUT, Cut, Program, parse_program, parse_query
from .tables import Table, TableStore
from .terms import (
    Const,
    FreshVars,
    Struct,
    Subst,
    Term,
    Var,
    apply,
    apply_tuple,
    canonicalize,
    max_var_id,
    rename_apart,
    unify,
    vars_of,
)
from .trace import TraceEvent, event

__all__ = [
    "DEFAULT_STEP_BUDGET",
    "StepBudgetExceeded",
    "GoalAtom",
    "MemoLook",
    "Answer",
    "CutItem",
    "Node",
    "TPEngine",
    "SolveResult",
    "tp_solve",
]

DEFAULT_STEP_BUDGET = 10_000_000


class StepBudgetExceeded(RuntimeError):
    """The run used up its resolution step budget."""

    def __init__(self, steps: int) -> None:
        super().__init__(f"step budget exceeded after {steps} steps")
        self.steps = steps


@dataclass(frozen=True, slots=True, eq=False)
class GoalAtom:
    """A callable atom plus the tabled ancestor calls above it."""

    atom: Struct
    anc: tuple["Node", ...] = ()

    def substituted(self, s: Subst) -> "GoalAtom":
        return GoalAtom(apply(self.atom, s), self.anc)


@dataclass(frozen=True, slots=True, eq=False)
class MemoLook:
    """Memoize-then-fetch marker planted behind a tabled clause body.

    ``index`` is the calling atom exactly as it stood at the call and is
    never instantiated; ``values`` is the tuple of its distinct variables,
    instantiated as the body is proved.
    """

    origin: "Node"
    index: Struct
    table: Table
    values: tuple[Term, ...]

    def substituted(self, s: Subst) -> "MemoLook":
        return MemoLook(self.origin, self.index, self.table, apply_tuple(self.values, s))


@dataclass(frozen=True, slots=True, eq=False)
class Answer:
    """End-of-goal marker carrying the query's variable tuple."""

    values: tuple[Term, ...]

    def substituted(self, s: Subst) -> "Answer":
        return Answer(apply_tuple(self.values, s))


@dataclass(frozen=True, slots=True, eq=False)
class CutItem:
    """An executable cut bound to the call whose clause introduced it."""

    origin: "Node"

    def substituted(self, s: Subst) -> "CutItem":
        return self


GoalItem = GoalAtom | MemoLook | Answer | CutItem


def _subst_prefix(items: tuple[GoalItem, ...], s: Subst) -> tuple[GoalItem, ...]:
    """Apply a substitution up to and including the first memo-look; the
    suffix past it belongs to outer pending calls and stays untouched."""
    if not s:
        return items
    out: list[GoalItem] = []
    it = iter(items)
    for item in it:
        out.append(item.substituted(s))
        if isinstance(item, MemoLook):
            break
    out.extend(it)
    return tuple(out)


class Node:
    """One derivation step on the stack."""

    __slots__ = (
        "id",
        "parent",
        "items",
        "origin_kind",
        "clause_ptr",
        "answer_ptr",
        "current_clause",
        "susp",
        "loop",
        "iter_",
        "anc",
        "pass_mark",
        "iteration_pass",
        "table",
    )

    def __init__(self, id_: int, parent: "Node | None", items: tuple[GoalItem, ...],
                 origin_kind: str, pass_mark: int) -> None:
        self.id = id_
        self.parent = parent
        self.items = items
        self.origin_kind = origin_kind
        self.clause_ptr = 0
        self.answer_ptr = 0
        self.current_clause: int | None = None
        self.susp = 0
        self.loop = 0
        self.iter_ = 0
        self.anc = -1  # -1 unknown, 0 no ancestor variant, j>0 its in-use clause
        self.pass_mark = pass_mark
        self.iteration_pass = 0
        self.table: Table | None = None

    def __repr__(self) -> str:
        return f"<Node {self.id} {self.origin_kind}>"


class TPEngine:
    """Evaluator for one program; each ``solve`` call is an independent run
    with fresh tables, trace, and step counter."""

    def __init__(
        self,
        program: Program,
        *,
        step_budget: int = DEFAULT_STEP_BUDGET,
        strict_alg2: bool = False,
        occurs_check: bool = False,
    ) -> None:
        self.program = program
        self.step_budget = step_budget
        self.strict_alg2 = strict_alg2
        self.occurs_check = occurs_check
        self.tables = TableStore()
        self.events: list[TraceEvent] = []
        self._stack: list[Node] = []
        self._steps = 0
        self._next_id = 0
        self._fresh = FreshVars()
        # per clause: cut-free body, (position, name) of constant head args
        # for cheap mismatch rejection, and whether the clause is ground
        self._clause_info: dict[int, tuple[tuple, tuple, bool]] = {}
        for cl in program.clauses:
            rest = tuple(b for b in cl.body if not isinstance(b, Cut))
            const_pos = tuple(
                (i, a.name) for i, a in enumerate(cl.head.args) if isinstance(a, Const)
            )
            ground = not vars_of((cl.head,) + rest)
            self._clause_info[id(cl)] = (rest, const_pos, ground)

    # -- bookkeeping -------------------------------------------------

    def _emit(self, kind: str, **fields) -> None:
        self.events.append(event(kind, **fields))

    def _register(self, items: tuple[GoalItem, ...], parent: Node | None,
                  origin_kind: str, **fields) -> Node:
        node = Node(self._next_id, parent, items, origin_kind, self.tables.memo_count)
        self._next_id += 1
        self._stack.append(node)
        if parent is None:
            self._emit("expand", node=node.id, parent=None, source=origin_kind, **fields)
        else:
            self._emit("expand", node=node.id, parent=parent.id, source=origin_kind, **fields)
        return node

    def _pop(self, node: Node) -> None:
        assert self._stack and self._stack[-1] is node
        self._stack.pop()
        self._emit("backtrack", node=node.id)

    def _clauses_for(self, atom: Struct):
        return self.program.by_predicate.get((atom.functor, len(atom.args)), ())

    # -- resolution --------------------------------------------------

    def solve(self, query: Sequence[Struct]) -> Iterator[tuple[Term, ...]]:
        """Derivation as a generator of answer tuples over the query's
        distinct variables (first-occurrence order)."""
        self.tables = TableStore()
        self.events = []
        self._stack = []
        self._steps = 0
        self._next_id = 0
        self._fresh = FreshVars(max_var_id(tuple(query)) + 1)

        qvars = vars_of(tuple(query))
        items: tuple[GoalItem, ...] = tuple(GoalAtom(a, ()) for a in query)
        items += (Answer(tuple(qvars)),)
        node: Node | None = self._register(items, None, "root")

        while node is not None:
            self._steps += 1
            if self._steps > self.step_budget:
                raise StepBudgetExceeded(self._steps)
            head = node.items[0]

            if isinstance(head, CutItem):
                # a cut that executes commits its origin's clause choice
                head.origin.susp = 0
                node = self._register(node.items[1:], node, "cut")
            elif isinstance(head, Answer):
                self._emit("answer", node=node.id, tuple=canonicalize(head.values))
                yield head.values
                node = self._backtrack(node)
            elif isinstance(head, MemoLook):
                node = self._memo_look(node, head)
            elif (head.atom.functor, len(head.atom.args)) in self.program.tabled:
                node = self._tabled_call(node, head)
            else:
                child = self._clause_child(node, head, tabled=False, min_ord=0)
                node = child if child is not None else self._backtrack(node)

    def _memo_look(self, node: Node, ml: MemoLook) -> Node | None:
        tbl = ml.table
        new = self.tables.memo(tbl, ml.values)
        self._emit("memo", table=tbl.key, tuple=canonicalize(ml.values),
                   new=int(new), comp=int(tbl.comp))
        return self._fetch_for(node, ml.origin, ml.index, tbl, "lookup")

    def _fetch_for(self, node: Node, owner: Node, index: Struct, tbl: Table,
                   source: str) -> Node | None:
        """Consume the owner's next unconsumed answer, if any, and register
        the continuation under ``node``."""
        pos = owner.answer_ptr
        if pos >= len(tbl.answers):
            return self._backtrack(node)
        owner.answer_ptr = pos + 1
        stored = tbl.answers[pos]
        self._emit("fetch", node=owner.id, table=tbl.key, tuple=stored, pos=pos)
        tup = rename_apart(stored, self._fresh)
        theta = dict(zip(vars_of(index), tup))
        items = _subst_prefix(node.items[1:], theta)
        return self._register(items, node, source, tuple=stored, pos=pos)

    def _tabled_call(self, node: Node, head: GoalAtom) -> Node | None:
        atom = head.atom
        if node.table is None:
            node.table, _ = self.tables.get_or_create(atom, len(self._clauses_for(atom)))
        tbl = node.table

        # table first: consume answers before touching clauses
        if node.answer_ptr < len(tbl.answers):
            return self._fetch_for(node, node, atom, tbl, "answer")
        if tbl.comp:
            return self._backtrack(node)

        if node.anc == -1:
            variants = [n for n in head.anc if n.table is tbl]
            if not variants:
                node.anc = 0
            else:
                top = max(variants, key=lambda n: n.id)
                path = [n for n in head.anc if n.id >= top.id] + [node]
                self._nodetype_update(path, top.current_clause, rerun=False)

        if node.anc == 0:
            while True:
                child = self._clause_child(node, head, tabled=True, min_ord=0)
                if child is not None:
                    return child
                if not node.iter_:
                    # never part of a loop: the relation is fully evaluated
                    if not node.loop and not self.strict_alg2:
                        tbl.comp = True
                    return self._backtrack(node)
                if self.tables.memo_count == node.pass_mark:
                    tbl.comp = True
                    self._emit("iteration-end", node=node.id, iteration=node.iteration_pass,
                               new=int(self.tables.new_flag), comp=1)
                    return self._backtrack(node)
                # the pass added answers somewhere: evaluate another pass
                self.tables.new_flag = False
                node.pass_mark = self.tables.memo_count
                node.iteration_pass += 1
                clauses = self._clauses_for(atom)
                node.clause_ptr = next(
                    (i for i, c in enumerate(clauses) if tbl.clause_status[c.ordinal - 1]),
                    len(clauses),
                )
                self._emit("iteration-start", node=node.id, iteration=node.iteration_pass)
        else:
            child = self._clause_child(node, head, tabled=True, min_ord=node.anc)
            if child is not None:
                return child
            # exhausted under an ancestor variant: re-check the loop flags,
            # since intervening cuts may have reshaped the path
            variants = [n for n in head.anc if n.table is tbl]
            if variants:
                top = max(variants, key=lambda n: n.id)
                path = [n for n in head.anc if n.id >= top.id] + [node]
                self._nodetype_update(path, top.current_clause, rerun=True)
            return self._backtrack(node)

    def _clause_child(self, node: Node, head: GoalAtom, tabled: bool, min_ord: int) -> Node | None:
        atom = head.atom
        clauses = self._clauses_for(atom)
        tbl = node.table
        args = atom.args
        i = node.clause_ptr
        while i < len(clauses):
            cl = clauses[i]
            i += 1
            if cl.ordinal <= min_ord:
                continue
            if tabled and not tbl.clause_status[cl.ordinal - 1]:
                continue
            rest, const_pos, ground = self._clause_info[id(cl)]
            for pos, cname in const_pos:
                a = args[pos]
                if type(a) is not Var and not (type(a) is Const and a.name == cname):
                    break
            else:
                if ground:
                    theta = unify(atom, cl.head, occurs_check=self.occurs_check)
                    if theta is None:
                        continue
                    rest2 = rest
                else:
                    mapping: dict = {}
                    theta = unify(atom, rename_apart(cl.head, self._fresh, mapping),
                                  occurs_check=self.occurs_check)
                    if theta is None:
                        continue
                    rest2 = rename_apart(rest, self._fresh, mapping)
                node.clause_ptr = i
                node.current_clause = cl.ordinal

                child_anc = head.anc + (node,) if tabled else ()
                body: list[GoalItem] = []
                renamed_body = iter(rest2)
                for b in cl.body:
                    if isinstance(b, Cut):
                        body.append(CutItem(node))
                    else:
                        body.append(GoalAtom(apply(next(renamed_body), theta), child_anc))
                if tabled:
                    values = apply_tuple(tuple(vars_of(atom)), theta)
                    items = tuple(body) + (MemoLook(node, atom, tbl, values),) + node.items[1:]
                    return self._register(items, node, "clause", clause=cl.label,
                                          ord=cl.ordinal, anc=node.anc)
                items = tuple(body) + _subst_prefix(node.items[1:], theta)
                return self._register(items, node, "clause", clause=cl.label, ord=cl.ordinal)
        node.clause_ptr = i
        return None

    def _nodetype_update(self, path: list[Node], j: int, rerun: bool) -> None:
        """Reflag the calls on a freshly observed loop path.

        ``path`` runs from the ancestor variant (top) down to the call that
        spotted it (bottom); ``j`` is the clause the top is using.  Only the
        outermost call of overlapping loops keeps the iteration duty.
        """
        top, bottom = path[0], path[-1]
        changed = False
        for n in path[1:]:
            if not n.loop or n.iter_:
                changed = True
            n.loop, n.iter_ = 1, 0
        if not top.loop:
            top.loop = top.iter_ = 1
            changed = True
        if bottom.anc != j:
            bottom.anc = j
            changed = True
        for n in path[:-1]:
            if not n.susp:
                changed = True
            n.susp = 1
        if not rerun or changed:
            self._emit("loop-detected", node=bottom.id, top=top.id, clause=j,
                       path=tuple(n.id for n in path), rerun=int(rerun))

    def _backtrack(self, node: Node) -> Node | None:
        while True:
            self._pop(node)
            parent = node.parent
            if parent is None:
                return None
            phead = parent.items[0]

            if isinstance(phead, CutItem):
                # prune everything back to the cut's origin in one sweep
                origin = phead.origin
                cur = parent
                while cur is not origin:
                    self._pop(cur)
                    cur = cur.parent
                call = origin.items[0]
                assert isinstance(call, GoalAtom)
                key = (call.atom.functor, len(call.atom.args))
                if key not in self.program.tabled:
                    node = origin
                    continue
                i = origin.current_clause
                tbl = origin.table
                if origin.susp == 0:
                    for ordn in range(i, len(tbl.clause_status) + 1):
                        tbl.clause_status[ordn - 1] = 0
                else:
                    origin.susp = 0
                    origin.clause_ptr = len(self._clauses_for(call.atom))
                return origin

            if isinstance(phead, MemoLook):
                node = parent
                continue

            assert isinstance(phead, GoalAtom)
            key = (phead.atom.functor, len(phead.atom.args))
            if key in self.program.tabled and node.origin_kind == "clause":
                j = parent.current_clause
                if parent.susp == 0:
                    parent.table.clause_status[j - 1] = 0
                else:
                    parent.susp = 0
            return parent


@dataclass(slots=True)
class SolveResult:
    answers: list[tuple[Term, ...]]
    status: str  # "complete" | "resource-limit"
    engine: TPEngine

    @property
    def answer_set(self) -> frozenset:
        return frozenset(canonicalize(a) for a in self.answers)


def tp_solve(
    program: Program | str,
    query: Sequence[Struct] | str,
    **options,
) -> SolveResult:
    """Run a query to exhaustion, collecting every answer.

    ``program`` and ``query`` may be source text or already parsed.
    """
    if isinstance(program, str):
        program = parse_program(program)
    if isinstance(query, str):
        query, _ = parse_query(query)
    engine = TPEngine(program, **options)
    answers: list[tuple[Term, ...]] = []
    status = "complete"
    try:
        for tup in engine.solve(query):
            answers.append(tup)
    except StepBudgetExceeded:
        status = "resource-limit"
    return SolveResult(answers, status, engine)
