"""Jankov formulas of finite rooted posets, the axiomatizer that turns a
tabular membership oracle into a deductive system over those formulas, and
the end-to-end builders that emit machine-checkable refutations and (for the
classical system) positive proofs.

The Jankov formula of a rooted poset F uses one variable per world and is
frame-valid on G exactly when no generated subframe of G maps onto F by a
surjective p-morphism.  That characterization is what the test suite checks
exhaustively; nothing here depends on trusting the construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

from .formulas import (
    Formula,
    Implies,
    Mode,
    ParseError,
    Var,
    conj,
    disj,
    neg,
    parse_formula,
    render,
)
from .kernel import (
    AntiAxiom,
    Axiom,
    DeductiveSystem,
    Hypothesis,
    Inference,
    Justification,
    MP,
    MT,
    NS,
    RN,
    RS,
    Sb,
    Sign,
    Statement,
    Step,
    asserts,
    check_inference,
    rejects,
    system,
)
from .prover import SearchBudget, _Search, _term_to_derivation, derive_from_hypotheses
from .semantics import (
    Budget,
    Frame,
    ResourceBoundError,
    _bits,
    enumerate_rooted_posets,
    point_frame,
    root_of,
    tabular_oracle,
)
from .transforms import convert_ipc, symmetry_transform


class SearchExhaustedError(Exception):
    """No witnessing formula was found within the family and search bounds."""


class RefutationPreconditionError(ValueError):
    """The formula to refute is derivable according to the oracle."""


class TemplateUnavailableError(RuntimeError):
    """The classical-system proof template could not be constructed."""


# --- Jankov formulas ---------------------------------------------------------


def jankov_variables(frame: Frame) -> tuple[Var, ...]:
    return tuple(Var(f"x{i}") for i in range(frame.n))


def jankov_formula(frame: Frame) -> Formula:
    """The frame formula of a rooted poset, over one variable per world.

    Variable x_i is meant to hold exactly at the worlds not below world i;
    each world w then gets a description phi_w of "being at or above w", and
    the formula says the root description pushes up to a cover.
    """
    if frame.mode is not Mode.INT:
        raise ValueError("Jankov formulas are built over int-mode frames")
    root = root_of(frame)
    if root is None:
        raise ValueError("Jankov formulas need a rooted poset")
    if frame.n > 6:
        raise ResourceBoundError("Jankov construction is budgeted to 6 worlds")

    xs = jankov_variables(frame)
    n = frame.n
    below = [frozenset(j for j in range(n) if frame.rel[j] & (1 << i))
             for i in range(n)]

    def color(w: int) -> list[int]:
        return [i for i in range(n) if w not in below[i]]

    def covers(w: int) -> list[int]:
        out = []
        for u in _bits(frame.rel[w]):
            if u == w:
                continue
            between = [v for v in _bits(frame.rel[w])
                       if v != w and v != u and frame.rel[v] & (1 << u)]
            if not between:
                out.append(u)
        return sorted(out)

    phi: dict[int, Formula] = {}
    psi: dict[int, Formula] = {}

    def build(w: int) -> None:
        if w in phi:
            return
        succ = covers(w)
        for u in succ:
            build(u)
        present = [xs[i] for i in color(w)]
        if not succ:
            absent = [neg(xs[i]) for i in range(n) if i not in color(w)]
            phi[w] = conj(present + absent)
            psi[w] = neg(phi[w])
            return
        fresh = [xs[i] for i in range(n) if i not in color(w)]
        trigger = disj(fresh + [psi[u] for u in succ])
        landing = disj([phi[u] for u in succ])
        climb = Implies(trigger, landing)
        phi[w] = conj(present + [climb]) if present else climb
        psi[w] = Implies(phi[w], landing)

    build(root)
    return psi[root]


@dataclass(frozen=True)
class FamilyEntry:
    frame: Frame
    formula: Formula


def jankov_family(max_worlds: int) -> tuple[FamilyEntry, ...]:
    """Jankov formulas of all rooted posets up to the size bound, in the
    deterministic (size, canonical frame) order, duplicate-free."""
    return tuple(FamilyEntry(f, jankov_formula(f))
                 for f in enumerate_rooted_posets(max_worlds))


# --- the axiomatizer ---------------------------------------------------------


def build_system(oracle: Callable[[Formula], bool],
                 family: Sequence[FamilyEntry],
                 mode: Mode = Mode.INT) -> DeductiveSystem:
    """Intuitionistic basis plus, for each family formula, a positive axiom
    when the oracle accepts it and an anti-axiom otherwise."""
    positive = [e.formula for e in family if oracle(e.formula)]
    negative = [e.formula for e in family if not oracle(e.formula)]
    return system(mode, positive, negative)


# --- refutation and positive pipelines ----------------------------------------


def build_refutation(ds: DeductiveSystem,
                     a: Formula,
                     oracle: Callable[[Formula], bool],
                     family: Sequence[FamilyEntry],
                     search_budget: SearchBudget = SearchBudget()) -> Inference:
    """Produce a checked inference of -a with no hypotheses.

    Searches the family for a rejected formula C syntactically derivable from
    {a}, converts that derivation to a positive inference of +C from +a,
    runs the refutation transformer to get -C |- -a, and discharges -C by the
    anti-axiom step.
    """
    if oracle(a):
        raise RefutationPreconditionError(
            f"{render(a)} is derivable per the oracle; nothing to refute")
    for entry in family:
        if oracle(entry.formula):
            continue
        if not ds.is_anti_axiom(entry.formula):
            continue
        derivation = derive_from_hypotheses([a], entry.formula, search_budget)
        if derivation is None:
            continue
        positive = convert_ipc(derivation, ds)
        index, refutation = symmetry_transform(ds, positive, oracle)
        assert index == 1
        return _discharge(ds, refutation, entry.formula)
    raise SearchExhaustedError(
        f"no family witness found for {render(a)} within bounds")


def _discharge(ds: DeductiveSystem, refutation: Inference, anti: Formula) -> Inference:
    """Replace the -C hypothesis of a refutation with the anti-axiom step."""
    assert refutation.hypotheses == (rejects(anti),)
    steps: list[Step] = []
    mapping: dict[int, int] = {}
    anchor: Optional[int] = None

    def out(statement: Statement, just: Justification) -> int:
        steps.append(Step(statement, just))
        return len(steps)

    anchor = out(rejects(anti), AntiAxiom())
    for old, step in enumerate(refutation.steps, start=1):
        just = step.justification
        if isinstance(just, Hypothesis):
            mapping[old] = anchor
            continue
        if isinstance(just, MP):
            just = MP(mapping[just.major], mapping[just.minor])
        elif isinstance(just, MT):
            just = MT(mapping[just.major], mapping[just.minor])
        elif isinstance(just, Sb):
            just = Sb(mapping[just.source], just.mapping)
        elif isinstance(just, RS):
            just = RS(mapping[just.source])
        elif isinstance(just, NS):
            just = NS(mapping[just.source])
        elif isinstance(just, RN):
            just = RN(mapping[just.source])
        mapping[old] = out(step.statement, just)
    result = Inference((), tuple(steps))
    report = check_inference(ds, result)
    if not report.ok:
        raise SearchExhaustedError(f"discharged refutation fails checking: {report}")
    return result


# --- the classical system ----------------------------------------------------

_CPC_BOUND = 3


@lru_cache(maxsize=None)
def cpc_context(bound: int = _CPC_BOUND):
    """The classical-logic deductive system over the Jankov family, its
    one-point oracle, and the checker-verified stability template."""
    frame = point_frame()
    oracle = tabular_oracle([frame], Budget(max_worlds=8, max_vars=8))
    family = jankov_family(bound)
    ds = build_system(oracle, family)
    template = _stability_template(ds, family)
    return ds, oracle, family, frame, template


def _stability_template(ds: DeductiveSystem,
                        family: Sequence[FamilyEntry]) -> Inference:
    """A hypothesis-free inference of +(~~p -> p) in the classical system,
    driven by the positive two-chain Jankov axiom."""
    two_chain = next((e for e in family if e.frame.n == 2), None)
    if two_chain is None or not ds.is_positive_axiom(two_chain.formula):
        raise TemplateUnavailableError("two-chain Jankov axiom is not positive")
    p = Var("p")
    root = root_of(two_chain.frame)
    assert root is not None
    subst = {f"x{i}": (p if i == root else neg(p)) for i in range(2)}
    from .formulas import apply_substitution
    instance = apply_substitution(subst, two_chain.formula)
    target = parse_formula("~~p -> p")
    lemma = Implies(instance, target)
    term = _Search(400_000).prove([], lemma)
    if term is None:
        raise TemplateUnavailableError(
            "stability lemma is not intuitionistically derivable")
    builder_steps: list[Step] = [
        Step(asserts(two_chain.formula), Axiom()),
        Step(asserts(instance), Sb(1, tuple(sorted(subst.items())))),
    ]
    index: dict[Statement, int] = {s.statement: i + 1 for i, s in enumerate(builder_steps)}

    def add(statement: Statement, just: Justification) -> int:
        existing = index.get(statement)
        if existing is not None:
            return existing
        builder_steps.append(Step(statement, just))
        index[statement] = len(builder_steps)
        return len(builder_steps)

    derivation = _term_to_derivation(term)
    mapping: dict[int, int] = {}
    for i, hstep in enumerate(derivation.steps, start=1):
        if hstep.rule == "axiom":
            mapping[i] = add(asserts(hstep.formula), Axiom())
        elif hstep.rule == "mp":
            mapping[i] = add(asserts(hstep.formula),
                             MP(mapping[hstep.refs[0]], mapping[hstep.refs[1]]))
        elif hstep.rule == "sub":
            mapping[i] = add(asserts(hstep.formula),
                             Sb(mapping[hstep.refs[0]], hstep.subst))
        else:
            raise TemplateUnavailableError("template lemma used hypotheses")
    final = add(asserts(target), MP(mapping[len(derivation.steps)], 2))
    if final != len(builder_steps):
        builder_steps.append(Step(asserts(target), Sb(final, ())))
    template = Inference((), tuple(builder_steps))
    report = check_inference(ds, template)
    if not report.ok:
        raise TemplateUnavailableError(f"template fails checking: {report}")
    return template


def build_positive_cpc(a: Formula, bound: int = _CPC_BOUND) -> Inference:
    """A checked hypothesis-free inference of +a in the classical system,
    for classically valid `a`: prove ~~a intuitionistically, instantiate the
    stability template to ~~a -> a, and close with modus ponens."""
    ds, oracle, _family, _frame, template = cpc_context(bound)
    if not oracle(a):
        raise RefutationPreconditionError(
            f"{render(a)} is not classically valid")
    doubled = neg(neg(a))
    term = _Search(400_000).prove([], a)
    if term is None:
        term = _Search(400_000).prove([], doubled)
        if term is None:
            raise TemplateUnavailableError(
                f"double negation of {render(a)} did not prove; prover defect")
        derivation = _term_to_derivation(term)
        inf = convert_ipc(derivation, ds)
        steps = list(inf.steps)
        index: dict[Statement, int] = {}
        for i, s in enumerate(steps, start=1):
            index.setdefault(s.statement, i)
        template_map: dict[int, int] = {}
        for i, s in enumerate(template.steps, start=1):
            just = s.justification
            if isinstance(just, MP):
                just = MP(template_map[just.major], template_map[just.minor])
            elif isinstance(just, Sb):
                just = Sb(template_map[just.source], just.mapping)
            existing = index.get(s.statement)
            if existing is not None:
                template_map[i] = existing
                continue
            steps.append(Step(s.statement, just))
            index[s.statement] = len(steps)
            template_map[i] = len(steps)
        stability_index = template_map[len(template.steps)]
        instance = Implies(doubled, a)
        steps.append(Step(asserts(instance),
                          Sb(stability_index, (("p", a),))))
        steps.append(Step(asserts(a), MP(len(steps), index[asserts(doubled)])))
        inf = Inference((), tuple(steps))
    else:
        inf = convert_ipc(_term_to_derivation(term), ds)
    report = check_inference(ds, inf)
    if not report.ok:
        raise TemplateUnavailableError(f"positive proof fails checking: {report}")
    return inf


# --- system manifests ---------------------------------------------------------


def render_manifest(mode: Mode, frames: Sequence[Frame], bound: int,
                    family: Sequence[FamilyEntry],
                    oracle: Callable[[Formula], bool]) -> str:
    lines = [f"mode {mode}", f"bound {bound}"]
    for frame in frames:
        pairs = " ".join(f"{i}-{j}" for i in range(frame.n) for j in _bits(frame.rel[i]))
        lines.append(f"frame {frame.n} {pairs}".rstrip())
    for entry in family:
        sign = "+" if oracle(entry.formula) else "-"
        lines.append(f"{sign} {render(entry.formula)}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Manifest:
    mode: Mode
    frames: tuple[Frame, ...]
    bound: int
    marks: tuple[tuple[Sign, Formula], ...]


def parse_manifest(text: str) -> Manifest:
    mode: Optional[Mode] = None
    bound: Optional[int] = None
    frames: list[Frame] = []
    marks: list[tuple[Sign, Formula]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "mode":
            mode = Mode(parts[1])
        elif parts[0] == "bound":
            bound = int(parts[1])
        elif parts[0] == "frame":
            n = int(parts[1])
            pairs = []
            for token in parts[2:]:
                i, j = token.split("-")
                pairs.append((int(i), int(j)))
            from .semantics import frame_from_pairs
            frames.append(frame_from_pairs(mode or Mode.INT, n, pairs))
        elif parts[0] in ("+", "-"):
            if mode is None:
                raise ParseError("manifest must declare mode before formulas", 0)
            sign = Sign.ASSERT if parts[0] == "+" else Sign.REJECT
            marks.append((sign, parse_formula(line[1:].strip(), mode)))
        else:
            raise ParseError(f"unknown manifest directive {parts[0]!r}", 0)
    if mode is None or bound is None or not frames:
        raise ParseError("manifest needs mode, bound and at least one frame", 0)
    return Manifest(mode, tuple(frames), bound, tuple(marks))


def manifest_context(manifest: Manifest, budget: Optional[Budget] = None):
    """Rebuild oracle, family, and system from a manifest, verifying the
    recorded signs against the oracle."""
    oracle = tabular_oracle(list(manifest.frames),
                            budget or Budget(max_worlds=8, max_vars=8))
    family = jankov_family(manifest.bound)
    ds = build_system(oracle, family, manifest.mode)
    recorded = {render(f): sign for sign, f in manifest.marks}
    for entry in family:
        expected = Sign.ASSERT if oracle(entry.formula) else Sign.REJECT
        seen = recorded.get(render(entry.formula))
        if seen is not None and seen is not expected:
            raise ValueError(
                f"manifest sign for {render(entry.formula)} disagrees with its frames")
    return ds, oracle, family
