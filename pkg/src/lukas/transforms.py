"""Constructive passes over checked inferences: positive-step extraction,
Hilbert-to-signed-inference conversion, and the refutation transformer that
turns a positive derivation of an underivable formula into a refutation of
one of its hypotheses.

Every output is pushed back through `check_inference` before it is returned;
the transformer is never trusted on its own.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Callable, Optional

from .formulas import (
    BOT,
    And,
    Bottom,
    Formula,
    Implies,
    Or,
    Var,
    apply_substitution,
    has_box,
    render,
    variables,
)
from .kernel import (
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
)
from .prover import HilbertDerivation, _Search, _term_to_derivation, _plausibly_valid


class TransformError(ValueError):
    """A transform precondition does not hold."""


class OracleInconsistencyError(TransformError):
    """The underivability oracle contradicts what the inference exhibits."""


class SymmetryDefectError(TransformError):
    """The transformer needed a positive derivation it cannot reconstruct."""


# --- positive extraction -----------------------------------------------------


def extract_positive(inf: Inference) -> Inference:
    """Delete all rejected steps and re-point the survivors' indices.

    Requires positive hypotheses and a positive conclusion; the result
    derives the same conclusion from the same hypotheses.
    """
    if any(h.sign is not Sign.ASSERT for h in inf.hypotheses):
        raise TransformError("extraction requires positive hypotheses")
    if not inf.steps or inf.conclusion.sign is not Sign.ASSERT:
        raise TransformError("extraction requires a positive conclusion")

    mapping: dict[int, int] = {}
    kept: list[Step] = []
    for old, step in enumerate(inf.steps, start=1):
        if step.statement.sign is not Sign.ASSERT:
            continue
        just: Justification = step.justification
        if isinstance(just, MP):
            just = MP(mapping[just.major], mapping[just.minor])
        elif isinstance(just, Sb):
            just = Sb(mapping[just.source], just.mapping)
        elif isinstance(just, NS):
            just = NS(mapping[just.source])
        elif not isinstance(just, (Axiom, Hypothesis)):
            raise TransformError(
                f"positive step {old} carries a rejection-rule justification")
        kept.append(Step(step.statement, just))
        mapping[old] = len(kept)
    return Inference(inf.hypotheses, tuple(kept))


# --- Hilbert conversion ------------------------------------------------------


def convert_ipc(derivation: HilbertDerivation, ds: DeductiveSystem) -> Inference:
    """Map a Hilbert derivation (axioms, hypotheses, MP, substitution) onto a
    signed inference, rule for rule.  Valid in any system that contains the
    intuitionistic basis, which every `DeductiveSystem` does."""
    steps: list[Step] = []
    for step in derivation.steps:
        if step.rule == "axiom":
            just: Justification = Axiom()
        elif step.rule == "hyp":
            just = Hypothesis()
        elif step.rule == "mp":
            just = MP(step.refs[0], step.refs[1])
        elif step.rule == "sub":
            just = Sb(step.refs[0], step.subst)
        else:
            raise TransformError(f"unknown Hilbert rule {step.rule!r}")
        steps.append(Step(asserts(step.formula), just))
    inf = Inference(tuple(asserts(h) for h in derivation.hypotheses), tuple(steps))
    report = check_inference(ds, inf)
    if not report.ok:
        raise TransformError(f"converted derivation failed checking: {report}")
    return inf


# --- the refutation transformer ----------------------------------------------

_TOP = Implies(BOT, BOT)


@lru_cache(maxsize=1)
def _apply_template() -> HilbertDerivation:
    """Derivation of p -> ((p -> q) -> q)."""
    goal = Implies(Var("p"), Implies(Implies(Var("p"), Var("q")), Var("q")))
    term = _Search(100_000).prove([], goal)
    assert term is not None
    return _term_to_derivation(term)


def _classical_value(a: Formula, env: dict[str, bool]) -> bool:
    if isinstance(a, Var):
        return env[a.name]
    if isinstance(a, Bottom):
        return False
    if isinstance(a, And):
        return _classical_value(a.left, env) and _classical_value(a.right, env)
    if isinstance(a, Or):
        return _classical_value(a.left, env) or _classical_value(a.right, env)
    if isinstance(a, Implies):
        return (not _classical_value(a.left, env)) or _classical_value(a.right, env)
    raise TypeError(f"not a propositional formula: {a!r}")


class _RefutationBuilder:
    """Accumulates the refutation inference, deduplicating by statement."""

    def __init__(self, ds: DeductiveSystem, hypothesis: Statement):
        self.ds = ds
        self.steps: list[Step] = []
        self.index: dict[Statement, int] = {}
        self.replayed = 0
        self.hypothesis = hypothesis
        self.add(hypothesis, Hypothesis())

    def add(self, statement: Statement, just: Justification) -> int:
        existing = self.index.get(statement)
        if existing is not None:
            return existing
        self.steps.append(Step(statement, just))
        n = len(self.steps)
        self.index[statement] = n
        return n

    def replay_positive(self, inf: Inference, upto: int) -> int:
        """Splice the support closure of step `upto` of an all-positive,
        hypothesis-free (within that support) inference."""
        support = _support(inf, upto)
        mapping: dict[int, int] = {}
        for old in sorted(support):
            step = inf.steps[old - 1]
            just = step.justification
            if isinstance(just, Axiom):
                new_just: Justification = Axiom()
            elif isinstance(just, Sb):
                new_just = Sb(mapping[just.source], just.mapping)
            elif isinstance(just, MP):
                new_just = MP(mapping[just.major], mapping[just.minor])
            elif isinstance(just, NS):
                new_just = NS(mapping[just.source])
            else:
                raise SymmetryDefectError("support contains a hypothesis step")
            mapping[old] = self.add(step.statement, new_just)
            self.replayed += 1
        return mapping[upto]

    def replay_hilbert(self, derivation: HilbertDerivation) -> int:
        mapping: dict[int, int] = {}
        for i, step in enumerate(derivation.steps, start=1):
            if step.rule == "axiom":
                mapping[i] = self.add(asserts(step.formula), Axiom())
            elif step.rule == "mp":
                mapping[i] = self.add(asserts(step.formula),
                                      MP(mapping[step.refs[0]], mapping[step.refs[1]]))
            elif step.rule == "sub":
                mapping[i] = self.add(asserts(step.formula),
                                      Sb(mapping[step.refs[0]], step.subst))
            else:
                raise SymmetryDefectError("lemma derivation uses hypotheses")
            self.replayed += 1
        return mapping[len(derivation.steps)]

    def build(self) -> Inference:
        return Inference((self.hypothesis,), tuple(self.steps))


def _support(inf: Inference, target: int) -> set[int]:
    out: set[int] = set()
    stack = [target]
    while stack:
        i = stack.pop()
        if i in out:
            continue
        out.add(i)
        just = inf.steps[i - 1].justification
        if isinstance(just, (MP, MT)):
            stack.extend((just.major, just.minor))
        elif isinstance(just, (Sb, RS, NS, RN)):
            stack.append(just.source)
    return out


def _hypothesis_free(inf: Inference, target: int) -> bool:
    return not any(isinstance(inf.steps[i - 1].justification, Hypothesis)
                   for i in _support(inf, target))


def _prove_lemma(lemma: Formula, fuel: int = 80_000) -> Optional[HilbertDerivation]:
    if has_box(lemma):
        return None
    if not _plausibly_valid(lemma):
        return None
    term = _Search(fuel).prove([], lemma)
    if term is None:
        return None
    return _term_to_derivation(term)


def symmetry_transform(ds: DeductiveSystem,
                       inf: Inference,
                       derivable: Callable[[Formula], bool],
                       prove_positive: Optional[Callable[[Formula], Optional[Inference]]] = None,
                       ) -> tuple[int, Inference]:
    """Given an all-positive checked inference of +B from +A1..+An where the
    oracle says B is underivable, produce (i, ref) with ref a checked
    inference of -Ai from the single hypothesis -B.

    `derivable` must soundly decide derivability in the system (a tabular
    semantic oracle at desk scale).  `prove_positive`, when given, supplies a
    hypothesis-free positive inference for a derivable formula whenever the
    input inference cannot be replayed for it.
    """
    if not inf.steps:
        raise TransformError("empty inference")
    if any(s.statement.sign is not Sign.ASSERT for s in inf.steps):
        raise TransformError("transformer requires an all-positive inference")
    if any(h.sign is not Sign.ASSERT for h in inf.hypotheses):
        raise TransformError("transformer requires positive hypotheses")
    report = check_inference(ds, inf)
    if not report.ok:
        raise TransformError(f"input inference fails checking: {report}")
    conclusion = inf.conclusion.formula
    if derivable(conclusion):
        raise OracleInconsistencyError(
            f"oracle derives the conclusion {render(conclusion)}")

    builder = _RefutationBuilder(ds, rejects(conclusion))

    def replay_derivable(target_index: int, formula: Formula) -> int:
        if _hypothesis_free(inf, target_index):
            return builder.replay_positive(inf, target_index)
        if prove_positive is not None:
            supplied = prove_positive(formula)
            if supplied is not None:
                _validate_supplied(ds, supplied, formula)
                return _splice_inference(builder, supplied)
        raise SymmetryDefectError(
            f"no hypothesis-free derivation available for {render(formula)}")

    def recurse(target_index: int, rejected_index: int) -> int:
        step = inf.steps[target_index - 1]
        formula = step.statement.formula
        just = step.justification

        if isinstance(just, Hypothesis):
            for i, hyp in enumerate(inf.hypotheses, start=1):
                if hyp.formula == formula:
                    return i
            raise TransformError("hypothesis step not among hypotheses")
        if isinstance(just, Axiom):
            raise OracleInconsistencyError(
                f"axiom {render(formula)} reached with an underivable target")
        if isinstance(just, Sb):
            source = inf.steps[just.source - 1].statement.formula
            rejected = builder.add(rejects(source), RS(rejected_index))
            return recurse(just.source, rejected)
        if isinstance(just, NS):
            source = inf.steps[just.source - 1].statement.formula
            rejected = builder.add(rejects(source), RN(rejected_index))
            return recurse(just.source, rejected)
        if isinstance(just, MP):
            major = inf.steps[just.major - 1].statement.formula
            minor = inf.steps[just.minor - 1].statement.formula
            assert isinstance(major, Implies) and major.left == minor \
                and major.right == formula
            if derivable(major):
                if derivable(minor):
                    raise OracleInconsistencyError(
                        "oracle derives both premises of an underivable conclusion")
                major_index = replay_derivable(just.major, major)
                rejected = builder.add(rejects(minor), MT(major_index, rejected_index))
                return recurse(just.minor, rejected)
            return _transfer(target_index, rejected_index, just, major, minor, formula)
        raise TransformError(f"unsupported justification on a positive step: {just!r}")

    def _transfer(target_index: int, rejected_index: int, just: MP,
                  major: Formula, minor: Formula, formula: Formula) -> int:
        """The underivable-major branch: derive -major from -conclusion and
        recurse on the major's own derivation."""
        del target_index

        def reject_via_lemma(lemma_target: Formula, subst: dict[str, Formula],
                             source_index: int) -> Optional[int]:
            instance = apply_substitution(subst, lemma_target)
            lemma = _prove_lemma(Implies(instance, formula))
            if lemma is None:
                return None
            lemma_index = builder.replay_hilbert(lemma)
            rejected_instance = builder.add(
                rejects(instance), MT(lemma_index, rejected_index))
            if instance == lemma_target:
                rejected = rejected_instance
            else:
                rejected = builder.add(rejects(lemma_target), RS(rejected_instance))
            return recurse(source_index, rejected)

        # direct: the rejected conclusion already refutes the major
        if not has_box(major):
            outcome = reject_via_lemma(major, {}, just.major)
            if outcome is not None:
                return outcome
            # boolean substitutions: refute the minor or the major classically
            names = sorted(variables(major))
            if len(names) <= 10:
                for values in itertools.product((False, True), repeat=len(names)):
                    env = dict(zip(names, values))
                    subst = {n: (_TOP if v else BOT) for n, v in env.items()}
                    if not _classical_value(minor, env):
                        if derivable(minor):
                            raise OracleInconsistencyError(
                                "oracle derives a classically refutable formula")
                        outcome = reject_via_lemma(
                            minor, {n: subst[n] for n in variables(minor)}, just.minor)
                        if outcome is not None:
                            return outcome
                    elif not _classical_value(formula, env):
                        outcome = reject_via_lemma(major, subst, just.major)
                        if outcome is not None:
                            return outcome
            # substitute the rejected conclusion itself for the variables
            if not derivable(minor):
                subst = {n: formula for n in variables(minor)}
                outcome = reject_via_lemma(minor, subst, just.minor)
                if outcome is not None:
                    return outcome
            subst = {n: formula for n in variables(major)}
            outcome = reject_via_lemma(major, subst, just.major)
            if outcome is not None:
                return outcome
        # internalised modus ponens from a derivable minor
        if derivable(minor):
            minor_index = replay_derivable(just.minor, minor)
            template_index = builder.replay_hilbert(_apply_template())
            instance = Implies(minor, Implies(major, formula))
            inst_index = builder.add(
                asserts(instance),
                Sb(template_index, tuple(sorted({"p": minor, "q": formula}.items()))))
            peeled = builder.add(asserts(Implies(major, formula)),
                                 MP(inst_index, minor_index))
            rejected = builder.add(rejects(major), MT(peeled, rejected_index))
            return recurse(just.major, rejected)
        raise SymmetryDefectError(
            f"cannot transfer the rejection of {render(formula)} to {render(major)}")

    hypothesis_index = recurse(len(inf.steps), 1)
    target = rejects(inf.hypotheses[hypothesis_index - 1].formula)
    if builder.steps[-1].statement != target:
        # recursion may have ended on a deduplicated step; re-point by a
        # final repetition through RS with the identity match
        last = builder.index[target]
        builder.steps.append(Step(target, RS(last)))
    result = builder.build()
    report = check_inference(ds, result)
    if not report.ok:
        raise SymmetryDefectError(f"constructed refutation fails checking: {report}")
    return hypothesis_index, result


def _validate_supplied(ds: DeductiveSystem, supplied: Inference, formula: Formula) -> None:
    if supplied.hypotheses:
        raise SymmetryDefectError("supplied derivation must be hypothesis-free")
    if any(s.statement.sign is not Sign.ASSERT for s in supplied.steps):
        raise SymmetryDefectError("supplied derivation must be all-positive")
    if supplied.conclusion.formula != formula:
        raise SymmetryDefectError("supplied derivation proves the wrong formula")
    report = check_inference(ds, supplied)
    if not report.ok:
        raise SymmetryDefectError(f"supplied derivation fails checking: {report}")


def _splice_inference(builder: _RefutationBuilder, supplied: Inference) -> int:
    mapping: dict[int, int] = {}
    for old, step in enumerate(supplied.steps, start=1):
        just = step.justification
        if isinstance(just, Axiom):
            new_just: Justification = Axiom()
        elif isinstance(just, Sb):
            new_just = Sb(mapping[just.source], just.mapping)
        elif isinstance(just, MP):
            new_just = MP(mapping[just.major], mapping[just.minor])
        elif isinstance(just, NS):
            new_just = NS(mapping[just.source])
        else:
            raise SymmetryDefectError("supplied derivation uses rejection rules")
        mapping[old] = builder.add(step.statement, new_just)
        builder.replayed += 1
    return mapping[len(supplied.steps)]
