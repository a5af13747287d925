import pytest

from lukas.formulas import Mode, parse_formula, render
from lukas.kernel import check_inference, rejects, system
from lukas.prover import (
    HilbertDerivation,
    SearchBudget,
    countermodel_search,
    decide_ipc,
    derive_from_hypotheses,
    prove_ipc,
)
from lukas.semantics import enumerate_rooted_posets, frame_valid, model_validates, Budget
from lukas.transforms import convert_ipc

INT = system(Mode.INT)

THEOREMS = [
    "p -> p",
    "p -> (q -> p)",
    "(p -> (q -> r)) -> ((p -> q) -> (p -> r))",
    "p & q -> p",
    "p -> (q -> p & q)",
    "p -> p | q",
    "(p -> r) -> ((q -> r) -> (p | q -> r))",
    "bot -> p",
    "~~(p | ~p)",
    "~~(~~p -> p)",
    "(p -> q) -> (~q -> ~p)",
    "~(p | q) -> ~p & ~q",
    "~p & ~q -> ~(p | q)",
    "~p | ~q -> ~(p & q)",
    "p & (q | r) -> (p & q) | (p & r)",
    "(p & q) | (p & r) -> p & (q | r)",
    "p | (q & r) -> (p | q) & (p | r)",
    "(p | q) & (p | r) -> p | (q & r)",
    "~~~p -> ~p",
    "~p -> ~~~p",
    "(p -> (q -> r)) -> (q -> (p -> r))",
    "(p -> q) -> ((q -> r) -> (p -> r))",
    "((p -> q) -> r) -> (p -> (q -> r))",  # not minimal but valid: q -> (p -> q), chain
    "p -> ~~p",
    "~~(p & q) -> ~~p & ~~q",
    "~~p & ~~q -> ~~(p & q)",
    "(p -> ~p) -> ~p",
    "(~p -> p) -> ~~p",
    "((p | ~p) -> q) -> ~~q",
    "~~(p -> q) -> (~~p -> ~~q)",
]

CLASSICAL_ONLY = [
    "p | ~p",
    "~~p -> p",
    "((p -> q) -> p) -> p",
    "~p | ~~p",
    "(p -> q) | (q -> p)",
    "(~q -> ~p) -> (p -> q)",
    "~(p & q) -> ~p | ~q",
    "(p -> q) -> (~p | q)",
    "((p -> q) -> q) -> p | q",
    "(~p -> q) -> (~q -> p)",
]


def _hilbert_ok(derivation: HilbertDerivation) -> bool:
    inf = convert_ipc(derivation, INT)
    return check_inference(INT, inf).ok


@pytest.mark.parametrize("text", THEOREMS)
def test_theorems_prove_and_check(text):
    f = parse_formula(text)
    result = prove_ipc(f)
    assert result.proved, text
    assert result.derivation.conclusion == f
    assert _hilbert_ok(result.derivation)


@pytest.mark.parametrize("text", CLASSICAL_ONLY)
def test_classical_only_formulas_get_countermodels(text):
    f = parse_formula(text)
    result = prove_ipc(f)
    assert not result.proved, text
    model = result.countermodel
    assert model is not None
    assert model.frame.n <= 5
    assert model_validates(model, rejects(f))


def test_known_minimal_countermodel_shape():
    result = prove_ipc(parse_formula("~~p -> p"))
    model = result.countermodel
    assert model.frame.n == 2
    # p holds exactly at the top of the two-chain
    top = [w for w in range(2) if model.frame.rel[w] == (1 << w)][0]
    assert model.var_mask("p") == 1 << top


def test_fmp_agreement_on_small_corpus():
    frames = enumerate_rooted_posets(4)
    wide = Budget(max_worlds=8, max_vars=8)
    corpus = [parse_formula(t) for t in THEOREMS[:12] + CLASSICAL_ONLY]
    for f in corpus:
        if decide_ipc(f) is not None:
            assert all(frame_valid(g, f, wide) for g in frames), render(f)


def test_derive_from_hypotheses_direct():
    p, goal = parse_formula("p"), parse_formula("q -> p")
    derivation = derive_from_hypotheses([p], goal)
    assert derivation is not None
    assert derivation.conclusion == goal
    assert _inference_from(derivation, [p])


def test_derive_from_hypotheses_needs_substitution():
    hyp = parse_formula("~~p -> p")
    goal = parse_formula("q | ~q")
    derivation = derive_from_hypotheses([hyp], goal)
    assert derivation is not None
    assert derivation.conclusion == goal
    assert _inference_from(derivation, [hyp])
    # the substituted stability instance appears along the way
    instance = parse_formula("~~(q | ~q) -> (q | ~q)")
    assert any(step.formula == instance for step in derivation.steps)


def test_derive_from_hypotheses_gives_up_on_underivable():
    goal = parse_formula("~~p -> p")
    assert derive_from_hypotheses([], goal, SearchBudget(max_attempts=200)) is None


def _inference_from(derivation, hypotheses):
    inf = convert_ipc(derivation, INT)
    report = check_inference(INT, inf)
    assert report.ok
    assert set(h.formula for h in inf.hypotheses) == set(hypotheses)
    return True


def test_countermodel_search_is_sound():
    for text in CLASSICAL_ONLY:
        f = parse_formula(text)
        model = countermodel_search(f)
        assert model is not None
        assert model_validates(model, rejects(f))


def test_theorem_has_no_countermodel():
    assert countermodel_search(parse_formula("p -> p")) is None
