import itertools
import random
from fractions import Fraction

import pytest

from latticeplast.algebra import (
    BudgetExceeded,
    LambdaCertificate,
    XiCertificate,
    check_admissible,
    check_admissible_nodewise,
    check_irreducible,
    completeness_report,
    cone_residuals,
    exhaustive_irreducible_sets,
    positive_certificate,
    sign_pattern_infeasible,
    xi_certificate_valid,
)
from latticeplast.model import incidence_matrix
from latticeplast.topology import SignedIndexSet, enumerate_index_sets

from .conftest import random_graphs

S = SignedIndexSet
CUT_135 = S([(1, 1), (-1, 3), (-1, 6), (1, 8)])


def random_index_set(rng, g, mixed=True):
    pool = [(a, j) for j in range(1, g.m + 1) for a in (1, -1)]
    k = rng.randint(1, min(len(pool), g.m - g.n + 3))
    chosen = rng.sample(pool, k)
    if not mixed:
        chosen = list({j: (a, j) for a, j in chosen}.values())
    return S(chosen)


def test_admissible_benchmark_set(bench):
    v = check_admissible(bench, CUT_135)
    assert v.admissible and isinstance(v.certificate, LambdaCertificate)
    assert v.certificate.c1 == 1
    assert list(v.certificate.lambdas.values()) == [1, 1, 1, 1]
    # substitution oracle: xi = indicator of psi's side
    lengths = incidence_matrix(bench) @ [0, 1, 0, 1, 0, 1]
    assert [lengths[j - 1] for _, j in CUT_135] == [1, -1, -1, 1]


def test_singleton_inadmissible(bench):
    v = check_admissible(bench, S([(1, 1)]))
    assert not v.admissible and v.certificate is None
    assert "y =" in v.refutation


def test_one_spring(one_spring):
    v = check_admissible(one_spring, S([(1, 1)]))
    assert v.admissible and v.certificate.lambdas[(1, 1)] == 1
    assert not check_admissible(one_spring, S([(-1, 1)])).admissible
    assert check_admissible_nodewise(one_spring, S([(1, 1)])).certificate.xi == (0, 1)


def test_nodewise_examples(bench):
    v = check_admissible_nodewise(bench, CUT_135)
    assert isinstance(v.certificate, XiCertificate)
    assert v.certificate.xi == (0, 1, 0, 1, 0, 1)
    assert not check_admissible_nodewise(bench, S([(1, 1), (1, 3)])).admissible
    assert not check_admissible(bench, S([(1, 1), (1, 3)])).admissible


def test_empty_or_unknown_rejected(bench):
    with pytest.raises(ValueError):
        check_admissible(bench, S([]))
    with pytest.raises(ValueError, match="unknown spring"):
        check_admissible(bench, S([(1, 9)]))


def test_irreducible_examples(bench):
    assert check_irreducible(bench, S([(1, 1), (1, 2)])).irreducible
    assert check_irreducible(bench, CUT_135).irreducible
    rep = check_irreducible(bench, S([(1, 1), (1, 2), (1, 7), (1, 8)]))
    assert not rep.irreducible and rep.applicable
    sub = rep.failing_subset
    assert check_admissible(bench, sub).admissible
    assert S([(1, 1), (1, 2)]).issubset(sub) or S([(1, 7), (1, 8)]).issubset(sub)
    assert check_admissible(bench, S([(1, 1), (1, 2)])).admissible


def test_irreducibility_not_applicable(bench):
    rep = check_irreducible(bench, S([(1, 1)]))
    assert not rep.applicable and not rep.irreducible


def test_positive_certificates(bench, one_spring):
    cert, t = positive_certificate(bench, CUT_135)
    assert t == 1 and set(cert.lambdas.values()) == {1}
    cert, t = positive_certificate(bench, S([(1, 1), (1, 2)]))
    assert t > 0 and cert.lambdas[(1, 1)] == cert.lambdas[(1, 2)] > 0
    cert, t = positive_certificate(one_spring, S([(1, 1)]))
    assert cert.lambdas[(1, 1)] == 1
    with pytest.raises(ValueError, match="reducible"):
        positive_certificate(bench, S([(1, 1), (1, 2), (1, 7), (1, 8)]))


def test_exhaustive_one_spring(one_spring):
    assert exhaustive_irreducible_sets(one_spring) == [S([(1, 1)])]


def test_exhaustive_contains_topological(bench):
    found = set(exhaustive_irreducible_sets(bench, 4))
    for e in enumerate_index_sets(bench):
        assert e.index_set in found
    assert all(len(s) <= 4 for s in found)


def test_exhaustive_matches_definition_small(path3):
    # brute force straight from the definition: admissible and no admissible proper subset
    pool = [(a, j) for j in range(1, path3.m + 1) for a in (1, -1)]
    expected = []
    for k in range(1, 4):
        for combo in itertools.combinations(pool, k):
            if len({j for _, j in combo}) < k:
                continue
            s = S(combo)
            if not check_admissible(path3, s).admissible:
                continue
            subs = (S(c) for r in range(1, k) for c in itertools.combinations(combo, r))
            if not any(check_admissible(path3, x).admissible for x in subs):
                expected.append(s)
    assert set(exhaustive_irreducible_sets(path3, 3)) == set(expected)
    assert set(expected) == {S([(1, 1)]), S([(1, 2)])}


def test_budget_guard(bench):
    with pytest.raises(BudgetExceeded):
        exhaustive_irreducible_sets(bench, 8, budget=1000)


def test_completeness_report_benchmark(bench):
    rep = completeness_report(bench)
    assert rep.only_algebraic == [] and rep.only_topological == []


@pytest.mark.parametrize("seed", range(8))
def test_checkers_agree(seed):
    rng = random.Random(seed)
    for g in random_graphs(10, seed=1000 + seed):
        for _ in range(5):
            i0 = random_index_set(rng, g)
            a = check_admissible(g, i0)
            b = check_admissible_nodewise(g, i0)
            assert a.admissible == b.admissible, (g, i0)


@pytest.mark.parametrize("g", random_graphs(25, seed=77))
def test_bipartition_sets_certified(g):
    for e in enumerate_index_sets(g):
        verdict = check_admissible(g, e.index_set)
        assert verdict.admissible
        rel1, rel2 = cone_residuals(g, e.index_set, verdict.certificate.lambdas, verdict.certificate.c1)
        assert rel1 == 0 and not any(rel2)
        assert check_irreducible(g, e.index_set).irreducible
        assert len(e.index_set) <= g.m - g.n + 2
        xi = check_admissible_nodewise(g, e.index_set).certificate.xi
        assert set(xi) <= {0, 1}
        assert xi_certificate_valid(g, e.index_set, xi)
        _, t = positive_certificate(g, e.index_set)
        assert t > 0


@pytest.mark.parametrize("seed", range(5))
def test_monotone_under_supersets(seed):
    rng = random.Random(seed)
    for g in random_graphs(8, seed=500 + seed):
        for _ in range(5):
            small = random_index_set(rng, g)
            big = small.union(random_index_set(rng, g))
            if check_admissible(g, small).admissible:
                assert check_admissible(g, big).admissible


def test_mixed_pair_accepted(bench):
    # spring 1 both ways plus the rest of the phi cut
    i0 = S([(1, 1), (-1, 1), (1, 2)])
    assert i0.has_mixed_pair
    assert check_admissible(bench, i0).admissible == check_admissible_nodewise(bench, i0).admissible


def test_certificates_are_exact(bench):
    v = check_admissible(bench, S([(1, 2), (1, 3), (1, 6), (1, 7)]))
    assert all(isinstance(x, Fraction) for x in v.certificate.lambdas.values())


@pytest.mark.parametrize("seed", range(6))
def test_sign_filter_matches_lp(seed):
    rng = random.Random(seed)
    for g in random_graphs(10, seed=900 + seed):
        for _ in range(10):
            i0 = random_index_set(rng, g)
            if sign_pattern_infeasible(g, i0):
                assert not check_admissible(g, i0).admissible
            else:
                assert check_admissible(g, i0).admissible
