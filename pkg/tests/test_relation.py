"""Assignments and annotated relations: marginals, sums, consistency."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctxfam.fdlogic import FD
from ctxfam.monoid import MonoidKind, MonoidValue
from ctxfam.relation import (
    Assignment,
    DomainError,
    KRelation,
    consistent,
    scalar_fill,
)

from conftest import CS, CS_ROWS, ST, ST_ROWS, TC, TC_ROWS, brel, row, wrel


class TestAssignment:
    def test_restriction(self):
        s = row(("x", "y", "z"), ("0", "1", "0"))
        assert s.restrict({"x", "z"}) == row(("x", "z"), ("0", "0"))

    def test_restriction_requires_bound_variables(self):
        s = row(("x", "y"), ("0", "1"))
        with pytest.raises(DomainError):
            s.restrict({"x", "w"})

    def test_duplicate_variable_rejected(self):
        with pytest.raises(ValueError):
            Assignment([("x", "0"), ("x", "1")])

    def test_ordering_is_by_variable_then_value(self):
        s = Assignment({"b": "1", "a": "0"})
        assert str(s) == "a=0,b=1"

    def test_value_equality_is_literal(self):
        assert row(("x",), ("0",)) != row(("x",), (0,))


class TestConstruction:
    def test_rows_must_match_declared_variables(self):
        with pytest.raises(DomainError):
            KRelation(
                frozenset({"x", "y"}),
                MonoidKind.B,
                {row(("x",), ("0",)): MonoidValue.one(MonoidKind.B)},
            )

    def test_zero_annotations_rejected(self):
        with pytest.raises(ValueError):
            KRelation(
                frozenset({"x"}),
                MonoidKind.N,
                {row(("x",), ("0",)): MonoidValue.zero(MonoidKind.N)},
            )

    def test_kind_must_be_uniform(self):
        with pytest.raises(ValueError):
            KRelation(
                frozenset({"x"}),
                MonoidKind.N,
                {row(("x",), ("0",)): MonoidValue.one(MonoidKind.Q)},
            )


class TestMarginalise:
    def test_collapsing_rows_sums_weights(self):
        r = wrel(MonoidKind.N, CS, [(v, 1) for v in CS_ROWS])
        marginal = r.marginalise({"Course"})
        assert marginal == wrel(
            MonoidKind.N, ("Course",), [(("Math",), 1), (("CS",), 2)]
        )

    def test_identity_restriction(self):
        r = brel(ST, ST_ROWS)
        assert r.marginalise(set(ST)) == r

    def test_empty_restriction_totals_mass(self):
        r = wrel(
            MonoidKind.N,
            ("x",),
            [(("a",), 1), (("b",), 2), (("c",), 3)],
        )
        marginal = r.marginalise(set())
        assert marginal.annotation(Assignment({})) == MonoidValue.of(
            MonoidKind.N, 6
        )
        assert r.total() == MonoidValue.of(MonoidKind.N, 6)

    def test_outside_variables_rejected(self):
        r = brel(ST, ST_ROWS)
        with pytest.raises(DomainError):
            r.marginalise({"Course"})


values = st.sampled_from(["0", "1", "2"])


def relations(kind: MonoidKind):
    weight = {
        MonoidKind.B: st.just(1),
        MonoidKind.N: st.integers(min_value=1, max_value=5),
        MonoidKind.Q: st.fractions(min_value=Fraction(1, 4), max_value=3, max_denominator=4),
    }[kind]
    return st.dictionaries(
        st.tuples(values, values, values), weight, min_size=0, max_size=6
    ).map(
        lambda d: KRelation(
            frozenset({"x", "y", "z"}),
            kind,
            {
                row(("x", "y", "z"), k): MonoidValue.of(kind, v)
                for k, v in d.items()
            },
        )
    )


any_relation = st.one_of(
    relations(MonoidKind.B), relations(MonoidKind.N), relations(MonoidKind.Q)
)


class TestMarginaliseProperties:
    @given(any_relation)
    def test_composition(self, r):
        assert r.marginalise({"x", "y"}).marginalise({"x"}) == r.marginalise({"x"})

    @given(any_relation)
    def test_mass_conservation(self, r):
        assert r.marginalise({"x"}).total() == r.total()

    @given(any_relation)
    def test_support_commutes_with_marginalisation(self, r):
        projected = {s.restrict({"x", "y"}) for s in r.support}
        assert r.marginalise({"x", "y"}).support == projected

    @given(relations(MonoidKind.N), relations(MonoidKind.N))
    def test_add_commutes_with_marginalisation(self, r, s):
        assert (r + s).marginalise({"y"}) == r.marginalise({"y"}) + s.marginalise({"y"})


class TestSupport:
    def test_examples(self):
        assert brel(("x",), [("0",)]).support == {row(("x",), ("0",))}
        assert brel(("x",), []).support == frozenset()
        r = wrel(MonoidKind.N, ("x",), [(("a",), 2), (("b",), 1)])
        assert r.support == {row(("x",), ("a",)), row(("x",), ("b",))}

    def test_support_relation_is_boolean(self):
        r = wrel(MonoidKind.Q, ("x",), [(("a",), Fraction(1, 2))])
        assert r.support_relation() == brel(("x",), [("a",)])


class TestScalarFill:
    def test_uniform_weights(self):
        rows = [row(ST, r) for r in ST_ROWS]
        r = scalar_fill(MonoidValue.of(MonoidKind.N, 1), frozenset(ST), rows)
        assert all(w == MonoidValue.of(MonoidKind.N, 1) for _, w in r.rows())

    def test_third_weight_masses_to_one(self):
        rows = [row(("x",), (v,)) for v in ("a", "b", "c")]
        r = scalar_fill(
            MonoidValue.of(MonoidKind.Q, Fraction(1, 3)), frozenset({"x"}), rows
        )
        assert r.total() == MonoidValue.of(MonoidKind.Q, 1)

    def test_zero_fill_rejected(self):
        with pytest.raises(ValueError):
            scalar_fill(
                MonoidValue.zero(MonoidKind.N),
                frozenset({"x"}),
                [row(("x",), ("a",))],
            )


class TestAdd:
    def test_pointwise_sum(self):
        a = wrel(MonoidKind.N, ("x",), [(("s",), 1)])
        b = wrel(MonoidKind.N, ("x",), [(("s",), 2)])
        assert a + b == wrel(MonoidKind.N, ("x",), [(("s",), 3)])

    def test_disjoint_rows_merge(self):
        a = wrel(MonoidKind.N, ("x",), [(("s",), 1)])
        b = wrel(MonoidKind.N, ("x",), [(("t",), 1)])
        assert a + b == wrel(MonoidKind.N, ("x",), [(("s",), 1), (("t",), 1)])

    def test_boolean_add_is_idempotent(self):
        a = brel(("x",), [("s",)])
        assert a + a == a

    def test_mismatches_rejected(self):
        a = brel(("x",), [("s",)])
        b = brel(("y",), [("s",)])
        with pytest.raises(DomainError):
            a + b


class TestConsistent:
    def test_teaching_contexts_agree_on_teacher(self):
        assert consistent(brel(ST, ST_ROWS), brel(TC, TC_ROWS))

    def test_disjoint_domains_compare_total_mass(self):
        a = wrel(MonoidKind.N, ("x",), [(("0",), 2)])
        b = wrel(MonoidKind.N, ("y",), [(("0",), 1), (("1",), 1)])
        assert consistent(a, b)
        c = wrel(MonoidKind.N, ("y",), [(("0",), 1)])
        assert not consistent(a, c)

    def test_single_row_disagreement(self):
        a = brel(("x", "y"), [("0", "0")])
        b = brel(("y", "z"), [("1", "1")])
        assert not consistent(a, b)

    @given(relations(MonoidKind.N), relations(MonoidKind.N))
    def test_symmetric(self, r, s):
        assert consistent(r, s) == consistent(s, r)


class TestSatisfies:
    def test_functional_columns(self):
        assert brel(ST, ST_ROWS).satisfies(FD.unary("Student", "Teacher"))

    def test_branching_column_fails(self):
        assert not brel(CS, CS_ROWS).satisfies(FD.unary("Course", "Student"))

    def test_reflexive_always_holds(self):
        for rows in ([], CS_ROWS):
            assert brel(CS, rows).satisfies(FD.unary("Course", "Course"))

    def test_weights_do_not_matter(self):
        r = wrel(
            MonoidKind.Q,
            ("x", "y"),
            [(("0", "0"), Fraction(1, 2)), (("0", "1"), Fraction(1, 2))],
        )
        assert not r.satisfies(FD.unary("x", "y"))
        assert r.satisfies(FD.unary("y", "x"))

    def test_variables_must_be_present(self):
        with pytest.raises(DomainError):
            brel(ST, ST_ROWS).satisfies(FD.unary("Student", "Course"))
