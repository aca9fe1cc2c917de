import pytest

from conftest import facts
from fcqa.blowup import (CYCLES, INDIVIDUAL_PREFIX, AcyclicGroup,
                         acyclic_group, ball_size, build_universal_model,
                         cautious_quotient, check_cautious,
                         closed_walk_words, compose, cycle_group,
                         cyclic_group, enumerate_group, fact_labels,
                         identity, individualize, inverse, mixed_product,
                         order, rotation, simple_product,
                         strip_individualizing, verify_cycles, verify_girth)
from fcqa.closure import finite_closure
from fcqa.errors import ResourceError, UsageError
from fcqa.gen import random_problem
from fcqa.model import FD, DependencySet
from fcqa.oracle import verify_k_sound, verify_model
from fcqa.qa import find_match
from fcqa.textio import parse_problem
from fcqa.utils import make_rng

TWO_CYCLE = parse_problem('rel R/2 .\nrel S/2 .\n'
                          '? :- R(x, y), S(y, x) .').queries[0]


class TestPermutations:

    def test_inverse(self):
        p = rotation(5, 2)
        assert compose(p, inverse(p)) == identity(5)
        assert compose(inverse(p), p) == identity(5)

    def test_compose_applies_right_first(self):
        p, q = (1, 0, 2), (0, 2, 1)
        assert compose(p, q) == (1, 2, 0)

    def test_ball_size(self):
        assert ball_size(1, 2) == 5
        assert ball_size(2, 2) == 17

    def test_order(self):
        assert order(identity(4)) == 1
        assert order(rotation(6, 2)) == 3
        assert order((1, 0, 3, 4, 2)) == 6


class TestGroups:

    def test_cyclic_order(self):
        group = cyclic_group(7, ['x', 'y'], {'y': 3})
        assert len(enumerate_group(group)) == 7
        assert group.elements[0] == identity(7)

    def test_order_cap(self):
        with pytest.raises(ResourceError):
            enumerate_group(cyclic_group(10, ['x']), max_order=5)

    def test_single_label(self):
        group = acyclic_group(['x'], 5, make_rng(0))
        assert group.degree == 5 and group.girth_certified == 5
        assert verify_girth(group, 5)
        assert not verify_girth(cyclic_group(3, ['x']), 5)

    def test_certified_generators(self):
        group = acyclic_group(['x', 'y'], 5, make_rng(1))
        assert group.girth_certified == 5
        assert verify_girth(group, 5)
        assert set(group.generators) == {'x', 'y'}

    def test_bad_requests(self):
        with pytest.raises(UsageError):
            acyclic_group([], 5, make_rng(0))
        with pytest.raises(UsageError):
            acyclic_group(['x'], 2, make_rng(0))
        with pytest.raises(ResourceError):
            acyclic_group(['x', 'y', 'z'], 9, make_rng(0), max_words=100)

    def test_trivial_group(self):
        group = AcyclicGroup(1, {})
        assert enumerate_group(group) == [(0,)]
        assert verify_girth(group, 99)

    def test_wide_girth_is_certified(self):
        group = acyclic_group(['x%d' % i for i in range(8)], 7, make_rng(7))
        assert group.girth_certified == 7 and verify_girth(group, 7)
        assert all(order(p) >= 7 for p in group.generators.values())


class TestCycleGroups:
    """Groups only asked to break the closed walks of an instance"""

    def setup_method(self):
        self.base = facts('R a b')
        self.instance = facts('R a b', 'S b a')
        self.labels = fact_labels(self.instance, self.base)

    def test_walk_words(self):
        assert closed_walk_words(self.instance, self.base, 1) == []
        words = closed_walk_words(self.instance, self.base, 2)
        # around the R-S two-cycle, once each way
        assert len(words) == 2
        assert all(len(w) == 2 for w in words)
        assert closed_walk_words(self.base, self.base, 3) == []

    def test_self_loop_is_a_short_cycle(self):
        looped = facts('R c c')
        assert len(closed_walk_words(looped, facts(), 1)) == 2

    def test_separation(self):
        words = closed_walk_words(self.instance, self.base, 2)
        twisted = cyclic_group(3, self.labels,
                               {self.labels[0]: 1, self.labels[1]: 2})
        assert twisted.separates(words)
        flat = cyclic_group(3, self.labels, {label: 1 for label in
                                             self.labels})
        assert not flat.separates(words)

    def test_smallest_group(self):
        words = closed_walk_words(self.instance, self.base, 2)
        group = cycle_group(self.labels, words, 5, make_rng(0))
        assert group.strategy == CYCLES and group.cycles == 2
        assert group.degree <= 3 and group.separates(words)
        assert verify_cycles(group, self.instance, self.base, 5)

    def test_no_cycle_needs_no_group(self):
        group = cycle_group(self.labels, [], 5, make_rng(0))
        assert group.degree == 1 and group.girth_certified == 5

    def test_commutator_needs_a_nonabelian_group(self):
        word = ((('x', 1), 1), (('y', 1), 1), (('x', 1), -1),
                (('y', 1), -1))
        group = cycle_group([('x', 1), ('y', 1)], [word], 9,
                            make_rng(0))
        assert group.degree >= 3 and group.separates([word])
        assert len(enumerate_group(group)) <= 5000

    def test_order_cap(self):
        words = closed_walk_words(self.instance, self.base, 2)
        with pytest.raises(ResourceError):
            cycle_group(self.labels, words, 5, make_rng(0), max_order=1)


class TestProduct:
    """Twisting S(b, a) by a rotation of Z/3 unrolls the R-S two-cycle"""

    def setup_method(self):
        self.base = facts('R a b')
        self.instance = facts('R a b', 'S b a')
        labels = fact_labels(self.instance, self.base)
        self.group = cyclic_group(3, labels,
                                  {labels[0]: 1, labels[1]: 2})

    def test_labels(self):
        assert [i for _, i in fact_labels(self.instance, self.base)] == [1, 2]

    def test_golden(self):
        product, origin = simple_product(self.instance, self.base,
                                         self.group)
        assert product == facts('R a b', 'R a~g1 b~g1', 'R a~g2 b~g2',
                                'S b~g1 a~g2', 'S b~g2 a', 'S b a~g1')
        assert origin['a~g2'] == 'a' and origin['b'] == 'b'

    def test_cycle_is_gone(self, fixture_d):
        _, deps, _ = fixture_d
        product, _ = simple_product(self.instance, self.base, self.group)
        assert find_match(TWO_CYCLE, self.instance) is not None
        assert find_match(TWO_CYCLE, product) is None
        assert verify_model(product, deps).ok

    def test_base_must_stay(self):
        with pytest.raises(UsageError):
            mixed_product(self.instance, self.base, {'a': 'b'}, self.group)

    def test_girth_group_also_unrolls(self, fixture_d):
        _, deps, _ = fixture_d
        labels = fact_labels(self.instance, self.base)
        group = acyclic_group(labels, 5, make_rng(2))
        product, _ = simple_product(self.instance, self.base, group)
        assert len(product) == 2 * len(group)
        assert find_match(TWO_CYCLE, product) is None
        assert verify_model(product, deps).ok


class TestIndividualize:

    def test_roundtrip(self):
        base = facts('R a b')
        individual, added = individualize(base)
        assert added == {INDIVIDUAL_PREFIX + 'a', INDIVIDUAL_PREFIX + 'b'}
        assert len(individual) == 3
        assert strip_individualizing(individual) == base
        with pytest.raises(UsageError):
            individualize(individual)


class TestCautious:

    def test_overlaps_need_equal_images(self):
        instance = facts('R a b', 'R a c')
        assert not check_cautious(instance, facts(), {})
        assert check_cautious(instance, facts(), {'c': 'b'})
        assert check_cautious(instance, instance, {})

    def test_quotient_keeps_base_apart(self):
        instance = facts('R a b', 'R x y', 'R u v')
        folded, mapping = cautious_quotient(instance, facts('R a b'), 1)
        assert folded == facts('R a b', 'R u v')
        assert mapping['a'] == 'a' and mapping['x'] == 'u'


class TestBuildUniversalModel:

    def check(self, base, deps, k, schema=None, **options):
        closed = finite_closure(deps)
        model, certificate = build_universal_model(base, deps, k,
                                                   schema=schema, **options)
        assert base.facts <= model.facts
        assert verify_model(model, closed).ok
        report = verify_k_sound(model, base, closed, k, schema=schema)
        assert report.ok, report.failures
        return model, certificate

    def test_arguments(self, fixture_g):
        args = fixture_g.instance, fixture_g.deps
        with pytest.raises(UsageError):
            build_universal_model(*args, 0)
        with pytest.raises(UsageError):
            build_universal_model(*args, 2, girth=4)
        with pytest.raises(UsageError):
            build_universal_model(*args, 1, group='free')
        with pytest.raises(UsageError):
            build_universal_model(facts('R a b', 'R a c'),
                                  DependencySet(fds=[FD('R', [1], 2)]), 1)

    @pytest.mark.parametrize('k', [1, 2])
    def test_fixture_g(self, fixture_g, k):
        model, certificate = self.check(fixture_g.instance, fixture_g.deps,
                                        k, fixture_g.schema)
        assert find_match(fixture_g.queries[0], model) is not None
        assert certificate['k'] == k and certificate['blowup'] == 'mixed'
        assert certificate['k_inflated'] == 3 * k
        assert certificate['cautious'] is True
        assert certificate['simulation']['failures'] == []
        group = certificate['group']
        assert group['strategy'] == CYCLES and group['girth'] == 2 * k + 1
        assert group['order'] <= 5000
        assert len(certificate['log']) == certificate['steps']

    def test_fixture_a(self, fixture_a):
        base, deps, schema = fixture_a
        _, certificate = self.check(base, deps, 1, schema)
        assert certificate['blowup'] == 'mixed'
        assert certificate['group']['girth'] == 3

    def test_fixture_d_has_no_two_cycle(self, fixture_d):
        base, deps, schema = fixture_d
        model, _ = self.check(base, deps, 2, schema)
        assert find_match(TWO_CYCLE, model) is None

    def test_fixture_d_needs_its_schema(self, fixture_d):
        base, deps, _ = fixture_d
        with pytest.raises(UsageError):
            build_universal_model(base, deps, 2)

    def test_skipping_keeps_the_certificate(self, fixture_g):
        model, certificate = build_universal_model(
            fixture_g.instance, fixture_g.deps, 1, skip_if_sound=True)
        assert certificate['blowup'] in ('skipped', 'mixed')
        assert {'simulation', 'cautious', 'group', 'log'} <= set(certificate)
        assert verify_model(model, finite_closure(fixture_g.deps)).ok


@pytest.mark.slow
@pytest.mark.parametrize('seed', range(20))
def test_random_models_are_sound(seed):
    problem = random_problem(make_rng(seed, 'blowup'), relations=2,
                             max_arity=2, facts=3, query_atoms=0)
    model, _ = build_universal_model(problem.instance, problem.deps, 1,
                                     seed=seed, schema=problem.schema)
    assert verify_model(model, problem.deps).ok
    assert verify_k_sound(model, problem.instance, problem.deps, 1,
                          schema=problem.schema).ok
