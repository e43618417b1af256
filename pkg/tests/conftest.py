"""Shared fixtures: hand fixtures, random KB generation, independent oracles."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

import refclass as rc


# ---------------------------------------------------------------------------
# Hand fixtures
# ---------------------------------------------------------------------------


def coin_builder() -> rc.KBBuilder:
    b = rc.KBBuilder()
    b.declare_class("tosses")
    b.declare_property("heads")
    b.declare_individual("t14")
    heads = rc.canonicalize_property(rc.PropAtom("heads"))
    tosses = rc.CanonicalClass(("tosses",))
    b.assert_stat(tosses, heads, rc.Interval.point(Fraction(1, 2)))
    b.assert_member("t14", tosses)
    b.declare_sentence("S14", heads, "t14")
    return b


def conflict_builder(with_subset: bool = False) -> rc.KBBuilder:
    """Two incomparable classes with point values 0.4 and 0.6."""
    b = rc.KBBuilder()
    b.declare_class("r1")
    b.declare_class("r2")
    b.declare_property("p")
    b.declare_individual("i")
    p = rc.canonicalize_property(rc.PropAtom("p"))
    r1 = rc.CanonicalClass(("r1",))
    r2 = rc.CanonicalClass(("r2",))
    b.assert_stat(r1, p, rc.Interval.point(Fraction(2, 5)))
    b.assert_stat(r2, p, rc.Interval.point(Fraction(3, 5)))
    b.assert_member("i", r1)
    b.assert_member("i", r2)
    b.declare_sentence("S", p, "i")
    if with_subset:
        b.assert_subset(r1, r2)
    return b


@pytest.fixture
def coin_kb() -> rc.ClosedKB:
    return coin_builder().close()


@pytest.fixture
def conflict_kb() -> rc.ClosedKB:
    return conflict_builder().close()


# ---------------------------------------------------------------------------
# Random KB generation
# ---------------------------------------------------------------------------

_GRID = [Fraction(n, 4) for n in range(5)] + [Fraction(1, 3), Fraction(2, 3), Fraction(1, 5)]


def random_prop_expr(rng: random.Random, atoms: list[str], depth: int = 2):
    if depth == 0 or rng.random() < 0.5:
        return rc.PropAtom(rng.choice(atoms))
    if rng.random() < 0.5:
        return rc.PropNot(random_prop_expr(rng, atoms, depth - 1))
    return rc.PropAnd(
        random_prop_expr(rng, atoms, depth - 1),
        random_prop_expr(rng, atoms, depth - 1),
    )


def random_builder(
    rng: random.Random,
    *,
    max_classes: int = 3,
    max_props: int = 2,
    max_inds: int = 2,
    allow_equiv: bool = False,
    add_negated_twins: bool = True,
) -> rc.KBBuilder | None:
    """One attempt at a random well-formed builder; None if assembly fails."""
    b = rc.KBBuilder()
    classes = [f"c{i}" for i in range(rng.randint(1, max_classes))]
    props = [f"p{i}" for i in range(rng.randint(1, max_props))]
    inds = [f"i{i}" for i in range(rng.randint(1, max_inds))]
    for name in classes:
        b.declare_class(name)
    for name in props:
        b.declare_property(name)
    for name in inds:
        b.declare_individual(name)

    def rand_class() -> rc.CanonicalClass:
        k = rng.randint(1, min(2, len(classes)))
        return rc.CanonicalClass(tuple(sorted(rng.sample(classes, k))))

    try:
        for ind in inds:
            for _ in range(rng.randint(0, 2)):
                b.assert_member(ind, rand_class())
        for _ in range(rng.randint(0, 4)):
            prop = rc.canonicalize_property(random_prop_expr(rng, props))
            lo = rng.choice(_GRID)
            hi = rng.choice([x for x in _GRID if x >= lo])
            if rng.random() < 0.5:
                hi = lo
            b.assert_stat(rand_class(), prop, rc.Interval(lo, hi))
        if len(classes) >= 2 and rng.random() < 0.4:
            # acyclic by construction: only lower-indexed into higher-indexed
            i, j = sorted(rng.sample(range(len(classes)), 2))
            b.assert_subset(
                rc.CanonicalClass((classes[i],)), rc.CanonicalClass((classes[j],))
            )
        n_sentences = rng.randint(1, 3)
        for k in range(n_sentences):
            prop = rc.canonicalize_property(random_prop_expr(rng, props))
            b.declare_sentence(f"S{k}", prop, rng.choice(inds))
        if allow_equiv and n_sentences >= 2 and rng.random() < 0.7:
            labels = rng.sample([f"S{k}" for k in range(n_sentences)], 2)
            b.assert_equiv(*labels)
        if add_negated_twins:
            for label, (prop, ind) in list(b.sentence_forms.items()):
                b.declare_sentence(f"N_{label}", prop.negate(), ind)
    except rc.KBError:
        return None
    return b


def random_sane_kbs(
    seed: int,
    count: int,
    **kwargs,
) -> list[tuple[rc.KBBuilder, rc.ClosedKB]]:
    """Generate `count` KBs that close successfully and pass sanity checks."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        b = random_builder(rng, **kwargs)
        if b is None:
            continue
        try:
            ckb = b.close()
        except rc.InconsistencyError:
            continue
        if rc.sanity_check(ckb).ok:
            out.append((b, ckb))
    return out


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------


def oracle_differ(a: rc.Interval, b: rc.Interval) -> bool:
    # literal statement: neither interval is included in the other
    a_in_b = b.lo <= a.lo and a.hi <= b.hi
    b_in_a = a.lo <= b.lo and b.hi <= a.hi
    return not a_in_b and not b_in_a


def oracle_filter(rows, subset_fn):
    """Literal survivor predicate over all row pairs; returns surviving classes."""
    keep = []
    for r in rows:
        excused = True
        for s in rows:
            if s.cls == r.cls:
                continue
            if oracle_differ(r.interval, s.interval) and not subset_fn(r.cls, s.cls):
                excused = False
        if excused:
            keep.append(r.cls)
    return keep


def oracle_prop_table(expr, atoms: list[str]) -> frozenset[frozenset[str]]:
    """Truth table of a property expression as the set of satisfying
    assignments (over the given atom list), written independently of the
    canonicalizer."""
    sat = set()
    for bits in itertools.product([False, True], repeat=len(atoms)):
        env = dict(zip(atoms, bits))

        def ev(e):
            if isinstance(e, rc.PropAtom):
                return env[e.name]
            if isinstance(e, rc.PropNot):
                return not ev(e.arg)
            return ev(e.left) and ev(e.right)

        if ev(expr):
            sat.add(frozenset(a for a in atoms if env[a]))
    return frozenset(sat)


def naive_model_exists(ckb: rc.ClosedKB, n_max: int) -> bool:
    """Existence check by full enumeration, no symmetry breaking: all
    populations of typed elements and all injective individual placements."""
    class_atoms = tuple(sorted(ckb.class_atoms))
    property_atoms = tuple(sorted(ckb.property_atoms))
    individuals = tuple(sorted(ckb.individuals))
    nc, np_ = len(class_atoms), len(property_atoms)
    n_types = 1 << (nc + np_)

    def sets_of(t):
        cs = frozenset(class_atoms[i] for i in range(nc) if t >> i & 1)
        ps = frozenset(property_atoms[j] for j in range(np_) if t >> (nc + j) & 1)
        return cs, ps

    for n in range(1, n_max + 1):
        if n < len(individuals):
            continue
        for types in itertools.product(range(n_types), repeat=n):
            population = tuple(sets_of(t) for t in types)
            for placement in itertools.permutations(range(n), len(individuals)):
                model = rc.FiniteModel(
                    class_atoms=class_atoms,
                    property_atoms=property_atoms,
                    population=population,
                    individual_map=dict(zip(individuals, placement)),
                )
                if rc.verify_model(ckb, model):
                    return True
    return False


def closure_signature(ckb: rc.ClosedKB):
    """Hashable summary of everything the closure determines."""
    return (
        frozenset((i, ms) for i, ms in ckb.memberships.items()),
        ckb.subset_pairs,
        frozenset(ckb.stats.items()),
        frozenset((s, g) for s, g in ckb.sentence_groups.items()),
        frozenset((s, f) for s, f in ckb.sentence_forms.items()),
    )
