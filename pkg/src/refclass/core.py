"""Knowledge-base core: vocabulary, statements, canonicalization, closure.

A knowledge base is built incrementally through :class:`KBBuilder` and then
frozen into a :class:`ClosedKB`, which carries the deductively closed view
(intersection-closed memberships, transitive subset relation, sentence
equivalence classes, fused statistical intervals).  All queries run against
the closed form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union


class KBError(Exception):
    """Base for all knowledge-base errors."""


class DeclarationError(KBError):
    """An identifier is undeclared, reserved, or declared twice."""


class ValidationError(KBError):
    """A statement is malformed (bad interval, conflicting sentence form, ...)."""


class InconsistencyError(KBError):
    """Asserted statistics admit no value for some (class, property) pair."""

    def __init__(self, cls: "CanonicalClass", prop: "CanonicalProperty"):
        self.cls = cls
        self.prop = prop
        super().__init__(
            f"empty statistical interval for %({cls}, {prop.describe()})"
        )


# ---------------------------------------------------------------------------
# Reference classes
# ---------------------------------------------------------------------------

UNIVERSAL_NAME = "U"


@dataclass(frozen=True)
class CanonicalClass:
    """A reference class in canonical intersection form: a sorted atom tuple.

    The empty tuple is the built-in universal class U (identity of
    intersection).  Two values denote the same class iff their atom sets
    are equal.
    """

    atoms: tuple[str, ...]

    def __post_init__(self):
        if tuple(sorted(set(self.atoms))) != self.atoms:
            raise ValidationError(f"class atoms not canonical: {self.atoms!r}")

    @property
    def is_universal(self) -> bool:
        return not self.atoms

    def intersect(self, other: "CanonicalClass") -> "CanonicalClass":
        return CanonicalClass(tuple(sorted(set(self.atoms) | set(other.atoms))))

    def sort_key(self):
        # Most specific (most atoms) first; U sorts last.
        return (-len(self.atoms), self.atoms)

    def __str__(self) -> str:
        return " & ".join(self.atoms) if self.atoms else UNIVERSAL_NAME


UNIVERSAL = CanonicalClass(())


# ---------------------------------------------------------------------------
# Properties
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalProperty:
    """A property as a reduced truth table over its essential atoms.

    ``atoms`` is sorted; ``rows`` holds the satisfying assignments as
    bitmasks (bit i set means atoms[i] is true).  Atoms the function does
    not depend on are dropped, so logically equivalent formulas are equal.
    """

    atoms: tuple[str, ...]
    rows: frozenset[int]

    @property
    def is_tautology(self) -> bool:
        return not self.atoms and self.rows

    @property
    def is_contradiction(self) -> bool:
        return not self.atoms and not self.rows

    def negate(self) -> "CanonicalProperty":
        full = frozenset(range(1 << len(self.atoms)))
        return _reduced_property(self.atoms, full - self.rows)

    def conjoin(self, other: "CanonicalProperty") -> "CanonicalProperty":
        atoms = tuple(sorted(set(self.atoms) | set(other.atoms)))
        idx = {a: i for i, a in enumerate(atoms)}
        rows = set()
        for mask in range(1 << len(atoms)):
            truth = {a for a in atoms if mask >> idx[a] & 1}
            if self.evaluate(truth) and other.evaluate(truth):
                rows.add(mask)
        return _reduced_property(atoms, frozenset(rows))

    def evaluate(self, true_atoms: Iterable[str]) -> bool:
        """Truth value under the assignment where exactly `true_atoms` hold."""
        true_atoms = set(true_atoms)
        mask = 0
        for i, a in enumerate(self.atoms):
            if a in true_atoms:
                mask |= 1 << i
        return mask in self.rows

    def sort_key(self):
        return (self.atoms, tuple(sorted(self.rows)))

    def describe(self) -> str:
        """Readable rendering (display only; the DSL has its own renderer)."""
        if self.is_tautology:
            return "true"
        if self.is_contradiction:
            return "false"
        minterms = []
        for mask in sorted(self.rows):
            lits = []
            for i, a in enumerate(self.atoms):
                lits.append(a if mask >> i & 1 else f"!{a}")
            minterms.append(" & ".join(lits))
        if len(minterms) == 1:
            return minterms[0]
        return " | ".join(f"({m})" for m in minterms)

    def __str__(self) -> str:
        return self.describe()


def _reduced_property(atoms: tuple[str, ...], rows: frozenset[int]) -> CanonicalProperty:
    """Drop atoms the function does not depend on and renumber the rows."""
    n = len(atoms)
    essential = []
    for i in range(n):
        bit = 1 << i
        if any((m in rows) != ((m ^ bit) in rows) for m in range(1 << n)):
            essential.append(i)
    if len(essential) == n:
        return CanonicalProperty(atoms, rows)
    new_atoms = tuple(atoms[i] for i in essential)
    new_rows = set()
    for m in rows:
        nm = 0
        for j, i in enumerate(essential):
            if m >> i & 1:
                nm |= 1 << j
        new_rows.add(nm)
    return CanonicalProperty(new_atoms, frozenset(new_rows))


TAUTOLOGY = CanonicalProperty((), frozenset({0}))
CONTRADICTION = CanonicalProperty((), frozenset())


# ---------------------------------------------------------------------------
# Expression trees (used by the DSL and by callers who prefer syntax)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassAtom:
    name: str


@dataclass(frozen=True)
class ClassAnd:
    left: "ClassExpr"
    right: "ClassExpr"


ClassExpr = Union[ClassAtom, ClassAnd]


@dataclass(frozen=True)
class PropAtom:
    name: str


@dataclass(frozen=True)
class PropNot:
    arg: "PropExpr"


@dataclass(frozen=True)
class PropAnd:
    left: "PropExpr"
    right: "PropExpr"


PropExpr = Union[PropAtom, PropNot, PropAnd]


def canonicalize_class(expr: ClassExpr, declared: Optional[set[str]] = None) -> CanonicalClass:
    """Flatten an intersection tree into a sorted atom set."""
    atoms: set[str] = set()

    def walk(e: ClassExpr):
        if isinstance(e, ClassAtom):
            if declared is not None and e.name not in declared:
                raise DeclarationError(f"undeclared class atom: {e.name}")
            atoms.add(e.name)
        elif isinstance(e, ClassAnd):
            walk(e.left)
            walk(e.right)
        else:
            raise ValidationError(f"not a class expression: {e!r}")

    walk(expr)
    if not atoms:
        raise ValidationError("empty class expression")
    return CanonicalClass(tuple(sorted(atoms)))


def canonicalize_property(expr: PropExpr, declared: Optional[set[str]] = None) -> CanonicalProperty:
    """Canonicalize a !/& formula to its reduced truth table."""
    mentioned: set[str] = set()

    def collect(e: PropExpr):
        if isinstance(e, PropAtom):
            if declared is not None and e.name not in declared:
                raise DeclarationError(f"undeclared property atom: {e.name}")
            mentioned.add(e.name)
        elif isinstance(e, PropNot):
            collect(e.arg)
        elif isinstance(e, PropAnd):
            collect(e.left)
            collect(e.right)
        else:
            raise ValidationError(f"not a property expression: {e!r}")

    collect(expr)
    atoms = tuple(sorted(mentioned))
    idx = {a: i for i, a in enumerate(atoms)}

    def ev(e: PropExpr, mask: int) -> bool:
        if isinstance(e, PropAtom):
            return bool(mask >> idx[e.name] & 1)
        if isinstance(e, PropNot):
            return not ev(e.arg, mask)
        return ev(e.left, mask) and ev(e.right, mask)

    rows = frozenset(m for m in range(1 << len(atoms)) if ev(expr, m))
    return _reduced_property(atoms, rows)


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """A closed subinterval of [0, 1] with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if not (0 <= lo <= hi <= 1):
            raise ValidationError(f"invalid interval [{lo}, {hi}]")

    @classmethod
    def point(cls, x) -> "Interval":
        x = Fraction(x)
        return cls(x, x)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def includes(self, other: "Interval") -> bool:
        """True iff `other` is a subinterval of self."""
        return self.lo <= other.lo and other.hi <= self.hi

    def reflect(self) -> "Interval":
        return Interval(1 - self.hi, 1 - self.lo)

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def __str__(self) -> str:
        if self.is_point:
            return str(self.lo)
        return f"[{self.lo}, {self.hi}]"


UNIT = Interval(Fraction(0), Fraction(1))
CERTAIN = Interval(Fraction(1), Fraction(1))
IMPOSSIBLE = Interval(Fraction(0), Fraction(0))


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Stat:
    cls: CanonicalClass
    prop: CanonicalProperty
    interval: Interval


@dataclass(frozen=True)
class Member:
    individual: str
    cls: CanonicalClass


@dataclass(frozen=True)
class Subset:
    sub: CanonicalClass
    sup: CanonicalClass

    def __post_init__(self):
        if self.sub == self.sup:
            raise ValidationError(f"subset statement with sub = super: {self.sub}")


@dataclass(frozen=True)
class SentenceForm:
    sentence: str
    prop: CanonicalProperty
    individual: str


@dataclass(frozen=True)
class SentenceEquiv:
    s1: str
    s2: str


Statement = Union[Stat, Member, Subset, SentenceForm, SentenceEquiv]


# ---------------------------------------------------------------------------
# Builder
# ---------------------------------------------------------------------------


class KBBuilder:
    """Mutable accumulator for declarations and statements.

    Single-writer; call :meth:`close` to obtain the immutable, deductively
    closed knowledge base.
    """

    def __init__(self):
        self.class_atoms: set[str] = set()
        self.property_atoms: set[str] = set()
        self.individuals: set[str] = set()
        self.sentence_forms: dict[str, tuple[CanonicalProperty, str]] = {}
        self._stats: dict[tuple, Stat] = {}
        self._members: dict[tuple, Member] = {}
        self._subsets: dict[tuple, Subset] = {}
        self._equivs: dict[tuple, SentenceEquiv] = {}
        # anonymous-query sentences keyed by canonical form (used by the DSL)
        self.query_sentences: dict[tuple[CanonicalProperty, str], str] = {}

    # -- declarations -------------------------------------------------

    def declare_class(self, name: str) -> None:
        _check_identifier(name)
        if name == UNIVERSAL_NAME:
            raise DeclarationError(f"class name {UNIVERSAL_NAME!r} is reserved")
        if name in self.class_atoms:
            raise DeclarationError(f"duplicate class declaration: {name}")
        self.class_atoms.add(name)

    def declare_property(self, name: str) -> None:
        _check_identifier(name)
        if name in self.property_atoms:
            raise DeclarationError(f"duplicate property declaration: {name}")
        self.property_atoms.add(name)

    def declare_individual(self, name: str) -> None:
        _check_identifier(name)
        if name in self.individuals:
            raise DeclarationError(f"duplicate individual declaration: {name}")
        self.individuals.add(name)

    def declare_sentence(self, label: str, prop: CanonicalProperty, individual: str) -> None:
        """Declare `label <-> prop(individual)`.

        Re-declaring the same form is idempotent; a different form for an
        existing label is rejected (state the equivalence explicitly
        instead).
        """
        _check_identifier(label)
        if individual not in self.individuals:
            raise DeclarationError(f"undeclared individual: {individual}")
        existing = self.sentence_forms.get(label)
        if existing is not None:
            if existing != (prop, individual):
                raise ValidationError(
                    f"sentence {label} already has a different canonical form; "
                    f"use an equivalence statement instead"
                )
            return
        self.sentence_forms[label] = (prop, individual)

    # -- statements ---------------------------------------------------

    def assert_stat(self, cls: CanonicalClass, prop: CanonicalProperty,
                    interval: Interval) -> None:
        self._require_class(cls)
        s = Stat(cls, prop, interval)
        self._stats[(cls.atoms, prop.sort_key(), interval.lo, interval.hi)] = s

    def assert_member(self, individual: str, cls: CanonicalClass) -> None:
        if individual not in self.individuals:
            raise DeclarationError(f"undeclared individual: {individual}")
        self._require_class(cls)
        self._members[(individual, cls.atoms)] = Member(individual, cls)

    def assert_subset(self, sub: CanonicalClass, sup: CanonicalClass) -> None:
        self._require_class(sub)
        self._require_class(sup)
        s = Subset(sub, sup)
        self._subsets[(sub.atoms, sup.atoms)] = s

    def assert_equiv(self, s1: str, s2: str) -> None:
        for label in (s1, s2):
            if label not in self.sentence_forms:
                raise DeclarationError(f"undeclared sentence: {label}")
        key = tuple(sorted((s1, s2)))
        self._equivs[key] = SentenceEquiv(*key)

    def assert_statement(self, s: Statement) -> None:
        if isinstance(s, Stat):
            self.assert_stat(s.cls, s.prop, s.interval)
        elif isinstance(s, Member):
            self.assert_member(s.individual, s.cls)
        elif isinstance(s, Subset):
            self.assert_subset(s.sub, s.sup)
        elif isinstance(s, SentenceForm):
            self.declare_sentence(s.sentence, s.prop, s.individual)
        elif isinstance(s, SentenceEquiv):
            self.assert_equiv(s.s1, s.s2)
        else:
            raise ValidationError(f"unknown statement: {s!r}")

    def _require_class(self, cls: CanonicalClass) -> None:
        if cls.is_universal:
            raise ValidationError("the universal class cannot appear in assertions")
        missing = set(cls.atoms) - self.class_atoms
        if missing:
            raise DeclarationError(f"undeclared class atom: {sorted(missing)[0]}")

    # -- views used by close() and the DSL renderer --------------------

    @property
    def stats(self) -> list[Stat]:
        return list(self._stats.values())

    @property
    def members(self) -> list[Member]:
        return list(self._members.values())

    @property
    def subsets(self) -> list[Subset]:
        return list(self._subsets.values())

    @property
    def equivs(self) -> list[SentenceEquiv]:
        return list(self._equivs.values())

    def close(self) -> "ClosedKB":
        return close(self)


def _check_identifier(name: str) -> None:
    if not name or not (name[0].isalpha() or name[0] == "_") \
            or not all(c.isalnum() or c == "_" for c in name):
        raise DeclarationError(f"invalid identifier: {name!r}")


# ---------------------------------------------------------------------------
# Closed knowledge base
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClosedKB:
    """The knowledge base after deductive closure.  Immutable."""

    class_atoms: frozenset[str]
    property_atoms: frozenset[str]
    individuals: frozenset[str]
    statements: tuple[Statement, ...]
    memberships: Mapping[str, frozenset[CanonicalClass]]
    universe: frozenset[CanonicalClass]
    subset_edges: frozenset[tuple[CanonicalClass, CanonicalClass]]
    subset_pairs: frozenset[tuple[CanonicalClass, CanonicalClass]]
    subset_cycle_classes: frozenset[CanonicalClass]
    sentence_groups: Mapping[str, frozenset[str]]
    sentence_forms: Mapping[str, tuple[tuple[CanonicalProperty, str], ...]]
    declared_forms: Mapping[str, tuple[CanonicalProperty, str]]
    stats: Mapping[tuple[tuple[str, ...], CanonicalProperty], Interval]

    def known_memberships(self, individual: str) -> frozenset[CanonicalClass]:
        if individual not in self.individuals:
            raise DeclarationError(f"undeclared individual: {individual}")
        return self.memberships[individual]

    def subset_known(self, c1: CanonicalClass, c2: CanonicalClass) -> bool:
        """True iff `c1` is a known proper subclass of `c2`."""
        if c1 == c2:
            return False
        if set(c1.atoms) > set(c2.atoms):
            return True
        if (c1, c2) in self.subset_pairs:
            return True
        # Query classes may lie outside the mentioned universe; chase
        # structural and asserted links through it.
        nodes = set(self.universe) | {c1, c2}
        seen = {c1}
        frontier = [c1]
        while frontier:
            cur = frontier.pop()
            for nxt in nodes:
                if nxt in seen:
                    continue
                if set(cur.atoms) > set(nxt.atoms) or (cur, nxt) in self.subset_edges:
                    if nxt == c2:
                        return True
                    seen.add(nxt)
                    frontier.append(nxt)
        return False

    def effective_interval(self, cls: CanonicalClass, prop: CanonicalProperty) -> Interval:
        """The fused interval, defaulting to [0,1]; tautologies/contradictions pinned."""
        got = self.stats.get((cls.atoms, prop))
        if got is not None:
            return got
        if prop.is_tautology:
            return CERTAIN
        if prop.is_contradiction:
            return IMPOSSIBLE
        return UNIT


def close(builder: KBBuilder) -> ClosedKB:
    """Compute the deductive closure of the builder's contents.

    Memberships are closed under intersection, the subset relation is the
    transitive closure of asserted plus structural inclusions, sentence
    labels are partitioned by their equivalence links, and statistical
    intervals are fused (direct assertions, complement reflections, the
    [0,1] default).  An empty fused interval raises InconsistencyError.
    """
    # memberships: intersection closure per individual, plus U
    memberships: dict[str, frozenset[CanonicalClass]] = {}
    for ind in builder.individuals:
        classes = {m.cls for m in builder.members if m.individual == ind}
        closed = set(classes)
        changed = True
        while changed:
            changed = False
            for a, b in itertools.combinations(list(closed), 2):
                inter = a.intersect(b)
                if inter not in closed:
                    closed.add(inter)
                    changed = True
        closed.add(UNIVERSAL)
        memberships[ind] = frozenset(closed)

    # mentioned-class universe
    universe: set[CanonicalClass] = {UNIVERSAL}
    for ms in memberships.values():
        universe |= ms
    for s in builder.stats:
        universe.add(s.cls)
    for s in builder.subsets:
        universe.add(s.sub)
        universe.add(s.sup)

    # subset relation: asserted edges + structural edges, transitively closed
    edges: dict[CanonicalClass, set[CanonicalClass]] = {c: set() for c in universe}
    for s in builder.subsets:
        edges[s.sub].add(s.sup)
    for a in universe:
        for b in universe:
            if set(a.atoms) > set(b.atoms):
                edges[a].add(b)
    pairs: set[tuple[CanonicalClass, CanonicalClass]] = set()
    cycle_classes: set[CanonicalClass] = set()
    for start in universe:
        seen: set[CanonicalClass] = set()
        frontier = [start]
        while frontier:
            cur = frontier.pop()
            for nxt in edges[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        if start in seen:
            cycle_classes.add(start)
        pairs.update((start, c) for c in seen if c != start)

    # sentence partition (union-find over equivalence links)
    parent: dict[str, str] = {s: s for s in builder.sentence_forms}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for eq in builder.equivs:
        ra, rb = find(eq.s1), find(eq.s2)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    groups: dict[str, set[str]] = {}
    for s in builder.sentence_forms:
        groups.setdefault(find(s), set()).add(s)
    sentence_groups = {s: frozenset(groups[find(s)]) for s in builder.sentence_forms}
    sentence_forms: dict[str, tuple[tuple[CanonicalProperty, str], ...]] = {}
    for s, members_ in sentence_groups.items():
        forms = {builder.sentence_forms[m] for m in members_}
        sentence_forms[s] = tuple(
            sorted(forms, key=lambda f: (f[0].sort_key(), f[1]))
        )

    # fused statistics: direct ∩ reflected-complement ∩ default (∩ pinned)
    by_key: dict[tuple[tuple[str, ...], CanonicalProperty], list[Interval]] = {}
    for s in builder.stats:
        by_key.setdefault((s.cls.atoms, s.prop), []).append(s.interval)
    fused: dict[tuple[tuple[str, ...], CanonicalProperty], Interval] = {}
    keys = set(by_key)
    keys |= {(atoms, p.negate()) for (atoms, p) in by_key}
    for atoms, p in sorted(keys, key=lambda k: (k[0], k[1].sort_key())):
        iv: Optional[Interval] = UNIT
        for direct in by_key.get((atoms, p), []):
            iv = iv.intersect(direct) if iv else None
        for comp in by_key.get((atoms, p.negate()), []):
            iv = iv.intersect(comp.reflect()) if iv else None
        if iv is not None:
            if p.is_tautology:
                iv = iv.intersect(CERTAIN)
            elif p.is_contradiction:
                iv = iv.intersect(IMPOSSIBLE)
        if iv is None:
            raise InconsistencyError(CanonicalClass(atoms), p)
        fused[(atoms, p)] = iv

    statements: list[Statement] = []
    statements.extend(sorted(
        builder.stats,
        key=lambda s: (s.cls.sort_key(), s.prop.sort_key(), s.interval.lo, s.interval.hi),
    ))
    statements.extend(sorted(builder.members, key=lambda m: (m.individual, m.cls.sort_key())))
    statements.extend(sorted(builder.subsets, key=lambda s: (s.sub.sort_key(), s.sup.sort_key())))
    statements.extend(
        SentenceForm(label, prop, ind)
        for label, (prop, ind) in sorted(builder.sentence_forms.items())
    )
    statements.extend(sorted(builder.equivs, key=lambda e: (e.s1, e.s2)))

    return ClosedKB(
        class_atoms=frozenset(builder.class_atoms),
        property_atoms=frozenset(builder.property_atoms),
        individuals=frozenset(builder.individuals),
        statements=tuple(statements),
        memberships=memberships,
        universe=frozenset(universe),
        subset_edges=frozenset((s.sub, s.sup) for s in builder.subsets),
        subset_pairs=frozenset(pairs),
        subset_cycle_classes=frozenset(cycle_classes),
        sentence_groups=sentence_groups,
        sentence_forms=sentence_forms,
        declared_forms=dict(builder.sentence_forms),
        stats=fused,
    )
