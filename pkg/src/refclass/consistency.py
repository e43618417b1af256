"""Consistency: structural sanity checks and a bounded finite-model finder.

The model finder searches for a finite population in which every asserted
proportion statement holds with ``%`` read as a literal proportion, every
membership and proper-inclusion statement holds extensionally, mentioned
classes (and properties) have non-empty, pairwise-distinct extensions, and
equivalent sentence forms agree in truth value.  Failure to find a model
within the bound is not a proof of inconsistency; the bound is part of the
verdict.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import (
    UNIVERSAL,
    CanonicalClass,
    CanonicalProperty,
    ClosedKB,
    Member,
    Stat,
    Subset,
)


@dataclass
class SanityReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": list(self.violations),
            "warnings": list(self.warnings),
        }


def sanity_check(ckb: ClosedKB) -> SanityReport:
    """Fast necessary conditions for the existence of a model."""
    report = SanityReport()
    for (atoms, prop), iv in sorted(ckb.stats.items(),
                                    key=lambda kv: (kv[0][0], kv[0][1].sort_key())):
        if iv.lo > iv.hi:
            report.violations.append(
                f"empty fused interval for %({CanonicalClass(atoms)}, {prop.describe()})"
            )
    for cls in sorted(ckb.subset_cycle_classes, key=CanonicalClass.sort_key):
        report.violations.append(f"subset cycle through class {cls}")
    # Membership/subset coherence: asserted inclusion without the implied
    # membership is flagged as missing knowledge, not an error.
    for ind in sorted(ckb.individuals):
        classes = ckb.known_memberships(ind)
        for sub, sup in sorted(ckb.subset_edges,
                               key=lambda p: (p[0].sort_key(), p[1].sort_key())):
            if sub in classes and sup not in classes:
                report.warnings.append(
                    f"{ind} is known to be in {sub} and {sub} < {sup} is asserted, "
                    f"but membership of {ind} in {sup} is not in the knowledge base"
                )
    return report


@dataclass(frozen=True)
class FiniteModel:
    """A finite population with per-element class and property bits."""

    class_atoms: tuple[str, ...]
    property_atoms: tuple[str, ...]
    population: tuple[tuple[frozenset[str], frozenset[str]], ...]
    individual_map: dict[str, int]

    def extension(self, cls: CanonicalClass) -> list[int]:
        need = set(cls.atoms)
        return [k for k, (cs, _) in enumerate(self.population) if need <= cs]

    def satisfies(self, prop: CanonicalProperty, element: int) -> bool:
        return prop.evaluate(self.population[element][1])

    def to_dict(self) -> dict:
        return {
            "size": len(self.population),
            "elements": [
                {"classes": sorted(cs), "properties": sorted(ps)}
                for cs, ps in self.population
            ],
            "individuals": {i: k for i, k in sorted(self.individual_map.items())},
        }


def _mentioned_classes(ckb: ClosedKB) -> list[CanonicalClass]:
    return sorted((c for c in ckb.universe if not c.is_universal),
                  key=CanonicalClass.sort_key)


def _mentioned_props(ckb: ClosedKB) -> list[CanonicalProperty]:
    props = set()
    for s in ckb.statements:
        if isinstance(s, Stat):
            props.add(s.prop)
    for prop, _ in ckb.declared_forms.values():
        props.add(prop)
    return sorted(props, key=CanonicalProperty.sort_key)


def verify_model(ckb: ClosedKB, model: FiniteModel) -> bool:
    """Re-check every statement against the model, independent of the search."""
    n = len(model.population)
    if n == 0:
        return False
    for ind in ckb.individuals:
        if ind not in model.individual_map:
            return False
        if not 0 <= model.individual_map[ind] < n:
            return False
    # distinct individuals denote distinct elements
    if len(set(model.individual_map.values())) != len(model.individual_map):
        return False

    classes = _mentioned_classes(ckb)
    exts = {c: frozenset(model.extension(c)) for c in classes}
    for c in classes:
        if not exts[c]:
            return False
    for a, b in itertools.combinations(classes, 2):
        if exts[a] == exts[b]:
            return False
    props = _mentioned_props(ckb)
    prop_exts = {
        p: frozenset(k for k in range(n) if model.satisfies(p, k)) for p in props
    }
    for a, b in itertools.combinations(props, 2):
        if prop_exts[a] == prop_exts[b]:
            return False

    for s in ckb.statements:
        if isinstance(s, Stat):
            ext = exts[s.cls]
            hits = sum(1 for k in ext if model.satisfies(s.prop, k))
            ratio = Fraction(hits, len(ext))
            if not (s.interval.lo <= ratio <= s.interval.hi):
                return False
        elif isinstance(s, Member):
            elem = model.individual_map[s.individual]
            if not set(s.cls.atoms) <= model.population[elem][0]:
                return False
        elif isinstance(s, Subset):
            if not (exts[s.sub] < exts[s.sup]):
                return False
    # every group of equivalent sentences must get one truth value
    seen_groups = set()
    for label, group in ckb.sentence_groups.items():
        key = frozenset(group)
        if key in seen_groups:
            continue
        seen_groups.add(key)
        truths = set()
        for prop, ind in ckb.sentence_forms[label]:
            truths.add(model.satisfies(prop, model.individual_map[ind]))
        if len(truths) > 1:
            return False
    return True


def find_model(ckb: ClosedKB, n_max: int) -> Optional[FiniteModel]:
    """Exhaustive search over population sizes 1..n_max.

    Individuals occupy the first slots (they are pairwise distinct, so this
    is pure symmetry breaking); anonymous elements are enumerated as a
    non-decreasing type sequence.  Returns the first model in canonical
    order, or None if the bound is exhausted.
    """
    class_atoms = tuple(sorted(ckb.class_atoms))
    property_atoms = tuple(sorted(ckb.property_atoms))
    individuals = tuple(sorted(ckb.individuals))
    nc, np_ = len(class_atoms), len(property_atoms)
    n_types = 1 << (nc + np_)

    def type_to_sets(t: int) -> tuple[frozenset[str], frozenset[str]]:
        cs = frozenset(class_atoms[i] for i in range(nc) if t >> i & 1)
        ps = frozenset(property_atoms[j] for j in range(np_) if t >> (nc + j) & 1)
        return cs, ps

    type_sets = [type_to_sets(t) for t in range(n_types)]

    # Required class bits per individual, from asserted memberships.
    required: dict[str, int] = {i: 0 for i in individuals}
    for s in ckb.statements:
        if isinstance(s, Member):
            for a in s.cls.atoms:
                required[s.individual] |= 1 << class_atoms.index(a)

    def individual_type_choices(ind: str) -> list[int]:
        req = required[ind]
        return [t for t in range(n_types) if t & req == req]

    choice_lists = [individual_type_choices(i) for i in individuals]
    m = len(individuals)

    for n in range(max(1, m), n_max + 1):
        for ind_types in itertools.product(*choice_lists) if m else [()]:
            for anon in itertools.combinations_with_replacement(range(n_types), n - m):
                types = list(ind_types) + list(anon)
                population = tuple(type_sets[t] for t in types)
                model = FiniteModel(
                    class_atoms=class_atoms,
                    property_atoms=property_atoms,
                    population=population,
                    individual_map={ind: k for k, ind in enumerate(individuals)},
                )
                if verify_model(ckb, model):
                    return model
    return None
