"""Decision rules for Property (FA) and hereditary (FA).

Groups enter as :class:`GroupDescriptor`: an optional finite presentation
plus certificates.  Machine-checkable certificates (finiteness by coset
enumeration, Coxeter matrices without infinity) are verified when built;
everything else (hereditary (FA) of SL_3(Z), torsion, ...) is an explicit
assertion carrying a provenance string.

Every verdict carries a trail of ``(rule, cite, inputs)`` entries; rerunning
the same rule on the same descriptors reproduces it exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

from .abelianization import AbelianInvariants, abelian_invariants
from .permgroups import FiniteBSet, orbits
from .presentations import Presentation, Word, eliminate_trivial_generators, format_presentation
from .subgroup_tools import index2_scan
from .todd_coxeter import group_order

__all__ = [
    "CLAIMS",
    "Certificate",
    "CoxeterMatrix",
    "GroupDescriptor",
    "OrbitSummary",
    "TrailEntry",
    "FAVerdict",
    "SerreReport",
    "EngineError",
    "certify_finite",
    "certify_infinite",
    "assert_certificate",
    "coxeter_fa_certificate",
    "coxeter_presentation",
    "serre_conditions_report",
    "decide_fa_wreath",
    "decide_hereditary_fa_wreath",
    "extension_rule",
    "replay_trail",
]

CLAIMS = (
    "has-FA",
    "hereditary-FA",
    "is-finite",
    "is-infinite",
    "fg-torsion",
    "no-nonabelian-free-subgroup",
    "asserted",
)

HAS_FA, NO_FA, UNKNOWN = "HasFA", "NoFA", "Unknown"

# Conditions named in trails.
CITE_FA = "fixed vertex for every action on a tree"
CITE_SERRE_AMALGAM = "no splitting as a nontrivial amalgam"
CITE_SERRE_Z = "no quotient isomorphic to Z"
CITE_SERRE_COF = "finitely generated, so not an increasing union of proper subgroups"
CITE_FINITE = "finite group: orbits are bounded, so a vertex is fixed"
CITE_TORSION = "finitely generated torsion group fixes a vertex"
CITE_COXETER = "Coxeter matrix has no infinite entry"
CITE_QUOTIENT = "(FA) is inherited by quotients"
CITE_WREATH = "wreath criterion: B has (FA), A is finitely generated with finite abelianisation, no singleton B-orbit on X"
CITE_WREATH_ORBITS = "each B-orbit on X contains more than one element"
CITE_WREATH_AB = "needs A with finite abelianisation"
CITE_HEREDITARY = "hereditary wreath criterion for infinite B: B hereditary (FA), A with finite abelianisation"
CITE_EXT = (
    "extension criterion: A without nonabelian free subgroups, G finitely generated with no Z or D_inf quotient,"
    " so G has (FA) iff B has (FA)"
)
CITE_GATE = "no quotient isomorphic to Z or D_inf"


class EngineError(ValueError):
    pass


@dataclass(frozen=True)
class Certificate:
    claim: str
    evidence: tuple[tuple[str, Any], ...] = ()
    provenance: str | None = None

    def __post_init__(self):
        if self.claim not in CLAIMS:
            raise EngineError(f"unknown claim {self.claim!r}")
        if self.claim == "asserted" and not self.provenance:
            raise EngineError("asserted certificates need a provenance string")

    @property
    def asserted(self) -> bool:
        return self.provenance is not None

    def get(self, key: str, default=None):
        return dict(self.evidence).get(key, default)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"claim": self.claim}
        if self.evidence:
            out["evidence"] = {k: v for k, v in self.evidence}
        if self.provenance is not None:
            out["provenance"] = self.provenance
        return out


def assert_certificate(claim: str, provenance: str) -> Certificate:
    """An audited assertion (not machine-checked)."""
    if not provenance:
        raise EngineError("assertions need a provenance string")
    return Certificate(claim, (), provenance)


def certify_finite(p: Presentation, max_cosets: int = 200_000) -> Certificate:
    """Verify finiteness by coset enumeration; evidence records the order."""
    order = group_order(p, max_cosets)
    return Certificate("is-finite", (("order", order),))


def certify_infinite(p: Presentation) -> Certificate:
    """Verified infinite when Hom(G, Z) is nonzero."""
    rank = abelian_invariants(p).free_rank
    if rank == 0:
        raise EngineError("cannot verify infiniteness: abelianization is finite")
    return Certificate("is-infinite", (("hom_to_z_rank", rank),))


@dataclass(frozen=True)
class CoxeterMatrix:
    entries: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(math.inf if x in (None, "inf", "oo", math.inf) else int(x) for x in r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        for i, r in enumerate(rows):
            if len(r) != n:
                raise EngineError("Coxeter matrix must be square")
            if r[i] != 1:
                raise EngineError("Coxeter matrix needs m(i,i) = 1")
            for j, x in enumerate(r):
                if x != rows[j][i]:
                    raise EngineError("Coxeter matrix must be symmetric")
                if i != j and x < 2:
                    raise EngineError("off-diagonal Coxeter entries must be >= 2")

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def has_infinity(self) -> bool:
        return any(math.isinf(x) for r in self.entries for x in r)

    def to_json(self) -> list:
        return [["inf" if math.isinf(x) else int(x) for x in r] for r in self.entries]


def coxeter_presentation(m: CoxeterMatrix, name: str = "W") -> Presentation:
    n = m.size
    gens = tuple(f"s{i}" for i in range(n))
    rels = [Word.gen(i, 2) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            x = m.entries[i][j]
            if not math.isinf(x):
                rels.append((Word.gen(i) * Word.gen(j)) ** int(x))
    return Presentation(name, gens, tuple(rels))


def coxeter_fa_certificate(m: CoxeterMatrix) -> Certificate | None:
    """has-FA iff no entry is infinite; ``None`` is not a NoFA verdict."""
    if m.has_infinity:
        return None
    return Certificate("has-FA", (("coxeter_matrix", m.to_json()),))


@dataclass
class GroupDescriptor:
    name: str
    presentation: Presentation | None = None
    certificates: list[Certificate] = field(default_factory=list)
    _invariants: AbelianInvariants | None = field(default=None, repr=False)

    @property
    def invariants(self) -> AbelianInvariants | None:
        if self.presentation is None:
            return None
        if self._invariants is None:
            self._invariants = abelian_invariants(self.presentation)
        return self._invariants

    def has(self, claim: str) -> Certificate | None:
        return next((c for c in self.certificates if c.claim == claim), None)

    def with_certificate(self, cert: Certificate) -> "GroupDescriptor":
        return GroupDescriptor(self.name, self.presentation, self.certificates + [cert], self._invariants)

    def finite_order(self) -> int | None:
        c = self.has("is-finite")
        return None if c is None else c.get("order")

    def fa_certificate(self) -> tuple[Certificate, str] | None:
        """A certificate implying Property (FA), with the reason it does."""
        for claim, cite in (
            ("has-FA", None),
            ("hereditary-FA", "hereditary (FA) includes (FA)"),
            ("is-finite", CITE_FINITE),
            ("fg-torsion", CITE_TORSION),
        ):
            c = self.has(claim)
            if c is not None:
                if claim == "has-FA":
                    cite = CITE_COXETER if c.get("coxeter_matrix") is not None else "certified Property (FA)"
                return c, cite
        return None

    def is_trivial(self) -> bool:
        if self.finite_order() == 1:
            return True
        if self.presentation is not None:
            return eliminate_trivial_generators(self.presentation).ngens == 0
        return False

    def describe(self) -> dict:
        out: dict[str, Any] = {"name": self.name}
        if self.presentation is not None:
            out["presentation"] = format_presentation(self.presentation)
        if self.certificates:
            out["certificates"] = [c.to_json() for c in self.certificates]
        return out


@dataclass(frozen=True)
class TrailEntry:
    rule: str
    cite: str
    inputs: tuple = ()

    def to_json(self) -> dict:
        return {"rule": self.rule, "cite": self.cite, "inputs": list(self.inputs)}


@dataclass(frozen=True)
class FAVerdict:
    status: str
    trail: tuple[TrailEntry, ...]
    hereditary: bool = False

    def to_json(self) -> dict:
        out: dict[str, Any] = {"status": self.status, "trail": [t.to_json() for t in self.trail]}
        if self.hereditary:
            out["hereditary"] = True
        return out


def _hom_rank_entry(g: GroupDescriptor) -> TrailEntry:
    inv = g.invariants
    return TrailEntry("abelian-invariants", "computed by Smith normal form", (g.name, inv.free_rank, list(inv.torsion)))


def _verified_no_fa(g: GroupDescriptor) -> TrailEntry | None:
    """A checkable reason that ``g`` lacks (FA): it maps onto Z."""
    if g.presentation is not None and g.invariants.free_rank > 0:
        return TrailEntry("maps-onto-Z", CITE_SERRE_Z, (g.name, "hom_to_z_rank", g.invariants.free_rank))
    return None


# Serre's three conditions -------------------------------------------------------


@dataclass(frozen=True)
class SerreReport:
    amalgam: str
    quotient_z: str
    cofinality: str
    verdict: FAVerdict

    def to_json(self) -> dict:
        return {
            "amalgam": self.amalgam,
            "quotient_z": self.quotient_z,
            "cofinality": self.cofinality,
            "verdict": self.verdict.to_json(),
        }


def serre_conditions_report(g: GroupDescriptor) -> SerreReport:
    """Status ("satisfied" / "fails" / "unknown") of each of Serre's conditions."""
    trail: list[TrailEntry] = []
    fa = g.fa_certificate()
    cof = "satisfied" if g.presentation is not None else "unknown"
    if g.presentation is not None:
        trail.append(TrailEntry("finitely-generated", CITE_SERRE_COF, (g.name, g.presentation.ngens)))
        z = "satisfied" if g.invariants.free_rank == 0 else "fails"
        trail.append(_hom_rank_entry(g))
    else:
        z = "unknown"
    if z == "fails":
        trail.append(TrailEntry("maps-onto-Z", CITE_SERRE_Z, (g.name, "hom_to_z_rank", g.invariants.free_rank)))
        return SerreReport("unknown" if fa is None else "satisfied", z, cof, FAVerdict(NO_FA, tuple(trail)))
    if fa is not None:
        cert, cite = fa
        trail.append(TrailEntry(f"certificate:{cert.claim}", cite, (g.name,)))
        sat = "satisfied"
        return SerreReport(sat, sat, sat, FAVerdict(HAS_FA, tuple(trail)))
    trail.append(TrailEntry("missing-hypothesis", CITE_SERRE_AMALGAM, (g.name, "no certificate resolves the amalgam condition")))
    return SerreReport("unknown", z, cof, FAVerdict(UNKNOWN, tuple(trail)))


# wreath products ------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitSummary:
    """Orbit sizes of B on X; ``None`` marks an infinite orbit."""

    sizes: tuple[int | None, ...]

    @classmethod
    def of(cls, x: FiniteBSet) -> "OrbitSummary":
        return cls(orbits(x).sizes)

    @classmethod
    def regular(cls, b: GroupDescriptor) -> "OrbitSummary":
        """X = B with left multiplication: one orbit of size |B|."""
        return cls((b.finite_order(),))

    @property
    def count(self) -> int:
        return len(self.sizes)

    @property
    def has_singleton(self) -> bool:
        return any(s == 1 for s in self.sizes)


def decide_fa_wreath(a: GroupDescriptor, b: GroupDescriptor, x: FiniteBSet | OrbitSummary) -> FAVerdict:
    """Property (FA) for the permutational wreath product A wr_X B."""
    summary = x if isinstance(x, OrbitSummary) else OrbitSummary.of(x)
    if summary.count == 0:
        raise EngineError("X must be nonempty")
    if a.is_trivial():
        raise EngineError("A must be nontrivial")
    if b.finite_order() == 1 or (b.presentation is not None and b.presentation.ngens == 0):
        if summary.sizes and all(s is not None and s > 1 for s in summary.sizes):
            raise EngineError("a trivial B cannot have orbits with more than one element")
    trail: list[TrailEntry] = []

    no_b = _verified_no_fa(b)
    if no_b is not None:
        trail.append(no_b)
        trail.append(TrailEntry("quotient", CITE_QUOTIENT, ("A wr_X B", "->", b.name)))
        return FAVerdict(NO_FA, tuple(trail))

    if a.presentation is not None and not a.invariants.finite:
        trail.append(_hom_rank_entry(a))
        trail.append(TrailEntry("wreath-necessity", CITE_WREATH_AB, (a.name, "hom_to_z_rank", a.invariants.free_rank)))
        return FAVerdict(NO_FA, tuple(trail))

    if summary.has_singleton:
        trail.append(TrailEntry("hypothesis-failed", CITE_WREATH_ORBITS, ("orbit_sizes", list(summary.sizes))))
        return FAVerdict(UNKNOWN, tuple(trail))

    missing = []
    fa_b = b.fa_certificate()
    if fa_b is None:
        missing.append(f"{b.name}: no Property (FA) certificate")
    if a.presentation is None:
        missing.append(f"{a.name}: no finite presentation (finite generation and abelianisation unchecked)")
    if missing:
        for m in missing:
            trail.append(TrailEntry("missing-hypothesis", CITE_WREATH, (m,)))
        return FAVerdict(UNKNOWN, tuple(trail))

    cert, cite = fa_b
    trail.append(TrailEntry(f"certificate:{cert.claim}", cite, (b.name,)))
    trail.append(_hom_rank_entry(a))
    trail.append(TrailEntry("finitely-generated", CITE_SERRE_COF, (a.name, a.presentation.ngens)))
    trail.append(TrailEntry("orbits", CITE_WREATH_ORBITS, ("orbit_sizes", list(summary.sizes))))
    trail.append(TrailEntry("wreath-criterion", CITE_WREATH, (a.name, b.name)))
    return FAVerdict(HAS_FA, tuple(trail))


def decide_hereditary_fa_wreath(a: GroupDescriptor, b: GroupDescriptor) -> FAVerdict:
    """Hereditary (FA) for the standard wreath product A wr B with B infinite."""
    if b.has("is-finite") is not None:
        raise EngineError("B is certified finite; the hereditary criterion needs B infinite")
    if b.has("is-infinite") is None:
        raise EngineError("B needs an is-infinite certificate")
    if a.is_trivial():
        raise EngineError("A must be nontrivial")
    trail: list[TrailEntry] = [TrailEntry("certificate:is-infinite", "B is infinite", (b.name,))]

    no_b = _verified_no_fa(b)
    if no_b is not None:
        trail.append(no_b)
        trail.append(TrailEntry("quotient", CITE_QUOTIENT, ("A wr B", "->", b.name)))
        return FAVerdict(NO_FA, tuple(trail), hereditary=True)
    if a.presentation is not None and not a.invariants.finite:
        trail.append(_hom_rank_entry(a))
        trail.append(TrailEntry("hereditary-necessity", CITE_WREATH_AB, (a.name, "hom_to_z_rank", a.invariants.free_rank)))
        return FAVerdict(NO_FA, tuple(trail), hereditary=True)
    if b.presentation is not None and b.has("hereditary-FA") is None:
        scan = index2_scan(b.presentation)
        infinite = [i for i, (_, inv) in enumerate(scan.kernels) if not inv.finite]
        if infinite:
            trail.append(
                TrailEntry(
                    "finite-index-maps-onto-Z",
                    "a finite-index subgroup of B maps onto Z, so B lacks hereditary (FA)",
                    (b.name, "index-2 kernel", list(scan.vectors[infinite[0]])),
                )
            )
            trail.append(TrailEntry("quotient", CITE_QUOTIENT, ("A wr B", "->", b.name)))
            return FAVerdict(NO_FA, tuple(trail), hereditary=True)

    missing = []
    if b.has("hereditary-FA") is None:
        missing.append(f"{b.name}: no hereditary (FA) certificate")
    if a.presentation is None:
        missing.append(f"{a.name}: no finite presentation (abelianisation unchecked)")
    if missing:
        for m in missing:
            trail.append(TrailEntry("missing-hypothesis", CITE_HEREDITARY, (m,)))
        return FAVerdict(UNKNOWN, tuple(trail), hereditary=True)
    cert = b.has("hereditary-FA")
    trail.append(TrailEntry("certificate:hereditary-FA", cert.provenance or "verified", (b.name,)))
    trail.append(_hom_rank_entry(a))
    trail.append(TrailEntry("hereditary-criterion", CITE_HEREDITARY, (a.name, b.name)))
    return FAVerdict(HAS_FA, tuple(trail), hereditary=True)


# extensions ----------------------------------------------------------------------------


def extension_rule(a: GroupDescriptor, g: GroupDescriptor, b: GroupDescriptor) -> FAVerdict:
    """(FA) for G in an extension 1 -> A -> G -> B -> 1, via the conservative D-infinity gate."""
    if a.has("no-nonabelian-free-subgroup") is None and a.has("is-finite") is None:
        raise EngineError(f"{a.name} needs a no-nonabelian-free-subgroup (or is-finite) certificate")
    if g.presentation is None:
        raise EngineError(f"{g.name} needs a finite presentation (finite generation)")
    trail: list[TrailEntry] = []

    no_b = _verified_no_fa(b)
    if no_b is not None:
        trail.append(no_b)
        trail.append(TrailEntry("quotient", CITE_QUOTIENT, (g.name, "->", b.name)))
        return FAVerdict(NO_FA, tuple(trail))

    trail.append(_hom_rank_entry(g))
    if not g.invariants.finite:
        trail.append(TrailEntry("gate-failed", "maps onto the integers: " + CITE_GATE, (g.name, g.invariants.free_rank)))
        return FAVerdict(UNKNOWN, tuple(trail))
    scan = index2_scan(g.presentation)
    trail.append(
        TrailEntry(
            "index2-scan",
            "every index-2 subgroup has finite abelianisation",
            (g.name, len(scan.kernels), scan.all_finite),
        )
    )
    if not scan.all_finite:
        trail.append(TrailEntry("gate-failed", "cannot certify: " + CITE_GATE, (g.name,)))
        return FAVerdict(UNKNOWN, tuple(trail))
    fa_b = b.fa_certificate()
    if fa_b is None:
        trail.append(TrailEntry("missing-hypothesis", CITE_EXT, (f"{b.name}: no Property (FA) certificate",)))
        return FAVerdict(UNKNOWN, tuple(trail))
    cert, cite = fa_b
    trail.append(TrailEntry(f"certificate:{cert.claim}", cite, (b.name,)))
    trail.append(TrailEntry("extension-criterion", CITE_EXT, (a.name, g.name, b.name)))
    return FAVerdict(HAS_FA, tuple(trail))


# replay -------------------------------------------------------------------------------


def _check_entry(entry: TrailEntry, groups: dict[str, GroupDescriptor]) -> bool:
    rule, inputs = entry.rule, entry.inputs
    if rule == "abelian-invariants":
        name, rank, torsion = inputs
        g = groups[name]
        return g.presentation is not None and abelian_invariants(g.presentation).to_json() == {
            "free_rank": rank,
            "torsion": list(torsion),
        }
    if rule in ("maps-onto-Z", "wreath-necessity", "hereditary-necessity"):
        name, _, rank = inputs
        g = groups[name]
        return g.presentation is not None and rank > 0 and abelian_invariants(g.presentation).free_rank == rank
    if rule == "finitely-generated":
        name, ngens = inputs
        g = groups[name]
        return g.presentation is not None and g.presentation.ngens == ngens
    if rule.startswith("certificate:"):
        claim = rule.split(":", 1)[1]
        g = groups[inputs[0]]
        cert = g.has(claim)
        if cert is None:
            return False
        if claim == "is-finite" and g.presentation is not None:
            return certify_finite(g.presentation) == cert
        if claim == "has-FA" and cert.get("coxeter_matrix") is not None:
            m = CoxeterMatrix(tuple(tuple(r) for r in cert.get("coxeter_matrix")))
            return coxeter_fa_certificate(m) == cert
        return True
    if rule == "finite-index-maps-onto-Z":
        name, _, vector = inputs
        scan = index2_scan(groups[name].presentation)
        return any(list(v) == list(vector) and not inv.finite for v, (_, inv) in zip(scan.vectors, scan.kernels))
    if rule == "index2-scan":
        name, count, flag = inputs
        scan = index2_scan(groups[name].presentation)
        return len(scan.kernels) == count and scan.all_finite == flag
    return True


def replay_trail(verdict: FAVerdict, groups: Sequence[GroupDescriptor]) -> bool:
    """Recheck every machine-checkable trail entry against the descriptors."""
    by_name = {g.name: g for g in groups}
    try:
        return all(_check_entry(e, by_name) for e in verdict.trail)
    except (KeyError, ValueError, TypeError):
        return False
