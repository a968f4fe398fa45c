"""Bornological groups, actions, transporters, and properness classification.

Groups are finite (explicit tables) or ℤ^k; lattice actions are translation
rules x ↦ x + M·l for an integer d×k matrix M.  Every quantitative object
(transporter, stabilizer, orbit bornology) is then a box or a lattice preimage
{l : M·l ∈ C}, and boundedness reduces to recession-cone triviality of a
rational polyhedron, decided exactly for k ≤ 2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import boxes as bx
from .boxes import (
    NEG_INF,
    POS_INF,
    Box,
    BoxSet,
    FinitePoints,
    GeometryError,
    GroundSpace,
    UnsupportedVariant,
    box,
    box_hull,
    difference_box,
    is_finite_end,
    mat_rank,
    mat_vec,
    point_box,
    set_boxes,
    set_is_empty,
)
from .bornology import (
    CHAIN,
    FINITE_BASE,
    MAXIMAL,
    BornologySpec,
    OrbitInclusion,
    OrbitProjection,
    chain_recession,
    generate_from_base,
    image_bornology,
    inverse_image_bornology,
    is_bounded,
    is_full_at_some_level,
    level_box,
)
from .verdicts import (
    Budget,
    CheckItem,
    CheckReport,
    DEFAULT_BUDGET,
    Verdict,
    bounded_at,
    confirmed,
    refuted,
    unbounded,
)

ENUM_CAP = 200_000


class ConsistencyError(AssertionError):
    """A proved implication was observed violated: an implementation bug."""


# --- groups and actions -----------------------------------------------------


@dataclass(frozen=True)
class GroupSpec:
    """Finite group (tables) or ℤ^k, with a bornology on the element set."""

    kind: str  # "finite" | "lattice"
    bornology: BornologySpec
    elements: tuple = ()
    mul: tuple = ()  # mul[i][j] = index of elements[i] * elements[j]
    rank: int = 0

    @property
    def is_lattice(self) -> bool:
        return self.kind == "lattice"

    def identity_index(self) -> int:
        for e in range(len(self.elements)):
            if all(self.mul[e][j] == j for j in range(len(self.elements))):
                return e
        raise GeometryError("group table has no identity")

    def inverse_index(self, i: int) -> int:
        e = self.identity_index()
        for j in range(len(self.elements)):
            if self.mul[i][j] == e and self.mul[j][i] == e:
                return j
        raise GeometryError(f"element {i} has no inverse")


def lattice_group(rank: int, bornology: BornologySpec) -> GroupSpec:
    if rank > 2:
        raise UnsupportedVariant("lattice groups are supported for rank k <= 2")
    return GroupSpec("lattice", bornology, rank=rank)


def finite_group(elements, mul, bornology: BornologySpec) -> GroupSpec:
    g = GroupSpec("finite", bornology, elements=tuple(elements),
                  mul=tuple(tuple(r) for r in mul))
    report = group_table_check(g)
    if not report.passed:
        raise GeometryError(f"not a group table: {report.failures()}")
    return g


def group_table_check(g: GroupSpec) -> CheckReport:
    """Identity, inverses, and exhaustive associativity for |L| <= 8."""
    if g.is_lattice:
        return CheckReport("group_table(lattice)", (CheckItem("vector_addition", True),))
    n = len(g.elements)
    items = []
    try:
        e = g.identity_index()
        items.append(CheckItem("identity", True, witness=e))
    except GeometryError:
        return CheckReport("group_table", (CheckItem("identity", False),))
    inv_ok = True
    for i in range(n):
        try:
            g.inverse_index(i)
        except GeometryError:
            inv_ok = False
            items.append(CheckItem("inverses", False, witness=i))
            break
    if inv_ok:
        items.append(CheckItem("inverses", True))
    assoc_witness = None
    if n <= 8:
        for a, b, c in itertools.product(range(n), repeat=3):
            if g.mul[g.mul[a][b]][c] != g.mul[a][g.mul[b][c]]:
                assoc_witness = (a, b, c)
                break
    items.append(CheckItem("associativity", assoc_witness is None, witness=assoc_witness))
    return CheckReport("group_table", tuple(items))


@dataclass(frozen=True)
class TranslationRule:
    """x ↦ x + M·l; automatically a homomorphism."""

    matrix: tuple  # d rows x k columns

    def apply_index(self, l: tuple, x: tuple) -> tuple:
        return tuple(a + b for a, b in zip(x, mat_vec(self.matrix, l)))


@dataclass(frozen=True)
class PermutationRule:
    """perms[i] maps each space label to its image under group element i."""

    perms: tuple  # tuple of dict-like tuples of (label, label)

    def mapping(self, i: int) -> dict:
        return dict(self.perms[i])


@dataclass(frozen=True)
class AffineRule:
    """x ↦ A·x + M·l with A a signed permutation.

    Accepted in the file format but routed through the window oracle only;
    the exact calculus raises UnsupportedVariant on these rules because the
    composite bookkeeping is non-abelian.
    """

    point_matrix: tuple  # d x d signed permutation rows
    matrix: tuple        # d x k

    def apply_index(self, l: tuple, x: tuple) -> tuple:
        ax = mat_vec(self.point_matrix, x)
        return tuple(a + b for a, b in zip(ax, mat_vec(self.matrix, l)))


def is_signed_permutation(rows: tuple) -> bool:
    n = len(rows)
    if any(len(r) != n for r in rows):
        return False
    for r in rows:
        if sum(1 for v in r if v in (1, -1)) != 1 or any(v not in (-1, 0, 1) for v in r):
            return False
    cols = list(zip(*rows))
    return all(sum(1 for v in c if v != 0) == 1 for c in cols)


@dataclass(frozen=True)
class ActionInstance:
    name: str
    group: GroupSpec
    space: GroundSpace
    rule: object
    space_bornology: BornologySpec

    @property
    def is_translation(self) -> bool:
        return isinstance(self.rule, TranslationRule)

    @property
    def is_window_only(self) -> bool:
        return isinstance(self.rule, AffineRule)

    @property
    def matrix(self) -> tuple:
        return self.rule.matrix

    def apply(self, l, x):
        if isinstance(self.rule, (TranslationRule, AffineRule)):
            return self.rule.apply_index(l, x)
        i = self.group.elements.index(l) if not isinstance(l, int) else l
        return self.rule.mapping(i)[x]


def action_homomorphism_check(a: ActionInstance) -> CheckReport:
    """Permutation rules: exhaustive homomorphism test for |L| <= 8."""
    if isinstance(a.rule, AffineRule):
        ok = is_signed_permutation(a.rule.point_matrix)
        return CheckReport(
            "action_rule",
            (CheckItem("signed_permutation", ok),
             CheckItem("homomorphism", True,
                       detail="deferred: affine rules are window-oracle only")),
        )
    if a.is_translation:
        m = a.matrix
        if len(m) != a.space.dim or any(len(r) != a.group.rank for r in m):
            return CheckReport("action_rule", (CheckItem("matrix_shape", False),))
        return CheckReport("action_rule", (CheckItem("additivity", True),))
    n = len(a.group.elements)
    witness = None
    if n <= 8:
        for i, j in itertools.product(range(n), repeat=2):
            mi, mj = a.rule.mapping(i), a.rule.mapping(j)
            mij = a.rule.mapping(a.group.mul[i][j])
            if any(mi[mj[x]] != mij[x] for x in a.space.labels):
                witness = (i, j)
                break
    e = a.group.identity_index()
    id_ok = all(a.rule.mapping(e)[x] == x for x in a.space.labels)
    return CheckReport(
        "action_rule",
        (CheckItem("identity_acts_trivially", id_ok),
         CheckItem("homomorphism", witness is None, witness=witness)),
    )


# --- symbolic end bookkeeping for bornological-map checks -------------------


@dataclass(frozen=True)
class BiAffine:
    """c0 + ci*i + cj*j, or a symbolic infinity; i, j range over chain indexes."""

    c0: int = 0
    ci: int = 0
    cj: int = 0
    inf: int = 0

    def __add__(self, other: "BiAffine") -> "BiAffine":
        if self.inf or other.inf:
            s = self.inf or other.inf
            if self.inf and other.inf and self.inf != other.inf:
                raise GeometryError("opposite infinities in end sum")
            return BiAffine(inf=s)
        return BiAffine(self.c0 + other.c0, self.ci + other.ci, self.cj + other.cj)


def _end_to_biaffine(end, var: str) -> BiAffine:
    if end.is_symbolic:
        return BiAffine(inf=end.inf)
    if var == "i":
        return BiAffine(end.offset, ci=end.coeff)
    if var == "j":
        return BiAffine(end.offset, cj=end.coeff)
    return BiAffine(end.offset)


def _scaled_end(end, c: int, want_upper: bool, var: str) -> BiAffine:
    """Upper/lower end of c * [lo(m), hi(m)] as a BiAffine in var."""
    if c == 0:
        return BiAffine(0)
    lo_e, hi_e = end  # c > 0 keeps end roles; c < 0 swaps them
    chosen = (hi_e if want_upper else lo_e) if c > 0 else (lo_e if want_upper else hi_e)
    b = _end_to_biaffine(chosen, var)
    if b.inf:
        return BiAffine(inf=b.inf * (1 if c > 0 else -1))
    return BiAffine(c * b.c0, c * b.ci, c * b.cj)


def _covered_for_all_indexes(chain_end, query: BiAffine, upper: bool) -> bool:
    """Whether every (i, j) instance of the query end fits under the chain end.

    chain_end is the space chain's own AffineEnd (in its index m); ∃m per (i,j)
    suffices.  Symbolic chain ends absorb anything; widening ends absorb every
    finite value; constant ends need the query constant and dominated.
    """
    if chain_end.inf == (1 if upper else -1):
        return True
    if chain_end.is_symbolic:
        return query.inf == chain_end.inf
    if query.inf:
        return False
    if upper and chain_end.coeff > 0:
        return True
    if not upper and chain_end.coeff < 0:
        return True
    if chain_end.coeff != 0:
        # anti-monotone chain end: only index 0 is usable
        return False
    if query.ci == 0 and query.cj == 0:
        return query.c0 <= chain_end.offset if upper else query.c0 >= chain_end.offset
    if upper:
        return query.ci <= 0 and query.cj <= 0 and query.c0 <= chain_end.offset
    return query.ci >= 0 and query.cj >= 0 and query.c0 >= chain_end.offset


def group_bornological_check(g: GroupSpec) -> CheckReport:
    """Multiplication and inversion send bounded sets to bounded sets."""
    if not g.is_lattice or g.bornology.kind == MAXIMAL:
        return CheckReport(
            "group_bornological",
            (CheckItem("multiplication", True), CheckItem("inversion", True)),
        )
    if g.bornology.kind != CHAIN or g.bornology.matrix is not None:
        raise UnsupportedVariant("lattice group bornology must be a plain chain")
    shape = g.bornology.shape
    mul_bad = None
    inv_bad = None
    for c, (lo, hi) in enumerate(shape):
        sum_lo = _end_to_biaffine(lo, "i") + _end_to_biaffine(lo, "j")
        sum_hi = _end_to_biaffine(hi, "i") + _end_to_biaffine(hi, "j")
        if not _covered_for_all_indexes(lo, sum_lo, upper=False):
            mul_bad = mul_bad or ("coordinate", c, "lower")
        if not _covered_for_all_indexes(hi, sum_hi, upper=True):
            mul_bad = mul_bad or ("coordinate", c, "upper")
        neg_lo = _negate_biaffine(_end_to_biaffine(hi, "i"))
        neg_hi = _negate_biaffine(_end_to_biaffine(lo, "i"))
        if not _covered_for_all_indexes(lo, neg_lo, upper=False):
            inv_bad = inv_bad or ("coordinate", c, "lower", _escape_dir(len(shape), c, -1))
        if not _covered_for_all_indexes(hi, neg_hi, upper=True):
            inv_bad = inv_bad or ("coordinate", c, "upper", _escape_dir(len(shape), c, 1))
    return CheckReport(
        "group_bornological",
        (CheckItem("multiplication", mul_bad is None, witness=mul_bad),
         CheckItem("inversion", inv_bad is None, witness=inv_bad)),
    )


def _negate_biaffine(b: BiAffine) -> BiAffine:
    if b.inf:
        return BiAffine(inf=-b.inf)
    return BiAffine(-b.c0, -b.ci, -b.cj)


def _escape_dir(d, c, sign):
    v = [0] * d
    v[c] = sign
    return tuple(v)


def action_bornological_check(a: ActionInstance) -> CheckReport:
    """The action map sends product-bounded sets to bounded sets.

    Translation rules: the image of D_i × B_j is B_j ⊕ M·D_i, whose
    per-coordinate extents are exact interval arithmetic; the check compares
    those BiAffine ends against the space chain.  Permutation rules on finite
    spaces are vacuous.
    """
    if isinstance(a.rule, AffineRule):
        return CheckReport(
            "action_bornological",
            (CheckItem("image_bounded", True,
                       detail="window-oracle-only rule: exact check deferred"),),
        )
    if not a.is_translation:
        return CheckReport("action_bornological", (CheckItem("image_bounded", True),))
    if a.space_bornology.kind == MAXIMAL:
        return CheckReport("action_bornological", (CheckItem("image_bounded", True),))
    if a.space_bornology.kind != CHAIN or a.space_bornology.matrix is not None:
        raise UnsupportedVariant("space bornology must be a plain chain or maximal")
    m = a.matrix
    bad = None
    gb = a.group.bornology
    for r, (lo, hi) in enumerate(a.space_bornology.shape):
        q_lo = _end_to_biaffine(lo, "j")
        q_hi = _end_to_biaffine(hi, "j")
        if gb.kind == MAXIMAL:
            # any group box: contribution is the full row range of M over ℤ^k
            for c in range(a.group.rank):
                if m[r][c] != 0:
                    q_lo = q_lo + BiAffine(inf=-1)
                    q_hi = q_hi + BiAffine(inf=1)
                    break
        else:
            for c in range(a.group.rank):
                q_lo = q_lo + _scaled_end(gb.shape[c], m[r][c], want_upper=False, var="i")
                q_hi = q_hi + _scaled_end(gb.shape[c], m[r][c], want_upper=True, var="i")
        if not _covered_for_all_indexes(lo, q_lo, upper=False):
            bad = bad or ("coordinate", r, "lower")
        if not _covered_for_all_indexes(hi, q_hi, upper=True):
            bad = bad or ("coordinate", r, "upper")
    return CheckReport(
        "action_bornological", (CheckItem("image_bounded", bad is None, witness=bad),)
    )


# --- exact rational geometry for {l : M·l ∈ C} ------------------------------


def _ineqs_from_box(m: tuple, c: Box) -> list:
    """Constraints a·l <= b (integer data) for M·l ∈ C; None if C empty."""
    if c.empty:
        return None
    out = []
    for row, lo, hi in zip(m, c.lower, c.upper):
        if is_finite_end(hi):
            out.append((tuple(row), int(hi)))
        if is_finite_end(lo):
            out.append((tuple(-x for x in row), -int(lo)))
    return out


def _recession_rays(m: tuple, rec: Box) -> list:
    """Nonzero integer rays of {r : M·r ∈ rec}; complete for k <= 2."""
    k = len(m[0]) if m else 0
    if k == 0:
        return []

    def feasible(r):
        if all(x == 0 for x in r):
            return False
        v = mat_vec(m, r)
        return all(lo <= x <= hi for lo, x, hi in zip(rec.lower, v, rec.upper))

    if k == 1:
        return [r for r in ((1,), (-1,)) if feasible(r)]
    if k > 2:
        raise UnsupportedVariant("recession analysis implemented for k <= 2")
    cands = {(1, 0), (-1, 0), (0, 1), (0, -1)}
    for row, lo, hi in zip(m, rec.lower, rec.upper):
        if lo == NEG_INF and hi == POS_INF:
            continue
        a = _primitive(row)
        if a is None:
            continue
        cands.update({a, (-a[0], -a[1]), (-a[1], a[0]), (a[1], -a[0])})
    rays = sorted(r for r in cands if feasible(r))
    return rays


def _primitive(v):
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    if g == 0:
        return None
    return tuple(x // g for x in v)


def _fm_bounds_k2(ineqs, var: int):
    """Rational (lo, hi) range of l[var] via Fourier–Motzkin; None if infeasible."""
    other = 1 - var
    pos, neg, pure = [], [], []
    for a, b in ineqs:
        if a[other] > 0:
            pos.append((a, b))
        elif a[other] < 0:
            neg.append((a, b))
        else:
            pure.append((a, b))
    derived = list(pure)
    for (a1, b1), (a2, b2) in itertools.product(pos, neg):
        # eliminate l[other]
        w1, w2 = -a2[other], a1[other]
        coeff = w1 * a1[var] + w2 * a2[var]
        rhs = w1 * b1 + w2 * b2
        derived.append(((coeff if var == 0 else 0, coeff if var == 1 else 0), rhs))
    lo, hi = NEG_INF, POS_INF
    for a, b in derived:
        c = a[var]
        if c > 0:
            hi = min(hi, Fraction(b, c))
        elif c < 0:
            lo = max(lo, Fraction(b, c))
        elif b < 0:
            return None
    if lo != NEG_INF and hi != POS_INF and lo > hi:
        return None
    return (lo, hi)


def _interval_k1(m: tuple, c: Box):
    """Exact integer interval {l : M·l ∈ C} for k = 1; None if empty."""
    lo, hi = NEG_INF, POS_INF
    for row, cl, ch in zip(m, c.lower, c.upper):
        a = row[0]
        if a == 0:
            if not (cl <= 0 <= ch):
                return None
            continue
        ends = []
        if is_finite_end(cl):
            ends.append(Fraction(int(cl), a))
        if is_finite_end(ch):
            ends.append(Fraction(int(ch), a))
        if is_finite_end(cl) and is_finite_end(ch):
            a_lo, a_hi = min(ends), max(ends)
            lo, hi = max(lo, a_lo), min(hi, a_hi)
        elif is_finite_end(cl):
            v = Fraction(int(cl), a)
            if a > 0:
                lo = max(lo, v)
            else:
                hi = min(hi, v)
        elif is_finite_end(ch):
            v = Fraction(int(ch), a)
            if a > 0:
                hi = min(hi, v)
            else:
                lo = max(lo, v)
    ilo = lo if lo == NEG_INF else _ceil_frac(lo)
    ihi = hi if hi == POS_INF else _floor_frac(hi)
    if ilo != NEG_INF and ihi != POS_INF and ilo > ihi:
        return None
    return (ilo, ihi)


def _ceil_frac(f) -> int:
    return -((-f.numerator) // f.denominator) if isinstance(f, Fraction) else int(f)


def _floor_frac(f) -> int:
    return f.numerator // f.denominator if isinstance(f, Fraction) else int(f)


def lattice_box_feasible(m: tuple, c: Box, cap: int = ENUM_CAP) -> bool | None:
    """Exact integer feasibility of M·l ∈ C over l ∈ ℤ^k (k <= 2).

    Layers: rational infeasibility, bounded enumeration, full-dimensional
    recession (always feasible), and a unimodular strip reduction for
    one-dimensional recession.  None only when an enumeration cap is hit.
    """
    if c.empty:
        return False
    k = len(m[0]) if m else 0
    if k == 1:
        iv = _interval_k1(m, c)
        return iv is not None
    if k != 2:
        raise UnsupportedVariant("integer feasibility implemented for k <= 2")
    ineqs = _ineqs_from_box(m, c)
    r0 = _fm_bounds_k2(ineqs, 0)
    if r0 is None:
        return False
    rec = Box(
        tuple(NEG_INF if lo == NEG_INF else 0 for lo in c.lower),
        tuple(POS_INF if hi == POS_INF else 0 for hi in c.upper),
    )
    rays = _recession_rays(m, rec)
    if _has_two_independent(rays):
        # full-dimensional recession: arbitrarily large balls, integers inside
        return True
    if rays:
        # all recession lies on one line; align it with e1, then the e2-range
        # of the transformed polyhedron is rationally bounded
        u = _unimodular_for_ray(rays[0])
        mu = tuple(tuple(sum(row[t] * u[t][s] for t in range(2)) for s in range(2))
                   for row in m)
        ineqs_u = _ineqs_from_box(mu, c)
        r1u = _fm_bounds_k2(ineqs_u, 1)
        if r1u is None:
            return False
        return _enumerate_k2_var(ineqs_u, 1, r1u, cap)
    # bounded region: enumerate the smaller variable
    r1 = _fm_bounds_k2(ineqs, 1)
    if r1 is None:
        return False
    if _range_width(r0) <= _range_width(r1):
        return _enumerate_k2_var(ineqs, 0, r0, cap)
    return _enumerate_k2_var(ineqs, 1, r1, cap)


def _has_two_independent(rays) -> bool:
    for r1, r2 in itertools.combinations(rays, 2):
        if r1[0] * r2[1] - r1[1] * r2[0] != 0:
            return True
    return False


def _unimodular_for_ray(ray):
    """Unimodular U (columns) with U·e1 = primitive(ray); shrinks var-1 range."""
    r = _primitive(ray)
    g, a, b = _xgcd(r[0], r[1])
    # a*r0 + b*r1 = 1 after scaling; columns [r, (-b, a)]
    return ((r[0], -b), (r[1], a))


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _enumerate_k2_var(ineqs, var, rng, cap) -> bool | None:
    """Enumerate one variable over its bounded rational range; exact under cap."""
    if rng[0] == NEG_INF or rng[1] == POS_INF:
        return None
    lo, hi = _ceil_frac(rng[0]), _floor_frac(rng[1])
    if hi - lo + 1 > cap:
        return None
    other = 1 - var
    for v in range(lo, hi + 1):
        olo, ohi = NEG_INF, POS_INF
        ok = True
        for a, b in ineqs:
            rest = b - a[var] * v
            co = a[other]
            if co > 0:
                ohi = min(ohi, Fraction(rest, co))
            elif co < 0:
                olo = max(olo, Fraction(rest, co))
            elif rest < 0:
                ok = False
                break
        if not ok:
            continue
        ilo = olo if olo == NEG_INF else _ceil_frac(olo)
        ihi = ohi if ohi == POS_INF else _floor_frac(ohi)
        if ilo == NEG_INF or ihi == POS_INF or ilo <= ihi:
            return True
    return False


def _range_width(rng):
    if rng is None:
        return POS_INF
    lo, hi = rng
    if lo == NEG_INF or hi == POS_INF:
        return POS_INF
    return hi - lo


def rational_bbox(m: tuple, c: Box) -> Box | None:
    """Bounding box of the rational polyhedron {l : M·l ∈ C} (must be bounded).

    k = 1: interval intersection.  k = 2: feasible pairwise vertex enumeration.
    Returns None when the polyhedron is rationally empty.
    """
    k = len(m[0]) if m else 0
    if c.empty:
        return None
    if k == 1:
        iv = _interval_k1(m, c)
        if iv is None:
            return None
        return box((iv[0], iv[1]))
    if k != 2:
        raise UnsupportedVariant("bounding boxes implemented for k <= 2")
    ineqs = _ineqs_from_box(m, c)
    verts = []
    for (a1, b1), (a2, b2) in itertools.combinations(ineqs, 2):
        det = a1[0] * a2[1] - a1[1] * a2[0]
        if det == 0:
            continue
        x = Fraction(b1 * a2[1] - b2 * a1[1], det)
        y = Fraction(a1[0] * b2 - a2[0] * b1, det)
        if all(a[0] * x + a[1] * y <= b for a, b in ineqs):
            verts.append((x, y))
    if not verts:
        return None
    los = [_ceil_frac(min(v[i] for v in verts)) for i in range(2)]
    his = [_floor_frac(max(v[i] for v in verts)) for i in range(2)]
    return box((los[0], his[0]), (los[1], his[1]))


# --- transporters ------------------------------------------------------------


@dataclass(frozen=True)
class LatticeTransporter:
    """{l ∈ ℤ^k : M·l ∈ some case box}; cases are a flat union."""

    matrix: tuple
    cases: tuple  # tuple of Box

    def member(self, l: tuple) -> bool:
        v = mat_vec(self.matrix, l)
        return any(case.contains(v) for case in self.cases)

    @property
    def rank(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0


@dataclass(frozen=True)
class ExplicitTransporter:
    elements: frozenset

    def member(self, l) -> bool:
        return l in self.elements


def transporter(a: ActionInstance, b, b2):
    """L_{B,B'} = {l : l·B ∩ B' ≠ ∅} as an exact descriptor."""
    if a.is_window_only:
        raise UnsupportedVariant("affine rules route through the window oracle only")
    if set_is_empty(b) or set_is_empty(b2):
        return ExplicitTransporter(frozenset())
    if a.is_translation:
        cases = []
        for src in set_boxes(b):
            for tgt in set_boxes(b2):
                c = difference_box(tgt, src)
                if not c.empty:
                    cases.append(c)
        if not cases:
            return ExplicitTransporter(frozenset())
        return LatticeTransporter(a.matrix, tuple(dict.fromkeys(cases)))
    hits = []
    for i in range(len(a.group.elements)):
        mapping = a.rule.mapping(i)
        moved = {mapping[x] for x in b.points}
        if moved & set(b2.points):
            hits.append(a.group.elements[i])
    return ExplicitTransporter(frozenset(hits))


def transporter_membership(t, l) -> bool:
    return t.member(l)


def transporter_bounded(a: ActionInstance, t) -> "object":
    """Boundedness of a transporter in the group bornology, with certificate."""
    gb = a.group.bornology
    if gb.kind == MAXIMAL:
        return bounded_at(0, note="maximal group bornology")
    if isinstance(t, ExplicitTransporter):
        if not t.elements:
            return bounded_at(0, note="empty transporter")
        return is_bounded(gb, FinitePoints(t.elements))
    hull = None
    for case in t.cases:
        ray, status = _case_unbounded_ray(t.matrix, case)
        if status is None:
            from .verdicts import inconclusive

            return inconclusive("feasibility enumeration cap hit")
        if ray is not None:
            return unbounded(
                direction=ray,
                base_point=None,
                note="recession ray of the transporter polyhedron",
            )
        bb = rational_bbox(t.matrix, case)
        if bb is not None:
            hull = bb if hull is None else box_hull(hull, bb)
    if hull is None:
        return bounded_at(0, note="empty transporter")
    verdict = is_bounded(gb, BoxSet(hull))
    return verdict


def _case_unbounded_ray(m, case: Box):
    """(ray, status): an integer unboundedness ray of {l : M·l ∈ case}, if any.

    status False/True mirrors integer feasibility; None means the feasibility
    enumeration cap was hit (caller reports inconclusive).
    """
    if case.empty:
        return None, False
    rec = Box(
        tuple(NEG_INF if lo == NEG_INF else 0 for lo in case.lower),
        tuple(POS_INF if hi == POS_INF else 0 for hi in case.upper),
    )
    rays = _recession_rays(m, rec)
    if not rays:
        return None, False
    feasible = lattice_box_feasible(m, case)
    if feasible is None:
        return None, None
    if feasible:
        return rays[0], True
    return None, False


# --- classification ----------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    b_proper: Verdict
    weakly_b_proper: Verdict
    bi: Verdict
    sample_points: tuple = ()
    detail: str = ""

    def flags(self) -> dict:
        return {
            "b_proper": self.b_proper.confirmed,
            "weakly_b_proper": self.weakly_b_proper.confirmed,
            "bi": self.bi.confirmed,
        }


def kernel_vector(m: tuple):
    """A nonzero integer kernel vector of M, or None when injective."""
    k = len(m[0]) if m else 0
    if k == 1:
        return None if any(row[0] != 0 for row in m) else (1,)
    if k == 2:
        if all(all(x == 0 for x in row) for row in m):
            return (1, 0)
        row = next(r for r in m if any(x != 0 for x in r))
        cand = _primitive((-row[1], row[0]))
        if all(r[0] * cand[0] + r[1] * cand[1] == 0 for r in m):
            return cand
        return None
    raise UnsupportedVariant("kernel analysis implemented for k <= 2")


def column_lattice_index(m: tuple):
    """Index of the column lattice in ℤ^d when full rank, else None."""
    d = len(m)
    k = len(m[0]) if m else 0
    if mat_rank(m) < d:
        return None
    if d == 1:
        g = 0
        for x in m[0]:
            g = gcd(g, abs(x))
        return g
    if d == 2 and k == 2:
        return abs(m[0][0] * m[1][1] - m[0][1] * m[1][0])
    raise UnsupportedVariant("column lattice index needs k >= d and d <= 2")


def in_column_lattice(m: tuple, v: tuple) -> bool:
    return bool(lattice_box_feasible(m, point_box(v)))


def coset_sample_points(a: ActionInstance, cap: int = 32) -> tuple:
    """Origin plus one representative per column-lattice coset, capped."""
    if not a.is_translation:
        return tuple(a.space.labels[:cap])
    d = a.space.dim
    m = a.matrix
    reps = [(0,) * d]
    index = column_lattice_index(m)
    target = min(cap, index) if index else cap
    radius = 0
    while len(reps) < target and radius < 6:
        radius += 1
        for p in bx.box_points(bx.cube(radius, d)):
            if max(map(abs, p)) < radius:
                continue
            if len(reps) >= target:
                break
            if not any(in_column_lattice(m, tuple(x - y for x, y in zip(p, r)))
                       for r in reps):
                reps.append(p)
    return tuple(reps)


def _space_levels(a: ActionInstance, budget: Budget):
    sb = a.space_bornology
    if sb.kind == FINITE_BASE:
        return [FinitePoints(e) for e in generate_from_base(sb.base)]
    if sb.kind == MAXIMAL and not a.space.is_lattice:
        return [FinitePoints(frozenset(a.space.labels))]
    return [BoxSet(level_box(sb, n)) for n in range(budget.max_index + 1)]


def classify(a: ActionInstance, budget: Budget = DEFAULT_BUDGET) -> Classification:
    """B-proper / weakly B-proper / bounded-isotropy flags with certificates.

    Translation rules are decided universally: transporter recession cones do
    not depend on the chain index, so cone triviality at one level settles
    every level pair.  Per-level bound indexes are recorded up to the budget.
    """
    if a.is_window_only:
        raise UnsupportedVariant("affine rules route through the window oracle only")
    if a.is_translation:
        cls = _classify_translation(a, budget)
    else:
        cls = _classify_finite(a, budget)
    _assert_implications(cls)
    return cls


def _assert_implications(cls: Classification):
    if cls.b_proper.confirmed and not cls.weakly_b_proper.confirmed:
        raise ConsistencyError("B-proper must imply weakly B-proper")
    if cls.weakly_b_proper.confirmed and not cls.bi.confirmed:
        raise ConsistencyError("weakly B-proper must imply bounded isotropy")


def _classify_translation(a: ActionInstance, budget: Budget) -> Classification:
    m = a.matrix
    gb = a.group.bornology
    maximal_group = gb.kind == MAXIMAL
    sb = a.space_bornology
    if sb.kind == MAXIMAL:
        rec_b = bx.full_box(a.space.dim)
    else:
        rec_b = chain_recession(sb)

    # bounded isotropy: the stabilizer of every point is the kernel lattice
    kv = kernel_vector(m)
    if kv is None:
        bi = confirmed("trivial kernel: stabilizers are {0}")
    elif maximal_group:
        bi = confirmed("kernel lattice is bounded in the maximal bornology")
    else:
        bi = refuted(witness={"direction": kv}, detail="kernel lattice is unbounded")

    # weakly B-proper: cone {r : M r ∈ rec(B_X)} trivial
    samples = coset_sample_points(a)
    if maximal_group:
        weakly = confirmed("maximal group bornology bounds every transporter")
    else:
        w_rays = _recession_rays(m, rec_b)
        if not w_rays:
            certs = []
            for x in samples[: min(4, len(samples))]:
                for j in range(min(3, budget.max_index + 1)):
                    t = transporter(a, FinitePoints(frozenset({x})), _level_set(a, j))
                    v = transporter_bounded(a, t)
                    certs.append(((x, j), v.outcome, v.index))
            weakly = confirmed(
                "point-transporter recession cone is trivial", witness=tuple(certs)
            )
        else:
            x = samples[0]
            j = _first_feasible_point_level(a, x, budget)
            weakly = refuted(
                witness={"point": x, "level": j, "direction": w_rays[0]},
                detail="point transporter contains a recession ray",
            )

    # B-proper: cone {r : M r ∈ rec(B_X ⊖ B_X)} trivial
    if maximal_group:
        b_proper = confirmed("maximal group bornology bounds every transporter")
    else:
        if sb.kind == MAXIMAL:
            rec_c = bx.full_box(a.space.dim)
        else:
            rec_c = difference_box(rec_b, rec_b)
        p_rays = _recession_rays(m, rec_c)
        if not p_rays:
            certs = []
            for i in range(min(3, budget.max_index + 1)):
                for j in range(min(3, budget.max_index + 1)):
                    t = transporter(a, _level_set(a, i), _level_set(a, j))
                    v = transporter_bounded(a, t)
                    certs.append(((i, j), v.outcome, v.index))
            b_proper = confirmed(
                "transporter recession cone is trivial", witness=tuple(certs)
            )
        else:
            lv = _first_nonempty_level(a, budget)
            b_proper = refuted(
                witness={"levels": (lv, lv), "direction": p_rays[0]},
                detail="level-pair transporter contains a recession ray",
            )
    return Classification(b_proper, weakly, bi, sample_points=samples)


def _level_set(a: ActionInstance, n: int):
    return BoxSet(level_box(a.space_bornology, n))


def _first_nonempty_level(a: ActionInstance, budget: Budget) -> int:
    for n in range(budget.max_index + 9):
        if not level_box(a.space_bornology, n).empty:
            return n
    return 0


def _first_feasible_point_level(a: ActionInstance, x, budget: Budget) -> int:
    for n in range(budget.max_index + 9):
        lb = level_box(a.space_bornology, n)
        if not lb.empty and lb.contains(x):
            return n
    return 0


def _classify_finite(a: ActionInstance, budget: Budget) -> Classification:
    levels = _space_levels(a, budget)
    worst = None
    for b1 in levels:
        for b2 in levels:
            t = transporter(a, b1, b2)
            v = transporter_bounded(a, t)
            if not v.bounded:
                worst = (b1, b2, v)
    if worst is None:
        b_proper = confirmed("all base-pair transporters bounded")
    else:
        b_proper = refuted(witness=worst, detail="unbounded transporter")
    pts = list(a.space.labels)
    weakly_bad = None
    for x in pts:
        for b2 in levels:
            t = transporter(a, FinitePoints(frozenset({x})), b2)
            v = transporter_bounded(a, t)
            if not v.bounded:
                weakly_bad = (x, v)
    weakly = (
        confirmed("all point transporters bounded")
        if weakly_bad is None
        else refuted(witness=weakly_bad)
    )
    bi_bad = None
    for x in pts:
        t = transporter(a, FinitePoints(frozenset({x})), FinitePoints(frozenset({x})))
        v = transporter_bounded(a, t)
        if not v.bounded:
            bi_bad = (x, v)
    bi = confirmed("all stabilizers bounded") if bi_bad is None else refuted(witness=bi_bad)
    return Classification(b_proper, weakly, bi, sample_points=tuple(pts))


# --- orbit bornologies and cofinality ----------------------------------------


def orbit_bornologies(a: ActionInstance, x):
    """(pullback, pushforward) bornologies on the orbit parameter lattice."""
    if a.is_translation:
        if all(all(v == 0 for v in row) for row in a.matrix):
            # one-point orbit: both bornologies are trivial on it
            from .bornology import maximal_bornology

            point_space = GroundSpace.finite((tuple(x),))
            return maximal_bornology(point_space), maximal_bornology(point_space)
        if kernel_vector(a.matrix) is not None:
            raise GeometryError(
                "orbit parameterization needs a trivial kernel; factor the action first"
            )
        pull = inverse_image_bornology(OrbitInclusion(a.matrix, tuple(x)), a.space_bornology)
        push = image_bornology(OrbitProjection(a.matrix, tuple(x)), a.group.bornology)
        return pull, push
    orbit = sorted({a.rule.mapping(i)[x] for i in range(len(a.group.elements))}, key=str)
    sb = a.space_bornology
    from .bornology import finite_base_bornology, maximal_bornology

    ospace = GroundSpace.finite(tuple(orbit))
    if sb.kind == MAXIMAL:
        pull = maximal_bornology(ospace)
    else:
        pull = finite_base_bornology(
            ospace,
            tuple(FinitePoints(frozenset(e.points & set(orbit))) for e in sb.base),
        )
    gb = a.group.bornology
    if gb.kind == MAXIMAL:
        push = maximal_bornology(ospace)
    else:
        push = finite_base_bornology(
            ospace,
            tuple(
                FinitePoints(frozenset(a.rule.mapping(a.group.elements.index(g))[x]
                                       for g in e.points))
                for e in gb.base
            ),
        )
    return pull, push


def chains_mutually_cofinal(pull: BornologySpec, push: BornologySpec,
                            budget: Budget = DEFAULT_BUDGET) -> Verdict:
    """Whether two bornologies on the same parameter space are equal as families.

    push ⊆ pull is checked level-by-level (exact per level, universal via the
    recession boxes); pull ⊆ push via transporter-style cone analysis of the
    preimage levels.
    """
    if pull.kind == FINITE_BASE or push.kind == FINITE_BASE:
        f1 = _finite_antichain(pull)
        f2 = _finite_antichain(push)
        if f1 == f2:
            return confirmed("equal maximal antichains")
        return refuted(witness={"only_pull": sorted(f1 - f2, key=str),
                                "only_push": sorted(f2 - f1, key=str)})
    if pull.kind == MAXIMAL and push.kind == MAXIMAL:
        return confirmed("both maximal")

    # direction 1: every push level bounded in pull
    for i in range(budget.max_index + 1):
        if push.kind == MAXIMAL:
            if pull.kind == MAXIMAL or is_full_at_some_level(pull):
                continue
            return refuted(
                witness={"direction": "push maximal vs bounded pull levels"},
                detail="pushforward is maximal but pullback levels are proper",
            )
        v = is_bounded(pull, BoxSet(level_box(push, i)))
        if not v.bounded:
            return refuted(witness={"push_level": i, "verdict": v},
                           detail="pushforward level escapes the pullback")

    # direction 2: every pull level bounded in push
    if pull.kind == MAXIMAL:
        if is_full_at_some_level(push):
            return confirmed("both families contain the full space")
        return refuted(
            witness={"direction": (1,) + (0,) * (push.space.dim - 1)},
            detail="maximal pullback vs proper pushforward levels",
        )
    if push.kind == MAXIMAL:
        return confirmed("pushforward is maximal")
    if pull.matrix is None:
        for j in range(budget.max_index + 1):
            v = is_bounded(push, BoxSet(level_box(pull, j)))
            if not v.bounded:
                return refuted(witness={"pull_level": j, "verdict": v})
        return confirmed("levels mutually bounded up to budget")
    rec_c = chain_recession(pull)
    rays = _recession_rays(pull.matrix, rec_c)
    if rays:
        return refuted(witness={"direction": rays[0]},
                       detail="pullback level contains a recession ray")
    for j in range(budget.max_index + 1):
        c = level_box(pull, j)
        bb = rational_bbox(pull.matrix, c) if not c.empty else None
        if bb is None:
            continue
        v = is_bounded(push, BoxSet(bb))
        if not v.bounded:
            return refuted(witness={"pull_level": j, "verdict": v})
    return confirmed("preimage levels bounded in the pushforward chain")


def _finite_antichain(spec: BornologySpec) -> set:
    if spec.kind == FINITE_BASE:
        return set(generate_from_base(spec.base))
    if spec.kind == MAXIMAL and not spec.space.is_lattice:
        return {frozenset(spec.space.labels)}
    raise UnsupportedVariant("finite antichain comparison needs finite bornologies")


# --- coarse transitivity support ---------------------------------------------


def covering_residues(a: ActionInstance) -> tuple | None:
    """A finite B with L·B = X (full-rank column lattice), else None."""
    if not a.is_translation:
        reps = []
        covered = set()
        for x in a.space.labels:
            if x in covered:
                continue
            reps.append(x)
            covered |= {a.rule.mapping(i)[x] for i in range(len(a.group.elements))}
        return tuple(reps)
    m = a.matrix
    index = column_lattice_index(m)
    if index is None or index == 0:
        return None
    d = a.space.dim
    reps = [(0,) * d]
    radius = 0
    while len(reps) < index and radius < 4 * index + 4:
        radius += 1
        for p in bx.box_points(bx.cube(radius, d)):
            if max(map(abs, p)) < radius:
                continue
            if not any(in_column_lattice(m, tuple(x - y for x, y in zip(p, r)))
                       for r in reps):
                reps.append(p)
                if len(reps) == index:
                    break
    return tuple(reps)


def uncovered_direction(a: ActionInstance) -> tuple | None:
    """A lattice direction transverse to the column lattice span, if rank-deficient."""
    m = a.matrix
    d = a.space.dim
    if column_lattice_index(m) not in (None, 0):
        return None
    cands = [tuple(1 if i == j else 0 for i in range(d)) for j in range(d)]
    cands.append((1,) * d)
    for w in cands:
        if not _in_rational_span(m, w):
            return w
    return None


def _in_rational_span(m, w) -> bool:
    cols = [tuple(row[c] for row in m) for c in range(len(m[0]))]
    rank0 = mat_rank(tuple(zip(*cols))) if cols else 0
    aug = cols + [tuple(w)]
    rank1 = mat_rank(tuple(zip(*aug)))
    return rank1 == rank0
