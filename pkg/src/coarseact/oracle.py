"""Brute-force window oracle and differential cross-check driver.

Everything here recomputes by explicit enumeration over finite windows: group
elements are tried one by one, window points are tested by raw comparisons.
No code path is shared with the symbolic engine beyond the instance model, so
agreement between the two is meaningful evidence.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kern
from . import boxes as bx
from .boxes import (
    Box,
    BoxSet,
    FinitePoints,
    GeometryError,
    GroundSpace,
    box,
    cube,
    is_finite_end,
    mat_vec,
    set_boxes,
    set_is_empty,
    set_membership,
    set_points_within,
)
from .bornology import (
    AFF_NEG_INF,
    AFF_POS_INF,
    BornologySpec,
    affine,
    bornology_axiom_check,
    chain_bornology,
    level_box,
    maximal_bornology,
    finite_base_bornology,
)
from .actions import (
    ActionInstance,
    PermutationRule,
    TranslationRule,
    action_bornological_check,
    finite_group,
    group_bornological_check,
    lattice_group,
    transporter,
)
from .coarse import (
    Compose,
    Diag,
    DiffRel,
    GroupRight,
    MetricBall,
    OrbitPair,
    ProductRel,
    Transpose,
    UnionRel,
    close_finite_base,
    entourage_membership,
    neighborhood,
)
from .verdicts import Budget, DEFAULT_BUDGET


@dataclass(frozen=True)
class Window:
    """Finite truncation: lattice points of sup-norm <= radius, or all labels."""

    radius: int

    def points(self, space: GroundSpace) -> list:
        if space.is_lattice:
            return list(bx.box_points(cube(self.radius, space.dim)))
        return list(space.labels)


@dataclass
class CrossCheckReport:
    primitive: str
    instance: str
    window: int
    mismatches: list = field(default_factory=list)
    advisory: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


# --- transporter oracle -------------------------------------------------------


def existence_truncation_bound(a: ActionInstance, b, b2, gw: int) -> int | None:
    """A window radius certifying the ∃x truncation in the transporter oracle.

    If some x witnesses l, the nearest witness lies in b ∩ (b2 - M·l), whose
    closest-to-origin corner is bounded by the finite ends plus |M·l|.
    None when either set has no finite end to anchor on.
    """
    per = _per_coordinate_bounds(a, b, b2, gw)
    finite = [r for r in per if r is not None]
    if not finite:
        return None
    return max(finite)


def _per_coordinate_bounds(a: ActionInstance, b, b2, gw: int) -> list:
    """Certified witness-window radius per space coordinate (None = no anchor)."""
    d = a.space.dim
    out = []
    for r in range(d):
        ends = []
        row_norm = sum(abs(c) for c in a.matrix[r])
        for s, shift in ((b, 0), (b2, gw * row_norm)):
            for piece in set_boxes(s):
                for v in (piece.lower[r], piece.upper[r]):
                    if is_finite_end(v):
                        ends.append(abs(int(v)) + shift)
        if not ends:
            # both sets unconstrained away from their finite ends here; if no
            # end at all exists the coordinate is vacuous and 0 witnesses it
            out.append(0 if _coordinate_vacuous(b, b2, r) else None)
            continue
        out.append(max(ends) + 1)
    return out


def _coordinate_vacuous(b, b2, r) -> bool:
    for s in (b, b2):
        for piece in set_boxes(s):
            if is_finite_end(piece.lower[r]) or is_finite_end(piece.upper[r]):
                return False
    return True


_SWEEP_CELL_CAP = 20_000_000


def _affine_oracle_transporter(a: ActionInstance, b, b2, gw: int, xw: int):
    """Window enumeration for x ↦ A·x + M·l rules; always advisory-flagged."""
    xw = min(xw, 16 if a.space.dim <= 2 else 6)
    notes = ["affine rule: window-oracle evidence only"]
    hits = []
    for l in bx.box_points(cube(gw, a.group.rank)):
        found = False
        for x in bx.box_points(cube(xw, a.space.dim)):
            if set_membership(b, x) and set_membership(b2, a.apply(l, x)):
                found = True
                break
        if found:
            hits.append(l)
    return sorted(hits), notes, gw


def oracle_transporter(a: ActionInstance, b, b2, gw: int, xw: int):
    """{l in the group window : ∃x ∈ b ∩ window, x + M·l ∈ b2} by enumeration.

    The witness grid uses per-coordinate certified radii clipped to xw; when
    the enumeration budget forces a smaller grid than the certificate asks
    for, an advisory note is attached (positive hits stay sound).
    Returns (sorted elements, advisory notes).
    """
    notes = []
    if a.is_window_only:
        return _affine_oracle_transporter(a, b, b2, gw, xw)
    if not a.is_translation:
        hits = []
        for i, g in enumerate(a.group.elements):
            mapping = a.rule.mapping(i)
            if {mapping[p] for p in b.points} & set(b2.points):
                hits.append(g)
        return sorted(hits, key=str), notes, 0
    k = a.group.rank
    while True:
        per = _per_coordinate_bounds(a, b, b2, gw)
        radii = [min(xw, r) if r is not None else xw for r in per]
        if any(r is None and xw < 2 * gw for r in per):
            notes.append("no finite end to certify the witness window: advisory only")
        if any(r is not None and r > xw for r in per):
            notes.append(f"witness window {xw} below the certified bound {max(filter(None, per))}")
        cells = (2 * gw + 1) ** k
        for r in radii:
            cells *= 2 * r + 1
        if cells <= _SWEEP_CELL_CAP or gw <= 4:
            break
        gw = max(4, gw // 2)
        notes = [f"group window shrunk to {gw} to fit the enumeration budget"]
    if cells > _SWEEP_CELL_CAP:
        scale = 1
        while cells > _SWEEP_CELL_CAP and any(r > 2 for r in radii):
            radii = [max(2, r - max(1, r // 4)) for r in radii]
            cells = (2 * gw + 1) ** k
            for r in radii:
                cells *= 2 * r + 1
        notes.append("witness grid truncated below the certificate: advisory only")
    lgrid = np.array(list(bx.box_points(cube(gw, k))), dtype=float)
    xaxes = box(*((-r, r) for r in radii))
    xgrid = np.array(list(bx.box_points(xaxes)), dtype=float)
    m = np.array(a.matrix, dtype=float)
    hit = np.zeros(len(lgrid), dtype=bool)
    for pb in set_boxes(b):
        for pb2 in set_boxes(b2):
            hit |= np.asarray(
                kern.transporter_sweep(
                    lgrid, m,
                    np.array(pb.lower, float), np.array(pb.upper, float),
                    np.array(pb2.lower, float), np.array(pb2.upper, float),
                    xgrid,
                ),
                dtype=bool,
            )
    out = [tuple(int(c) for c in lgrid[i]) for i in range(len(lgrid)) if hit[i]]
    return sorted(out), notes, gw


# --- entourage membership oracle -----------------------------------------------


def oracle_entourage_member(e, pair, gw: int, window: int):
    """Membership by explicit enumeration; None when the search is truncated."""
    x, y = pair
    if isinstance(e, Diag):
        return x == y
    if isinstance(e, MetricBall):
        return max(abs(a - b) for a, b in zip(x, y)) <= e.radius
    if isinstance(e, DiffRel):
        return set_membership(e.shift_set, tuple(b - a for a, b in zip(x, y)))
    if isinstance(e, ProductRel):
        return set_membership(e.s1, x) and set_membership(e.s2, y)
    if isinstance(e, GroupRight):
        if e.group.is_lattice:
            return set_membership(e.d_set, tuple(b - a for a, b in zip(x, y)))
        i = e.group.elements.index(x)
        j = e.group.elements.index(y)
        return e.group.elements[e.group.mul[e.group.inverse_index(i)][j]] in e.d_set.points
    if isinstance(e, OrbitPair):
        return _oracle_orbit_member(e, x, y, gw)
    if isinstance(e, Transpose):
        return oracle_entourage_member(e.inner, (y, x), gw, window)
    if isinstance(e, UnionRel):
        m1 = oracle_entourage_member(e.e1, pair, gw, window)
        m2 = oracle_entourage_member(e.e2, pair, gw, window)
        if m1 is True or m2 is True:
            return True
        if m1 is False and m2 is False:
            return False
        return None
    if isinstance(e, Compose):
        space = e.space
        found_none = False
        for yy in Window(window).points(space):
            a = oracle_entourage_member(e.e1, (x, yy), gw, window)
            b = oracle_entourage_member(e.e2, (yy, y), gw, window)
            if a is True and b is True:
                return True
            if a is None or b is None:
                found_none = True
        return None  # truncated existential search is advisory only
    raise GeometryError(f"oracle cannot enumerate {e!r}")


def _oracle_orbit_member(e: OrbitPair, x, y, gw: int):
    a = e.action
    if x == y:
        return True
    if set_is_empty(e.bounded_set):
        return False
    if not a.is_translation:
        for i in range(len(a.group.elements)):
            mapping = a.rule.mapping(i)
            moved = {mapping[p] for p in e.bounded_set.points}
            if x in moved and y in moved:
                return True
        return False
    for l in bx.box_points(cube(gw, a.group.rank)):
        shift = mat_vec(a.matrix, l)
        vx = tuple(c - s for c, s in zip(x, shift))
        vy = tuple(c - s for c, s in zip(y, shift))
        if set_membership(e.bounded_set, vx) and set_membership(e.bounded_set, vy):
            return True
    # sound only within the group window; caller treats False as advisory when
    # the transporter bound exceeds gw
    return False


def oracle_neighborhood(e, a_set, gw: int, window: int) -> set:
    out = set()
    space = e.space
    srcs = (
        set_points_within(a_set, window)
        if space.is_lattice
        else [p for p in space.labels if set_membership(a_set, p)]
    )
    ys = Window(window).points(space)
    if isinstance(e, OrbitPair) and e.action.is_translation:
        for x in srcs:
            pairs = [(x, y) for y in ys]
            hits = oracle_orbit_members_batch(e, pairs, gw)
            out |= {y for y, hit in zip(ys, hits) if hit}
        return out
    for y in ys:
        for x in srcs:
            if oracle_entourage_member(e, (x, y), gw, window) is True:
                out.add(y)
                break
    return out


# --- naive finite closure -------------------------------------------------------


def naive_closure(space: GroundSpace, base) -> tuple:
    """Full-family closure over relation bitmasks.

    Generates by BFS over transpose/union/composition, materializes every
    submask, applies the top-element shortcut, and verifies closure on the
    materialized family by exhaustive transpose and sampled pairs.  Returns
    (family set of masks, maximal antichain as frozensets of pairs).
    """
    labels = list(space.labels)
    n = len(labels)
    if n > 4:
        raise GeometryError("naive closure is exhaustive only for n <= 4")
    full = (1 << (n * n)) - 1

    def bit(i, j):
        return 1 << (i * n + j)

    def to_mask(rel):
        m = 0
        for xx, yy in rel:
            m |= bit(labels.index(xx), labels.index(yy))
        return m

    def transpose(m):
        out = 0
        for i in range(n):
            for j in range(n):
                if m & bit(i, j):
                    out |= bit(j, i)
        return out

    def compose(m1, m2):
        out = 0
        for i in range(n):
            row = 0
            for j in range(n):
                if m1 & bit(i, j):
                    row |= (m2 >> (j * n)) & ((1 << n) - 1)
            out |= row << (i * n)
        return out

    diag = 0
    for i in range(n):
        diag |= bit(i, i)
    generated = {diag} | {to_mask(r) for r in base}
    queue = list(generated)
    while queue:
        m1 = queue.pop()
        new = {transpose(m1)}
        for m2 in list(generated):
            new.add(m1 | m2)
            new.add(compose(m1, m2))
            new.add(compose(m2, m1))
        for m in new:
            if m not in generated:
                generated.add(m)
                queue.append(m)
        if full in generated:
            generated = {full}
            break
        if len(generated) > 200_000:
            raise GeometryError("naive closure exceeded its family cap")
    family = set()
    for m in generated:
        sub = m
        while True:
            family.add(sub)
            if sub == 0:
                break
            sub = (sub - 1) & m
    _verify_family_closed(family, transpose, compose, diag)
    maximal = [m for m in generated if not any(m != o and (m | o) == o for o in generated)]
    antichain = []
    for m in maximal:
        rel = frozenset(
            (labels[i], labels[j]) for i in range(n) for j in range(n) if m & bit(i, j)
        )
        antichain.append(rel)
    return family, tuple(sorted(antichain, key=lambda r: (len(r), sorted(map(str, r)))))


def _verify_family_closed(family, transpose, compose, diag):
    if diag not in family:
        raise GeometryError("naive closure lost the diagonal")
    for m in family:
        if transpose(m) not in family:
            raise GeometryError("naive closure not transpose-closed")
    rng = random.Random(0)
    members = sorted(family)
    for _ in range(min(400, len(members) ** 2)):
        m1 = rng.choice(members)
        m2 = rng.choice(members)
        if (m1 | m2) not in family or compose(m1, m2) not in family:
            raise GeometryError("naive closure not op-closed on a sampled pair")


# --- random instances ------------------------------------------------------------


PROFILES = ("finite", "lattice-k1", "lattice-k2")


def random_instance(seed: int, profile: str) -> ActionInstance:
    """Deterministic-from-seed instance; always passes the axiom checks."""
    if profile not in PROFILES:
        raise GeometryError(f"unknown profile {profile!r}")
    rng = random.Random((seed, profile).__repr__())
    if profile == "finite":
        inst = _random_finite_instance(rng, seed)
    else:
        k = 1 if profile == "lattice-k1" else 2
        inst = _random_lattice_instance(rng, seed, k)
    _validate_instance(inst)
    return inst


def _validate_instance(inst: ActionInstance):
    for spec in (inst.space_bornology, inst.group.bornology):
        report = bornology_axiom_check(spec)
        if not report.passed:
            raise GeometryError(f"generated bornology fails axioms: {report}")
    if not group_bornological_check(inst.group).passed:
        raise GeometryError("generated group is not bornological")
    if not action_bornological_check(inst).passed:
        raise GeometryError("generated action is not bornological")


def _random_lattice_instance(rng: random.Random, seed: int, k: int) -> ActionInstance:
    d = rng.randint(1, 3)
    m = tuple(tuple(rng.randint(-2, 2) for _ in range(k)) for _ in range(d))
    space = GroundSpace.lattice(d)
    maximal_pair = rng.random() < 0.12
    if maximal_pair:
        sb = maximal_bornology(space)
        gb = maximal_bornology(GroundSpace.lattice(k))
    else:
        sb = chain_bornology(space, [_random_space_ends(rng) for _ in range(d)])
        gb = chain_bornology(
            GroundSpace.lattice(k), [_random_group_ends(rng) for _ in range(k)]
        )
    group = lattice_group(k, gb)
    return ActionInstance(
        f"random-{seed}-k{k}", group, space, TranslationRule(m), sb
    )


def _random_space_ends(rng: random.Random):
    if rng.random() < 0.3:
        lower = AFF_NEG_INF
    else:
        lower = affine(-rng.randint(1, 2), -rng.randint(0, 3))
    if rng.random() < 0.3:
        upper = AFF_POS_INF
    else:
        upper = affine(rng.randint(1, 2), rng.randint(0, 3))
    return (lower, upper)


def _random_group_ends(rng: random.Random):
    return (
        affine(-rng.randint(1, 2), -rng.randint(0, 2)),
        affine(rng.randint(1, 2), rng.randint(0, 2)),
    )


_FINITE_GROUPS = {
    "c1": 1, "c2": 2, "c3": 3, "c4": 4, "c5": 5, "c6": 6, "v4": 4,
}


def _cyclic_table(n):
    return tuple(tuple((i + j) % n for j in range(n)) for i in range(n))


def _klein_table():
    # indices e, a, b, ab with xor composition
    return tuple(tuple(i ^ j for j in range(4)) for i in range(4))


def _random_finite_instance(rng: random.Random, seed: int) -> ActionInstance:
    name = rng.choice(sorted(_FINITE_GROUPS))
    labels = tuple(range(rng.randint(2, 5)))
    space = GroundSpace.finite(labels)
    if name == "v4":
        mul = _klein_table()
        elements = tuple(range(4))
        sigma, tau = _commuting_involutions(rng, labels)
        perms = (
            _perm_tuple(labels, {x: x for x in labels}),
            _perm_tuple(labels, sigma),
            _perm_tuple(labels, tau),
            _perm_tuple(labels, {x: sigma[tau[x]] for x in labels}),
        )
    else:
        order = _FINITE_GROUPS[name]
        mul = _cyclic_table(order)
        elements = tuple(range(order))
        gen = _permutation_of_order_dividing(rng, labels, order)
        perms = []
        current = {x: x for x in labels}
        for _ in range(order):
            perms.append(_perm_tuple(labels, current))
            current = {x: gen[current[x]] for x in labels}
        perms = tuple(perms)
    gb = _random_finite_bornology(rng, elements)
    sb = _random_finite_bornology(rng, labels)
    group = finite_group(elements, mul, gb)
    return ActionInstance(
        f"random-{seed}-finite", group, space, PermutationRule(perms), sb
    )


def _perm_tuple(labels, mapping):
    return tuple((x, mapping[x]) for x in labels)


def _permutation_of_order_dividing(rng, labels, order: int) -> dict:
    """A permutation whose order divides the group order: cycles of fitting size."""
    pool = list(labels)
    rng.shuffle(pool)
    mapping = {}
    divisors = [d for d in range(1, order + 1) if order % d == 0]
    while pool:
        size = rng.choice([d for d in divisors if d <= len(pool)])
        cyc = [pool.pop() for _ in range(size)]
        for i, x in enumerate(cyc):
            mapping[x] = cyc[(i + 1) % size]
    return mapping


def _commuting_involutions(rng, labels):
    """σ, τ commuting involutions: blocks of size 4 (regular V4), 2, or 1."""
    pool = list(labels)
    rng.shuffle(pool)
    sigma = {}
    tau = {}
    while pool:
        if len(pool) >= 4 and rng.random() < 0.5:
            a, b, c, d = (pool.pop() for _ in range(4))
            sigma.update({a: b, b: a, c: d, d: c})
            tau.update({a: c, c: a, b: d, d: b})
        elif len(pool) >= 2 and rng.random() < 0.7:
            a, b = pool.pop(), pool.pop()
            which = rng.random()
            if which < 0.5:
                sigma.update({a: b, b: a})
                tau.update({a: a, b: b})
            else:
                sigma.update({a: a, b: b})
                tau.update({a: b, b: a})
        else:
            a = pool.pop()
            sigma[a] = a
            tau[a] = a
    return sigma, tau


def _random_finite_bornology(rng: random.Random, labels) -> BornologySpec:
    space = GroundSpace.finite(labels)
    if rng.random() < 0.3:
        return maximal_bornology(space)
    # a nested chain of subsets ending at the full set satisfies the base axioms
    shuffled = list(labels)
    rng.shuffle(shuffled)
    cuts = sorted({rng.randint(1, len(labels)) for _ in range(2)} | {len(labels)})
    base = tuple(FinitePoints(frozenset(shuffled[:c])) for c in cuts)
    return finite_base_bornology(space, base)


# --- cross-check driver -----------------------------------------------------------


PRIMITIVES = ("transporter", "entourage", "neighborhood", "compose", "bounded", "closure")


def cross_check(instances, primitives=PRIMITIVES, window: int = 32,
                budget: Budget = DEFAULT_BUDGET) -> list:
    """Symbolic vs oracle agreement over every instance and selected primitive."""
    reports = []
    for inst in instances:
        for prim in primitives:
            fn = _CHECKS.get(prim)
            if fn is None:
                raise GeometryError(f"unknown primitive {prim!r}")
            reports.append(fn(inst, window, budget))
    return reports


def _sample_sets(inst: ActionInstance, count: int = 3):
    if not inst.space.is_lattice:
        from .bornology import generate_from_base

        if inst.space_bornology.kind == "maximal":
            return [FinitePoints(frozenset(inst.space.labels))]
        return [FinitePoints(e) for e in generate_from_base(inst.space_bornology.base)][:count]
    out = []
    for n in range(count):
        lvl = level_box(inst.space_bornology, n)
        if not lvl.empty:
            out.append(BoxSet(lvl))
    rng = random.Random(inst.name)
    d = inst.space.dim
    lo = tuple(rng.randint(-4, 0) for _ in range(d))
    hi = tuple(l + rng.randint(0, 3) for l in lo)
    out.append(BoxSet(Box(lo, hi)))
    return out


def _gw_for(inst: ActionInstance, window: int) -> int:
    if not inst.is_translation:
        return window
    if inst.group.rank >= 2:
        return min(window, 8)
    return min(window, 20 if inst.space.dim <= 2 else 10)


def _check_transporter(inst, window, budget) -> CrossCheckReport:
    rep = CrossCheckReport("transporter", inst.name, window)
    gw = _gw_for(inst, window)
    n_sets = 2 if (inst.space.is_lattice and inst.space.dim >= 3) else 3
    sets = _sample_sets(inst, n_sets)[: n_sets + 1]
    for b, b2 in itertools.product(sets, repeat=2):
        if set_is_empty(b) or set_is_empty(b2):
            continue
        t = transporter(inst, b, b2)
        if inst.is_translation:
            bound = existence_truncation_bound(inst, b, b2, gw)
            oracle_set, notes, eff_gw = oracle_transporter(
                inst, b, b2, gw, max(window, bound or 0)
            )
            rep.advisory.extend(notes)
            sym = [l for l in bx.box_points(cube(eff_gw, inst.group.rank)) if t.member(l)]
            truncated = any("advisory" in n or "below" in n for n in notes)
            only_oracle = sorted(set(oracle_set) - set(sym))
            only_sym = sorted(set(sym) - set(oracle_set))
            if only_oracle or (only_sym and not truncated):
                rep.mismatches.append(
                    {"b": b, "b2": b2,
                     "only_oracle": only_oracle[:3],
                     "only_symbolic": only_sym[:3]}
                )
        else:
            oracle_set, _, _ = oracle_transporter(inst, b, b2, gw, window)
            sym = sorted((g for g in inst.group.elements if t.member(g)), key=str)
            if sym != sorted(oracle_set, key=str):
                rep.mismatches.append({"b": b, "b2": b2})
    return rep


def _entourage_levels(inst: ActionInstance, budget):
    sets = _sample_sets(inst, 3)
    levels = [OrbitPair(inst, s) for s in sets[:3]]
    if inst.space.is_lattice:
        levels.append(MetricBall(inst.space, 2))
        if inst.group.is_lattice and inst.group.bornology.kind == "chain":
            levels.append(GroupRight(inst.group, BoxSet(level_box(inst.group.bornology, 1))))
    return levels


def _pair_sample(space: GroundSpace, name, window: int, count: int = 80):
    if not space.is_lattice:
        return list(itertools.product(space.labels, repeat=2))
    rng = random.Random(f"{name}|pairs|{space.dim}")
    d = space.dim
    pts = [tuple(rng.randint(-window // 2, window // 2) for _ in range(d)) for _ in range(count)]
    pairs = [(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]
    pairs += [(p, p) for p in pts[:8]]
    return pairs


def oracle_orbit_members_batch(e: OrbitPair, pairs, gw: int) -> list:
    """Oracle membership of many pairs at once (translation rules: kernel sweep)."""
    a = e.action
    if not a.is_translation:
        return [oracle_entourage_member(e, p, gw, 0) for p in pairs]
    lgrid = np.array(list(bx.box_points(cube(gw, a.group.rank))), dtype=float)
    m = np.array(a.matrix, dtype=float)
    xs = np.array([p[0] for p in pairs], dtype=float)
    ys = np.array([p[1] for p in pairs], dtype=float)
    out = np.all(xs == ys, axis=1)
    for piece in set_boxes(e.bounded_set):
        out |= np.asarray(
            kern.orbit_pair_sweep(
                xs, ys, lgrid, m,
                np.array(piece.lower, float), np.array(piece.upper, float),
            ),
            dtype=bool,
        )
    return [bool(v) for v in out]


def _check_entourage(inst, window, budget) -> CrossCheckReport:
    rep = CrossCheckReport("entourage", inst.name, window)
    gw = _needed_gw(inst, window)
    for e in _entourage_levels(inst, budget):
        pairs = _pair_sample(e.space, inst.name, min(window, 12))
        if isinstance(e, OrbitPair) and inst.is_translation:
            oracle_results = oracle_orbit_members_batch(e, pairs, gw)
        else:
            oracle_results = [
                oracle_entourage_member(e, p, gw, window) for p in pairs
            ]
        for pair, orc in zip(pairs, oracle_results):
            sym = entourage_membership(e, pair, budget)
            if sym is None:
                rep.advisory.append({"pair": pair, "note": "symbolic inconclusive"})
                continue
            if orc is None:
                rep.advisory.append({"pair": pair, "note": "oracle truncated"})
                continue
            if bool(sym) != bool(orc):
                rep.mismatches.append({"entourage": type(e).__name__, "pair": pair,
                                       "symbolic": sym, "oracle": orc})
    return rep


def _needed_gw(inst: ActionInstance, window: int) -> int:
    # witnesses for window pairs lie within |M|-scaled reach of the window
    if not inst.is_translation:
        return window
    ends = [
        abs(int(v))
        for piece in set_boxes(_sample_sets(inst)[0])
        for v in piece.lower + piece.upper
        if is_finite_end(v)
    ]
    full = 3 * window + max(ends, default=0) + 4
    return full if inst.group.rank == 1 else min(full, window + 12)


def _check_neighborhood(inst, window, budget) -> CrossCheckReport:
    rep = CrossCheckReport("neighborhood", inst.name, window)
    gw = _needed_gw(inst, window)
    w = min(window, 16 if (inst.space.is_lattice and inst.space.dim <= 2) else 6)
    if inst.space.is_lattice:
        points = [(0,) * inst.space.dim]
    else:
        points = list(inst.space.labels[:2])
    for e in _entourage_levels(inst, budget)[:3]:
        for x in points:
            a_set = FinitePoints(frozenset({x}))
            sym_set, exact = neighborhood(e, a_set, budget.shrunk(w))
            if not exact:
                rep.advisory.append({"x": x, "note": "symbolic neighborhood truncated"})
                continue
            oracle_set = oracle_neighborhood(e, a_set, gw, w)
            sym_pts = set(set_points_within(sym_set, w)) if inst.space.is_lattice else {
                p for p in inst.space.labels if set_membership(sym_set, p)
            }
            if sym_pts != oracle_set:
                rep.mismatches.append(
                    {"x": x, "entourage": type(e).__name__,
                     "only_symbolic": sorted(sym_pts - oracle_set)[:3],
                     "only_oracle": sorted(oracle_set - sym_pts)[:3]}
                )
    return rep


def _check_compose(inst, window, budget) -> CrossCheckReport:
    rep = CrossCheckReport("compose", inst.name, window)
    gw = _needed_gw(inst, min(window, 8))
    sets = _sample_sets(inst, 2)
    e1 = OrbitPair(inst, sets[0])
    e2 = OrbitPair(inst, sets[-1])
    comp = Compose(e1, e2)
    for pair in _pair_sample(inst.space, inst.name, min(window, 8), count=40):
        sym = entourage_membership(comp, pair, budget)
        orc = _oracle_compose_orbit(inst, e1, e2, pair, gw, min(window, 8))
        if sym is None or orc is None:
            rep.advisory.append({"pair": pair})
            continue
        if bool(sym) != bool(orc):
            rep.mismatches.append({"pair": pair, "symbolic": sym, "oracle": orc})
    return rep


def _oracle_compose_orbit(inst, e1, e2, pair, gw, window):
    # single-box bounded sets only: the piecewise sweep ties the containment
    # piece to the overlap piece, which is exact exactly in that case
    if not inst.is_translation:
        labels = inst.space.labels
        return any(
            oracle_entourage_member(e1, (pair[0], y), gw, window) is True
            and oracle_entourage_member(e2, (y, pair[1]), gw, window) is True
            for y in labels
        )
    x, z = pair
    if x == z:
        return True
    b1x = set_boxes(e1.bounded_set)
    b2x = set_boxes(e2.bounded_set)
    if not b1x or not b2x:
        return (
            oracle_entourage_member(e1, pair, gw, window) is True
            or oracle_entourage_member(e2, pair, gw, window) is True
        )
    lgrid = np.array(list(bx.box_points(cube(gw, inst.group.rank))), dtype=float)
    m = np.array(inst.matrix, dtype=float)
    for p1 in b1x:
        for p2 in b2x:
            out = kern.orbit_compose_sweep(
                np.array([x], float), np.array([z], float), lgrid, lgrid, m,
                np.array(p1.lower, float), np.array(p1.upper, float),
                np.array(p2.lower, float), np.array(p2.upper, float),
            )
            if bool(out[0]):
                return True
    # degenerate clauses through the diagonal
    if oracle_entourage_member(e1, pair, gw, window) is True:
        return True
    if oracle_entourage_member(e2, pair, gw, window) is True:
        return True
    return False


def _check_bounded(inst, window, budget) -> CrossCheckReport:
    """Replay BoundedAt certificates: the set clipped to the window must sit
    inside the certified chain level."""
    from .bornology import is_bounded

    rep = CrossCheckReport("bounded", inst.name, window)
    if not inst.space.is_lattice:
        return rep
    for s in _sample_sets(inst):
        v = is_bounded(inst.space_bornology, s)
        if not v.bounded:
            if v.direction is not None and v.base_point is not None:
                for t in (0, 1, 3):
                    p = tuple(b + t * c for b, c in zip(v.base_point, v.direction))
                    if not set_membership(s, p):
                        rep.mismatches.append({"set": s, "escape_point": p})
            continue
        lvl = level_box(inst.space_bornology, v.index)
        for p in set_points_within(s, min(window, 10)):
            if not lvl.contains(p):
                rep.mismatches.append({"set": s, "index": v.index, "point": p})
                break
    return rep


def _check_closure(inst, window, budget) -> CrossCheckReport:
    rep = CrossCheckReport("closure", inst.name, window)
    if inst.space.is_lattice or len(inst.space.labels) > 4:
        return rep
    rng = random.Random(f"{inst.name}|closure")
    labels = inst.space.labels
    pairs = list(itertools.product(labels, repeat=2))
    base = []
    for _ in range(rng.randint(1, 3)):
        base.append(frozenset(rng.sample(pairs, rng.randint(1, min(4, len(pairs))))))
    closure = close_finite_base(inst.space, base)
    _, naive_antichain = naive_closure(inst.space, base)
    if tuple(closure.maximal) != naive_antichain:
        rep.mismatches.append(
            {"symbolic": closure.maximal, "naive": naive_antichain}
        )
    return rep


_CHECKS = {
    "transporter": _check_transporter,
    "entourage": _check_entourage,
    "neighborhood": _check_neighborhood,
    "compose": _check_compose,
    "bounded": _check_bounded,
    "closure": _check_closure,
}
