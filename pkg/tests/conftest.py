import pytest

from coarseact.boxes import GroundSpace
from coarseact.bornology import (
    AFF_NEG_INF,
    affine,
    chain_bornology,
    cubes_chain,
    maximal_bornology,
)
from coarseact.actions import ActionInstance, TranslationRule, lattice_group

Z = GroundSpace.lattice(1)
Z2 = GroundSpace.lattice(2)


def lower_quadrant_chain():
    """shape(m) = (-inf, m] x (-inf, m] on the plane."""
    return chain_bornology(Z2, [(AFF_NEG_INF, affine(1, 0))] * 2)


@pytest.fixture
def shift():
    cubes = cubes_chain(Z)
    return ActionInstance("shift", lattice_group(1, cubes), Z,
                          TranslationRule(((1,),)), cubes)


@pytest.fixture
def hyperbola():
    return ActionInstance(
        "hyperbola",
        lattice_group(1, cubes_chain(Z)),
        Z2,
        TranslationRule(((1,), (-1,))),
        lower_quadrant_chain(),
    )


@pytest.fixture
def trivial():
    cubes = cubes_chain(Z)
    return ActionInstance("trivial", lattice_group(1, cubes), Z,
                          TranslationRule(((0,),)), cubes)


@pytest.fixture
def trivial_maximal_group():
    return ActionInstance(
        "trivial_maximal_group",
        lattice_group(1, maximal_bornology(Z)),
        Z,
        TranslationRule(((0,),)),
        cubes_chain(Z),
    )


@pytest.fixture
def shift_maximal_space():
    return ActionInstance(
        "shift_maximal_space",
        lattice_group(1, cubes_chain(Z)),
        Z,
        TranslationRule(((1,),)),
        maximal_bornology(Z),
    )


@pytest.fixture
def first_coordinate_shift():
    return ActionInstance(
        "first_coordinate_shift",
        lattice_group(1, cubes_chain(Z)),
        Z2,
        TranslationRule(((1,), (0,))),
        cubes_chain(Z2),
    )
