import pytest

from vfout import fingrp
from vfout.fingrp import FiniteGroup, GroupMap, SubgroupHandle
from vfout.gog import Edge, GraphOfGroups


def cyclic(n: int, name: str = "") -> FiniteGroup:
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    inverse = tuple((-a) % n for a in range(n))
    return FiniteGroup(table, inverse, name=name or f"C{n}")


def klein4(name: str = "V4") -> FiniteGroup:
    table = tuple(tuple(a ^ b for b in range(4)) for a in range(4))
    return FiniteGroup(table, tuple(range(4)), name=name)


def sym3(name: str = "S3") -> FiniteGroup:
    g, _ = fingrp.group_from_permutations(3, [(1, 0, 2), (1, 2, 0)], name=name)
    return g


def inclusion(sub_elems, G: FiniteGroup, H: FiniteGroup) -> GroupMap:
    """Map the table group G onto the listed elements of H, in order."""
    return GroupMap(G, H, tuple(sub_elems))


@pytest.fixture
def groups():
    return {
        "1": fingrp.trivial_group(),
        "C2": cyclic(2),
        "C4": cyclic(4),
        "V4": klein4(),
        "S3": sym3(),
    }


def make_c2c2():
    """Two C2 vertices joined by a trivial edge: the infinite dihedral group."""
    one = fingrp.trivial_group()
    u1, u2 = cyclic(2, "C2a"), cyclic(2, "C2b")
    e = Edge(one, "u1", "u2", GroupMap(one, u1, (0,)), GroupMap(one, u2, (0,)))
    return GraphOfGroups({"u1": u1, "u2": u2}, {"E": e})


def make_rose2():
    one_v = fingrp.trivial_group()
    one_e = fingrp.trivial_group()
    mk = lambda: Edge(one_e, "v", "v", GroupMap(one_e, one_v, (0,)),
                      GroupMap(one_e, one_v, (0,)))
    return GraphOfGroups({"v": one_v}, {"s1": mk(), "s2": mk()})


def make_c2xz():
    c2v = cyclic(2, "C2v")
    c2e = cyclic(2, "C2e")
    ident = GroupMap(c2e, c2v, (0, 1))
    e = Edge(c2e, "v", "v", ident, ident)
    return GraphOfGroups({"v": c2v}, {"t": e})


def make_s3s3():
    s1, s2 = sym3("S3a"), sym3("S3b")
    c2 = cyclic(2, "C2e")
    # element 1 is the first transposition discovered by the closure
    e = Edge(c2, "u1", "u2", GroupMap(c2, s1, (0, 1)), GroupMap(c2, s2, (0, 1)))
    return GraphOfGroups({"u1": s1, "u2": s2}, {"E": e})


def make_zloop():
    one_v, one_e = fingrp.trivial_group(), fingrp.trivial_group()
    e = Edge(one_e, "v", "v", GroupMap(one_e, one_v, (0,)),
             GroupMap(one_e, one_v, (0,)))
    return GraphOfGroups({"v": one_v}, {"t": e})


def make_q():
    c4v = cyclic(4, "C4v")
    c4e = cyclic(4, "C4e")
    e = Edge(c4e, "v", "v", GroupMap(c4e, c4v, (0, 1, 2, 3)),
             GroupMap(c4e, c4v, (0, 3, 2, 1)))
    return GraphOfGroups({"v": c4v}, {"t": e})


def make_v4v4():
    w1, w2 = klein4("V4a"), klein4("V4b")
    c2 = cyclic(2, "C2e")
    e = Edge(c2, "u1", "u2", GroupMap(c2, w1, (0, 1)), GroupMap(c2, w2, (0, 1)))
    return GraphOfGroups({"u1": w1, "u2": w2}, {"f": e})


def make_big():
    w1, w2 = klein4("V4a"), klein4("V4b")
    c2 = cyclic(2, "C2e")
    cw = cyclic(2, "C2w")
    one = fingrp.trivial_group()
    f = Edge(c2, "u1", "u2", GroupMap(c2, w1, (0, 1)), GroupMap(c2, w2, (0, 1)))
    e = Edge(one, "w", "u1", GroupMap(one, cw, (0,)), GroupMap(one, w1, (0,)))
    return GraphOfGroups({"u1": w1, "u2": w2, "w": cw}, {"f": f, "E": e})
