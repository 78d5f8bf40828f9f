"""The symmetrized decomposition over a minimal edge class.

Given a reduced graph of finite groups, pick a minimal conjugacy class of
edge-group images, collapse every other edge, and reorganize the kept edges
around a single distinguished copy of the minimal group: loops recording
stable-letter conjugation, and branch edges into the collapsed components,
each carrying the normalizer of the distinguished copy inside its component.
The quotients of those normalizers present the free-product shape that
controls the outer automorphism analysis downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import fingrp, gog
from .config import DEFAULT_LIMITS, InvalidInput, Limits
from .fingrp import FiniteGroup, GroupMap, SubgroupHandle
from .gog import (CollapsedComponent, CollapsedDecomposition, GraphOfGroups,
                  NormalizerDecomposition, PathWord)


@dataclass(frozen=True)
class EdgeClassChoice:
    component_id: int
    g0: FiniteGroup
    anchor_vertex: str
    anchor_sub: SubgroupHandle
    kept: tuple[str, ...]


def minimal_edge_class(g: GraphOfGroups,
                       limits: Limits = DEFAULT_LIMITS) -> EdgeClassChoice:
    """Choose a minimal class of edge-group images.

    Class X is below class Y when some representative of X is a proper
    subgroup of a conjugate of a representative of Y at a common vertex; a
    minimal class has nothing below it.  Ties break by least order, then
    least canonical (vertex, elements) key.
    """
    if not g.edges:
        raise InvalidInput("graph has no edges")
    cg = gog.class_graph(g, limits)
    edge_comp: dict[str, int] = {}
    for eid, e in g.edges.items():
        node = cg.node_of(e.left, e.alpha.image_subgroup())
        edge_comp[eid] = cg.comp_of[node]
    comps = sorted(set(edge_comp.values()))

    def reps_at(comp: int) -> dict[str, list[tuple[int, ...]]]:
        by_vertex: dict[str, list[tuple[int, ...]]] = {}
        for n in cg.component_nodes(comp):
            by_vertex.setdefault(n.vertex, []).append(n.rep)
        return by_vertex

    def below(z: int, x: int) -> bool:
        zs, xs = reps_at(z), reps_at(x)
        for v in set(zs) & set(xs):
            G = g.vertices[v]
            for rz in zs[v]:
                for rx in xs[v]:
                    if len(rz) >= len(rx):
                        continue
                    zset = set(rz)
                    for gg in G.elements():
                        if zset < {G.conj(gg, h) for h in rx}:
                            return True
        return False

    minimal = [x for x in comps
               if not any(z != x and below(z, x) for z in comps)]

    def sort_key(comp: int):
        nodes = cg.component_nodes(comp)
        return (len(nodes[0].rep), min((n.vertex, n.rep) for n in nodes))

    chosen = min(minimal, key=sort_key)
    anchor = min(cg.component_nodes(chosen), key=lambda n: (n.vertex, n.rep))
    sub = SubgroupHandle(g.vertices[anchor.vertex], anchor.rep)
    g0, _ = sub.as_group(name="G0")
    kept = tuple(sorted(e for e, c in edge_comp.items() if c == chosen))
    return EdgeClassChoice(chosen, g0, anchor.vertex, sub, kept)


def collapse_to_bbar(g: GraphOfGroups, choice: EdgeClassChoice) -> CollapsedDecomposition:
    """Collapse everything outside the chosen class."""
    return gog.collapse(g, choice.kept)


@dataclass(frozen=True)
class LoopData:
    """A stable letter: a kept edge both of whose ends fold onto the base copy."""

    edge: str
    stable_word: PathWord          # closed at the base vertex, normalizes the copy
    twist: GroupMap                # induced automorphism of g0 (conjugation by the letter)


@dataclass(frozen=True)
class BranchData:
    """A branch edge from the base copy into a collapsed component."""

    index: int
    component: CollapsedComponent
    attach_vertex: str
    image: SubgroupHandle          # the copy inside the attach vertex group
    embed: GroupMap                # g0 -> vertex group, image = the copy
    conj_word: PathWord            # base vertex -> attach vertex, maps copy onto anchor
    norm: NormalizerDecomposition  # normalizer of the copy inside the component
    in_inner: bool                 # normalizer collapses back to the copy itself


@dataclass(frozen=True)
class CoreDecomposition:
    graph: GraphOfGroups
    collapsed: CollapsedDecomposition
    base_vertex: str
    g0: FiniteGroup
    g0_handle: SubgroupHandle      # the anchored copy inside the base vertex group
    g0_embed: tuple[int, ...]      # local index -> base vertex group element
    loops: tuple[LoopData, ...]
    branches: tuple[BranchData, ...]
    norm_global: NormalizerDecomposition   # normalizer of the copy in the whole group

    @property
    def inner_indices(self) -> tuple[int, ...]:
        return tuple(b.index for b in self.branches if b.in_inner)

    @property
    def outer_indices(self) -> tuple[int, ...]:
        return tuple(b.index for b in self.branches if not b.in_inner)

    def g0_word(self, local: int) -> PathWord:
        return self.graph.vertex_word(self.base_vertex, self.g0_embed[local])

    def g0_local(self, w: PathWord) -> int:
        """Read a closed word at the base back into a g0 index."""
        if w.edge_length != 0:
            raise InvalidInput("word is not elliptic at the base vertex")
        elem = w.elliptic_element()
        return self.g0_embed.index(elem)

    def conj_on_g0(self, w: PathWord) -> GroupMap:
        """The automorphism of g0 induced by conjugation with w."""
        images = []
        for a in range(self.g0.order):
            conj = w * self.g0_word(a) * w.inverse()
            images.append(self.g0_local(conj))
        m = GroupMap(self.g0, self.g0, tuple(images))
        assert m.is_homomorphism() and m.is_injective()
        return m


def _component_class_graphs(dec: CollapsedDecomposition, limits: Limits):
    return {c.index: gog.class_graph(c.subgraph, limits) for c in dec.components}


def symmetrize(dec: CollapsedDecomposition,
               choice: EdgeClassChoice,
               limits: Limits = DEFAULT_LIMITS) -> CoreDecomposition:
    """Fold the kept edges around one distinguished copy of the minimal group.

    Ends of kept edges are grouped by (component, component-conjugacy class);
    a breadth-first scan over that meta-graph keeps one representative end
    per group (a branch) and turns every other kept edge into a loop whose
    stable letter is materialized as an explicit path word.
    """
    g = dec.parent
    cg = gog.class_graph(g, limits)
    v0, k0 = choice.anchor_vertex, choice.anchor_sub
    g0, g0_embed = choice.anchor_sub.as_group(name="G0")

    # the degenerate single-copy case: one vertex whose group *is* the copy
    only = dec.components[0]
    if (len(dec.components) == 1 and len(only.vertex_ids) == 1
            and not only.edge_ids
            and g.vertices[only.vertex_ids[0]].order == g0.order):
        loops = []
        for eid in dec.kept:
            t = g.edge_word(eid, 1)
            images = []
            for a in range(g0.order):
                conj = t * g.vertex_word(v0, g0_embed[a]) * t.inverse()
                images.append(g0_embed.index(conj.elliptic_element()))
            twist = GroupMap(g0, g0, tuple(images))
            assert twist.is_homomorphism() and twist.is_injective()
            loops.append(LoopData(eid, t, twist))
        norm_global = gog.normalizer_decomposition(g, (v0, k0), limits)
        return CoreDecomposition(g, dec, v0, g0, k0, g0_embed,
                                 tuple(loops), (), norm_global)

    comp_cgs = _component_class_graphs(dec, limits)

    def end_data(eid: str, side: int):
        e = g.edges[eid]
        if side > 0:
            x, img = e.left, e.alpha.image_subgroup()
        else:
            x, img = e.right, e.omega.image_subgroup()
        ci = dec.comp_of_vertex[x]
        ccg = comp_cgs[ci]
        theta = ccg.comp_of[ccg.node_of(x, img)]
        return x, img, (ci, theta)

    # meta graph: nodes (component, class), edges = kept edges
    meta_of_end = {}
    for eid in dec.kept:
        for side in (1, -1):
            x, img, key = end_data(eid, side)
            meta_of_end[(eid, side)] = (key, x, img)

    e_star = dec.kept[0]
    root_key, _, _ = meta_of_end[(e_star, 1)]
    rep_end: dict[tuple[int, int], tuple[str, int]] = {root_key: (e_star, 1)}
    visited = {root_key}
    tree_edges: set[str] = set()
    frontier = [root_key]
    while frontier:
        cur = frontier.pop(0)
        for eid in dec.kept:
            if eid in tree_edges:
                continue
            ka = meta_of_end[(eid, 1)][0]
            ko = meta_of_end[(eid, -1)][0]
            if ka == cur and ko not in visited:
                visited.add(ko)
                rep_end[ko] = (eid, -1)
                tree_edges.add(eid)
                frontier.append(ko)
            elif ko == cur and ka not in visited:
                visited.add(ka)
                rep_end[ka] = (eid, 1)
                tree_edges.add(eid)
                frontier.append(ka)
    assert len(visited) == len({k for k, _, _ in meta_of_end.values()}), \
        "kept-edge meta graph is not connected"

    def lam(eid: str, side: int) -> PathWord:
        """Base vertex -> end vertex, carrying the end copy onto the anchor."""
        _, x, img = meta_of_end[(eid, side)]
        w = cg.conjugator((x, img), (v0, k0))
        assert w is not None, "kept edge image is not in the chosen class"
        assert gog.conjugate_subgroup_set(w, img.elements) == k0.elements
        return w

    branches = []
    for idx, key in enumerate(sorted(visited)):
        eid, side = rep_end[key]
        _, x, img = meta_of_end[(eid, side)]
        comp = dec.components[dec.comp_of_vertex[x]]
        conj = lam(eid, side)
        images = []
        for a in range(g0.order):
            w = conj.inverse() * g.vertex_word(v0, g0_embed[a]) * conj
            images.append(w.elliptic_element())
        embed = GroupMap(g0, g.vertices[x], tuple(images))
        assert embed.is_homomorphism() and embed.is_injective()
        assert embed.image_set() == img.elements
        norm = gog.normalizer_decomposition(comp.subgraph, (x, img), limits)
        in_inner = norm.is_single_cell() and norm.nodes[0].group.order == g0.order
        branches.append(BranchData(idx, comp, x, img, embed, conj, norm, in_inner))

    loops = []
    for eid in dec.kept:
        if eid in tree_edges:
            continue
        la = lam(eid, 1)
        lo = lam(eid, -1)
        t = g.edge_word(eid, 1)
        s_w = la * t * lo.inverse()
        assert gog.conjugate_subgroup_set(s_w, k0.elements) == k0.elements
        images = []
        for a in range(g0.order):
            conj = s_w * g.vertex_word(v0, g0_embed[a]) * s_w.inverse()
            images.append(g0_embed.index(conj.elliptic_element()))
        twist = GroupMap(g0, g0, tuple(images))
        assert twist.is_homomorphism() and twist.is_injective()
        loops.append(LoopData(eid, s_w, twist))

    norm_global = gog.normalizer_decomposition(g, (v0, k0), limits)
    return CoreDecomposition(g, dec, v0, g0, k0, g0_embed,
                             tuple(loops), tuple(branches), norm_global)


def build_core(g: GraphOfGroups, limits: Limits = DEFAULT_LIMITS) -> CoreDecomposition:
    """Convenience pipeline: minimal class, collapse, symmetrize."""
    choice = minimal_edge_class(g, limits)
    return symmetrize(collapse_to_bbar(g, choice), choice, limits)


# -- the free product shape ------------------------------------------------------

@dataclass(frozen=True)
class FactorData:
    branch: BranchData
    graph: GraphOfGroups                   # quotient of the normalizer presentation
    vertex_proj: dict[str, GroupMap]       # node group -> quotient group
    edge_proj: dict[str, GroupMap]
    vertex_copy: dict[str, SubgroupHandle] # the distinguished copy per node group
    ends: gog.EndsClass
    center: gog.CenterStructure

    def lift_word(self, w: PathWord) -> PathWord:
        """A set-theoretic lift of a quotient word into the normalizer graph."""
        sections_v = {
            vid: [proj.images.index(q) for q in range(proj.target.order)]
            for vid, proj in self.vertex_proj.items()
        }
        src = self.branch.norm.graph
        items = list(w.items)
        v = w.start
        out = [sections_v[v][items[0]]]
        for i in range(1, len(items), 2):
            eid, d = items[i]
            out.append((eid, d))
            v = self.graph.o_end(eid, d)
            out.append(sections_v[v][items[i + 1]])
        return src.word(w.start, out)


@dataclass(frozen=True)
class FreeProductShape:
    core: CoreDecomposition
    factors: tuple[FactorData, ...]
    rank: int


def free_product_shape(core: CoreDecomposition,
                       limits: Limits = DEFAULT_LIMITS) -> FreeProductShape:
    """Quotient each outer normalizer presentation by its distinguished copy.

    The copy is normal in every vertex and edge group of the normalizer
    presentation by construction; the quotient is again a graph of finite
    groups, one factor per outer branch, plus a free rank equal to the
    number of loops.
    """
    factors = []
    for b in core.branches:
        if b.in_inner:
            continue
        nd = b.norm
        vproj: dict[str, GroupMap] = {}
        vcopy: dict[str, SubgroupHandle] = {}
        new_vs: dict[str, FiniteGroup] = {}
        for node in nd.nodes:
            local_copy = tuple(sorted(node.embed.index(e) for e in node.node.rep))
            sub = SubgroupHandle(node.group, local_copy)
            if not sub.is_normal():
                raise InvalidInput(
                    "distinguished copy fails to be normal in a vertex group "
                    "(upstream construction bug)")
            q, proj = fingrp.quotient(node.group, sub, name=node.group.name + "_q")
            new_vs[node.vid] = q
            vproj[node.vid] = proj
            vcopy[node.vid] = sub
        eproj: dict[str, GroupMap] = {}
        new_es: dict[str, gog.Edge] = {}
        for arc in nd.arcs:
            local_copy = tuple(sorted(arc.embed.index(e) for e in arc.arc.sub))
            sub = SubgroupHandle(arc.group, local_copy)
            q, proj = fingrp.quotient(arc.group, sub, name=arc.group.name + "_q")
            eproj[arc.eid] = proj
            old = nd.graph.edges[arc.eid]

            def induced(bmap: GroupMap, vid: str) -> GroupMap:
                images = []
                for qq in range(q.order):
                    x = proj.images.index(qq)
                    images.append(vproj[vid](bmap(x)))
                return GroupMap(q, new_vs[vid], tuple(images))

            new_es[arc.eid] = gog.Edge(q, old.left, old.right,
                                       induced(old.alpha, old.left),
                                       induced(old.omega, old.right))
        qgraph = GraphOfGroups(new_vs, new_es)
        ends = gog.classify_ends(qgraph, limits)
        cent = gog.center_of_pi1(qgraph, limits)
        factors.append(FactorData(b, qgraph, vproj, eproj, vcopy, ends, cent))
    return FreeProductShape(core, tuple(factors), len(core.loops))
