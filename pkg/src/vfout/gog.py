"""Graphs of finite groups and exact arithmetic in their fundamental groups.

A graph of groups is stored as a connected multigraph with a finite group on
every vertex and edge and an injective map from each edge group into both
endpoint groups.  Elements of the fundamental group are based path words in
canonical normal form; all structural computations (reduction, collapse,
conjugacy classes of elliptic subgroups, ends, centers, normalizers of
finite subgroups) are phrased as finite computations on the quotient graph,
never on a tree.

Conventions
-----------
* A geometric edge ``e`` is stored once, with a ``left`` and ``right``
  endpoint; the oriented edge ``(e, +1)`` runs left to right and ``(e, -1)``
  right to left, so the involution with ``e != e^-1`` holds structurally.
* For an oriented edge the *alpha* side is its starting vertex.  The edge
  relation reads ``t * omega(c) * t^-1 = alpha(c)`` where ``t`` is the
  edge letter.
* Normal form: pinch-free, and every vertex element except the last is the
  designated representative (least element index) of its left coset of the
  next edge's alpha image.  The residue accumulates in the final position.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import fingrp
from .config import DEFAULT_LIMITS, BoundExceeded, InvalidInput, Limits
from .fingrp import FiniteGroup, GroupMap, SubgroupHandle


@dataclass(frozen=True)
class Edge:
    group: FiniteGroup
    left: str
    right: str
    alpha: GroupMap   # group -> vertex group at `left`
    omega: GroupMap   # group -> vertex group at `right`


class GraphOfGroups:
    """Immutable-by-convention graph of finite groups with memoized tables."""

    def __init__(self, vertices: dict[str, FiniteGroup], edges: dict[str, Edge]):
        self.vertices = dict(sorted(vertices.items()))
        self.edges = dict(sorted(edges.items()))
        for eid, e in self.edges.items():
            if e.left not in self.vertices or e.right not in self.vertices:
                raise InvalidInput(f"edge {eid} references a missing vertex")
        self._coset_reps: dict[tuple[str, int], dict[int, int]] = {}
        self._memo: dict = {}

    # -- oriented edge helpers ------------------------------------------------

    def o_start(self, eid: str, d: int) -> str:
        e = self.edges[eid]
        return e.left if d > 0 else e.right

    def o_end(self, eid: str, d: int) -> str:
        e = self.edges[eid]
        return e.right if d > 0 else e.left

    def o_alpha(self, eid: str, d: int) -> GroupMap:
        e = self.edges[eid]
        return e.alpha if d > 0 else e.omega

    def o_omega(self, eid: str, d: int) -> GroupMap:
        e = self.edges[eid]
        return e.omega if d > 0 else e.alpha

    def ends_at(self, v: str) -> list[tuple[str, int]]:
        """Oriented edges starting at v (loops give both orientations)."""
        out = []
        for eid, e in self.edges.items():
            if e.left == v:
                out.append((eid, 1))
            if e.right == v:
                out.append((eid, -1))
        return out

    def _reps(self, eid: str, d: int) -> dict[int, int]:
        """Least representative of each left coset x*Im(alpha) at o_start."""
        key = (eid, d)
        if key not in self._coset_reps:
            G = self.vertices[self.o_start(eid, d)]
            image = set(self.o_alpha(eid, d).image_set())
            rep: dict[int, int] = {}
            for x in G.elements():
                if x in rep:
                    continue
                coset = sorted(G.mul(x, h) for h in image)
                r = coset[0]
                for c in coset:
                    rep[c] = r
            self._coset_reps[key] = rep
        return self._coset_reps[key]

    # -- word construction ----------------------------------------------------

    def word(self, start: str, items) -> "PathWord":
        return PathWord(self, start, self._normalize(start, list(items)))

    def vertex_word(self, v: str, elem: int = 0) -> "PathWord":
        if elem >= self.vertices[v].order:
            raise InvalidInput(f"element {elem} out of range at vertex {v}")
        return PathWord(self, v, (elem,))

    def edge_word(self, eid: str, d: int = 1) -> "PathWord":
        return self.word(self.o_start(eid, d), (0, (eid, d), 0))

    def _check_shape(self, start: str, items: list) -> None:
        if len(items) % 2 == 0 or not items:
            raise InvalidInput("path word must alternate elements and edges")
        v = start
        for i, it in enumerate(items):
            if i % 2 == 0:
                if not isinstance(it, int) or not (0 <= it < self.vertices[v].order):
                    raise InvalidInput(f"bad vertex element {it!r} at {v}")
            else:
                eid, d = it
                if self.o_start(eid, d) != v:
                    raise InvalidInput(
                        f"endpoint mismatch: edge {eid} does not start at {v}")
                v = self.o_end(eid, d)

    def _normalize(self, start: str, items: list) -> tuple:
        """Canonical normal form; see the module docstring for the convention."""
        self._check_shape(start, items)

        def vgroup_at(pos: int) -> FiniteGroup:
            v = start
            for i in range(1, pos, 2):
                eid, d = items[i]
                v = self.o_end(eid, d)
            return self.vertices[v]

        # pinch elimination to fixpoint
        k = 0
        while 2 * k + 3 < len(items):
            p = 2 * k + 1
            e1, d1 = items[p]
            e2, d2 = items[p + 2]
            if e2 == e1 and d2 == -d1:
                om = self.o_omega(e1, d1)
                mid = items[p + 1]
                if mid in set(om.image_set()):
                    c = om.preimage(mid)
                    push = self.o_alpha(e1, d1)(c)
                    G = vgroup_at(p - 1)
                    merged = G.mul(G.mul(items[p - 1], push), items[p + 3])
                    items[p - 1:p + 4] = [merged]
                    k = max(k - 1, 0)
                    continue
            k += 1

        # left-to-right coset pass
        v = start
        for k in range((len(items) - 1) // 2):
            p = 2 * k
            eid, d = items[p + 1]
            G = self.vertices[v]
            rep = self._reps(eid, d)[items[p]]
            if rep != items[p]:
                h = G.mul(G.inv(rep), items[p])
                c = self.o_alpha(eid, d).preimage(h)
                push = self.o_omega(eid, d)(c)
                items[p] = rep
                w = self.o_end(eid, d)
                items[p + 2] = self.vertices[w].mul(push, items[p + 2])
            v = self.o_end(eid, d)
        return tuple(items)

    # -- structure ------------------------------------------------------------

    def connected(self) -> bool:
        if not self.vertices:
            return False
        seen = {next(iter(self.vertices))}
        frontier = list(seen)
        while frontier:
            v = frontier.pop()
            for eid, d in self.ends_at(v):
                w = self.o_end(eid, d)
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        return len(seen) == len(self.vertices)

    def spanning_tree(self, base: str) -> tuple[dict[str, "PathWord"], frozenset[str]]:
        """BFS tree: route words from base to every vertex, and the tree edges."""
        key = ("tree", base)
        if key not in self._memo:
            routes = {base: self.vertex_word(base)}
            tree: set[str] = set()
            frontier = [base]
            while frontier:
                v = frontier.pop(0)
                for eid, d in sorted(self.ends_at(v)):
                    w = self.o_end(eid, d)
                    if w not in routes:
                        routes[w] = routes[v] * self.edge_word(eid, d)
                        tree.add(eid)
                        frontier.append(w)
            if len(routes) != len(self.vertices):
                raise InvalidInput("graph is not connected")
            self._memo[key] = (routes, frozenset(tree))
        return self._memo[key]

    def pi1_generators(self, base: str) -> list["Gen"]:
        """Generators of the fundamental group at ``base``.

        One generator per vertex-group generator (routed through the spanning
        tree) and one per non-tree edge.  Tree edge letters are trivial in
        this presentation and carry no generator.
        """
        key = ("gens", base)
        if key not in self._memo:
            routes, tree = self.spanning_tree(base)
            gens: list[Gen] = []
            for v in self.vertices:
                for x in fingrp.generating_set(self.vertices[v]):
                    w = routes[v] * self.vertex_word(v, x) * routes[v].inverse()
                    gens.append(Gen("v", v, x, w))
            for eid in self.edges:
                if eid not in tree:
                    e = self.edges[eid]
                    w = routes[e.left] * self.edge_word(eid, 1) * routes[e.right].inverse()
                    gens.append(Gen("e", eid, None, w))
            self._memo[key] = gens
        return self._memo[key]

    def based_vertex_word(self, base: str, v: str, elem: int) -> "PathWord":
        routes, _ = self.spanning_tree(base)
        return routes[v] * self.vertex_word(v, elem) * routes[v].inverse()

    def based_edge_word(self, base: str, eid: str, d: int = 1) -> "PathWord":
        routes, _ = self.spanning_tree(base)
        return (routes[self.o_start(eid, d)] * self.edge_word(eid, d)
                * routes[self.o_end(eid, d)].inverse())

    def subgraph(self, vertex_ids, edge_ids) -> "GraphOfGroups":
        vs = {v: self.vertices[v] for v in vertex_ids}
        es = {e: self.edges[e] for e in edge_ids}
        return GraphOfGroups(vs, es)

    def adopt(self, w: "PathWord") -> "PathWord":
        """Re-home a word from a subgraph sharing vertex/edge ids."""
        return self.word(w.start, w.items)


@dataclass(frozen=True)
class Gen:
    kind: str            # "v" or "e"
    place: str           # vertex id or edge id
    elem: int | None
    word: "PathWord"


@dataclass(frozen=True, eq=False)
class PathWord:
    """A based path in canonical normal form."""

    graph: GraphOfGroups
    start: str
    items: tuple

    def __eq__(self, other) -> bool:
        return (isinstance(other, PathWord) and self.graph is other.graph
                and self.start == other.start and self.items == other.items)

    def __hash__(self) -> int:
        return hash((id(self.graph), self.start, self.items))

    @property
    def end(self) -> str:
        v = self.start
        for i in range(1, len(self.items), 2):
            eid, d = self.items[i]
            v = self.graph.o_end(eid, d)
        return v

    @property
    def edge_length(self) -> int:
        return (len(self.items) - 1) // 2

    def __mul__(self, other: "PathWord") -> "PathWord":
        if self.graph is not other.graph:
            raise InvalidInput("cannot multiply words from different graphs")
        if self.end != other.start:
            raise InvalidInput(
                f"base mismatch: word ends at {self.end}, next starts at {other.start}")
        g = self.graph.vertices[self.end]
        merged = g.mul(self.items[-1], other.items[0])
        return self.graph.word(
            self.start, self.items[:-1] + (merged,) + other.items[1:])

    def inverse(self) -> "PathWord":
        rev: list = []
        v = self.start
        verts = [v]
        for i in range(1, len(self.items), 2):
            eid, d = self.items[i]
            v = self.graph.o_end(eid, d)
            verts.append(v)
        n = self.edge_length
        for k in range(n, -1, -1):
            G = self.graph.vertices[verts[k]]
            rev.append(G.inv(self.items[2 * k]))
            if k > 0:
                eid, d = self.items[2 * k - 1]
                rev.append((eid, -d))
        return self.graph.word(self.end, rev)

    def is_identity(self) -> bool:
        return len(self.items) == 1 and self.items[0] == 0

    def conjugate(self, by: "PathWord") -> "PathWord":
        """by * self * by^-1."""
        return by * self * by.inverse()

    def cyclically_reduce(self) -> "PathWord":
        """A cyclically reduced conjugate (closed words only)."""
        w = self
        if w.start != w.end:
            raise InvalidInput("cyclic reduction needs a closed word")
        while w.edge_length >= 1:
            e1 = w.items[1]
            em = w.items[-2]
            if em[0] == e1[0] and em[1] == -e1[1]:
                g = w.graph.vertices[w.start]
                wrap = g.mul(w.items[-1], w.items[0])
                om = w.graph.o_omega(em[0], em[1])
                if wrap in set(om.image_set()):
                    prefix = w.graph.word(w.start, (w.items[0], e1, 0))
                    w = prefix.inverse() * w * prefix
                    continue
            break
        return w

    def translation_length(self) -> int:
        return self.cyclically_reduce().edge_length

    def is_infinite_order(self) -> bool:
        """True iff the cyclic reduction keeps at least one edge letter."""
        return self.translation_length() >= 1

    def elliptic_element(self) -> int:
        """The vertex element of a length-0 word."""
        if self.edge_length != 0:
            raise InvalidInput("word is not elliptic at its base")
        return self.items[0]

    def __repr__(self) -> str:
        bits = []
        for i, it in enumerate(self.items):
            bits.append(str(it) if i % 2 == 0 else
                        (it[0] if it[1] > 0 else it[0] + "~"))
        return f"<path @{self.start}: {' '.join(bits)}>"


def multiply(u: PathWord, v: PathWord) -> PathWord:
    return u * v


def invert(u: PathWord) -> PathWord:
    return u.inverse()


def is_identity(u: PathWord) -> bool:
    return u.is_identity()


def is_infinite_order(u: PathWord) -> bool:
    return u.is_infinite_order()


# -- validation ----------------------------------------------------------------

def validate(g: GraphOfGroups) -> list[str]:
    """Check all structural invariants; returns diagnostics (empty = valid)."""
    problems: list[str] = []
    if not g.vertices:
        return ["no vertices"]
    for v, G in g.vertices.items():
        if G.order <= 128:
            for p in G.check():
                problems.append(f"vertex {v}: {p}")
    for eid, e in g.edges.items():
        for side, m, target in (("alpha", e.alpha, e.left), ("omega", e.omega, e.right)):
            if m.source is not e.group and m.source != e.group:
                problems.append(f"edge {eid}: {side} map source is not the edge group")
                continue
            if m.target is not g.vertices[target] and m.target != g.vertices[target]:
                problems.append(f"edge {eid}: {side} map target mismatch")
                continue
            if not m.is_homomorphism():
                problems.append(f"edge {eid}: {side} map is not a homomorphism")
            if not m.is_injective():
                problems.append(f"edge {eid}: {side} map is not injective")
    if not g.connected():
        problems.append("not connected")
    return problems


# -- word search ----------------------------------------------------------------

def bounded_words(g: GraphOfGroups, base: str, max_len: int,
                  limits: Limits = DEFAULT_LIMITS):
    """Yield elements of the fundamental group in breadth-first order.

    Products of generators and their inverses, deduplicated by normal form,
    up to ``max_len`` factors.  Deterministic.
    """
    gens = [gen.word for gen in g.pi1_generators(base)]
    gens = gens + [w.inverse() for w in gens]
    seen = {g.vertex_word(base)}
    frontier = [g.vertex_word(base)]
    yield frontier[0]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for s in gens:
                p = w * s
                if p not in seen:
                    if len(seen) >= limits.max_enumeration:
                        raise BoundExceeded("word search exceeded enumeration bound")
                    seen.add(p)
                    nxt.append(p)
                    yield p
        if not nxt:
            return
        frontier = nxt


# -- reduction -------------------------------------------------------------------

@dataclass(frozen=True)
class ReduceStep:
    edge: str
    dead: str
    live: str
    iso: GroupMap            # vertex group at dead -> vertex group at live
    dead_dir: int            # orientation of `edge` running dead -> live
    before: GraphOfGroups
    after: GraphOfGroups
    moved_left: frozenset[str]    # edges whose left end moved off `dead`
    moved_right: frozenset[str]


class ReduceTrace:
    """Word translations along a chain of collapse moves."""

    def __init__(self, original: GraphOfGroups, steps: list[ReduceStep]):
        self.original = original
        self.steps = steps
        self.graph = steps[-1].after if steps else original

    def vertex_dest(self, v: str) -> str:
        for st in self.steps:
            if v == st.dead:
                v = st.live
        return v

    def to_reduced(self, w: PathWord) -> PathWord:
        for st in self.steps:
            w = _forward_word(st, w)
        return w

    def to_original(self, w: PathWord) -> PathWord:
        for st in reversed(self.steps):
            w = _backward_word(st, w)
        return w


def _forward_word(st: ReduceStep, w: PathWord) -> PathWord:
    g_old, g_new = st.before, st.after

    def map_elem(v: str, x: int) -> tuple[str, int]:
        return (st.live, st.iso(x)) if v == st.dead else (v, x)

    v = w.start
    new_start, cur = map_elem(v, w.items[0])
    out: list = [cur]
    for i in range(1, len(w.items), 2):
        eid, d = w.items[i]
        v = g_old.o_end(eid, d)
        _, x = map_elem(v, w.items[i + 1])
        if eid == st.edge:
            G = g_new.vertices[st.live]
            out[-1] = G.mul(out[-1], x)
        else:
            out.append((eid, d))
            out.append(x)
    return g_new.word(new_start, out)


def _backward_word(st: ReduceStep, w: PathWord) -> PathWord:
    g_old = st.before
    conn_in = (st.edge, -st.dead_dir)    # live -> dead
    conn_out = (st.edge, st.dead_dir)    # dead -> live
    out: list = [w.items[0]]
    for i in range(1, len(w.items), 2):
        eid, d = w.items[i]
        if eid in st.moved_left and d > 0 or eid in st.moved_right and d < 0:
            # starts at dead in the old graph
            out.extend([conn_in, 0, (eid, d)])
        else:
            out.append((eid, d))
        if eid in st.moved_right and d > 0 or eid in st.moved_left and d < 0:
            # ends at dead in the old graph
            out.extend([0, conn_out, w.items[i + 1]])
        else:
            out.append(w.items[i + 1])
    return g_old.word(w.start, out)


def _collapsible_edge(g: GraphOfGroups) -> tuple[str, int] | None:
    for eid, e in g.edges.items():
        if e.left == e.right:
            continue
        if e.alpha.is_injective() and len(e.alpha.image_set()) == g.vertices[e.left].order:
            return eid, 1
        if e.omega.is_injective() and len(e.omega.image_set()) == g.vertices[e.right].order:
            return eid, -1
    return None


def reduce(g: GraphOfGroups) -> tuple[GraphOfGroups, ReduceTrace]:
    """Collapse non-loop edges with surjective boundary maps until reduced.

    The fundamental group is unchanged; the trace converts words both ways.
    """
    steps: list[ReduceStep] = []
    cur = g
    while True:
        hit = _collapsible_edge(cur)
        if hit is None:
            break
        eid, d = hit
        e = cur.edges[eid]
        dead = cur.o_start(eid, d)
        live = cur.o_end(eid, d)
        amap = cur.o_alpha(eid, d)
        omap = cur.o_omega(eid, d)
        inv_images = [0] * e.group.order
        for c, img in enumerate(amap.images):
            inv_images[img] = c
        iso = GroupMap(cur.vertices[dead], cur.vertices[live],
                       tuple(omap(inv_images[x]) for x in range(e.group.order)))
        new_vs = {v: G for v, G in cur.vertices.items() if v != dead}
        new_es: dict[str, Edge] = {}
        moved_left, moved_right = set(), set()
        for fid, f in cur.edges.items():
            if fid == eid:
                continue
            alpha, omega, left, right = f.alpha, f.omega, f.left, f.right
            if left == dead:
                alpha, left = iso.compose(alpha), live
                moved_left.add(fid)
            if right == dead:
                omega, right = iso.compose(omega), live
                moved_right.add(fid)
            new_es[fid] = Edge(f.group, left, right, alpha, omega)
        after = GraphOfGroups(new_vs, new_es)
        steps.append(ReduceStep(eid, dead, live, iso, d, cur, after,
                                frozenset(moved_left), frozenset(moved_right)))
        cur = after
    return cur, ReduceTrace(g, steps)


# -- collapse --------------------------------------------------------------------

@dataclass(frozen=True)
class CollapsedComponent:
    index: int
    vertex_ids: tuple[str, ...]
    edge_ids: tuple[str, ...]
    subgraph: GraphOfGroups


@dataclass(frozen=True)
class CollapsedDecomposition:
    parent: GraphOfGroups
    kept: tuple[str, ...]
    components: tuple[CollapsedComponent, ...]
    comp_of_vertex: dict[str, int]


def collapse(g: GraphOfGroups, kept) -> CollapsedDecomposition:
    """Partition into kept edges and the connected subgraphs they join."""
    kept = tuple(sorted(kept))
    for eid in kept:
        if eid not in g.edges:
            raise InvalidInput(f"unknown edge {eid}")
    keptset = set(kept)
    comp_of: dict[str, int] = {}
    comps: list[CollapsedComponent] = []
    for v in g.vertices:
        if v in comp_of:
            continue
        idx = len(comps)
        vs = {v}
        frontier = [v]
        while frontier:
            u = frontier.pop(0)
            comp_of[u] = idx
            for eid, d in g.ends_at(u):
                if eid in keptset:
                    continue
                w = g.o_end(eid, d)
                if w not in vs:
                    vs.add(w)
                    frontier.append(w)
        es = tuple(sorted(eid for eid, e in g.edges.items()
                          if eid not in keptset and e.left in vs))
        vst = tuple(sorted(vs))
        comps.append(CollapsedComponent(idx, vst, es, g.subgraph(vst, es)))
    return CollapsedDecomposition(g, kept, tuple(comps), comp_of)


# -- the elliptic-subgroup class graph --------------------------------------------

@dataclass(frozen=True)
class ClassNode:
    vertex: str
    rep: tuple[int, ...]     # canonical subgroup elements in the vertex group


@dataclass(frozen=True)
class ClassArc:
    edge: str
    sub: tuple[int, ...]     # canonical subgroup of the edge group
    alpha_node: ClassNode
    omega_node: ClassNode
    g_alpha: int             # conjugates alpha-image onto alpha node rep
    g_omega: int


class ClassGraph:
    """Conjugacy classes of elliptic finite subgroups, as a labelled graph.

    Nodes are (vertex, vertex-conjugacy class); for every edge and every
    class of subgroup of its edge group there is one arc joining the classes
    of the two boundary images.  Connected components model conjugacy in the
    fundamental group: two elliptic subgroups sitting in vertex groups are
    conjugate exactly when their nodes are connected.
    """

    def __init__(self, g: GraphOfGroups, limits: Limits = DEFAULT_LIMITS):
        self.graph = g
        self.limits = limits
        self.nodes: list[ClassNode] = []
        self._classes: dict[str, list[tuple[int, ...]]] = {}
        for v, G in g.vertices.items():
            reps = [cl[0].elements for cl in fingrp.subgroup_classes(G, limits=limits)]
            self._classes[v] = reps
            self.nodes.extend(ClassNode(v, r) for r in reps)
        self.arcs: list[ClassArc] = []
        for eid, e in g.edges.items():
            for cl in fingrp.subgroup_classes(e.group, limits=limits):
                c = cl[0]
                na, ga = self._locate(e.left, e.alpha.restrict(c))
                no, go = self._locate(e.right, e.omega.restrict(c))
                self.arcs.append(ClassArc(eid, c.elements, na, no, ga, go))
        self.comp_of: dict[ClassNode, int] = {}
        self.components: list[tuple[ClassNode, ...]] = []
        self._split_components()
        self._anchor_cache: dict = {}

    def _locate(self, vertex: str, sub: SubgroupHandle) -> tuple[ClassNode, int]:
        canon, gw = fingrp.canonical_conjugate(self.graph.vertices[vertex], sub)
        return ClassNode(vertex, canon.elements), gw

    def node_of(self, vertex: str, sub: SubgroupHandle) -> ClassNode:
        return self._locate(vertex, sub)[0]

    def _split_components(self) -> None:
        adj: dict[ClassNode, list[ClassNode]] = {n: [] for n in self.nodes}
        for a in self.arcs:
            adj[a.alpha_node].append(a.omega_node)
            adj[a.omega_node].append(a.alpha_node)
        seen: set[ClassNode] = set()
        for n in sorted(self.nodes, key=lambda n: (n.vertex, n.rep)):
            if n in seen:
                continue
            comp = []
            frontier = [n]
            seen.add(n)
            while frontier:
                m = frontier.pop(0)
                comp.append(m)
                for w in adj[m]:
                    if w not in seen:
                        seen.add(w)
                        frontier.append(w)
            self.components.append(tuple(sorted(comp, key=lambda n: (n.vertex, n.rep))))
            for m in comp:
                self.comp_of[m] = len(self.components) - 1

    def component_nodes(self, idx: int) -> tuple[ClassNode, ...]:
        return self.components[idx]

    def component_arcs(self, idx: int) -> list[ClassArc]:
        return [a for a in self.arcs if self.comp_of[a.alpha_node] == idx]

    # -- explicit conjugators -------------------------------------------------

    def _anchor_words(self, idx: int) -> dict[ClassNode, PathWord]:
        """For each node n a word from n.vertex to the component anchor with
        w * anchor_set * w^-1 = node_rep_set."""
        key = idx
        if key not in self._anchor_cache:
            g = self.graph
            nodes = self.components[idx]
            anchor = nodes[0]
            words = {anchor: g.vertex_word(anchor.vertex)}
            pending = [anchor]
            arcs = sorted(self.component_arcs(idx), key=lambda a: (a.edge, a.sub))
            while pending:
                n = pending.pop(0)
                for a in arcs:
                    t = g.edge_word(a.edge, 1)
                    wa = g.vertex_word(g.edges[a.edge].left, a.g_alpha)
                    wo = g.vertex_word(g.edges[a.edge].right, a.g_omega)
                    if a.alpha_node == n and a.omega_node not in words:
                        words[a.omega_node] = wo * t.inverse() * wa.inverse() * words[n]
                        pending.append(a.omega_node)
                    if a.omega_node == n and a.alpha_node not in words:
                        words[a.alpha_node] = wa * t * wo.inverse() * words[n]
                        pending.append(a.alpha_node)
            self._anchor_cache[key] = words
        return self._anchor_cache[key]

    def conjugator(self, src: tuple[str, SubgroupHandle],
                   dst: tuple[str, SubgroupHandle]) -> PathWord | None:
        """A word gamma from dst-vertex to src-vertex with
        gamma * src_set * gamma^-1 = dst_set, or None if not conjugate."""
        g = self.graph
        (v1, s1), (v2, s2) = src, dst
        n1, g1 = self._locate(v1, s1)
        n2, g2 = self._locate(v2, s2)
        if self.comp_of[n1] != self.comp_of[n2]:
            return None
        words = self._anchor_words(self.comp_of[n1])
        u1 = g.vertex_word(v1, g1)
        u2 = g.vertex_word(v2, g2)
        gamma = u2.inverse() * words[n2] * words[n1].inverse() * u1
        return gamma


def class_graph(g: GraphOfGroups, limits: Limits = DEFAULT_LIMITS) -> ClassGraph:
    key = ("class_graph", limits)
    if key not in g._memo:
        g._memo[key] = ClassGraph(g, limits)
    return g._memo[key]


def conjugate_subgroup_set(w: PathWord, elems) -> tuple[int, ...] | None:
    """Conjugate a set of vertex elements at w.end by w; None if not elliptic.

    Each element a at w.end maps to w * a * w^-1, which must normalize to a
    vertex element at w.start.
    """
    g = w.graph
    out = []
    for a in elems:
        conj = w * g.vertex_word(w.end, a) * w.inverse()
        if conj.edge_length != 0:
            return None
        out.append(conj.elliptic_element())
    return tuple(sorted(out))


def induced_automorphism(w: PathWord, sub: SubgroupHandle) -> dict[int, int]:
    """The map a -> w a w^-1 on a subgroup instance at w.start == w.end.

    Raises if w does not normalize the instance.
    """
    g = w.graph
    if w.start != w.end:
        raise InvalidInput("need a closed word")
    out: dict[int, int] = {}
    members = set(sub.elements)
    for a in sub.elements:
        conj = w * g.vertex_word(w.start, a) * w.inverse()
        if conj.edge_length != 0 or conj.elliptic_element() not in members:
            raise InvalidInput("word does not normalize the subgroup instance")
        out[a] = conj.elliptic_element()
    return out


# -- ends -----------------------------------------------------------------------

@dataclass(frozen=True)
class EndsClass:
    kind: str                       # "finite" | "two_ended" | "nonelementary"
    translation: PathWord | None    # an infinite-order element when two-ended

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"


def classify_ends(g: GraphOfGroups, limits: Limits = DEFAULT_LIMITS) -> EndsClass:
    """Finite / two-ended / nonelementary trichotomy for the fundamental group.

    After full reduction: no edges means a finite group; two-ended means the
    index sum over incident edge-ends is exactly 2 at every vertex (the tree
    is a line); anything else has infinitely many ends.
    """
    r, trace = reduce(g)
    if not r.edges:
        return EndsClass("finite", None)
    for v, G in r.vertices.items():
        total = 0
        for eid, d in r.ends_at(v):
            total += G.order // len(r.o_alpha(eid, d).image_set())
        if total != 2:
            return EndsClass("nonelementary", None)
    loops = [eid for eid, e in r.edges.items() if e.left == e.right]
    if loops:
        t = r.edge_word(loops[0], 1)
    else:
        assert len(r.edges) == 1
        eid = next(iter(r.edges))
        e = r.edges[eid]
        a = min(x for x in r.vertices[e.left].elements()
                if x not in set(e.alpha.image_set()))
        b = min(x for x in r.vertices[e.right].elements()
                if x not in set(e.omega.image_set()))
        t = r.word(e.left, (a, (eid, 1), b, (eid, -1), 0))
    assert t.is_infinite_order()
    return EndsClass("two_ended", trace.to_original(t))


# -- centers ----------------------------------------------------------------------

@dataclass(frozen=True)
class CenterStructure:
    kind: str                        # "finite" | "virtually_z"
    elements: tuple[PathWord, ...]   # the finite part (all elements when finite)
    generator: PathWord | None       # infinite-order central generator

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def finite_order(self) -> int:
        if not self.is_finite:
            raise InvalidInput("center is not finite")
        return len(self.elements)


def _elliptic_kernel(g: GraphOfGroups) -> dict[str, tuple[int, ...]]:
    """Largest compatible family of normal subgroups inside all edge images.

    This is the kernel of the action on the tree: per vertex the fixpoint of
    (a) normal in the vertex group, (b) contained in every incident boundary
    image, (c) carried onto each other by the edge identifications.
    """
    def normal_core(G: FiniteGroup, elems: set[int]) -> set[int]:
        return {x for x in elems
                if all(G.conj(gg, x) in elems for gg in G.elements())}

    fam: dict[str, set[int]] = {}
    for v, G in g.vertices.items():
        cur = set(G.elements())
        for eid, d in g.ends_at(v):
            cur &= set(g.o_alpha(eid, d).image_set())
        fam[v] = normal_core(G, cur)
    changed = True
    while changed:
        changed = False
        for eid, e in g.edges.items():
            pre = {c for c in e.group.elements()
                   if e.alpha(c) in fam[e.left] and e.omega(c) in fam[e.right]}
            new_l = fam[e.left] & {e.alpha(c) for c in pre}
            new_r = fam[e.right] & {e.omega(c) for c in pre}
            new_l = normal_core(g.vertices[e.left], new_l)
            new_r = normal_core(g.vertices[e.right], new_r)
            if new_l != fam[e.left]:
                fam[e.left] = new_l
                changed = True
            if new_r != fam[e.right]:
                fam[e.right] = new_r
                changed = True
    return {v: tuple(sorted(s)) for v, s in fam.items()}


def center_of_pi1(g: GraphOfGroups, limits: Limits = DEFAULT_LIMITS) -> CenterStructure:
    """The center of the fundamental group, exactly.

    Finite case by brute force, two-ended case by bounded candidate search
    over (kernel element) * (translation power), nonelementary case inside
    the elliptic kernel.  Every reported element is verified to commute with
    a full generating set.
    """
    r, trace = reduce(g)
    base = min(r.vertices)
    gens = [gen.word for gen in r.pi1_generators(base)]

    def commutes(w: PathWord) -> bool:
        return all((w * s) == (s * w) for s in gens)

    if not r.edges:
        G = r.vertices[base]
        elems = tuple(trace.to_original(r.vertex_word(base, z))
                      for z in fingrp.center(G).elements)
        return CenterStructure("finite", elems, None)

    ends = classify_ends(r, limits)
    kernel = _elliptic_kernel(r)
    core_words = [r.based_vertex_word(base, base, x) for x in kernel[base]]

    if ends.kind == "two_ended":
        tt = ends.translation
        routes, _ = r.spanning_tree(base)
        t = routes[tt.start] * tt * routes[tt.start].inverse()
        e0 = next(iter(r.edges))
        aut_bound = fingrp.automorphisms(r.edges[e0].group, limits=limits).order
        finite_part = tuple(w for w in core_words if commutes(w))
        power = t
        for m in range(1, aut_bound + 1):
            for w in core_words:
                z = w * power
                if commutes(z):
                    return CenterStructure(
                        "virtually_z",
                        tuple(trace.to_original(x) for x in finite_part),
                        trace.to_original(z))
            power = power * t
        return CenterStructure(
            "finite", tuple(trace.to_original(x) for x in finite_part), None)

    finite_part = tuple(trace.to_original(w) for w in core_words if commutes(w))
    return CenterStructure("finite", finite_part, None)


# -- normalizers of elliptic subgroups --------------------------------------------

@dataclass(frozen=True)
class NormNode:
    node: ClassNode
    vid: str                     # synthetic vertex id in the output graph
    group: FiniteGroup
    embed: tuple[int, ...]       # local index -> element of the parent vertex group
    gamma: PathWord              # anchor-vertex -> node-vertex, gamma*K*gamma^-1 = H


@dataclass(frozen=True)
class NormArc:
    arc: ClassArc
    eid: str
    group: FiniteGroup
    embed: tuple[int, ...]       # local index -> element of the parent edge group


class NormalizerDecomposition:
    """A graph-of-groups presentation of the normalizer of a finite subgroup.

    Vertices are the class-graph nodes conjugate to the anchored subgroup,
    each carrying the normalizer of the canonical representative in its
    vertex group; arcs are edge classes refined by edge-group conjugacy.
    Generators of the normalizer inside the ambient fundamental group are
    returned as path words for cross-checking.
    """

    def __init__(self, g: GraphOfGroups, vertex: str, sub: SubgroupHandle,
                 limits: Limits = DEFAULT_LIMITS):
        if sub.parent is not g.vertices[vertex] and sub.parent != g.vertices[vertex]:
            raise InvalidInput("subgroup does not live in the anchor vertex group")
        self.parent = g
        self.anchor_vertex = vertex
        self.anchor_sub = sub
        cg = class_graph(g, limits)
        n0, g0 = cg._locate(vertex, sub)
        comp = cg.comp_of[n0]
        nodes = cg.component_nodes(comp)
        arcs = sorted(cg.component_arcs(comp), key=lambda a: (a.edge, a.sub))

        # gamma[n]: path from anchor vertex to n.vertex with gamma*K_n*gamma^-1 = H
        gamma: dict[ClassNode, PathWord] = {
            n0: g.vertex_word(vertex, g.vertices[vertex].inv(g0))}
        order = [n0]
        pending = [n0]
        arc_dirs: dict[int, tuple[ClassNode, ClassNode]] = {}
        tree_arcs: set[int] = set()
        while pending:
            n = pending.pop(0)
            for i, a in enumerate(arcs):
                t = g.edge_word(a.edge, 1)
                wa = g.vertex_word(g.edges[a.edge].left, a.g_alpha)
                wo = g.vertex_word(g.edges[a.edge].right, a.g_omega)
                step = wa * t * wo.inverse()       # alpha-node-vertex -> omega-node-vertex
                if a.alpha_node == n and a.omega_node not in gamma:
                    gamma[a.omega_node] = gamma[n] * step
                    tree_arcs.add(i)
                    order.append(a.omega_node)
                    pending.append(a.omega_node)
                if a.omega_node == n and a.alpha_node not in gamma:
                    gamma[a.alpha_node] = gamma[n] * step.inverse()
                    tree_arcs.add(i)
                    order.append(a.alpha_node)
                    pending.append(a.alpha_node)

        hset = set(sub.elements)
        self.nodes: list[NormNode] = []
        self._vid_of: dict[ClassNode, str] = {}
        for i, n in enumerate(order):
            got = conjugate_subgroup_set(gamma[n].inverse(), list(sub.elements))
            assert got == n.rep, "conjugator construction is inconsistent"
            K = SubgroupHandle(g.vertices[n.vertex], n.rep)
            norm = fingrp.normalizer(g.vertices[n.vertex], K)
            grp, embed = norm.as_group(name=f"N{i}")
            vid = f"n{i}"
            self._vid_of[n] = vid
            self.nodes.append(NormNode(n, vid, grp, embed, gamma[n]))

        vertices = {nd.vid: nd.group for nd in self.nodes}
        edges: dict[str, Edge] = {}
        self.arcs: list[NormArc] = []
        self._tree_arc_eids: set[str] = set()
        self._arc_step: dict[str, PathWord] = {}
        for i, a in enumerate(arcs):
            E = g.edges[a.edge]
            C = SubgroupHandle(E.group, a.sub)
            normc = fingrp.normalizer(E.group, C)
            grp, embed = normc.as_group(name=f"E{i}")
            na = next(nd for nd in self.nodes if nd.node == a.alpha_node)
            no = next(nd for nd in self.nodes if nd.node == a.omega_node)
            GA = g.vertices[a.alpha_node.vertex]
            GO = g.vertices[a.omega_node.vertex]
            la = {e: j for j, e in enumerate(na.embed)}
            lo = {e: j for j, e in enumerate(no.embed)}
            amap = GroupMap(grp, na.group, tuple(
                la[GA.conj(a.g_alpha, E.alpha(embed[x]))] for x in range(grp.order)))
            omap = GroupMap(grp, no.group, tuple(
                lo[GO.conj(a.g_omega, E.omega(embed[x]))] for x in range(grp.order)))
            eid = f"a{i}"
            edges[eid] = Edge(grp, na.vid, no.vid, amap, omap)
            self.arcs.append(NormArc(a, eid, grp, embed))
            t = g.edge_word(a.edge, 1)
            wa = g.vertex_word(E.left, a.g_alpha)
            wo = g.vertex_word(E.right, a.g_omega)
            self._arc_step[eid] = wa * t * wo.inverse()
            if i in tree_arcs:
                self._tree_arc_eids.add(eid)

        self.graph = GraphOfGroups(vertices, edges)
        self.anchor_node_vid = self._vid_of[n0]

        self.generators: list[PathWord] = []
        for nd in self.nodes:
            for x in fingrp.generating_set(nd.group):
                w = (nd.gamma * g.vertex_word(nd.node.vertex, nd.embed[x])
                     * nd.gamma.inverse())
                self.generators.append(w)
        for arc in self.arcs:
            if arc.eid in self._tree_arc_eids:
                continue
            na = next(nd for nd in self.nodes if nd.node == arc.arc.alpha_node)
            no = next(nd for nd in self.nodes if nd.node == arc.arc.omega_node)
            w = na.gamma * self._arc_step[arc.eid] * no.gamma.inverse()
            self.generators.append(w)
        for w in self.generators:
            assert conjugate_subgroup_set(w, list(sub.elements)) == tuple(sub.elements), \
                "normalizer generator fails the conjugation check"

    def node_by_vid(self, vid: str) -> NormNode:
        return next(nd for nd in self.nodes if nd.vid == vid)

    def is_single_cell(self) -> bool:
        return len(self.nodes) == 1 and not self.arcs

    def to_parent(self, w: PathWord) -> PathWord:
        """Push a word of the output graph into the ambient fundamental group."""
        g = self.parent
        nd0 = self.node_by_vid(w.start)
        out = (nd0.gamma * g.vertex_word(nd0.node.vertex, nd0.embed[w.items[0]])
               * nd0.gamma.inverse())
        cur = w.start
        for i in range(1, len(w.items), 2):
            eid, d = w.items[i]
            na = self.node_by_vid(self.graph.edges[eid].left)
            no = self.node_by_vid(self.graph.edges[eid].right)
            tw = na.gamma * self._arc_step[eid] * no.gamma.inverse()
            out = out * (tw if d > 0 else tw.inverse())
            cur = self.graph.o_end(eid, d)
            nd = self.node_by_vid(cur)
            out = out * (nd.gamma * g.vertex_word(nd.node.vertex, nd.embed[w.items[i + 1]])
                         * nd.gamma.inverse())
        return out


def normalizer_decomposition(
    g: GraphOfGroups, anchor: tuple[str, SubgroupHandle],
    limits: Limits = DEFAULT_LIMITS,
) -> NormalizerDecomposition:
    vertex, sub = anchor
    return NormalizerDecomposition(g, vertex, sub, limits)
