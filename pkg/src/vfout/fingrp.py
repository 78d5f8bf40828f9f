"""Exact computation in small finite groups given by multiplication tables.

Elements are dense indices ``0..n-1`` with the identity fixed at index 0.
Every operation here is a definitional scan or an exhaustive closure; there
are no stabilizer chains and no randomization, so outputs are deterministic
and directly checkable against the definitions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .config import DEFAULT_LIMITS, BoundExceeded, InvalidInput, Limits


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group as a full multiplication table.

    ``table[a][b]`` is the product ``a*b``; ``inverse[a]`` is ``a**-1``.
    Index 0 is the identity.
    """

    table: tuple[tuple[int, ...], ...]
    inverse: tuple[int, ...]
    name: str = ""

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def conj(self, g: int, x: int) -> int:
        """g * x * g^-1."""
        return self.mul(self.mul(g, x), self.inverse[g])

    def elements(self) -> range:
        return range(self.order)

    def element_order(self, a: int) -> int:
        n, x = 1, a
        while x != 0:
            x = self.mul(x, a)
            n += 1
        return n

    def is_abelian(self) -> bool:
        n = self.order
        return all(
            self.table[a][b] == self.table[b][a]
            for a in range(n)
            for b in range(a + 1, n)
        )

    def check(self) -> list[str]:
        """Exhaustively verify the group axioms; return a list of violations."""
        n = self.order
        problems = []
        if n == 0:
            return ["empty table"]
        for a in range(n):
            if len(self.table[a]) != n:
                return [f"row {a} has length {len(self.table[a])}, expected {n}"]
        for a in range(n):
            if self.table[0][a] != a or self.table[a][0] != a:
                problems.append(f"identity law fails at element {a}")
        for a in range(n):
            if self.table[a][self.inverse[a]] != 0 or self.table[self.inverse[a]][a] != 0:
                problems.append(f"inverse law fails at element {a}")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                        problems.append(f"associativity fails at ({a},{b},{c})")
                        return problems
        return problems

    def __repr__(self) -> str:
        label = self.name or "group"
        return f"<{label} of order {self.order}>"


@dataclass(frozen=True)
class SubgroupHandle:
    """A subgroup of ``parent`` as a sorted tuple of element indices."""

    parent: FiniteGroup
    elements: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, a: int) -> bool:
        return a in self._memberset()

    def _memberset(self) -> frozenset[int]:
        return frozenset(self.elements)

    def is_normal(self) -> bool:
        G = self.parent
        members = self._memberset()
        return all(G.conj(g, h) in members for g in G.elements() for h in self.elements)

    def conjugate(self, g: int) -> "SubgroupHandle":
        G = self.parent
        return SubgroupHandle(G, tuple(sorted(G.conj(g, h) for h in self.elements)))

    def as_group(self, name: str = "") -> tuple[FiniteGroup, tuple[int, ...]]:
        """Re-index the subgroup as a standalone group.

        Returns the table group together with the embedding (local index i
        corresponds to parent element ``embedding[i]``).  The identity keeps
        index 0 because the element list is sorted and contains 0.
        """
        G = self.parent
        embed = self.elements
        local = {e: i for i, e in enumerate(embed)}
        table = tuple(
            tuple(local[G.mul(a, b)] for b in embed) for a in embed
        )
        inverse = tuple(local[G.inv(a)] for a in embed)
        return FiniteGroup(table, inverse, name=name), embed


@dataclass(frozen=True)
class GroupMap:
    """A homomorphism given by the image of every source element."""

    source: FiniteGroup
    target: FiniteGroup
    images: tuple[int, ...]

    def __call__(self, a: int) -> int:
        return self.images[a]

    def is_homomorphism(self) -> bool:
        s, t = self.source, self.target
        return all(
            self.images[s.mul(a, b)] == t.mul(self.images[a], self.images[b])
            for a in s.elements()
            for b in s.elements()
        )

    def is_injective(self) -> bool:
        return len(set(self.images)) == self.source.order

    def image_set(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.images)))

    def image_subgroup(self) -> SubgroupHandle:
        return SubgroupHandle(self.target, self.image_set())

    def preimage(self, b: int) -> int:
        """Inverse image of b under an injective map; b must lie in the image."""
        for a, img in enumerate(self.images):
            if img == b:
                return a
        raise InvalidInput(f"element {b} is not in the image")

    def compose(self, inner: "GroupMap") -> "GroupMap":
        """self o inner."""
        if inner.target is not self.source and inner.target != self.source:
            raise InvalidInput("composition mismatch")
        return GroupMap(inner.source, self.target,
                        tuple(self.images[x] for x in inner.images))

    def restrict(self, sub: SubgroupHandle) -> SubgroupHandle:
        return SubgroupHandle(self.target,
                              tuple(sorted({self.images[a] for a in sub.elements})))


def identity_map(G: FiniteGroup) -> GroupMap:
    return GroupMap(G, G, tuple(G.elements()))


def inner_map(G: FiniteGroup, g: int) -> GroupMap:
    return GroupMap(G, G, tuple(G.conj(g, x) for x in G.elements()))


def trivial_group(name: str = "1") -> FiniteGroup:
    return FiniteGroup(((0,),), (0,), name=name)


def trivial_subgroup(G: FiniteGroup) -> SubgroupHandle:
    return SubgroupHandle(G, (0,))


def full_subgroup(G: FiniteGroup) -> SubgroupHandle:
    return SubgroupHandle(G, tuple(G.elements()))


# -- permutation ingestion ----------------------------------------------------

def _compose_perms(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """Left-to-right composition: apply p, then q."""
    return tuple(q[i] for i in p)


def group_from_permutations(
    degree: int,
    generators: list[tuple[int, ...]],
    *,
    name: str = "",
    limits: Limits = DEFAULT_LIMITS,
) -> tuple[FiniteGroup, list[tuple[int, ...]]]:
    """Close a set of permutations of ``{0..degree-1}`` under composition.

    Element 0 is the identity; the rest are discovered breadth-first by
    right-multiplying known elements with the generators in listed order,
    which pins down a deterministic indexing.  Returns the table group and
    the element-to-permutation list.
    """
    if degree < 1:
        raise InvalidInput("degree must be positive")
    for g in generators:
        if sorted(g) != list(range(degree)):
            raise InvalidInput(f"not a bijection on 0..{degree - 1}: {g}")
    ident = tuple(range(degree))
    elems: list[tuple[int, ...]] = [ident]
    index = {ident: 0}
    queue = [ident]
    while queue:
        p = queue.pop(0)
        for g in generators:
            q = _compose_perms(p, g)
            if q not in index:
                if len(elems) >= limits.max_group_order:
                    raise BoundExceeded(
                        f"group too large: closure exceeds {limits.max_group_order}")
                index[q] = len(elems)
                elems.append(q)
                queue.append(q)
    table = tuple(
        tuple(index[_compose_perms(a, b)] for b in elems) for a in elems
    )
    inverse = []
    for a in elems:
        inv = [0] * degree
        for i, j in enumerate(a):
            inv[j] = i
        inverse.append(index[tuple(inv)])
    return FiniteGroup(table, tuple(inverse), name=name), elems


# -- subgroup machinery --------------------------------------------------------

def generated_subgroup(G: FiniteGroup, seeds) -> SubgroupHandle:
    """Smallest subgroup of G containing the seed elements."""
    known = {0} | set(seeds)
    queue = sorted(known)
    while queue:
        x = queue.pop(0)
        new = {G.inv(x)}
        for y in list(known):
            new.add(G.mul(x, y))
            new.add(G.mul(y, x))
        for y in sorted(new):
            if y not in known:
                known.add(y)
                queue.append(y)
    return SubgroupHandle(G, tuple(sorted(known)))


def centralizer(G: FiniteGroup, H: SubgroupHandle) -> SubgroupHandle:
    """{g : gh = hg for all h in H}, by the definitional double loop."""
    out = [g for g in G.elements()
           if all(G.mul(g, h) == G.mul(h, g) for h in H.elements)]
    return SubgroupHandle(G, tuple(out))


def normalizer(G: FiniteGroup, H: SubgroupHandle) -> SubgroupHandle:
    members = frozenset(H.elements)
    out = [g for g in G.elements()
           if all(G.conj(g, h) in members for h in H.elements)]
    return SubgroupHandle(G, tuple(out))


def center(G: FiniteGroup) -> SubgroupHandle:
    return centralizer(G, full_subgroup(G))


def intersect(A: SubgroupHandle, B: SubgroupHandle) -> SubgroupHandle:
    assert A.parent is B.parent or A.parent == B.parent
    return SubgroupHandle(A.parent, tuple(sorted(set(A.elements) & set(B.elements))))


def all_subgroups(G: FiniteGroup, *, limits: Limits = DEFAULT_LIMITS) -> list[SubgroupHandle]:
    """Every subgroup, by breadth-first closure over adding one element."""
    seen = {(0,)}
    frontier = [(0,)]
    while frontier:
        nxt = []
        for elts in frontier:
            base = set(elts)
            for g in G.elements():
                if g in base:
                    continue
                sub = generated_subgroup(G, list(elts) + [g])
                if sub.elements not in seen:
                    if len(seen) >= limits.max_subgroups:
                        raise BoundExceeded(
                            f"more than {limits.max_subgroups} subgroups")
                    seen.add(sub.elements)
                    nxt.append(sub.elements)
        frontier = nxt
    return [SubgroupHandle(G, e) for e in sorted(seen, key=lambda e: (len(e), e))]


def canonical_conjugate(G: FiniteGroup, H: SubgroupHandle) -> tuple[SubgroupHandle, int]:
    """The lexicographically least conjugate of H, with a witness g.

    ``g`` satisfies ``g H g^-1 = canonical``.
    """
    best = H.elements
    best_g = 0
    for g in G.elements():
        c = H.conjugate(g).elements
        if c < best:
            best, best_g = c, g
    return SubgroupHandle(G, best), best_g


def conjugating_element(G: FiniteGroup, A: SubgroupHandle, B: SubgroupHandle) -> int | None:
    """Least g with g A g^-1 = B, or None."""
    target = B.elements
    for g in G.elements():
        if A.conjugate(g).elements == target:
            return g
    return None


def subgroup_classes(
    G: FiniteGroup, *, limits: Limits = DEFAULT_LIMITS
) -> list[list[SubgroupHandle]]:
    """All subgroups grouped by conjugacy.

    Classes are sorted by (order, least representative); the first member of
    each class is its canonical representative (lexicographically least
    element tuple).
    """
    subs = all_subgroups(G, limits=limits)
    remaining = {s.elements for s in subs}
    classes = []
    for s in subs:
        if s.elements not in remaining:
            continue
        orbit = {s.conjugate(g).elements for g in G.elements()}
        remaining -= orbit
        classes.append([SubgroupHandle(G, e) for e in sorted(orbit)])
    classes.sort(key=lambda cl: (cl[0].order, cl[0].elements))
    return classes


# -- automorphisms -------------------------------------------------------------

def generating_set(G: FiniteGroup) -> list[int]:
    """A small generating set, chosen greedily by descending element order."""
    if G.order == 1:
        return []
    gens: list[int] = []
    current = generated_subgroup(G, [])
    by_order = sorted(G.elements(), key=lambda a: (-G.element_order(a), a))
    while current.order < G.order:
        for a in by_order:
            if a not in current:
                gens.append(a)
                current = generated_subgroup(G, gens)
                break
    return gens


def factorizations(G: FiniteGroup, gens: list[int]) -> dict[int, tuple[int, ...]]:
    """Express every element as a product of generators (BFS, deterministic)."""
    words: dict[int, tuple[int, ...]] = {0: ()}
    queue = [0]
    while queue:
        x = queue.pop(0)
        for i, g in enumerate(gens):
            y = G.mul(x, g)
            if y not in words:
                words[y] = words[x] + (i,)
                queue.append(y)
    if len(words) != G.order:
        raise InvalidInput("generating set does not generate")
    return words


def _propagate_map(G: FiniteGroup, gens: list[int], images: list[int]) -> tuple[int, ...] | None:
    """Extend generator images to a full endomorphism, or None on conflict."""
    known = {0: 0}
    for g, img in zip(gens, images):
        if known.get(g, img) != img:
            return None
        known[g] = img
    queue = list(known)
    while queue:
        x = queue.pop(0)
        for g, img in zip(gens, images):
            y = G.mul(x, g)
            fy = G.mul(known[x], img)
            if y in known:
                if known[y] != fy:
                    return None
            else:
                known[y] = fy
                queue.append(y)
    if len(known) != G.order:
        return None
    return tuple(known[x] for x in G.elements())


@dataclass(frozen=True)
class AutomorphismData:
    """The full automorphism list of a group with its inner/outer structure."""

    group: FiniteGroup
    maps: tuple[GroupMap, ...]
    inner_indices: tuple[int, ...]
    outer_classes: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.maps)

    @property
    def out_order(self) -> int:
        return len(self.outer_classes)

    def index_of(self, images) -> int:
        key = tuple(images)
        for i, m in enumerate(self.maps):
            if m.images == key:
                return i
        raise InvalidInput("not an automorphism of this group")

    def class_of(self, aut_index: int) -> int:
        for c, cls in enumerate(self.outer_classes):
            if aut_index in cls:
                return c
        raise InvalidInput("bad automorphism index")

    def compose(self, i: int, j: int) -> int:
        """Index of maps[i] o maps[j]."""
        return self.index_of(tuple(self.maps[i].images[x] for x in self.maps[j].images))

    def invert(self, i: int) -> int:
        imgs = [0] * self.group.order
        for x, y in enumerate(self.maps[i].images):
            imgs[y] = x
        return self.index_of(tuple(imgs))

    def class_compose(self, c1: int, c2: int) -> int:
        return self.class_of(self.compose(self.outer_classes[c1][0], self.outer_classes[c2][0]))

    def class_invert(self, c: int) -> int:
        return self.class_of(self.invert(self.outer_classes[c][0]))


def automorphisms(G: FiniteGroup, *, limits: Limits = DEFAULT_LIMITS) -> AutomorphismData:
    """All automorphisms by backtracking over generator images.

    Candidate images must preserve element orders; the propagated map is then
    fully re-checked as a bijective homomorphism.
    """
    if G.order > limits.max_group_order:
        raise BoundExceeded("group too large for automorphism search")
    gens = generating_set(G)
    if not gens:
        ident = identity_map(G)
        return AutomorphismData(G, (ident,), (0,), ((0,),))
    orders = [G.element_order(g) for g in gens]
    pools = [
        [a for a in G.elements() if G.element_order(a) == o] for o in orders
    ]
    found: list[tuple[int, ...]] = []
    for combo in itertools.product(*pools):
        full = _propagate_map(G, gens, list(combo))
        if full is None or len(set(full)) != G.order:
            continue
        gm = GroupMap(G, G, full)
        if gm.is_homomorphism():
            found.append(full)
    found.sort()
    maps = tuple(GroupMap(G, G, f) for f in found)
    inner_images = {inner_map(G, g).images for g in G.elements()}
    inner = tuple(i for i, f in enumerate(found) if f in inner_images)
    # outer classes: partition by left cosets phi . Inn
    inner_set = [found.index(img) for img in sorted(inner_images)]
    unassigned = set(range(len(found)))
    classes = []
    while unassigned:
        i = min(unassigned)
        coset = set()
        for j in inner_set:
            comp = tuple(found[i][x] for x in found[j])
            coset.add(found.index(comp))
        coset &= unassigned
        unassigned -= coset
        classes.append(tuple(sorted(coset)))
    return AutomorphismData(G, maps, inner, tuple(classes))


# -- quotients -----------------------------------------------------------------

def quotient(G: FiniteGroup, N: SubgroupHandle, name: str = "") -> tuple[FiniteGroup, GroupMap]:
    """The coset group G/N with its projection; N must be normal."""
    if not N.is_normal():
        raise InvalidInput("subgroup is not normal")
    members = frozenset(N.elements)
    coset_of: dict[int, int] = {}
    reps: list[int] = []
    for a in G.elements():
        if a in coset_of:
            continue
        coset = sorted(G.mul(a, h) for h in N.elements)
        rep = coset[0]
        idx = len(reps)
        reps.append(rep)
        for c in coset:
            coset_of[c] = idx
    # identity coset contains 0, whose coset minimum is 0, discovered first
    assert coset_of[0] == 0
    table = tuple(
        tuple(coset_of[G.mul(reps[i], reps[j])] for j in range(len(reps)))
        for i in range(len(reps))
    )
    inverse = tuple(coset_of[G.inv(reps[i])] for i in range(len(reps)))
    Q = FiniteGroup(table, inverse, name=name or (G.name + "/N" if G.name else ""))
    proj = GroupMap(G, Q, tuple(coset_of[a] for a in G.elements()))
    return Q, proj
