"""Finite groups as dense Cayley tables.

Elements are the integers ``0 .. order-1`` with the identity fixed at 0.
Every higher module talks in these indices.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

DEFAULT_ORDER_CAP = 20000
LATTICE_CAP = 2000
RETRACTION_CAP = 1024


class GroupError(ValueError):
    """Malformed group data or a violated precondition."""


class CapExceeded(RuntimeError):
    """A configured size bound was hit. The answer is UNKNOWN, not negative."""


class FiniteGroup:
    """A finite group given by its multiplication table.

    ``mul[a, b]`` is the index of ``a*b``. Index 0 must be the identity.
    """

    def __init__(
        self,
        mul,
        names: Sequence[str] | None = None,
        generators: Sequence[tuple[str, int]] | None = None,
        *,
        name: str = "G",
        validate: bool = True,
    ):
        mul = np.ascontiguousarray(mul, dtype=np.int32)
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] == 0:
            raise GroupError("multiplication table must be a non-empty square array")
        n = mul.shape[0]
        if mul.min() < 0 or mul.max() >= n:
            raise GroupError("table entries out of range")
        ar = np.arange(n)
        if not (np.array_equal(mul[0], ar) and np.array_equal(mul[:, 0], ar)):
            raise GroupError("index 0 is not a two-sided identity")
        self.mul = mul
        self.mul.setflags(write=False)
        self.order = n
        self.identity = 0
        self.name = name
        rows, cols = np.nonzero(mul == 0)
        inv = np.full(n, -1, dtype=np.int32)
        inv[rows] = cols
        if (inv < 0).any() or np.bincount(rows, minlength=n).max() != 1:
            raise GroupError("some element has no unique inverse")
        if not np.array_equal(mul[inv, ar], np.zeros(n, dtype=np.int32)):
            raise GroupError("inverse table is not two-sided")
        self.inv = inv
        self.inv.setflags(write=False)
        self.names = list(names) if names is not None else [f"e{i}" for i in range(n)]
        if len(self.names) != n:
            raise GroupError("wrong number of element names")
        if generators is None:
            gens = greedy_generators(self, range(n))
            generators = [(self.names[g], g) for g in gens]
        self.generators = [(str(s), int(g)) for s, g in generators]
        if validate:
            self.validate()

    def validate(self) -> None:
        """Exhaustive checks: Latin square, associativity, generation."""
        n = self.order
        ar = np.arange(n)
        srt = np.sort(self.mul, axis=1)
        if not (srt == ar).all() or not (np.sort(self.mul, axis=0) == ar[:, None]).all():
            raise GroupError("table is not a Latin square")
        # Light's test: checking the middle factor on a generating set suffices.
        for _, g in self.generators:
            left = self.mul[self.mul[:, g][:, None], ar[None, :]]
            right = self.mul[ar[:, None], self.mul[g][None, :]]
            if not np.array_equal(left, right):
                raise GroupError("table is not associative")
        if len(self.closure(g for _, g in self.generators)) != n:
            raise GroupError("generators do not generate the group")

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name!r}, order={self.order})"

    def __len__(self) -> int:
        return self.order

    # element arithmetic -------------------------------------------------

    @cached_property
    def table(self) -> list[list[int]]:
        """Plain nested lists; faster than numpy for scalar lookups in loops."""
        return self.mul.tolist()

    @cached_property
    def inv_list(self) -> list[int]:
        return self.inv.tolist()

    def op(self, a: int, b: int) -> int:
        return self.table[a][b]

    def prod(self, elems: Iterable[int]) -> int:
        t = self.table
        r = 0
        for e in elems:
            r = t[r][e]
        return r

    def inverse(self, a: int) -> int:
        return self.inv_list[a]

    def conj(self, a: int, g: int) -> int:
        """g a g^-1."""
        t = self.table
        return t[t[g][a]][self.inv_list[g]]

    def commutator(self, a: int, b: int) -> int:
        """a^-1 b^-1 a b."""
        t, iv = self.table, self.inv_list
        return t[t[t[iv[a]][iv[b]]][a]][b]

    def power(self, a: int, k: int) -> int:
        return int(self.power_map(k)[a])

    def power_map(self, k: int) -> np.ndarray:
        """Array ``x -> x**k`` over all elements (cached)."""
        cache = self.__dict__.setdefault("_power_cache", {})
        if k in cache:
            return cache[k]
        if k < 0:
            res = self.inv[self.power_map(-k)]
        elif k == 0:
            res = np.zeros(self.order, dtype=np.int32)
        elif k == 1:
            res = np.arange(self.order, dtype=np.int32)
        else:
            half = self.power_map(k // 2)
            res = self.mul[half, half]
            if k % 2:
                res = self.mul[res, np.arange(self.order)]
        res = np.ascontiguousarray(res, dtype=np.int32)
        res.setflags(write=False)
        cache[k] = res
        return res

    @cached_property
    def element_orders(self) -> list[int]:
        orders = [0] * self.order
        t = self.table
        for a in range(self.order):
            x, k = a, 1
            while x != 0:
                x = t[x][a]
                k += 1
            orders[a] = k
        return orders

    def element_order(self, a: int) -> int:
        return self.element_orders[a]

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.element_orders)

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def index_of(self, name: str) -> int:
        lookup = self.__dict__.get("_name_index")
        if lookup is None:
            lookup = {s: i for i, s in enumerate(self.names)}
            self.__dict__["_name_index"] = lookup
        try:
            return lookup[name]
        except KeyError:
            raise GroupError(f"no element named {name!r}") from None

    @property
    def generator_map(self) -> dict[str, int]:
        return dict(self.generators)

    # subgroups ----------------------------------------------------------

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        gens = [g for g in dict.fromkeys(int(x) for x in gens) if g != 0]
        t = self.table
        seen = {0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            row = t[x]
            for g in gens:
                y = row[g]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return frozenset(seen)

    def subgroup(self, gens: Iterable[int]) -> Subgroup:
        return Subgroup(self, self.closure(gens))

    def whole(self) -> Subgroup:
        return Subgroup(self, range(self.order))

    def trivial(self) -> Subgroup:
        return Subgroup(self, (0,))

    @cached_property
    def conjugacy_classes(self) -> list[tuple[int, ...]]:
        seen = [False] * self.order
        classes = []
        gens = [g for _, g in self.generators]
        for a in range(self.order):
            if seen[a]:
                continue
            cls = {a}
            queue = deque([a])
            while queue:
                x = queue.popleft()
                for g in gens:
                    y = self.conj(x, g)
                    if y not in cls:
                        cls.add(y)
                        queue.append(y)
            for x in cls:
                seen[x] = True
            classes.append(tuple(sorted(cls)))
        return classes


class Subgroup:
    """A subgroup of ``parent`` given by its (sorted) member indices."""

    __slots__ = ("parent", "members", "_set", "__dict__")

    def __init__(self, parent: FiniteGroup, members: Iterable[int]):
        self.parent = parent
        self._set = frozenset(int(m) for m in members)
        self.members = tuple(sorted(self._set))

    def __contains__(self, x: int) -> bool:
        return x in self._set

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and other.parent is self.parent and other._set == self._set

    def __hash__(self) -> int:
        return hash(self._set)

    def __le__(self, other: Subgroup) -> bool:
        return self._set <= other._set

    def __repr__(self) -> str:
        return f"Subgroup(order={len(self)} of {self.parent.name})"

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def set(self) -> frozenset[int]:
        return self._set

    def is_subgroup(self) -> bool:
        t, iv = self.parent.table, self.parent.inv_list
        if 0 not in self._set:
            return False
        return all(t[a][b] in self._set for a in self.members for b in self.members) and all(
            iv[a] in self._set for a in self.members
        )

    @cached_property
    def generators(self) -> list[int]:
        return greedy_generators(self.parent, self.members)

    def is_normal(self, G: FiniteGroup | None = None) -> bool:
        G = G or self.parent
        return all(G.conj(h, g) in self._set for h in self.generators for _, g in G.generators)

    def is_normalized_by(self, elems: Iterable[int]) -> bool:
        G = self.parent
        return all(G.conj(h, g) in self._set for g in elems for h in self.generators)

    @cached_property
    def is_abelian(self) -> bool:
        t = self.parent.table
        gens = self.generators
        return all(t[a][b] == t[b][a] for a in gens for b in gens)

    @cached_property
    def exponent(self) -> int:
        orders = self.parent.element_orders
        return math.lcm(*(orders[m] for m in self.members))

    def intersection(self, other: Subgroup) -> Subgroup:
        return Subgroup(self.parent, self._set & other._set)

    def join(self, other: Subgroup) -> Subgroup:
        return self.parent.subgroup(list(self.generators) + list(other.generators))

    def as_group(self, name: str | None = None) -> tuple[FiniteGroup, Homomorphism]:
        """The subgroup as a standalone group, with its inclusion map."""
        m = np.array(self.members, dtype=np.int32)
        pos = np.full(self.parent.order, -1, dtype=np.int32)
        pos[m] = np.arange(len(m), dtype=np.int32)
        sub = pos[self.parent.mul[np.ix_(m, m)]]
        names = [self.parent.names[i] for i in self.members]
        gens = [(self.parent.names[g], int(pos[g])) for g in self.generators]
        grp = FiniteGroup(sub, names, gens, name=name or f"sub({self.parent.name})", validate=False)
        return grp, Homomorphism(grp, self.parent, m)


@dataclass(eq=False)
class Homomorphism:
    """A map of groups stored as an image table over source indices."""

    source: FiniteGroup
    target: FiniteGroup
    image: np.ndarray

    def __post_init__(self):
        self.image = np.ascontiguousarray(self.image, dtype=np.int32)
        if self.image.shape != (self.source.order,):
            raise GroupError("image table has the wrong length")

    def __call__(self, x: int) -> int:
        return int(self.image[x])

    def is_homomorphism(self) -> bool:
        im = self.image
        lhs = im[self.source.mul]
        rhs = self.target.mul[im[:, None], im[None, :]]
        return bool(np.array_equal(lhs, rhs))

    def compose(self, first: Homomorphism) -> Homomorphism:
        """``self ∘ first``."""
        if first.target is not self.source:
            raise GroupError("composition of incompatible maps")
        return Homomorphism(first.source, self.target, self.image[first.image])

    def kernel(self) -> Subgroup:
        return Subgroup(self.source, np.nonzero(self.image == 0)[0].tolist())

    def image_subgroup(self) -> Subgroup:
        return Subgroup(self.target, set(self.image.tolist()))

    def is_injective(self) -> bool:
        return len(set(self.image.tolist())) == self.source.order

    def restrict(self, members: Iterable[int]) -> dict[int, int]:
        return {m: int(self.image[m]) for m in members}


def greedy_generators(G: FiniteGroup, members: Iterable[int]) -> list[int]:
    """A small generating set: scan members by decreasing order, keep what grows the closure."""
    members = list(members)
    orders = G.element_orders
    target = len(members)
    gens: list[int] = []
    cur = frozenset((0,))
    for m in sorted(members, key=lambda x: (-orders[x], x)):
        if len(cur) == target:
            break
        if m not in cur:
            gens.append(m)
            cur = G.closure(gens)
    return sorted(gens) if gens else []


# ---------------------------------------------------------------------------
# constructors


def group_from_elements(
    gens: dict[str, object],
    mul: Callable[[object, object], object],
    identity: object,
    *,
    name: str = "G",
    cap: int = DEFAULT_ORDER_CAP,
    render: Callable[[object], str] = str,
) -> FiniteGroup:
    """Close hashable generator objects under ``mul`` and tabulate."""
    elems = [identity]
    index = {identity: 0}
    queue = deque([identity])
    gvals = list(gens.values())
    while queue:
        x = queue.popleft()
        for g in gvals:
            y = mul(x, g)
            if y not in index:
                if len(elems) >= cap:
                    raise CapExceeded(f"group order exceeds cap {cap}")
                index[y] = len(elems)
                elems.append(y)
                queue.append(y)
    n = len(elems)
    table = np.empty((n, n), dtype=np.int32)
    for i, x in enumerate(elems):
        table[i] = [index[mul(x, y)] for y in elems]
    names = [render(e) for e in elems]
    generators = [(s, index[g]) for s, g in gens.items()]
    return FiniteGroup(table, names, generators, name=name)


def cyclic(n: int, gen: str = "a") -> FiniteGroup:
    if n < 1:
        raise GroupError("cyclic order must be positive")
    ar = np.arange(n)
    table = (ar[:, None] + ar[None, :]) % n
    names = ["1"] + [gen if k == 1 else f"{gen}^{k}" for k in range(1, n)]
    return FiniteGroup(table, names, [(gen, 1 % n)], name=f"Z{n}")


def dihedral(n: int) -> FiniteGroup:
    """D_n of order 2n; a has order n, b is an involution with b a b^-1 = a^-1.

    Element ``a^i b^j`` has index ``i + n*j``.
    """
    if n < 1:
        raise GroupError("dihedral parameter must be positive")
    i = np.arange(2 * n) % n
    j = np.arange(2 * n) // n
    sign = np.where(j == 1, -1, 1)
    # (a^i b^j)(a^k b^l) = a^(i + (-1)^j k) b^(j + l)
    ni = (i[:, None] + sign[:, None] * i[None, :]) % n
    nj = (j[:, None] + j[None, :]) % 2
    table = ni + n * nj

    def nm(k: int, r: int) -> str:
        s = "" if k == 0 else ("a" if k == 1 else f"a^{k}")
        s += "b" if r else ""
        return s or "1"

    names = [nm(k, r) for r in range(2) for k in range(n)]
    gens = [("a", 1 % n), ("b", n)] if n > 1 else [("b", 1)]
    return FiniteGroup(table, names, gens, name=f"D{n}")


def _perm_group(perms: dict[str, tuple[int, ...]], name: str, cap: int) -> FiniteGroup:
    """Permutation group; product ``(gh)(i) = g(h(i))``."""
    deg = len(next(iter(perms.values())))
    ident = tuple(range(deg))
    elems = [ident]
    index = {ident: 0}
    queue = deque([ident])
    gvals = list(perms.values())
    while queue:
        x = queue.popleft()
        for g in gvals:
            y = tuple(x[k] for k in g)
            if y not in index:
                if len(elems) >= cap:
                    raise CapExceeded(f"group order exceeds cap {cap}")
                index[y] = len(elems)
                elems.append(y)
                queue.append(y)
    P = np.array(elems, dtype=np.int64)
    n = len(elems)
    base = deg ** np.arange(deg, dtype=np.int64)
    codes = P @ base
    order = np.argsort(codes)
    sorted_codes = codes[order]
    table = np.empty((n, n), dtype=np.int32)
    for a in range(n):
        prod = P[a][P]  # row b: a∘b
        c = prod @ base
        table[a] = order[np.searchsorted(sorted_codes, c)]
    names = ["()"] + [_cycle_string(e) for e in elems[1:]]
    gens = [(s, index[g]) for s, g in perms.items()]
    return FiniteGroup(table, names, gens, name=name)


def _cycle_string(p: Sequence[int]) -> str:
    seen = set()
    out = []
    for s in range(len(p)):
        if s in seen or p[s] == s:
            continue
        cyc = [s]
        seen.add(s)
        x = p[s]
        while x != s:
            cyc.append(x)
            seen.add(x)
            x = p[x]
        out.append("(" + ",".join(str(c + 1) for c in cyc) + ")")
    return "".join(out) or "()"


def permutation_group(
    generators: dict[str, Sequence[int]], *, one_based: bool = True, name: str = "P", cap: int = DEFAULT_ORDER_CAP
) -> FiniteGroup:
    """Generators in one-line image notation (``[2, 3, 1]`` maps 1->2, 2->3, 3->1)."""
    if not generators:
        raise GroupError("permutation group needs at least one generator")
    perms = {}
    deg = max(len(v) for v in generators.values())
    for s, img in generators.items():
        img = [int(x) - (1 if one_based else 0) for x in img]
        img += list(range(len(img), deg))
        if sorted(img) != list(range(deg)):
            raise GroupError(f"generator {s!r} is not a permutation")
        perms[s] = tuple(img)
    return _perm_group(perms, name, cap)


def symmetric(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError("degree must be positive")
    if n == 1:
        return FiniteGroup([[0]], ["()"], [], name="S1")
    gens = {"s": tuple([1, 0] + list(range(2, n))), "c": tuple(list(range(1, n)) + [0])}
    if n == 2:
        gens = {"s": (1, 0)}
    return _perm_group(gens, f"S{n}", DEFAULT_ORDER_CAP)


def alternating(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError("degree must be positive")
    if n < 3:
        return FiniteGroup([[0]], ["()"], [], name=f"A{n}")
    # 3-cycles (1 2 k) generate A_n
    gens = {}
    for k in range(2, n):
        img = list(range(n))
        img[0], img[1], img[k] = 1, k, 0
        gens[f"c{k + 1}"] = tuple(img)
    return _perm_group(gens, f"A{n}", DEFAULT_ORDER_CAP)


def quaternion() -> FiniteGroup:
    """The quaternion group Q8 = {±1, ±i, ±j, ±k}."""
    units = ["1", "i", "j", "k"]
    mult = {
        ("1", u): (1, u) for u in units
    }
    mult.update({(u, "1"): (1, u) for u in units})
    mult.update({
        ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
        ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
        ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j"),
    })

    def qmul(x, y):
        s, u = mult[(x[1], y[1])]
        return (x[0] * y[0] * s, u)

    def render(x):
        return ("-" if x[0] < 0 else "") + x[1]

    return group_from_elements({"i": (1, "i"), "j": (1, "j")}, qmul, (1, "1"), name="Q8", render=render)


def from_tuples(
    elements: np.ndarray,
    factors: Sequence[FiniteGroup],
    *,
    name: str = "G",
    generators: Sequence[tuple[str, int]] | None = None,
    names: Sequence[str] | None = None,
) -> FiniteGroup:
    """Subgroup of a direct product given by its full list of coordinate tuples.

    ``elements[0]`` must be the identity tuple; multiplication is coordinatewise.
    """
    E = np.asarray(elements, dtype=np.int64)
    n, t = E.shape
    radices = [f.order for f in factors]
    if len(radices) != t:
        raise GroupError("tuple width does not match the number of factors")
    use_int = math.prod(radices) < 2**62
    if use_int:
        base = np.ones(t, dtype=np.int64)
        for k in range(t - 2, -1, -1):
            base[k] = base[k + 1] * radices[k + 1]
        codes = E @ base
        order = np.argsort(codes)
        sc = codes[order]
        if len(np.unique(sc)) != n:
            raise GroupError("duplicate tuples")
    else:
        lookup = {row.tobytes(): i for i, row in enumerate(E)}
    table = np.empty((n, n), dtype=np.int32)
    for a in range(n):
        prod = np.empty((n, t), dtype=np.int64)
        for k, f in enumerate(factors):
            prod[:, k] = f.mul[E[a, k], E[:, k]]
        if use_int:
            c = prod @ base
            pos = np.searchsorted(sc, c)
            pos = np.minimum(pos, n - 1)
            if not np.array_equal(sc[pos], c):
                raise GroupError("element set is not closed under multiplication")
            table[a] = order[pos]
        else:
            try:
                table[a] = [lookup[row.tobytes()] for row in prod]
            except KeyError:
                raise GroupError("element set is not closed under multiplication") from None
    if names is None:
        names = ["(" + ", ".join(f.names[x] for f, x in zip(factors, row)) + ")" for row in E.tolist()]
    G = FiniteGroup(table, names, generators, name=name)
    G.tuples = E  # coordinate tuple of each element
    return G


def direct_product(*groups: FiniteGroup, labels: Sequence[str] | None = None, name: str | None = None) -> FiniteGroup:
    """Direct product; generators of factor k are renamed ``<gen><label_k>``."""
    if not groups:
        raise GroupError("empty direct product")
    if labels is None:
        labels = [str(k + 1) for k in range(len(groups))]
    orders = [g.order for g in groups]
    total = math.prod(orders)
    if total > DEFAULT_ORDER_CAP:
        raise CapExceeded(f"direct product order {total} exceeds cap {DEFAULT_ORDER_CAP}")
    grids = np.indices(orders).reshape(len(groups), -1).T
    gens = []
    for k, g in enumerate(groups):
        stride = math.prod(orders[k + 1:])
        for s, idx in g.generators:
            gens.append((f"{s}{labels[k]}", idx * stride))
    G = from_tuples(grids, groups, name=name or "x".join(g.name for g in groups), generators=gens)
    G.labels = list(labels)
    return G


def semidirect_product(
    C: FiniteGroup, Q: FiniteGroup, action: dict[int, dict[int, int]], *, name: str | None = None
) -> FiniteGroup:
    """C ⋉ Q with ``c q c^-1 = action_c(q)``.

    ``action`` maps each generator index of C to a dict sending each generator
    index of Q to its image. Elements are written ``c·q`` and indexed ``c*|Q| + q``.
    """
    auts = {}
    for c, imgs in action.items():
        hom = extend_to_homomorphism(Q, Q, imgs)
        if hom is None or not hom.is_injective():
            raise GroupError(f"action of C-generator {C.names[c]} is not an automorphism of Q")
        auts[c] = hom.image
    for _, c in C.generators:
        auts.setdefault(c, np.arange(Q.order, dtype=np.int32))
    # extend c -> Aut(Q) over C by BFS and check well-definedness
    alpha: dict[int, np.ndarray] = {0: np.arange(Q.order, dtype=np.int32)}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for _, c in C.generators:
            y = C.op(x, c)
            val = alpha[x][auts[c]]
            if y in alpha:
                if not np.array_equal(alpha[y], val):
                    raise GroupError("action is not a homomorphism C -> Aut(Q)")
            else:
                alpha[y] = val
                queue.append(y)
    A = np.stack([alpha[c] for c in range(C.order)])
    nq = Q.order
    n = C.order * nq
    cc = np.arange(n) // nq
    qq = np.arange(n) % nq
    # (c1 q1)(c2 q2) = c1 c2 · (c2^-1 q1 c2) q2
    c_prod = C.mul[cc[:, None], cc[None, :]]
    q_tw = A[C.inv[cc][None, :], qq[:, None]]
    q_prod = Q.mul[q_tw, qq[None, :]]
    table = c_prod * nq + q_prod
    names = []
    for c in range(C.order):
        for q in range(nq):
            if c == 0:
                names.append(Q.names[q])
            elif q == 0:
                names.append(C.names[c])
            else:
                names.append(f"{C.names[c]}·{Q.names[q]}")
    gens = [(s, c * nq) for s, c in C.generators] + [(s, q) for s, q in Q.generators]
    return FiniteGroup(table, names, gens, name=name or f"{C.name}⋉{Q.name}")


def quotient(G: FiniteGroup, N: Subgroup) -> tuple[FiniteGroup, Homomorphism]:
    """G/N with cosets represented by their minimal index."""
    if not N.is_normal(G):
        raise GroupError("quotient by a non-normal subgroup")
    coset_of = np.full(G.order, -1, dtype=np.int32)
    reps = []
    nm = np.array(N.members, dtype=np.int32)
    for g in range(G.order):
        if coset_of[g] < 0:
            coset_of[G.mul[g, nm]] = len(reps)
            reps.append(g)
    reps_arr = np.array(reps, dtype=np.int32)
    table = coset_of[G.mul[np.ix_(reps_arr, reps_arr)]]
    names = [G.names[r] if r else "1" for r in reps]
    gens = []
    seen = set()
    for s, g in G.generators:
        c = int(coset_of[g])
        if c and c not in seen:
            seen.add(c)
            gens.append((s, c))
    Qg = FiniteGroup(table, names, gens or None, name=f"{G.name}/N")
    return Qg, Homomorphism(G, Qg, coset_of)


def fibered_product(H: FiniteGroup, L: Subgroup, t: int, *, cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """{(h_1..h_t) in H^t : h_1 L = ... = h_t L}."""
    if not L.is_normal(H):
        raise GroupError("fibered product needs a normal subgroup")
    size = (H.order // L.order) * L.order**t
    if size > cap:
        raise CapExceeded(f"fibered product order {size} exceeds cap {cap}")
    # transversal of L in H
    seen = set()
    trans = []
    Lm = np.array(L.members)
    for h in range(H.order):
        if h not in seen:
            seen.update(H.mul[h, Lm].tolist())
            trans.append(h)
    rows = []
    grids = np.indices([L.order] * t).reshape(t, -1).T
    Ltuples = Lm[grids]
    for r in trans:
        rows.append(H.mul[r, Ltuples])
    E = np.concatenate(rows, axis=0)
    gens = []
    for s, g in H.generators:
        gens.append((f"diag({s})", None, np.full(t, g)))
    for k in range(t):
        for lg in L.generators:
            v = np.zeros(t, dtype=np.int64)
            v[k] = lg
            gens.append((f"{H.names[lg]}_{k + 1}", None, v))
    G = from_tuples(E, [H] * t, name=f"Fib({H.name},{t})", generators=_locate_gens(E, gens))
    return G


def _locate_gens(E: np.ndarray, gens) -> list[tuple[str, int]]:
    lookup = {tuple(row): i for i, row in enumerate(E.tolist())}
    return [(s, lookup[tuple(int(x) for x in v)]) for s, _, v in gens]


def central_product(H: FiniteGroup, K: FiniteGroup, iso: dict[int, int]) -> FiniteGroup:
    """(H x K) / {(c, iso(c)^-1)} for an isomorphism iso: Z(H) -> Z(K) (given on generators)."""
    ZH, ZK = centre(H), centre(K)
    if any(c not in ZH for c in iso) or any(v not in ZK for v in iso.values()):
        raise GroupError("iso must map central elements to central elements")
    zh, emb = ZH.as_group()
    zk, embk = ZK.as_group()
    pos_h = {int(m): i for i, m in enumerate(emb.image)}
    pos_k = {int(m): i for i, m in enumerate(embk.image)}
    hom = extend_to_homomorphism(zh, zk, {pos_h[c]: pos_k[v] for c, v in iso.items()})
    if hom is None or not hom.is_injective() or zh.order != zk.order or len(zh.closure(pos_h[c] for c in iso)) != zh.order:
        raise GroupError("iso is not an isomorphism of centres")
    D = direct_product(H, K, labels=["", "~"], name=f"{H.name}∘{K.name}")
    nk = K.order
    members = []
    for c in range(zh.order):
        hc = int(emb.image[c])
        kc = int(embk.image[hom.image[c]])
        members.append(hc * nk + K.inverse(kc))
    N = Subgroup(D, members)
    if not N.is_subgroup():
        raise GroupError("identification set is not a subgroup")
    Gq, _ = quotient(D, N)
    Gq.name = D.name
    return Gq


# ---------------------------------------------------------------------------
# structural queries


def centralizer(G: FiniteGroup, S: Subgroup | Iterable[int]) -> Subgroup:
    gens = S.generators if isinstance(S, Subgroup) else list(S)
    t = G.table
    members = [g for g in range(G.order) if all(t[g][s] == t[s][g] for s in gens)]
    return Subgroup(G, members)


def centre(G: FiniteGroup) -> Subgroup:
    return centralizer(G, [g for _, g in G.generators])


def normal_closure(G: FiniteGroup, elems: Iterable[int]) -> Subgroup:
    gens = set(elems)
    cur = G.closure(gens)
    while True:
        extra = {G.conj(x, g) for x in list(gens) for _, g in G.generators} - cur
        if not extra:
            return Subgroup(G, cur)
        gens |= extra
        cur = G.closure(gens)


def _product_of_normals(G: FiniteGroup, A: Subgroup, B: Subgroup) -> Subgroup:
    if A <= B:
        return B
    if B <= A:
        return A
    return G.subgroup(list(A.generators) + list(B.generators))


def normal_subgroups(G: FiniteGroup, cap: int = LATTICE_CAP) -> list[Subgroup]:
    """All normal subgroups: joins of normal closures of class representatives."""
    if G.order > cap:
        raise CapExceeded(f"|G| = {G.order} exceeds lattice cap {cap}")
    basic = []
    seen = set()
    for cls in G.conjugacy_classes:
        N = normal_closure(G, [cls[0]])
        if N not in seen:
            seen.add(N)
            basic.append(N)
    found = set(basic)
    frontier = list(basic)
    while frontier:
        new = []
        for A in frontier:
            for B in basic:
                J = _product_of_normals(G, A, B)
                if J not in found:
                    found.add(J)
                    new.append(J)
        frontier = new
    return sorted(found, key=lambda S: (S.order, S.members))


def all_subgroups(G: FiniteGroup, cap: int = LATTICE_CAP) -> list[Subgroup]:
    """All subgroups: closure of cyclic subgroups under joins."""
    if G.order > cap:
        raise CapExceeded(f"|G| = {G.order} exceeds lattice cap {cap}")
    cyclic_subs = {G.subgroup([g]) for g in range(G.order)}
    found = set(cyclic_subs)
    frontier = list(cyclic_subs)
    cyc = list(cyclic_subs)
    while frontier:
        new = []
        for A in frontier:
            for B in cyc:
                if B <= A:
                    continue
                J = A.join(B)
                if J not in found:
                    found.add(J)
                    new.append(J)
        frontier = new
    return sorted(found, key=lambda S: (S.order, S.members))


def monolith(G: FiniteGroup, cap: int = LATTICE_CAP) -> Subgroup:
    """Intersection of all nonidentity normal subgroups (trivial: not monolithic)."""
    nontrivial = [N for N in normal_subgroups(G, cap) if N.order > 1]
    if not nontrivial:
        return G.trivial()
    inter = set(nontrivial[0].members)
    for N in nontrivial[1:]:
        inter &= N.set
    return Subgroup(G, inter)


def p_component(A: Subgroup, p: int) -> Subgroup:
    """Elements of p-power order in an abelian subgroup."""
    if not A.is_abelian:
        raise GroupError("p_component needs an abelian subgroup")
    orders = A.parent.element_orders
    return Subgroup(A.parent, [a for a in A.members if _is_power_of(orders[a], p)])


def elementary_socle(A: Subgroup, p: int) -> Subgroup:
    """{x in Z_p(A) : x^p = 1}."""
    if not A.is_abelian:
        raise GroupError("elementary_socle needs an abelian subgroup")
    orders = A.parent.element_orders
    return Subgroup(A.parent, [a for a in A.members if orders[a] in (1, p)])


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# homomorphism search


def extend_to_homomorphism(
    source: FiniteGroup, target: FiniteGroup, images: dict[int, int], gens: Sequence[int] | None = None
) -> Homomorphism | None:
    """The homomorphism with the given generator images, or None if they do not extend.

    ``images`` must cover a generating set of the source.
    """
    partial = _extend_partial(source, target, list(images), images)
    if partial is None or len(partial) != source.order:
        return None
    img = np.empty(source.order, dtype=np.int32)
    for k, v in partial.items():
        img[k] = v
    return Homomorphism(source, target, img)


def _extend_partial(source: FiniteGroup, target: FiniteGroup, gens: Sequence[int], images: dict[int, int]):
    """Consistency check on the Cayley graph of <gens>; returns the map on <gens> or None."""
    ts, tt = source.table, target.table
    phi = {0: 0}
    queue = deque([0])
    pairs = [(g, images[g]) for g in gens]
    while queue:
        x = queue.popleft()
        fx = phi[x]
        rs, rt = ts[x], tt[fx]
        for g, ig in pairs:
            y = rs[g]
            v = rt[ig]
            w = phi.get(y)
            if w is None:
                phi[y] = v
                queue.append(y)
            elif w != v:
                return None
    return phi


def iter_homomorphisms(
    source: FiniteGroup,
    target: FiniteGroup,
    *,
    fixed: dict[int, int] | None = None,
    candidates: Sequence[int] | None = None,
    gens: Sequence[int] | None = None,
):
    """Yield every homomorphism source -> target extending ``fixed``.

    Backtracks over images of the remaining generators; each partial
    assignment is checked on the subgroup it generates before going deeper.
    """
    fixed = dict(fixed or {})
    if _extend_partial(source, target, list(fixed), fixed) is None:
        return
    base = list(fixed)
    cur = source.closure(base)
    extra = []
    pool = gens if gens is not None else sorted(range(source.order), key=lambda x: (-source.element_orders[x], x))
    for g in pool:
        if len(cur) == source.order:
            break
        if g not in cur:
            extra.append(g)
            cur = source.closure(base + extra)
    if len(cur) != source.order:
        raise GroupError("generator pool does not generate the source")
    cand = list(candidates) if candidates is not None else list(range(target.order))
    so, to = source.element_orders, target.element_orders

    def rec(depth: int, images: dict[int, int]):
        if depth == len(extra):
            phi = _extend_partial(source, target, base + extra, images)
            img = np.empty(source.order, dtype=np.int32)
            for k, v in phi.items():
                img[k] = v
            yield Homomorphism(source, target, img)
            return
        g = extra[depth]
        for h in cand:
            if so[g] % to[h]:
                continue
            images[g] = h
            if _extend_partial(source, target, base + extra[: depth + 1], images) is not None:
                yield from rec(depth + 1, images)
            del images[g]

    yield from rec(0, fixed)


def find_retraction(G: FiniteGroup, H: Subgroup, cap: int = RETRACTION_CAP) -> Homomorphism | None:
    """A retraction G -> H (as an endomorphism of G fixing H pointwise), or None.

    None is a certificate: the search is exhaustive. Raises CapExceeded when
    |G| is over ``cap`` (the answer is then unknown).
    """
    if H.parent is not G:
        raise GroupError("H must be a subgroup of G")
    if G.order > cap:
        raise CapExceeded(f"|G| = {G.order} exceeds retraction cap {cap}")
    fixed = {h: h for h in H.generators}
    for rho in iter_homomorphisms(G, G, fixed=fixed, candidates=H.members):
        return rho
    return None


def is_retraction(rho: Homomorphism, H: Subgroup) -> bool:
    return (
        rho.source is rho.target
        and rho.is_homomorphism()
        and all(rho(h) == h for h in H.members)
        and set(rho.image.tolist()) == H.set
        and np.array_equal(rho.image[rho.image], rho.image)
    )


def diagonal_subgroup(G: FiniteGroup, labels: Sequence[str]) -> Subgroup:
    """In a direct product built with ``labels``, the subgroup generated by
    products of same-named generators across all factors."""
    bases = {}
    for s, g in G.generators:
        for lab in labels:
            if lab and s.endswith(lab):
                bases.setdefault(s[: -len(lab)], {})[lab] = g
    gens = []
    for base, by_label in bases.items():
        if all(lab in by_label for lab in labels):
            gens.append(G.prod(by_label[lab] for lab in labels))
    if not gens:
        raise GroupError("no generator name is shared by all factors")
    return G.subgroup(gens)
