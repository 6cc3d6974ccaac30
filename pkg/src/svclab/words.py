"""Words, equations and word maps over finite groups.

Word syntax::

    x^2 y          juxtaposition or '*' for product
    (y x)^-15      parentheses with integer exponents
    [u, v]         commutator, u^-1 v^-1 u v by default
    x:[3]          typed variable (values restricted to x^3 = 1)
    1              the empty word

Equations are written ``WORD = COEFF``.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .groups import CapExceeded, FiniteGroup, GroupError, Subgroup

SEARCH_CAP = 10**8
MAP_CAP = 10**5
TABLE_CAP = 2 * 10**6
CHUNK = 1 << 18

LEFT_NORMED = "inverse-first"  # [u,v] = u^-1 v^-1 u v
RIGHT_NORMED = "inverse-last"  # [u,v] = u v u^-1 v^-1


class WordSyntaxError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line, self.column = line, col


class UnboundSymbol(KeyError):
    pass


@dataclass(frozen=True)
class Word:
    """A word as a tuple of (symbol, nonzero exponent) letters.

    ``types`` records typed variables as (name, d) pairs.
    """

    letters: tuple[tuple[str, int], ...] = ()
    types: tuple[tuple[str, int], ...] = ()

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        tmap = dict(self.types)
        parts = []
        for s, e in self.letters:
            name = f"{s}:[{tmap.pop(s)}]" if s in tmap else s
            parts.append(name if e == 1 else f"{name}^{e}")
        return " ".join(parts)

    def __mul__(self, other: Word) -> Word:
        return Word(_merge(self.letters + other.letters), _merge_types(self.types, other.types))

    def inverse(self) -> Word:
        return Word(tuple((s, -e) for s, e in reversed(self.letters)), self.types)

    def __pow__(self, k: int) -> Word:
        if k < 0:
            return self.inverse() ** (-k)
        return Word(_merge(self.letters * k), self.types)

    def symbols(self) -> list[str]:
        return list(dict.fromkeys(s for s, _ in self.letters))

    def variables(self, coefficients: Iterable[str] = ()) -> list[str]:
        coeff = set(coefficients)
        return [s for s in self.symbols() if s not in coeff]

    @property
    def type_map(self) -> dict[str, int]:
        return dict(self.types)

    def exponent_sum(self, symbol: str) -> int:
        return sum(e for s, e in self.letters if s == symbol)

    def reduced(self, coefficients: Iterable[str] = ()) -> Word:
        """Free reduction of adjacent letters; coefficient letters are kept as written."""
        return Word(_merge(self.letters, frozenset(coefficients)), self.types)

    def substitute(self, images: Mapping[str, Word]) -> Word:
        out: list[tuple[str, int]] = []
        types = dict(self.types)
        for s, e in self.letters:
            if s in images:
                w = images[s] ** e
                out.extend(w.letters)
                types.pop(s, None)
                types.update(w.type_map)
            else:
                out.append((s, e))
        return Word(_merge(tuple(out)), tuple(sorted(types.items())))


def _merge(letters, keep: frozenset[str] = frozenset()) -> tuple[tuple[str, int], ...]:
    out: list[list] = []
    for s, e in letters:
        if e == 0:
            continue
        if out and out[-1][0] == s and s not in keep:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([s, e])
    return tuple((s, e) for s, e in out)


def _merge_types(a, b):
    d = dict(a)
    for s, t in b:
        if d.get(s, t) != t:
            raise GroupError(f"variable {s} carries two types")
        d[s] = t
    return tuple(sorted(d.items()))


def letter(symbol: str, exponent: int = 1, type_: int | None = None) -> Word:
    types = ((symbol, type_),) if type_ is not None else ()
    return Word(((symbol, exponent),) if exponent else (), types)


def commutator(u: Word, v: Word, convention: str = LEFT_NORMED) -> Word:
    if convention == LEFT_NORMED:
        return u.inverse() * v.inverse() * u * v
    return u * v * u.inverse() * v.inverse()


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<typed>[A-Za-z_][A-Za-z0-9_']*:\[\s*\d+\s*\])|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<int>-?\d+)|(?P<op>[\^()\[\],*=]))"
)


class _Parser:
    def __init__(self, text: str, convention: str):
        self.text = text
        self.convention = convention
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise WordSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
            kind = m.lastgroup
            start = m.start(kind)
            self.toks.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            want = repr(value) if value else "a token"
            raise WordSyntaxError(f"expected {want}", self.text, tok[2])
        self.i += 1
        return tok

    def word(self) -> Word:
        w = Word()
        while True:
            kind, val, _ = self.peek()
            if kind in ("ident", "typed", "int") or val in ("(", "["):
                w = w * self.factor()
            elif val == "*":
                self.take("*")
            else:
                return w

    def factor(self) -> Word:
        base = self.atom()
        while self.peek()[1] == "^":
            self.take("^")
            kind, val, pos = self.take()
            if kind != "int":
                raise WordSyntaxError("exponent must be an integer", self.text, pos)
            base = base ** int(val)
        return base

    def atom(self) -> Word:
        kind, val, pos = self.take()
        if kind == "ident":
            return letter(val)
        if kind == "typed":
            name, d = val.split(":")
            d = int(d.strip("[] "))
            if d < 1:
                raise WordSyntaxError("type must be a positive integer", self.text, pos)
            return letter(name, 1, d)
        if kind == "int":
            if val != "1":
                raise WordSyntaxError("only the literal 1 may stand as a word", self.text, pos)
            return Word()
        if val == "(":
            w = self.word()
            self.take(")")
            return w
        if val == "[":
            u = self.word()
            self.take(",")
            v = self.word()
            self.take("]")
            return commutator(u, v, self.convention)
        raise WordSyntaxError(f"unexpected {val!r}", self.text, pos)


def parse(text: str, convention: str = LEFT_NORMED) -> Word:
    p = _Parser(text, convention)
    w = p.word()
    kind, val, pos = p.peek()
    if kind is not None:
        raise WordSyntaxError(f"unexpected {val!r}", text, pos)
    return w


def parse_equation(text: str, convention: str = LEFT_NORMED) -> tuple[Word, Word]:
    """``WORD = COEFF`` -> (lhs, rhs)."""
    p = _Parser(text, convention)
    lhs = p.word()
    p.take("=")
    rhs = p.word()
    kind, val, pos = p.peek()
    if kind is not None:
        raise WordSyntaxError(f"unexpected {val!r}", text, pos)
    return lhs, rhs


# ---------------------------------------------------------------------------
# evaluation


def evaluate(
    w: Word | str,
    G: FiniteGroup,
    assignment: Mapping[str, int] | None = None,
    coefficients: Mapping[str, int] | None = None,
) -> int:
    """Left-to-right evaluation of ``w`` in G."""
    if isinstance(w, str):
        w = parse(w)
    env = dict(coefficients or {})
    env.update(assignment or {})
    t = G.table
    r = 0
    for s, e in w.letters:
        if s not in env:
            raise UnboundSymbol(s)
        x = G.power(env[s], e) if e != 1 else env[s]
        r = t[r][x]
    return r


def evaluate_many(w: Word, G: FiniteGroup, values: Mapping[str, np.ndarray | int]) -> np.ndarray:
    """Vectorised evaluation: each symbol is bound to an array (or scalar) of indices."""
    n = None
    for v in values.values():
        if isinstance(v, np.ndarray):
            n = len(v)
            break
    r = np.zeros(n if n is not None else 1, dtype=np.int32)
    for s, e in w.letters:
        if s not in values:
            raise UnboundSymbol(s)
        x = G.power_map(e)[values[s]]
        r = G.mul[r, x]
    return r


def coefficient_values(G: FiniteGroup, coefficients: Mapping[str, int] | None) -> dict[str, int]:
    env = dict(G.generators)
    env.update(coefficients or {})
    return env


# ---------------------------------------------------------------------------
# solving


def _assignments(domains: Sequence[np.ndarray], start: int, stop: int) -> list[np.ndarray]:
    """Mixed-radix decoding, first variable most significant."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = []
    for dom in reversed(domains):
        idx, digit = np.divmod(idx, len(dom))
        out.append(dom[digit])
    return out[::-1]


def _search(
    w: Word,
    G: FiniteGroup,
    target: int,
    variables: Sequence[str],
    domains: Sequence[np.ndarray],
    fixed: Mapping[str, int],
    cap: int,
    find_all: bool = False,
):
    total = math.prod(len(d) for d in domains)
    if total > cap:
        raise CapExceeded(f"{total} assignments exceed search cap {cap}")
    if any(len(d) == 0 for d in domains):
        return None if not find_all else 0
    count = 0
    for start in range(0, total, CHUNK):
        stop = min(total, start + CHUNK)
        cols = _assignments(domains, start, stop)
        env = dict(fixed)
        env.update(zip(variables, cols))
        vals = evaluate_many(w, G, env)
        hits = np.nonzero(vals == target)[0]
        if find_all:
            count += len(hits)
        elif len(hits):
            k = hits[0]
            return {v: int(c[k]) for v, c in zip(variables, cols)}
    return count if find_all else None


def solve(
    eq: tuple[Word, Word | int],
    G: FiniteGroup,
    *,
    domain: Subgroup | Iterable[int] | None = None,
    coefficients: Mapping[str, int] | None = None,
    cap: int = SEARCH_CAP,
) -> dict[str, int] | None:
    """Exhaustive search for a solution of ``lhs = rhs`` with variables in ``domain``.

    Returns the first solution in mixed-radix order, or None when none exists
    over that domain. Raises CapExceeded if the search space is too large.
    Symbols naming generators of G (or listed in ``coefficients``) are
    constants; all other symbols are variables. ``rhs`` may be a word in the
    constants or an element index.
    """
    w, rhs = eq
    env = coefficient_values(G, coefficients)
    if isinstance(rhs, Word):
        rhs = evaluate(rhs, G, coefficients=env)
    variables = w.variables(env)
    dom = np.array(sorted(domain) if domain is not None else range(G.order), dtype=np.int32)
    domains = [dom] * len(variables)
    return _search(w, G, int(rhs), variables, domains, {s: env[s] for s in w.symbols() if s in env}, cap)


def typed_domain(G: FiniteGroup, d: int, within: Iterable[int] | None = None) -> np.ndarray:
    """Elements g with g^d = 1."""
    pm = G.power_map(d)
    base = np.array(sorted(within) if within is not None else range(G.order), dtype=np.int32)
    return base[pm[base] == 0]


def solve_multisort(
    eq: MultiSortEquation,
    G: FiniteGroup,
    *,
    domain: Subgroup | Iterable[int] | None = None,
    coefficients: Mapping[str, int] | None = None,
    cap: int = SEARCH_CAP,
) -> dict[str, int] | None:
    """Native multi-sort semantics: a variable of type [d] ranges over {g : g^d = 1}."""
    env = coefficient_values(G, coefficients)
    rhs = evaluate(eq.rhs, G, coefficients=env) if isinstance(eq.rhs, Word) else int(eq.rhs)
    variables = eq.lhs.variables(env)
    within = sorted(domain) if domain is not None else None
    domains = [typed_domain(G, eq.types.get(v, 0) or G.exponent, within) for v in variables]
    return _search(eq.lhs, G, rhs, variables, domains, {s: env[s] for s in eq.lhs.symbols() if s in env}, cap)


# ---------------------------------------------------------------------------
# multi-sort equations


@dataclass
class MultiSortEquation:
    """``lhs = rhs`` where lhs may contain typed variables x:[d]."""

    lhs: Word
    rhs: Word | int
    types: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        merged = dict(self.lhs.types)
        merged.update(self.types)
        self.types = merged


def admissible_types(n: int) -> list[int]:
    """{2} ∪ {d | n : gcd(d, n/d) = 1} with n' = n or n/2 as appropriate."""
    if n % 4 == 0:
        raise GroupError("n must not be a multiple of 4")
    out = {2}
    out.update(d for d in range(1, n + 1) if n % d == 0 and d % 2 == 1 and math.gcd(d, n // d) == 1)
    return sorted(out)


def half_order(n: int) -> int:
    """n' = n for odd n, n/2 for even n."""
    return n if n % 2 else n // 2


def translate_multisort(eq: MultiSortEquation, n: int) -> tuple[Word, Word | int]:
    """Replace each typed variable x:[d] by x^(2n'/d)."""
    if n % 4 == 0:
        raise GroupError("n must not be a multiple of 4")
    np_ = half_order(n)
    images = {}
    for v, d in eq.types.items():
        if d != 2 and not (np_ % d == 0 and math.gcd(d, np_ // d) == 1):
            raise GroupError(f"invalid type [{d}] for n = {n}")
        images[v] = letter(v, 2 * np_ // d)
    lhs = eq.lhs.substitute(images)
    return Word(lhs.letters), eq.rhs


# ---------------------------------------------------------------------------
# semidirect-product identity


def check_semidirect_identity(
    G: FiniteGroup, C: Subgroup, Q: Subgroup, d: int, n_prime: int | None = None
) -> dict:
    """Compare {g^(2n'/d)} with {g : g^d = 1} over all of G = C ⋉ Q."""
    report = {"d": d, "checked": False}
    problems = []
    if C.order * Q.order != G.order or len(C.set & Q.set) != 1 or not Q.is_normal(G):
        problems.append("G is not C ⋉ Q")
    if not C.is_abelian or any(G.element_orders[c] > 2 for c in C.members):
        problems.append("C is not an elementary abelian 2-group")
    if not Q.is_abelian or Q.exponent % 2 == 0:
        problems.append("Q is not abelian of odd exponent")
    n1 = n_prime if n_prime is not None else Q.exponent
    if n1 % Q.exponent:
        problems.append("exponent of Q does not divide n'")
    if not (d == 2 or (n1 % d == 0 and math.gcd(d, n1 // d) == 1)):
        problems.append(f"d = {d} is not admissible for n' = {n1}")
    if problems:
        report["problems"] = problems
        return report
    lhs = set(G.power_map(2 * n1 // d).tolist())
    rhs = set(np.nonzero(G.power_map(d) == 0)[0].tolist())
    report.update(checked=True, n_prime=n1, lhs=sorted(lhs), rhs=sorted(rhs), equal=lhs == rhs)
    return report


# ---------------------------------------------------------------------------
# word maps


class WordMapOverflow(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class WordMap:
    arity: int
    table: np.ndarray
    witness: Word

    def key(self) -> bytes:
        return self.table.tobytes()


def _small_dtype(n: int):
    return np.uint8 if n <= 256 else (np.uint16 if n <= 65536 else np.int32)


def coordinate_tables(G: FiniteGroup, s: int) -> list[np.ndarray]:
    size = G.order**s
    idx = np.arange(size, dtype=np.int64)
    cols = []
    for _ in range(s):
        idx, digit = np.divmod(idx, G.order)
        cols.append(digit)
    dt = _small_dtype(G.order)
    return [c.astype(dt) for c in cols[::-1]]


def variable_names(s: int) -> list[str]:
    return [f"t{k + 1}" for k in range(s)]


def enumerate_word_maps(
    G: FiniteGroup, s: int, *, map_cap: int = MAP_CAP, table_cap: int = TABLE_CAP
) -> list[WordMap]:
    """All s-variable word maps on G, each with a shortest witness word.

    BFS closure of the coordinate projections (and their inverses) under
    pointwise multiplication. Raises WordMapOverflow past ``map_cap`` maps.
    """
    if G.order**s > table_cap:
        raise WordMapOverflow(f"|G|^s = {G.order**s} exceeds table cap {table_cap}")
    proj = coordinate_tables(G, s)
    names = variable_names(s)
    dt = proj[0].dtype
    mul = G.mul.astype(dt) if G.order <= 65536 else G.mul
    inv = G.inv.astype(dt)
    steps = []
    for k in range(s):
        steps.append((proj[k], letter(names[k], 1)))
        steps.append((inv[proj[k]], letter(names[k], -1)))
    ident = np.zeros(G.order**s, dtype=dt)
    found = {ident.tobytes(): WordMap(s, ident, Word())}
    frontier = [found[ident.tobytes()]]
    while frontier:
        nxt = []
        for m in frontier:
            for tab, lw in steps:
                new = mul[m.table, tab]
                key = new.tobytes()
                if key not in found:
                    if len(found) >= map_cap:
                        raise WordMapOverflow(f"more than {map_cap} word maps for s = {s}")
                    wm = WordMap(s, new, m.witness * lw)
                    found[key] = wm
                    nxt.append(wm)
        frontier = nxt
    return list(found.values())


def _tuple_indices(G: FiniteGroup, members: Sequence[int], s: int) -> np.ndarray:
    m = np.array(members, dtype=np.int64)
    grids = np.indices([len(m)] * s).reshape(s, -1)
    idx = np.zeros(grids.shape[1], dtype=np.int64)
    for k in range(s):
        idx = idx * G.order + m[grids[k]]
    return idx


@dataclass
class ClosureReport:
    s_max: int
    closed_up_to: int | None
    per_arity: dict[int, str]
    witness: tuple[Word, int] | None = None
    complete: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def closed(self) -> bool:
        return self.witness is None

    def summary(self) -> str:
        bound = f"up to s_max = {self.s_max} variables"
        if self.witness is not None:
            w, h = self.witness
            return f"NOT verbally closed: {w} = <{h}> solvable in G, not in H ({bound})"
        tag = "" if self.complete else " (incomplete: sampled words)"
        return f"CLOSED {bound}{tag}; unbounded verbal closedness is not decided"


def check_word_map(G: FiniteGroup, H: Subgroup, wm: WordMap, h_idx: np.ndarray | None = None) -> int | None:
    """A witness h in φ(G^s) ∩ H \\ φ(H^s), or None."""
    if h_idx is None:
        h_idx = _tuple_indices(G, H.members, wm.arity)
    img_g = np.unique(wm.table)
    img_h = set(np.unique(wm.table[h_idx]).tolist())
    for h in img_g.tolist():
        if h in H and h not in img_h:
            return h
    return None


def decide_verbally_closed(
    G: FiniteGroup,
    H: Subgroup,
    s_max: int,
    *,
    map_cap: int = MAP_CAP,
    sample_words: int = 2000,
    sample_length: int = 12,
    seed: int = 0,
    extra_words: Sequence[Word] = (),
) -> ClosureReport:
    """Bounded verbal closedness: every word map with ≤ s_max variables.

    For each word map φ, H is closed for φ iff φ(G^s) ∩ H ⊆ φ(H^s).
    Arities whose closure overflows fall back to random words and are
    reported as incomplete.
    """
    rep = ClosureReport(s_max=s_max, closed_up_to=0, per_arity={})
    rng = np.random.default_rng(seed)
    for s in range(1, s_max + 1):
        h_idx = _tuple_indices(G, H.members, s) if G.order**s <= TABLE_CAP else None
        try:
            maps = enumerate_word_maps(G, s, map_cap=map_cap)
            mode = f"complete ({len(maps)} word maps)"
        except WordMapOverflow as exc:
            rep.complete = False
            rep.notes.append(f"s = {s}: {exc}; sampled {sample_words} random words instead")
            maps = None
            mode = "sampled"
        if maps is not None:
            for wm in maps:
                h = check_word_map(G, H, wm, h_idx)
                if h is not None:
                    rep.per_arity[s] = f"witness found ({mode})"
                    rep.witness = (wm.witness, h)
                    return rep
        else:
            names = variable_names(s)
            for _ in range(sample_words):
                L = int(rng.integers(1, sample_length + 1))
                w = Word(_merge(tuple((names[int(rng.integers(s))], int(rng.choice([-1, 1]))) for _ in range(L))))
                h = _check_sampled(G, H, w, s)
                if h is not None:
                    rep.per_arity[s] = "witness found (sampled)"
                    rep.witness = (w, h)
                    return rep
        rep.per_arity[s] = f"closed ({mode})"
        if maps is not None and rep.closed_up_to == s - 1:
            rep.closed_up_to = s
    for w in extra_words:
        h = _check_sampled(G, H, w, len(w.symbols()))
        if h is not None:
            rep.per_arity[len(w.symbols())] = "witness found (supplied word)"
            rep.witness = (w, h)
            return rep
    return rep


def _check_sampled(G: FiniteGroup, H: Subgroup, w: Word, s: int) -> int | None:
    syms = w.symbols()
    s = len(syms)
    if G.order**s > SEARCH_CAP:
        raise CapExceeded("word has too many variables for exhaustive image computation")
    full = np.arange(G.order, dtype=np.int32)
    img_g: set[int] = set()
    total = G.order**s
    for start in range(0, total, CHUNK):
        cols = _assignments([full] * s, start, min(total, start + CHUNK))
        img_g.update(np.unique(evaluate_many(w, G, dict(zip(syms, cols)))).tolist())
    Hm = np.array(H.members, dtype=np.int32)
    img_h: set[int] = set()
    total_h = len(Hm) ** s
    for start in range(0, total_h, CHUNK):
        cols = _assignments([Hm] * s, start, min(total_h, start + CHUNK))
        img_h.update(np.unique(evaluate_many(w, G, dict(zip(syms, cols)))).tolist())
    for h in sorted(img_g):
        if h in H and h not in img_h:
            return h
    return None


def word_map_of(w: Word, G: FiniteGroup, s: int | None = None) -> np.ndarray:
    syms = w.symbols()
    names = variable_names(s) if s is not None else syms
    proj = coordinate_tables(G, len(names))
    return evaluate_many(w, G, {n: p.astype(np.int32) for n, p in zip(names, proj)})
