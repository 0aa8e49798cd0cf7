"""Surface groups: words, conjugacy classes, Fuchsian images and balls.

A word is a tuple of non-zero integers; ``i > 0`` is the ``i``-th
generator and ``-i`` its inverse.  Letters are ordered ``a < A < b < B``
(generator index first, positive before negative), words by length and
then lexicographically.

For presentations with a relator (the closed genus-2 surface) word
reduction also runs Dehn's algorithm, and conjugacy classes are
canonicalized by a bounded search over half-relator swaps.  Free groups
get exact answers.
"""

from __future__ import annotations

import json
import math
import os
import re
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import ResourceLimit, UnknownGenerator, UnknownSurface, ValidationError

Word = tuple

DEFAULT_ELEMENT_CAP = 5_000_000


def element_cap() -> int:
    raw = os.environ.get("CURRENTKIT_ELEMENT_CAP")
    if raw is None:
        return DEFAULT_ELEMENT_CAP
    try:
        cap = int(float(raw))
    except ValueError as exc:
        raise ValidationError(f"CURRENTKIT_ELEMENT_CAP={raw!r} is not a number") from exc
    if cap < 1:
        raise ValidationError("CURRENTKIT_ELEMENT_CAP must be positive")
    return cap


# ---------------------------------------------------------------- words


def letter_key(x: int) -> int:
    return 2 * (abs(x) - 1) + (1 if x < 0 else 0)


def word_key(w: Sequence[int]) -> tuple:
    return (len(w), tuple(letter_key(x) for x in w))


def inverse(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def free_reduce(w: Iterable[int]) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def free_cyclic_reduce(w: Sequence[int]) -> Word:
    w = free_reduce(w)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return tuple(w[i : j + 1])


def power(w: Sequence[int], k: int) -> Word:
    base = tuple(w) if k >= 0 else inverse(w)
    return free_reduce(base * abs(k))


def rotations(w: Sequence[int]):
    w = tuple(w)
    for i in range(len(w)):
        yield w[i:] + w[:i]


def period(w: Sequence[int]) -> int:
    """Smallest ``p`` dividing ``len(w)`` with ``w`` invariant under rotation by ``p``."""
    n = len(w)
    w = tuple(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[p:] + w[:p] == w:
            return p
    return n


def _min_rotation(w: Word) -> Word:
    if not w:
        return w
    return min(rotations(w), key=word_key)


# ---------------------------------------------------------- Dehn machinery


class _DehnTables:
    """Lookup tables derived from the relators of a one-relator surface group."""

    def __init__(self, relators: Sequence[Word]):
        cyc = set()
        for r in relators:
            r = free_cyclic_reduce(r)
            for rr in (r, inverse(r)):
                cyc.update(rotations(rr))
        self.cyclic = sorted(cyc, key=word_key)
        self.rel_len = max((len(r) for r in self.cyclic), default=0)
        # pieces longer than half a relator -> shorter complement
        self.shorten: dict[Word, Word] = {}
        # pieces of exactly half a relator -> the other half
        self.swap: dict[Word, list[Word]] = {}
        for rho in self.cyclic:
            n = len(rho)
            for k in range(n // 2, n + 1):
                s, t = rho[:k], rho[k:]
                repl = inverse(t)
                if 2 * k > n:
                    prev = self.shorten.get(s)
                    if prev is None or word_key(repl) < word_key(prev):
                        self.shorten[s] = repl
                elif 2 * k == n:
                    self.swap.setdefault(s, [])
                    if repl not in self.swap[s]:
                        self.swap[s].append(repl)
        self.lengths = sorted({len(s) for s in self.shorten}, reverse=True)


def _dehn_pass(w: Word, tables: _DehnTables) -> Word | None:
    for L in tables.lengths:
        for i in range(0, len(w) - L + 1):
            repl = tables.shorten.get(w[i : i + L])
            if repl is not None:
                return w[:i] + repl + w[i + L :]
    return None


def dehn_reduce(w: Sequence[int], tables: _DehnTables) -> Word:
    w = free_reduce(w)
    while True:
        nxt = _dehn_pass(w, tables)
        if nxt is None:
            return w
        w = free_reduce(nxt)


def cyclic_dehn_reduce(w: Sequence[int], tables: _DehnTables) -> Word:
    w = free_cyclic_reduce(dehn_reduce(w, tables))
    changed = True
    while changed and w:
        changed = False
        for i in range(len(w)):
            rot = w[i:] + w[:i]
            red = free_cyclic_reduce(dehn_reduce(rot, tables))
            if len(red) < len(w):
                w = red
                changed = True
                break
    return w


def _half_swaps(w: Word, tables: _DehnTables):
    """Cyclic words obtained from ``w`` by one half-relator swap."""
    n = len(w)
    half = tables.rel_len // 2
    if n < half:
        return
    for i in range(n):
        rot = w[i:] + w[:i]
        for repl in tables.swap.get(rot[:half], ()):
            yield repl + rot[half:]


def _canonical_with_relators(w: Word, tables: _DehnTables, max_states: int = 4000) -> Word:
    start = cyclic_dehn_reduce(w, tables)
    if not start:
        return start
    best_len = len(start)
    seen = {_min_rotation(start)}
    queue = deque(seen)
    while queue and len(seen) < max_states:
        cur = queue.popleft()
        for nxt in _half_swaps(cur, tables):
            red = cyclic_dehn_reduce(nxt, tables)
            if not red:
                return red
            if len(red) < best_len:
                # found a shorter representative: restart from it
                return _canonical_with_relators(red, tables, max_states)
            if len(red) > best_len:
                continue
            key = _min_rotation(red)
            if key not in seen:
                seen.add(key)
                queue.append(key)
    return min(seen, key=word_key)


# ------------------------------------------------------------ presentation


@dataclass(frozen=True)
class ConjClass:
    """Canonical representative of a conjugacy class (see :func:`canonical_conj`)."""

    word: Word

    def __len__(self):
        return len(self.word)

    def __lt__(self, other: "ConjClass"):
        return word_key(self.word) < word_key(other.word)


@dataclass(eq=False)
class SurfacePresentation:
    """Generators with their matrices, relators and peripheral words."""

    name: str
    generators: list[str]
    matrices: list[np.ndarray]
    relators: list[Word] = field(default_factory=list)
    peripherals: list[Word] = field(default_factory=list)
    genus: int = 0
    punctures: int = 0
    # fundamental polygon paired by the generators, used for exact counts:
    # {"center": [x, y]} for a Dirichlet domain, or {"ideal_vertices": [...]}
    domain: dict | None = None

    def __post_init__(self):
        if len(self.generators) != len(self.matrices):
            raise ValidationError("one matrix per generator is required")
        if len(set(self.generators)) != len(self.generators):
            raise ValidationError("duplicate generator names")
        for g in self.generators:
            if not re.fullmatch(r"[a-z][a-z0-9_]*", g):
                raise ValidationError(f"generator name {g!r} must be lower case")
        mats = []
        for g, m in zip(self.generators, self.matrices):
            m = np.asarray(m, dtype=float)
            if m.shape != (2, 2):
                raise ValidationError(f"matrix for {g} is not 2x2")
            det = float(np.linalg.det(m))
            if det <= 0:
                raise ValidationError(f"matrix for {g} has determinant {det}")
            mats.append(m / math.sqrt(det))
        self.matrices = mats
        self._inv = [np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) for m in mats]
        if 2 * self.genus - 2 + self.punctures <= 0:
            raise ValidationError("surface is not hyperbolic of finite area")
        self.relators = [free_cyclic_reduce(r) for r in self.relators]
        for r in self.relators:
            self._check_word(r)
            m = self.evaluate(r)
            if not (np.allclose(m, np.eye(2), atol=1e-8) or np.allclose(m, -np.eye(2), atol=1e-8)):
                raise ValidationError(f"relator {self.format(r)} is not the identity")
        for p in self.peripherals:
            self._check_word(p)
            if abs(abs(np.trace(self.evaluate(p))) - 2.0) > 1e-8:
                raise ValidationError(f"peripheral {self.format(p)} is not parabolic")
        self._dehn = _DehnTables(self.relators) if self.relators else None
        self._canon_cache: dict[Word, Word] = {}

    # -- basic word handling
    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def is_free(self) -> bool:
        return not self.relators

    @property
    def letters(self) -> list[int]:
        out = []
        for i in range(1, self.rank + 1):
            out.extend((i, -i))
        return out

    def _check_word(self, w: Sequence[int]):
        for x in w:
            if not isinstance(x, (int, np.integer)) or x == 0 or abs(x) > self.rank:
                raise UnknownGenerator(f"letter {x!r} is not a generator of {self.name}")

    def letter_name(self, x: int) -> str:
        name = self.generators[abs(x) - 1]
        return name if x > 0 else name[0].upper() + name[1:]

    def format(self, w: Sequence[int]) -> str:
        if not w:
            return "e"
        sep = "" if all(len(g) == 1 for g in self.generators) else " "
        return sep.join(self.letter_name(x) for x in w)

    def parse(self, text) -> Word:
        """Parse ``"aB"``, ``"a b^-1"``, ``"a1 b1 A1 B1"``, ``"(ab)^3"`` and friends.

        Lists of letter names or signed integers are accepted as well.
        """
        if isinstance(text, ConjClass):
            return text.word
        if isinstance(text, (list, tuple)):
            if all(isinstance(x, (int, np.integer)) for x in text):
                w = tuple(int(x) for x in text)
                self._check_word(w)
                return w
            return free_reduce(sum((self.parse(x) for x in text), ()))
        return _WordParser(self, str(text)).parse()

    # -- reduction and conjugacy
    def reduce(self, w: Sequence[int]) -> Word:
        self._check_word(w)
        if self._dehn is None:
            return free_reduce(w)
        return dehn_reduce(w, self._dehn)

    def cyclic_reduce(self, w: Sequence[int]) -> Word:
        self._check_word(w)
        if self._dehn is None:
            return free_cyclic_reduce(w)
        return cyclic_dehn_reduce(w, self._dehn)

    def canonical(self, w: Sequence[int]) -> ConjClass:
        self._check_word(w)
        w = tuple(int(x) for x in w)
        hit = self._canon_cache.get(w)
        if hit is None:
            if self._dehn is None:
                c = free_cyclic_reduce(w)
                hit = min(_min_rotation(c), _min_rotation(inverse(c)), key=word_key)
            else:
                a = _canonical_with_relators(w, self._dehn)
                b = _canonical_with_relators(inverse(w), self._dehn)
                hit = min(a, b, key=word_key)
            self._canon_cache[w] = hit
        return ConjClass(hit)

    def equal(self, u: Sequence[int], v: Sequence[int]) -> bool:
        """Word problem: do ``u`` and ``v`` represent the same element?"""
        return not self.reduce(tuple(u) + inverse(v))

    # -- matrices
    def generator_matrix(self, x: int) -> np.ndarray:
        return self.matrices[x - 1] if x > 0 else self._inv[-x - 1]

    def evaluate(self, w: Sequence[int]) -> np.ndarray:
        self._check_word(w)
        m = np.eye(2)
        for x in w:
            m = m @ self.generator_matrix(x)
        return m

    def trace(self, w: Sequence[int]) -> float:
        return float(np.trace(self.evaluate(w)))

    def is_hyperbolic(self, w: Sequence[int], tol: float = 1e-9) -> bool:
        return abs(self.trace(w)) > 2.0 + tol

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "generators": list(self.generators),
            "matrices": {g: m.tolist() for g, m in zip(self.generators, self.matrices)},
            "relators": [self.format(r) for r in self.relators],
            "peripherals": [self.format(p) for p in self.peripherals],
            "genus": self.genus,
            "punctures": self.punctures,
            "domain": self.domain,
        }


_SUPERSCRIPT = str.maketrans("⁻⁰¹²³⁴⁵⁶⁷⁸⁹", "-0123456789")
_SUPERSCRIPT_RUN = re.compile("[⁻⁰¹²³⁴⁵⁶⁷⁸⁹]+")


class _WordParser:
    def __init__(self, S: SurfacePresentation, text: str):
        self.S = S
        self.text = _SUPERSCRIPT_RUN.sub(lambda m: "^" + m.group(0).translate(_SUPERSCRIPT), text)
        self.text = self.text.replace("**", "^")
        self.pos = 0
        names = {}
        for i, g in enumerate(S.generators, start=1):
            names[g] = i
            names[g[0].upper() + g[1:]] = -i
        self.names = sorted(names.items(), key=lambda kv: -len(kv[0]))

    def error(self, msg):
        raise UnknownGenerator(f"{msg} at position {self.pos} in {self.text!r}")

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t,*·.":
            self.pos += 1

    def parse(self) -> Word:
        w = self.sequence()
        self.skip()
        if self.pos != len(self.text):
            self.error("unexpected character")
        return free_reduce(w)

    def sequence(self) -> Word:
        out: Word = ()
        while True:
            self.skip()
            if self.pos >= len(self.text) or self.text[self.pos] == ")":
                return out
            out = out + self.factor()

    def factor(self) -> Word:
        t = self.text
        if t[self.pos] == "(":
            self.pos += 1
            inner = self.sequence()
            if self.pos >= len(t) or t[self.pos] != ")":
                self.error("missing ')'")
            self.pos += 1
            base = inner
        elif t[self.pos] in "e1" and (self.pos + 1 == len(t) or not t[self.pos + 1].isalnum()):
            self.pos += 1
            base = ()
        else:
            for name, idx in self.names:
                if t.startswith(name, self.pos):
                    self.pos += len(name)
                    base = (idx,)
                    break
            else:
                self.error("unknown generator")
        m = re.compile(r"\s*\^\s*\(?\s*(-?\d+)\s*\)?").match(t, self.pos)
        if m:
            self.pos = m.end()
            return power(base, int(m.group(1)))
        return base


# ------------------------------------------------------------ built-ins


def _octagon_matrices() -> list[np.ndarray]:
    h = 1.0 + 1.0 / math.sqrt(2.0)
    s = math.sqrt(1.0 + math.sqrt(2.0))
    t = math.sqrt(2.0) * s
    a1 = [[h + s, h + s], [-(h - s), h - s]]
    b1 = [[t - h, h], [-h, -h - t]]
    a2 = [[h - s, h - s], [-(h + s), h + s]]
    b2 = [[-h - t, h], [-h, t - h]]
    return [np.array(m) for m in (a1, b1, a2, b2)]


BUILTIN_NAMES = ("punctured_torus", "sphere3", "genus2_octagon")


@lru_cache(maxsize=None)
def builtin(name: str) -> SurfacePresentation:
    """One of ``punctured_torus``, ``sphere3`` or ``genus2_octagon``."""
    if name == "punctured_torus":
        return SurfacePresentation(
            name=name,
            generators=["a", "b"],
            matrices=[np.array([[1.0, 1.0], [1.0, 2.0]]), np.array([[1.0, -1.0], [-1.0, 2.0]])],
            peripherals=[(1, 2, -1, -2)],
            genus=1,
            punctures=1,
            domain={"ideal_vertices": [-1.0, 0.0, 1.0, "inf"]},
        )
    if name == "sphere3":
        return SurfacePresentation(
            name=name,
            generators=["a", "b"],
            matrices=[np.array([[1.0, 2.0], [0.0, 1.0]]), np.array([[1.0, 0.0], [-2.0, 1.0]])],
            peripherals=[(1,), (2,), (1, 2)],
            genus=0,
            punctures=3,
            domain={"ideal_vertices": [-1.0, 0.0, 1.0, "inf"]},
        )
    if name == "genus2_octagon":
        return SurfacePresentation(
            name=name,
            generators=["a1", "b1", "a2", "b2"],
            matrices=_octagon_matrices(),
            relators=[(1, 2, -1, -2, 3, 4, -3, -4)],
            genus=2,
            punctures=0,
            domain={"center": [0.0, 1.0]},
        )
    raise UnknownSurface(f"unknown surface {name!r}; choose from {', '.join(BUILTIN_NAMES)}")


def free_group(rank: int = 2) -> SurfacePresentation:
    """A free group with arbitrary hyperbolic matrices, for combinatorial use."""
    if rank == 2:
        S = builtin("punctured_torus")
        return SurfacePresentation("free2", ["a", "b"], S.matrices, genus=0, punctures=3)
    raise ValidationError("only rank 2 is provided")


def load_presentation(data) -> SurfacePresentation:
    """Build a presentation from a JSON document (dict, JSON text or file path)."""
    if isinstance(data, (str, os.PathLike)):
        text = str(data)
        if os.path.exists(text):
            with open(text, encoding="utf-8") as fh:
                data = json.load(fh)
        else:
            data = json.loads(text)
    try:
        gens = list(data["generators"])
        mats_in = data["matrices"]
        mats = [mats_in[g] for g in gens] if isinstance(mats_in, dict) else list(mats_in)
        S = SurfacePresentation(
            name=data.get("name", "custom"),
            generators=gens,
            matrices=mats,
            genus=int(data.get("genus", 0)),
            punctures=int(data.get("punctures", 0)),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed presentation: {exc}") from exc
    relators = [S.parse(r) for r in data.get("relators", [])]
    peripherals = [S.parse(p) for p in data.get("peripherals", [])]
    return SurfacePresentation(
        S.name, gens, S.matrices, relators, peripherals, S.genus, S.punctures, data.get("domain")
    )


def get_surface(name_or_presentation) -> SurfacePresentation:
    if isinstance(name_or_presentation, SurfacePresentation):
        return name_or_presentation
    return builtin(str(name_or_presentation))


# ------------------------------------------------------- module-level API


def reduce(w: Sequence[int], S: SurfacePresentation | None = None) -> Word:
    return free_reduce(w) if S is None else S.reduce(w)


def cyclic_reduce(w: Sequence[int], S: SurfacePresentation | None = None) -> Word:
    return free_cyclic_reduce(w) if S is None else S.cyclic_reduce(w)


def canonical_conj(w, S: SurfacePresentation | None = None) -> ConjClass:
    if isinstance(w, ConjClass):
        return w
    if S is None:
        c = free_cyclic_reduce(w)
        return ConjClass(min(_min_rotation(c), _min_rotation(inverse(c)), key=word_key))
    return S.canonical(w)


def evaluate(w: Sequence[int], S: SurfacePresentation) -> np.ndarray:
    return S.evaluate(w)


def primitive_root(c: ConjClass) -> tuple[Word, int]:
    """Root word and exponent ``k`` with ``c = root^k`` as cyclic words."""
    w = c.word
    if not w:
        return w, 1
    p = period(w)
    return w[:p], len(w) // p


def is_peripheral(w, S: SurfacePresentation) -> bool:
    if not S.peripherals:
        return False
    c = S.canonical(w.word if isinstance(w, ConjClass) else w).word
    if not c:
        return False
    return peripheral_power(c, S) is not None


def peripheral_power(w: Sequence[int], S: SurfacePresentation) -> tuple[int, int] | None:
    """``(index, k)`` when ``w`` is conjugate to ``peripherals[index]^k``."""
    c = S.cyclic_reduce(w)
    if not c:
        return None
    target = _min_rotation(c)
    for idx, p in enumerate(S.peripherals):
        pc = free_cyclic_reduce(p)
        if not pc or len(c) % len(pc):
            continue
        k = len(c) // len(pc)
        for e in (k, -k):
            if _min_rotation(power(pc, e)) == target:
                return idx, e
    return None


# ---------------------------------------------------------------- balls


def _matrix_key(m: np.ndarray) -> tuple:
    flat = m.ravel()
    for x in flat:
        if abs(x) > 1e-6:
            if x < 0:
                flat = -flat
            break
    return tuple(int(round(v * 1e6)) for v in flat)


@dataclass
class GroupBall:
    """All distinct elements of word length at most ``radius``."""

    radius: int
    words: list[Word]
    matrices: np.ndarray
    surface: SurfacePresentation
    index: dict = field(repr=False, default_factory=dict)

    def __len__(self):
        return len(self.words)

    def lookup(self, w: Sequence[int]) -> int | None:
        """Position of the element represented by ``w`` or ``None``."""
        S = self.surface
        if S.is_free:
            return self.index.get(free_reduce(w))
        red = S.reduce(w)
        hit = self.index.get(red)
        if hit is not None:
            return hit
        if len(red) > self.radius + 4:
            return None
        return self._keys.get(_matrix_key(S.evaluate(red)))


def ball(S: SurfacePresentation, R: int, cap: int | None = None) -> GroupBall:
    """Breadth-first enumeration of the Cayley ball of radius ``R``."""
    if R < 0:
        raise ValidationError("radius must be non-negative")
    cap = element_cap() if cap is None else cap
    return _ball_cached(S, int(R), int(cap))


@lru_cache(maxsize=32)
def _ball_cached(S: SurfacePresentation, R: int, cap: int) -> GroupBall:
    letters = S.letters
    gens = np.stack([S.generator_matrix(x) for x in letters])
    words: list[Word] = [()]
    mats = [np.eye(2)]
    index = {(): 0}
    keys = {_matrix_key(np.eye(2)): 0}
    frontier = [0]
    for _level in range(R):
        new_frontier = []
        parent_m = np.stack([mats[i] for i in frontier]) if frontier else np.zeros((0, 2, 2))
        prod = np.einsum("pij,gjk->pgik", parent_m, gens)
        for pi, parent in enumerate(frontier):
            pw = words[parent]
            for gi, x in enumerate(letters):
                if pw and pw[-1] == -x:
                    continue
                w = pw + (x,)
                m = prod[pi, gi]
                if not S.is_free:
                    red = S.reduce(w)
                    if len(red) < len(w):
                        continue
                    key = _matrix_key(m)
                    other = keys.get(key)
                    if other is not None and S.equal(words[other], w):
                        continue
                    keys[key] = len(words)
                index[w] = len(words)
                words.append(w)
                mats.append(m)
                new_frontier.append(len(words) - 1)
                if len(words) > cap:
                    raise ResourceLimit(
                        f"ball of radius {R} on {S.name} exceeds the element cap {cap}"
                    )
        frontier = new_frontier
    gb = GroupBall(R, words, np.stack(mats), S, index)
    gb._keys = keys
    return gb


def coset_reps(S: SurfacePresentation, R: int, w) -> list[Word]:
    """One minimal representative per coset ``eta <w>`` meeting the ``R``-ball."""
    w = w.word if isinstance(w, ConjClass) else tuple(w)
    w = S.reduce(w)
    if not w:
        raise ValidationError("coset_reps needs a non-trivial element")
    B = ball(S, R)
    wc = free_cyclic_reduce(w)
    kmax = (2 * R) // max(len(wc), 1) + 3
    taken = [False] * len(B)
    reps = []
    for i, eta in enumerate(B.words):  # ball order is (length, lex) per level
        if taken[i]:
            continue
        reps.append(eta)
        taken[i] = True
        for sign in (1, -1):
            step = w if sign == 1 else inverse(w)
            cur = eta
            for _ in range(kmax):
                cur = S.reduce(cur + step)
                j = B.lookup(cur)
                if j is not None:
                    taken[j] = True
    return sorted(reps, key=word_key)
