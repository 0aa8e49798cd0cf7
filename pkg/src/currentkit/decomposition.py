"""Special curves, pieces and the trichotomy for discrete currents.

Everything here is relative to a finite candidate set: the primitive,
non-peripheral classes of word length at most ``R``.  Reports carry that
radius.

A simple candidate ``c`` with ``i(mu, c) = 0`` is *special* when every
candidate crossing ``c`` meets the rest of ``mu``: for an atom of ``mu``
its own weight is left out of that test, so a lone simple atom is never
special.  Atoms are grouped into pieces by the support graph and merged
whenever a bridge candidate crosses both groups without crossing a special
curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .currents import (
    DEFAULT_RADIUS,
    DiscreteCurrent,
    class_intersection,
    enumerate_classes,
    intersection_number,
    self_intersection,
)
from .errors import ValidationError
from .groups import ConjClass, SurfacePresentation, word_key
from .parallel import parallel_map

DEFAULT_CANDIDATE_RADIUS = 4
DEFAULT_BRIDGE_RADIUS = 4


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        a, b = self.find(i), self.find(j)
        if a != b:
            self.parent[max(a, b)] = min(a, b)

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return sorted(out.values(), key=lambda g: g[0])


# ------------------------------------------------------------ candidate scan


class _Scan:
    """Per-atom intersection counts of ``mu`` against every candidate."""

    def __init__(self, mu: DiscreteCurrent, S: SurfacePresentation, R: int, count_radius: int, threads: int):
        self.mu, self.S, self.R, self.count_radius = mu, S, R, count_radius
        self.threads = threads
        self.atoms = mu.classes
        self.weights = np.array([w for _, w in mu.atoms])
        self.candidates = enumerate_classes(S, R, non_peripheral=True, primitive=True)
        self.index = {c: i for i, c in enumerate(self.candidates)}
        rows = parallel_map(self._row, self.candidates, threads)
        counts = [r[0] for r in rows]
        self.counts = np.array(counts, dtype=np.int64).reshape(len(self.candidates), len(self.atoms))
        self.values = self.counts @ self.weights
        self.stabilized = all(r[1] for r in rows)
        self._si: dict[ConjClass, int] = {}
        self._cross: dict[tuple, int] = {}

    def _row(self, c):
        res = intersection_number(self.mu, c, self.S, self.count_radius)
        return [n for _, n in res.per_atom], res.stabilized

    def self_int(self, c: ConjClass) -> int:
        if c not in self._si:
            self._si[c] = self_intersection(c, self.S, self.count_radius)
        return self._si[c]

    def is_simple(self, c: ConjClass) -> bool:
        return self.self_int(c) == 0

    def cross(self, c1: ConjClass, c2: ConjClass) -> int:
        key = (c1, c2) if word_key(c1.word) <= word_key(c2.word) else (c2, c1)
        if key not in self._cross:
            self._cross[key] = class_intersection(self.S, key[0], key[1], self.count_radius)
        return self._cross[key]

    def atom_index(self, c: ConjClass) -> int | None:
        try:
            return self.atoms.index(c)
        except ValueError:
            return None

    def count_with_atom(self, c: ConjClass, j: int) -> int:
        i = self.index.get(c)
        if i is not None:
            return int(self.counts[i, j])
        return self.cross(c, self.atoms[j])


_SCANS: dict = {}


def _scan(mu, S, R, count_radius, threads=1) -> _Scan:
    key = (id(S), mu.atoms, R, count_radius)
    hit = _SCANS.get(key)
    if hit is None or hit.S is not S:
        hit = _Scan(mu, S, R, count_radius, threads)
        _SCANS.clear()
        _SCANS[key] = hit
    return hit


# ----------------------------------------------------------- support graph


@dataclass
class SupportGraph:
    vertices: list  # atom classes
    edges: list  # (i, j, intersection) with i < j and intersection > 0
    self_loops: list  # indices of non-simple atoms
    components: list  # lists of vertex indices


def support_graph(mu: DiscreteCurrent, S: SurfacePresentation | None = None, R: int = DEFAULT_RADIUS) -> SupportGraph:
    """Atoms joined when their classes intersect."""
    S = S or mu.surface
    if not mu.atoms:
        raise ValidationError("the current has no atoms")
    atoms = mu.classes
    n = len(atoms)
    edges, loops = [], []
    for i in range(n):
        if self_intersection(atoms[i], S, R) > 0:
            loops.append(i)
        for j in range(i + 1, n):
            k = class_intersection(S, atoms[i], atoms[j], R)
            if k > 0:
                edges.append((i, j, k))
    rows = [e[0] for e in edges]
    cols = [e[1] for e in edges]
    adj = coo_matrix((np.ones(len(edges)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(adj, directed=False)
    comps: dict[int, list[int]] = {}
    for v, lab in enumerate(labels):
        comps.setdefault(int(lab), []).append(v)
    components = sorted(comps.values(), key=lambda g: g[0])
    return SupportGraph(atoms, edges, loops, components)


# ----------------------------------------------------------- special curves


def _special_from_scan(sc: _Scan) -> list[ConjClass]:
    zero_mask = sc.values == 0
    zero_idx = [i for i in np.nonzero(zero_mask)[0]]
    zero_classes = [sc.candidates[i] for i in zero_idx]
    out = []
    for i in zero_idx:
        c = sc.candidates[i]
        if not sc.is_simple(c):
            continue
        j = sc.atom_index(c)
        if j is not None:
            crossers = sc.counts[:, j] > 0
            rest = sc.values - sc.weights[j] * sc.counts[:, j]
            if np.all(rest[crossers] > 0):
                out.append(c)
            continue
        if not any(c2 != c and sc.cross(c, c2) > 0 for c2 in zero_classes):
            out.append(c)
    return out


def special_curves(
    mu: DiscreteCurrent,
    S: SurfacePresentation | None = None,
    R: int = DEFAULT_CANDIDATE_RADIUS,
    count_radius: int = DEFAULT_RADIUS,
    threads: int = 1,
) -> list[ConjClass]:
    """Simple candidates of length ``<= R`` that cut ``mu`` (see module docstring)."""
    S = S or mu.surface
    if R < 1:
        raise ValidationError("candidate radius must be at least 1")
    return _special_from_scan(_scan(mu, S, R, count_radius, threads))


# ------------------------------------------------------------ decomposition


@dataclass
class Piece:
    atoms: list  # (ConjClass, weight)
    generators: list  # classes spanning the piece
    label: str  # "zero", "lamination" or "positive_systole"
    systole_lower_bound: float | None
    boundary: list  # special curves adjacent to the piece
    interior_zero: list = field(default_factory=list)  # zero candidates inside an atom piece


@dataclass
class DecompositionReport:
    special_curves: list
    atoms_on_special: list  # (ConjClass, weight)
    pieces: list
    candidate_radius: int
    count_radius: int
    stabilized: bool
    caveats: list

    @property
    def labels(self) -> list[str]:
        return [p.label for p in self.pieces]


def _crosses_special(sc: _Scan, c: ConjClass, specials: Sequence[ConjClass]) -> bool:
    return any(c != e and sc.cross(c, e) > 0 for e in specials)


def decompose(
    mu: DiscreteCurrent,
    S: SurfacePresentation | None = None,
    R: int = DEFAULT_CANDIDATE_RADIUS,
    count_radius: int = DEFAULT_RADIUS,
    bridge_radius: int = DEFAULT_BRIDGE_RADIUS,
    threads: int = 1,
) -> DecompositionReport:
    """Split ``mu`` along its special curves and label the pieces.

    Parameters
    ----------
    R : word length of the candidate classes
    count_radius : radius of every intersection count
    bridge_radius : word length of the classes used for the side tests
    """
    S = S or mu.surface
    sc = _scan(mu, S, R, count_radius, threads)
    specials = _special_from_scan(sc)
    caveats = ["special curves and labels are relative to the candidate set"]
    special_set = set(specials)
    on_special = [(c, w) for c, w in mu.atoms if c in special_set]
    free_atoms = [j for j, c in enumerate(sc.atoms) if c not in special_set]
    for j in free_atoms:
        for e in specials:
            if sc.cross(sc.atoms[j], e) > 0:
                caveats.append(
                    f"ambiguous assignment: atom {S.format(sc.atoms[j].word)} crosses special "
                    f"{S.format(e.word)}; the radius is probably too small"
                )

    all_bridges = enumerate_classes(S, min(bridge_radius, R), primitive=True)
    bridges = [b for b in all_bridges if not _crosses_special(sc, b, specials)]

    # atoms -> pieces
    uf = _UnionFind(len(sc.atoms))
    graph = support_graph(mu, S, count_radius)
    for i, j, _k in graph.edges:
        uf.union(i, j)
    for b in bridges:
        hit = [j for j in free_atoms if sc.count_with_atom(b, j) > 0]
        for j in hit[1:]:
            uf.union(hit[0], j)
    atom_groups = [[j for j in g if j in free_atoms] for g in uf.groups()]
    atom_groups = [g for g in atom_groups if g]

    # zero candidates: attached to an atom piece or forming zero pieces
    zero_simple = [
        c
        for c in bridges
        if sc.values[sc.index[c]] == 0
        and c not in special_set
        and sc.atom_index(c) is None
        and sc.is_simple(c)
    ]
    attached: dict[int, list] = {g: [] for g in range(len(atom_groups))}
    loose = []
    for z in zero_simple:
        owner = None
        for b in bridges:
            if sc.cross(b, z) == 0:
                continue
            for gi, g in enumerate(atom_groups):
                if any(sc.count_with_atom(b, j) > 0 for j in g):
                    owner = gi
                    break
            if owner is not None:
                break
        if owner is None:
            loose.append(z)
        else:
            attached[owner].append(z)

    pieces = []
    for gi, g in enumerate(atom_groups):
        atoms = [sc.atoms[j] for j in g]
        simple = all(sc.is_simple(a) for a in atoms)
        disjoint = all(sc.cross(a, b) == 0 for k, a in enumerate(atoms) for b in atoms[k + 1 :])
        interior = [
            i
            for i, c in enumerate(sc.candidates)
            if any(sc.counts[i, j] > 0 for j in g) and not _crosses_special(sc, c, specials)
        ]
        bound = float(min(sc.values[interior])) if interior else math.inf
        boundary = [e for e in specials if _adjacent(sc, e, g, all_bridges)]
        if simple and disjoint:
            label = "lamination"
        else:
            label = "positive_systole"
            if attached[gi]:
                caveats.append(
                    f"piece {[S.format(a.word) for a in atoms]} contains zero candidates "
                    f"{[S.format(z.word) for z in attached[gi]]}"
                )
        pieces.append(
            Piece(
                atoms=[(a, mu.weight_of(a)) for a in atoms],
                generators=atoms,
                label=label,
                systole_lower_bound=bound if label == "positive_systole" else None,
                boundary=boundary,
                interior_zero=attached[gi],
            )
        )

    zuf = _UnionFind(len(loose))
    for i in range(len(loose)):
        for j in range(i + 1, len(loose)):
            if zuf.find(i) != zuf.find(j) and sc.cross(loose[i], loose[j]) > 0:
                zuf.union(i, j)
    for g in zuf.groups():
        members = [loose[i] for i in g]
        boundary = [e for e in specials if _adjacent_zero(sc, e, members, all_bridges)]
        pieces.append(Piece([], members, "zero", None, boundary))

    return DecompositionReport(
        special_curves=specials,
        atoms_on_special=on_special,
        pieces=pieces,
        candidate_radius=R,
        count_radius=count_radius,
        stabilized=sc.stabilized,
        caveats=caveats,
    )


@dataclass
class DecompositionCheck:
    total_weight: float
    piece_weight: float  # pieces plus atoms on special curves
    mass_conserved: bool
    checked: int  # candidate classes tested
    reconstruction_failures: list  # (class, i(mu, c), sum over parts)

    @property
    def holds(self) -> bool:
        return self.mass_conserved and not self.reconstruction_failures


def check_decomposition(mu: DiscreteCurrent, rep: DecompositionReport, S: SurfacePresentation | None = None, threads: int = 1) -> DecompositionCheck:
    """Mass conservation and the reconstruction identity on every candidate.

    Each part of the report (a piece, or a weighted atom sitting on a
    special curve) is paired with every candidate separately and the sum
    is compared with ``i(mu, c)``.  Weights are compared exactly.
    """
    S = S or mu.surface
    sc = _scan(mu, S, rep.candidate_radius, rep.count_radius, threads)
    parts = [p.atoms for p in rep.pieces if p.atoms] + [[a] for a in rep.atoms_on_special]
    piece_weight = math.fsum(w for part in parts for _, w in part)
    seen = [c for part in parts for c, _ in part]
    mass_ok = piece_weight == mu.total_weight and sorted(seen, key=lambda c: word_key(c.word)) == sorted(
        sc.atoms, key=lambda c: word_key(c.word)
    )
    failures = []
    for i, c in enumerate(sc.candidates):
        total = math.fsum(w * sc.count_with_atom(c, sc.atoms.index(a)) for part in parts for a, w in part)
        direct = math.fsum(float(w) * int(n) for w, n in zip(sc.weights, sc.counts[i]))
        if total != direct:
            failures.append((c, direct, total))
    return DecompositionCheck(mu.total_weight, piece_weight, mass_ok, len(sc.candidates), failures)


def _adjacent(sc: _Scan, e: ConjClass, group: Sequence[int], bridges) -> bool:
    """Some bridge crossing ``e`` also crosses an atom of the group."""
    for b in bridges:
        if sc.cross(b, e) > 0 and any(sc.count_with_atom(b, j) > 0 for j in group):
            return True
    return False


def _adjacent_zero(sc: _Scan, e: ConjClass, members, bridges) -> bool:
    for b in bridges:
        if sc.cross(b, e) > 0 and any(sc.cross(b, z) > 0 for z in members):
            return True
    return False


def is_basic(mu: DiscreteCurrent, S: SurfacePresentation | None = None, R: int = DEFAULT_CANDIDATE_RADIUS, count_radius: int = DEFAULT_RADIUS) -> bool:
    """One atom piece, no atom on a special curve, positive on every interior candidate."""
    rep = decompose(mu, S, R, count_radius)
    atom_pieces = [p for p in rep.pieces if p.atoms]
    if len(atom_pieces) != 1 or rep.atoms_on_special:
        return False
    p = atom_pieces[0]
    return p.label == "positive_systole" and not p.interior_zero and (p.systole_lower_bound or 0) > 0


# ------------------------------------------------------------- zero detector


@dataclass
class ZeroVerdict:
    verdict: str  # "zero_found" or "none_up_to_radius"
    witness: list  # classes of a multicurve with zero pairing
    radius: int
    note: str = ""


def zero_detector(
    mu: DiscreteCurrent,
    S: SurfacePresentation | None = None,
    R: int = DEFAULT_CANDIDATE_RADIUS,
    count_radius: int = DEFAULT_RADIUS,
    threads: int = 1,
) -> ZeroVerdict:
    """Search simple candidates for a multicurve ``nu`` with ``i(mu, nu) = 0``.

    A multicurve pairs to zero exactly when each of its components does,
    so single simple classes are the witnesses.  When only non-simple
    zero classes exist, surgery is used to produce a simple one.
    """
    S = S or mu.surface
    sc = _scan(mu, S, R, count_radius, threads)
    zeros = [sc.candidates[i] for i in np.nonzero(sc.values == 0)[0]]
    for c in zeros:
        if sc.is_simple(c):
            return ZeroVerdict("zero_found", [c], R)
    if zeros:
        from .surgery import simplify_to_simple

        trace = simplify_to_simple(mu, zeros[0], S, count_radius)
        return ZeroVerdict(
            "zero_found", [trace.result], R, "simple witness obtained by surgery from a longer class"
        )
    return ZeroVerdict("none_up_to_radius", [], R)


# --------------------------------------------------- generic function split


@dataclass
class FunctionPiece:
    classes: list
    label: str
    minimum: float


@dataclass
class FunctionDecomposition:
    special_curves: list
    pieces: list
    radius: int


def decompose_function(
    S: SurfacePresentation,
    value: Callable[[ConjClass], float],
    R: int,
    count_radius: int = DEFAULT_RADIUS,
    tol: float = 1e-9,
) -> FunctionDecomposition:
    """Trichotomy for a non-negative class function over simple candidates.

    Specials are zero-valued simple classes crossed only by positive ones;
    the remaining simple classes not crossing a special are grouped by
    mutual intersection and each group is labelled ``zero``,
    ``positive_systole`` or ``lamination`` (mixed zero and positive values).
    """
    simple = enumerate_classes(S, R, primitive=True, simple=True, radius=count_radius)
    vals = {c: float(value(c)) for c in simple}
    if all(v <= tol for v in vals.values()):
        raise ValidationError("the function vanishes on every candidate")
    cache: dict = {}

    def cross(a, b):
        key = (a, b) if word_key(a.word) <= word_key(b.word) else (b, a)
        if key not in cache:
            cache[key] = class_intersection(S, key[0], key[1], count_radius)
        return cache[key]

    zeros = [c for c in simple if vals[c] <= tol]
    specials = [c for c in zeros if not any(d != c and cross(c, d) > 0 for d in zeros)]
    rest = [c for c in simple if c not in specials and not any(cross(c, e) > 0 for e in specials)]
    uf = _UnionFind(len(rest))
    for i in range(len(rest)):
        for j in range(i + 1, len(rest)):
            if uf.find(i) != uf.find(j) and cross(rest[i], rest[j]) > 0:
                uf.union(i, j)
    pieces = []
    for g in uf.groups():
        members = [rest[i] for i in g]
        vs = [vals[c] for c in members]
        if len(members) == 1 and vs[0] <= tol:
            # an isolated zero curve is a boundary-parallel leftover, not a region
            continue
        if max(vs) <= tol:
            label = "zero"
        elif min(vs) > tol:
            label = "positive_systole"
        else:
            label = "lamination"
        pieces.append(FunctionPiece(members, label, min(vs)))
    return FunctionDecomposition(specials, pieces, R)
