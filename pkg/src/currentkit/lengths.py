"""Weyl-chamber lengths of SL(n,R) and Sp(2n,R) representations.

For ``g`` in ``SL(n)`` the chamber vector is the decreasing list of
``log|eigenvalue|`` and ``L(g) = x1 - xn``.  For ``g`` in ``Sp(2n)`` the
spectrum comes in pairs ``lambda, 1/lambda``; the chamber vector keeps the
``n`` non-negative logs and ``L(g)`` is their sum.  Both are read off the
eigenvalues of one matrix, which is the translation vector for
semisimple elements.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import groups
from .decomposition import FunctionDecomposition, decompose_function
from .currents import DEFAULT_RADIUS, enumerate_classes
from .errors import DegenerateFamily, NonInvertible, SpectrumPairingFailed, ValidationError
from .groups import ConjClass, SurfacePresentation, word_key

GROUP_TYPES = ("SL", "Sp")
PAIRING_TOL = 1e-6


def symplectic_form(n: int) -> np.ndarray:
    """``J = [[0, I], [-I, 0]]`` of size ``2n``."""
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def _group_type(gt: str) -> str:
    g = gt.replace("_n", "").replace("_2n", "").strip()
    if g.upper() == "SL":
        return "SL"
    if g.lower() == "sp":
        return "Sp"
    raise ValidationError(f"group type must be SL or Sp, got {gt!r}")


def chamber_vector(M, group_type: str = "SL", inverse=None) -> np.ndarray:
    """Sorted log-moduli of the eigenvalues, projected to the closed chamber.

    Small eigenvalues of a long product are swamped by rounding in the
    large ones, so the lower half of the spectrum is read off ``inverse``
    (computed with ``np.linalg.inv`` when not given).  Pass the product of
    the inverse generators in reverse order for full accuracy.
    """
    gt = _group_type(group_type)
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError("expected a square matrix")
    # the determinant of a long product can underflow, so singularity is
    # judged on the eigenvalues instead
    try:
        Minv = np.linalg.inv(M) if inverse is None else np.asarray(inverse, dtype=float)
    except np.linalg.LinAlgError as exc:
        raise NonInvertible("matrix is singular") from exc
    with np.errstate(divide="ignore"):
        top = np.sort(np.log(np.abs(np.linalg.eigvals(M))))[::-1]
        bottom = np.sort(-np.log(np.abs(np.linalg.eigvals(Minv))))[::-1]
    k = (len(top) + 1) // 2
    x = np.sort(np.concatenate([top[:k], bottom[k:]]))[::-1]
    if not np.all(np.isfinite(x)):
        raise NonInvertible("matrix is singular")
    if gt == "SL":
        return x - x.mean()
    n2 = len(x)
    if n2 % 2:
        raise ValidationError("symplectic matrices have even size")
    n = n2 // 2
    if np.max(np.abs(x + x[::-1])) > PAIRING_TOL * max(1.0, float(np.max(np.abs(x)))):
        raise SpectrumPairingFailed(f"log-spectrum {x} is not symmetric")
    return np.maximum(x[:n], 0.0)


def length_L(M, group_type: str = "SL", inverse=None) -> float:
    x = chamber_vector(M, group_type, inverse)
    if _group_type(group_type) == "Sp":
        return float(x.sum())
    return float(x[0] - x[-1])


# -------------------------------------------------------------- reps


@dataclass
class MatrixRep:
    """A representation of a surface group given by generator matrices."""

    group_type: str
    dimension: int
    matrices: list  # one per generator of the surface, in order
    surface: SurfacePresentation

    def __post_init__(self):
        self.group_type = _group_type(self.group_type)
        mats = [np.asarray(m, dtype=float) for m in self.matrices]
        if len(mats) != self.surface.rank:
            raise ValidationError("one matrix per generator is required")
        for name, m in zip(self.surface.generators, mats):
            if m.shape != (self.dimension, self.dimension):
                raise ValidationError(f"matrix for {name} has shape {m.shape}")
            if abs(np.linalg.det(m) - 1.0) > 1e-8:
                raise ValidationError(f"matrix for {name} does not have determinant 1")
            if self.group_type == "Sp":
                if self.dimension % 2:
                    raise ValidationError("symplectic representations need even dimension")
                J = symplectic_form(self.dimension // 2)
                if not np.allclose(m.T @ J @ m, J, atol=1e-8):
                    raise ValidationError(f"matrix for {name} does not preserve J")
        self.matrices = mats
        self._inv = [np.linalg.inv(m) for m in mats]
        I = np.eye(self.dimension)
        for r in self.surface.relators:
            m = self.evaluate(r)
            if not (np.allclose(m, I, atol=1e-6) or np.allclose(m, -I, atol=1e-6)):
                raise ValidationError(f"relator {self.surface.format(r)} is not sent to ±I")

    def evaluate(self, w: Sequence[int]) -> np.ndarray:
        m = np.eye(self.dimension)
        for x in w:
            m = m @ (self.matrices[x - 1] if x > 0 else self._inv[-x - 1])
        return m

    def length(self, c) -> float:
        w = c.word if isinstance(c, ConjClass) else self.surface.parse(c)
        return length_L(self.evaluate(w), self.group_type, self.evaluate(groups.inverse(w)))

    @classmethod
    def from_json(cls, data, surface: SurfacePresentation | None = None) -> "MatrixRep":
        """``{"group_type", "dimension", "surface", "matrices": {name: rows}}``."""
        if isinstance(data, (str, os.PathLike)):
            text = str(data)
            if os.path.exists(text):
                with open(text, encoding="utf-8") as fh:
                    data = json.load(fh)
            else:
                data = json.loads(text)
        try:
            S = surface or groups.get_surface(data.get("surface", "punctured_torus"))
            dim = int(data["dimension"])
            raw = data["matrices"]
            mats = [raw[g] for g in S.generators] if isinstance(raw, dict) else list(raw)
            mats = [np.asarray(m, dtype=float).reshape(dim, dim) for m in mats]
            return cls(data["group_type"], dim, mats, S)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed representation: {exc}") from exc


def sym_power_matrix(g: np.ndarray, n: int) -> np.ndarray:
    """Action of a 2x2 matrix on binary forms of degree ``n - 1``.

    Column ``j`` holds the coefficients of ``(a x + c y)^(k-j) (b x + d y)^j``
    in the monomials ``x^(k-i) y^i``, with ``k = n - 1``.
    """
    (a, b), (c, d) = np.asarray(g, dtype=float)
    k = n - 1
    out = np.zeros((n, n))
    # coefficient lists indexed by the power of y
    first = np.array([a, c])
    second = np.array([b, d])
    for j in range(n):
        poly = np.array([1.0])
        for _ in range(k - j):
            poly = np.convolve(poly, first)
        for _ in range(j):
            poly = np.convolve(poly, second)
        out[:, j] = poly
    return out


def sym_power_rep(S: SurfacePresentation, n: int) -> MatrixRep:
    """The ``n``-dimensional irreducible representation composed with the Fuchsian one."""
    if n < 2:
        raise ValidationError("n must be at least 2")
    mats = [sym_power_matrix(m, n) for m in S.matrices]
    return MatrixRep("SL", n, mats, S)


# ------------------------------------------------------------ tables


def default_family(S: SurfacePresentation) -> list[ConjClass]:
    """Filling family used for normalization."""
    if S.name == "punctured_torus":
        return [S.canonical(S.parse(w)) for w in ("a", "b", "ab")]
    if S.name == "sphere3":
        from .sphere3 import figure_eights

        return figure_eights(S)
    # shortest simple classes, 6g - 6 of them
    need = max(6 * S.genus - 6, 3)
    out: list[ConjClass] = []
    R = 1
    while len(out) < need and R <= 6:
        out = enumerate_classes(S, R, primitive=True, simple=True)[:need]
        R += 1
    return out


@dataclass
class LengthTable:
    entries: list  # (ConjClass, normalized L)
    normalization: float  # sum of raw L over the family
    family: list
    value_fn: Callable = field(repr=False, default=None)

    def value(self, c: ConjClass) -> float:
        for cls, v in self.entries:
            if cls == c:
                return v
        return self.value_fn(c) / self.normalization

    def as_dict(self) -> dict:
        return {c: v for c, v in self.entries}


def length_table(
    rep: MatrixRep | Callable,
    classes: Iterable,
    family: Sequence | None = None,
    S: SurfacePresentation | None = None,
) -> LengthTable:
    """Lengths of ``classes`` divided by the total length of the family.

    ``rep`` is a :class:`MatrixRep` or any non-negative class function.
    """
    if isinstance(rep, MatrixRep):
        S = rep.surface
        fn = rep.length
    else:
        if S is None:
            raise ValidationError("a surface is required with a plain length function")
        fn = rep
    family = [groups.canonical_conj(S.parse(f) if not isinstance(f, ConjClass) else f, S) for f in (family or default_family(S))]
    if not family:
        raise DegenerateFamily("empty filling family")
    total = float(sum(fn(c) for c in family))
    if total <= 1e-12:
        raise DegenerateFamily(f"family length {total} is not positive")
    entries = []
    for c in classes:
        c = c if isinstance(c, ConjClass) else S.canonical(S.parse(c))
        entries.append((c, fn(c) / total))
    return LengthTable(entries, total, family, fn)


def normalize(table: LengthTable) -> LengthTable:
    """Rescale so that the family sums to one (idempotent)."""
    fam = sum(table.value(c) for c in table.family)
    if fam <= 1e-12:
        raise DegenerateFamily("family length is not positive")
    fn = table.value_fn
    return LengthTable(
        [(c, v / fam) for c, v in table.entries],
        table.normalization * fam,
        table.family,
        fn,
    )


def trichotomy_classify(
    T: LengthTable,
    S: SurfacePresentation,
    R: int = 4,
    count_radius: int = DEFAULT_RADIUS,
) -> FunctionDecomposition:
    """Pieces of the surface labelled by the behaviour of the length function."""
    if all(abs(v) <= 1e-12 for _, v in T.entries) and T.value_fn is None:
        raise ValidationError("the length function vanishes identically")
    return decompose_function(S, T.value, R, count_radius)
