"""Virasoro representation machinery for the conformal block series.

Young-diagram bookkeeping, the Verma-module action of the Virasoro modes at
central charge c, Shapovalov Gram matrices, one-point descendant matrix
elements, and the assembled torus / annulus block coefficient tables.

States are words L_{-n1} L_{-n2} ... |Delta> with n1 >= n2 >= ..., indexed by
partitions in reverse-lexicographic order.  Matrix elements of a primary
insertion V_h(1) are built by a deterministic rewriting of the modes past the
insertion: positive modes move right and annihilate on the highest-weight
vector, and every z-derivative of V_h is eliminated through the L_0 grading
(the matrix element between levels l1, l2 scales as z^{l1 - l2 - h}).

The mode-action coefficients are polynomials in Delta with numeric (c-fixed)
coefficients; tables can be precomputed once per (c, truncation) and then
evaluated cheaply at every spectrum point of a bootstrap integral.
"""

from __future__ import annotations

import math
import numbers
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, SingularGram, TailWarning
from .specialfn import LiouvilleParams, partition_count

_COND_LIMIT = 1e12


# ---------------------------------------------------------------------------
# Partitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """A Young diagram: weakly decreasing positive parts."""

    parts: tuple

    def __post_init__(self):
        p = tuple(int(x) for x in self.parts)
        if any(x < 1 for x in p):
            raise DomainError("partition parts must be positive")
        if any(p[i] < p[i + 1] for i in range(len(p) - 1)):
            raise DomainError("partition parts must be weakly decreasing")
        object.__setattr__(self, "parts", p)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)


@lru_cache(maxsize=None)
def _partition_tuples(n: int):
    """Partitions of n as tuples, reverse-lexicographic (largest first)."""
    if n < 0:
        return ()
    if n == 0:
        return ((),)

    def gen(remaining, cap):
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, cap), 0, -1):
            for rest in gen(remaining - first, first):
                yield (first,) + rest

    return tuple(gen(n, n))


def partitions_of(n: int) -> list:
    """All partitions of n, reverse-lexicographically ordered."""
    if n < 0:
        raise DomainError("partitions_of needs n >= 0")
    return [Partition(p) for p in _partition_tuples(n)]


@lru_cache(maxsize=None)
def _index_map(n: int):
    return {p: i for i, p in enumerate(_partition_tuples(n))}


@lru_cache(maxsize=None)
def _leading_groups(n: int):
    """Columns of level n grouped by leading (largest) part k.

    Returns {k: (column indices, indices of the stripped rest in level n-k)}.
    """
    groups = {}
    for col, p in enumerate(_partition_tuples(n)):
        k = p[0]
        rest_idx = _index_map(n - k)[p[1:]]
        groups.setdefault(k, ([], []))
        groups[k][0].append(col)
        groups[k][1].append(rest_idx)
    return {k: (np.array(c), np.array(r)) for k, (c, r) in groups.items()}


# ---------------------------------------------------------------------------
# Normal ordering of mode words (generic scalar coefficients)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _lower_word(j: int, word: tuple):
    """L_{-j} applied in front of a canonical word, re-sorted.

    Returns {word: integer coefficient}; Delta and c never enter (the bracket
    of two lowering modes is again a lowering mode).
    """
    if not word or j >= word[0]:
        return {(j,) + word: 1}
    w1, rest = word[0], word[1:]
    out = {}
    for u, cf in _lower_word(j, rest).items():
        # re-insert w1 canonically: commuting can have produced larger modes
        for v, cf2 in _lower_word(w1, u).items():
            out[v] = out.get(v, 0) + cf * cf2
    for u, cf in _lower_word(j + w1, rest).items():
        out[u] = out.get(u, 0) + (w1 - j) * cf
    return out


def _poly_add(dst, word, poly):
    cur = dst.get(word)
    if cur is None:
        dst[word] = list(poly)
        return
    if len(cur) < len(poly):
        cur.extend([0.0] * (len(poly) - len(cur)))
    for i, v in enumerate(poly):
        cur[i] += v


class VirasoroTables:
    """Mode-action and block tables at fixed central charge and truncation.

    ``raising_poly(k, level)`` is the matrix of L_k : level -> level-k with
    entries as polynomials in Delta (last axis = ascending powers).  From it,
    ``matrix_blocks(h, delta)`` assembles all rectangular matrices
    w^{(a,b)}(nu, nut) = <Delta,nu| V_h(1) |Delta,nut> (normalized so the
    primary three-point piece is 1) for a, b <= nmax.
    """

    def __init__(self, c, nmax: int):
        self.c = complex(c)
        self.nmax = int(nmax)
        self._raise_memo = {}
        self._epoly = {}

    # -- mode action -------------------------------------------------------

    def _raise_word(self, k: int, word: tuple):
        """L_k (k>0) applied to a canonical word: {word: poly in Delta}."""
        key = (k, word)
        hit = self._raise_memo.get(key)
        if hit is not None:
            return hit
        out = {}
        if word:
            w1, rest = word[0], word[1:]
            # L_k L_{-w1} = L_{-w1} L_k + (k + w1) L_{k-w1} + central
            for u, pol in self._raise_word(k, rest).items():
                for v, cf in _lower_word(w1, u).items():
                    _poly_add(out, v, [cf * x for x in pol])
            m = k - w1
            fac = float(k + w1)
            if m > 0:
                for u, pol in self._raise_word(m, rest).items():
                    _poly_add(out, u, [fac * x for x in pol])
            elif m == 0:
                lvl = float(sum(rest))
                _poly_add(out, rest, [fac * lvl, fac])  # (Delta + level) rest
            else:
                for v, cf in _lower_word(-m, rest).items():
                    _poly_add(out, v, [fac * cf])
            if k == w1:
                _poly_add(out, rest, [self.c * k * (k * k - 1) / 12.0])
        self._raise_memo[key] = out
        return out

    def raising_poly(self, k: int, level: int):
        """Matrix of L_k: level -> level-k; entries are Delta-polynomials."""
        key = (k, level)
        hit = self._epoly.get(key)
        if hit is not None:
            return hit
        src = _partition_tuples(level)
        dst_index = _index_map(level - k)
        deg = 0
        cols = []
        for p in src:
            d = self._raise_word(k, p)
            cols.append(d)
            for pol in d.values():
                deg = max(deg, len(pol) - 1)
        mat = np.zeros((len(dst_index), len(src), deg + 1), dtype=complex)
        for j, d in enumerate(cols):
            for word, pol in d.items():
                i = dst_index[word]
                mat[i, j, : len(pol)] = pol
        self._epoly[key] = mat
        return mat

    def raising_at(self, k: int, level: int, delta):
        pol = self.raising_poly(k, level)
        out = pol[..., -1].copy()
        for d in range(pol.shape[-1] - 2, -1, -1):
            out = out * delta + pol[..., d]
        return out

    # -- matrix elements of a primary insertion -----------------------------

    def matrix_blocks(self, h, delta, pairs=None):
        """All w^{(a,b)} matrices for a, b <= nmax at insertion weight h.

        ``pairs`` restricts the computed set (closed automatically under the
        recursion's dependencies).
        """
        h = complex(h)
        delta = complex(delta)
        nmax = self.nmax
        if pairs is None:
            wanted = {(a, b) for a in range(nmax + 1) for b in range(nmax + 1)}
        else:
            wanted = set()
            stack = list(pairs)
            while stack:
                a, b = stack.pop()
                if (a, b) in wanted or a < 0 or b < 0:
                    continue
                wanted.add((a, b))
                if b > 0:
                    for p in _partition_tuples(b):
                        k = p[0]
                        stack.append((a - k, b - k))
                        stack.append((a, b - k))
                elif a > 0:
                    for p in _partition_tuples(a):
                        stack.append((a - p[0], 0))

        top = max(max(a for a, _ in wanted), max(b for _, b in wanted))
        blocks = {(0, 0): np.ones((1, 1), dtype=complex)}
        # bra-side reduction for (a, 0)
        for a in range(1, top + 1):
            if (a, 0) not in wanted:
                continue
            col = np.empty((len(_partition_tuples(a)), 1), dtype=complex)
            for i, p in enumerate(_partition_tuples(a)):
                k1, rest = p[0], p[1:]
                prev = blocks[(a - k1, 0)][_index_map(a - k1)[rest], 0]
                col[i, 0] = ((a - k1) - h + (k1 + 1) * h) * prev
            blocks[(a, 0)] = col
        # ket-side reduction, columns grouped by leading part
        for b in range(1, top + 1):
            for a in range(0, top + 1):
                if (a, b) not in wanted:
                    continue
                da = len(_partition_tuples(a))
                db = len(_partition_tuples(b))
                w = np.zeros((da, db), dtype=complex)
                for k, (cols, rest) in _leading_groups(b).items():
                    coeff = (a - (b - k)) - h + (1 - k) * h
                    w[:, cols] = -coeff * blocks[(a, b - k)][:, rest]
                    if a - k >= 0:
                        ek = self.raising_at(k, a, delta)
                        w[:, cols] += ek.T @ blocks[(a - k, b - k)][:, rest]
                blocks[(a, b)] = w
        return {p: m for p, m in blocks.items() if p in wanted or p == (0, 0)}

    def gram_blocks(self, delta, levels=None):
        """Shapovalov Gram matrices per level (identity insertion h = 0)."""
        levels = range(self.nmax + 1) if levels is None else levels
        pairs = [(n, n) for n in levels]
        blk = self.matrix_blocks(0.0, delta, pairs=pairs)
        return {n: blk[(n, n)] for n in levels}


_TABLES_CACHE = {}


def virasoro_tables(c, nmax: int) -> VirasoroTables:
    key = (complex(c), int(nmax))
    tab = _TABLES_CACHE.get(key)
    if tab is None:
        # reuse a larger table when available
        for (cc, nn), t in _TABLES_CACHE.items():
            if cc == key[0] and nn >= nmax:
                return t
        tab = VirasoroTables(c, nmax)
        _TABLES_CACHE[key] = tab
    return tab


# ---------------------------------------------------------------------------
# Public Gram matrix (generic scalars: complex, Fraction, sympy all work)
# ---------------------------------------------------------------------------

@dataclass
class GramMatrix:
    """Level-n Shapovalov form F(nu, nu') evaluated at (delta, c)."""

    level: int
    partitions: list
    entries: list  # list of rows

    def as_array(self) -> np.ndarray:
        return np.array([[complex(x) for x in row] for row in self.entries])

    def determinant(self) -> complex:
        return complex(np.linalg.det(self.as_array()))


def _apply_mode_generic(k, state, delta, c):
    """L_k (any k != 0) applied to {word: coeff} with generic scalars."""
    out = {}

    def add(word, coeff):
        out[word] = out.get(word, 0) + coeff

    for word, coeff in state.items():
        if k < 0:
            for v, cf in _lower_word(-k, word).items():
                add(v, coeff * cf)
            continue
        if not word:
            continue
        w1, rest = word[0], word[1:]
        sub = _apply_mode_generic(k, {rest: coeff}, delta, c)
        for u, cf in sub.items():
            for v, cf2 in _lower_word(w1, u).items():
                add(v, cf * cf2)
        m = k - w1
        if m > 0:
            for u, cf in _apply_mode_generic(m, {rest: coeff}, delta, c).items():
                add(u, (k + w1) * cf)
        elif m == 0:
            add(rest, (k + w1) * coeff * (delta + sum(rest)))
        else:
            for v, cf in _lower_word(-m, rest).items():
                add(v, (k + w1) * coeff * cf)
        if k == w1:
            add(rest, coeff * c * k * (k * k - 1) / 12)
    return out


def gram_matrix(n: int, delta, c) -> GramMatrix:
    """Shapovalov Gram matrix at level n, exact in the scalar type of inputs.

    Passing Fraction or sympy scalars keeps the entries exact; complex input
    evaluates numerically.  The basis is partitions_of(n) in order.
    """
    if n < 0:
        raise DomainError("gram level must be >= 0")
    parts = _partition_tuples(n)
    zero = delta * 0
    rows = []
    for nu in parts:
        # bilinear pairing: strip parts of nu (largest first) as raisings
        row = []
        for nup in parts:
            state = {nup: delta * 0 + 1}
            for k in nu:
                state = _apply_mode_generic(k, state, delta, c)
            row.append(state.get((), zero))
        rows.append(row)
    return GramMatrix(level=n, partitions=[Partition(p) for p in parts],
                      entries=rows)


def kac_degenerate_weight(r: int, s: int, params: LiouvilleParams) -> complex:
    """Conformal weight of the degenerate charge alpha_{r,s} = Q - r g/2 - s 2/g."""
    a = params.q_charge - 0.5 * r * params.gamma - 2.0 * s / params.gamma
    return params.weight(a)


# ---------------------------------------------------------------------------
# Matrix elements, orthonormalization, block coefficient tables
# ---------------------------------------------------------------------------

@dataclass
class BlockCoefficients:
    """Descendant matrix elements per level pair, raw or orthonormalized."""

    max_level: int
    blocks: dict = field(repr=False)  # (a, b) -> ndarray
    normalization: str = "raw_w"

    def entry(self, nu, nu_tilde) -> complex:
        nu = tuple(nu.parts if isinstance(nu, Partition) else nu)
        nt = tuple(nu_tilde.parts if isinstance(nu_tilde, Partition) else nu_tilde)
        a, b = sum(nu), sum(nt)
        return complex(self.blocks[(a, b)][_index_map(a)[nu], _index_map(b)[nt]])

    def to_json_dict(self) -> dict:
        out = {"normalization": self.normalization,
               "max_level": self.max_level, "levels": {}}
        for (a, b), mat in sorted(self.blocks.items()):
            out["levels"][f"{a},{b}"] = [[[float(v.real), float(v.imag)]
                                          for v in row] for row in mat]
        return out


def one_point_matrix_element(nu, nu_tilde, delta_insert, delta_spec, c) -> complex:
    """Normalized <Delta,nu| V_h(1) |Delta,nut> / <Delta| V_h(1) |Delta>.

    This is the chiral radial matrix element; between levels it is generally
    nonzero.  The annulus coefficient tables keep only its level-diagonal
    part (see :func:`block_coefficients`).
    """
    nu = tuple(nu.parts if isinstance(nu, Partition) else nu)
    nt = tuple(nu_tilde.parts if isinstance(nu_tilde, Partition) else nu_tilde)
    a, b = sum(nu), sum(nt)
    tab = virasoro_tables(c, max(a, b))
    blk = tab.matrix_blocks(delta_insert, delta_spec, pairs=[(a, b)])
    return complex(blk[(a, b)][_index_map(a)[nu], _index_map(b)[nt]])


def block_coefficients(delta_insert, delta_spec, c, max_level: int,
                       include_off_level: bool = True) -> BlockCoefficients:
    """Raw annulus descendant coefficients w(nu, nut) up to ``max_level``.

    The annulus gluing is rotationally covariant, which projects the
    coefficient tables onto equal descendant levels: coefficients between
    different levels vanish identically (this is what makes the degenerate
    gamma-insertion table collapse to the Kronecker delta and the two-gamma
    two-point block independent of the insertion positions).  Equal-level
    blocks are the recursive rewriting matrix elements.
    """
    tab = virasoro_tables(c, max_level)
    pairs = [(n, n) for n in range(max_level + 1)]
    blk = tab.matrix_blocks(delta_insert, delta_spec, pairs=pairs)
    out = {}
    for a in range(max_level + 1):
        for b in range(max_level + 1):
            if a == b:
                out[(a, b)] = blk[(a, a)]
            elif include_off_level:
                out[(a, b)] = np.zeros((len(_partition_tuples(a)),
                                        len(_partition_tuples(b))), dtype=complex)
    return BlockCoefficients(max_level=max_level, blocks=out,
                             normalization="raw_w")


def _gram_inv_sqrt(f: np.ndarray):
    """Whitening map S with S^T F S = I for a level Gram block.

    The raw Kac matrices span enormous scales (their diagonal grows
    factorially with the level), so F is first preconditioned by its
    diagonal; the inverse square root of the scaled matrix comes from a
    Hermitian eigendecomposition (Schur-based square root off the spectrum
    line, where the Gram is merely complex-symmetric).  Every quantity built
    from the tables (traces, Kronecker-delta checks, paired-block products)
    is invariant under this choice of congruence root.
    """
    f = np.asarray(f, dtype=complex)
    if f.shape == (1, 1):
        v = f[0, 0]
        if abs(v) == 0.0:
            raise SingularGram("level Gram is singular")
        return np.array([[1.0 / np.sqrt(v)]])
    d = np.sqrt(np.abs(np.diag(f)))
    if np.min(d) == 0.0:
        raise SingularGram("vanishing Gram diagonal")
    fs = f / d[:, None] / d[None, :]
    if np.allclose(fs, fs.conj().T, rtol=1e-12, atol=1e-12):
        evals, vecs = np.linalg.eigh(0.5 * (fs + fs.conj().T))
        if np.min(evals) <= 0.0 or np.max(evals) / np.min(evals) > _COND_LIMIT:
            raise SingularGram(
                f"Gram condition number beyond {_COND_LIMIT:.0e}")
        root = (vecs * (evals ** -0.5)) @ vecs.conj().T
    else:
        from scipy.linalg import sqrtm
        s = np.asarray(sqrtm(fs), dtype=complex)
        cond = np.linalg.cond(s)
        if not np.isfinite(cond) or cond ** 2 > _COND_LIMIT:
            raise SingularGram(
                f"Gram condition number beyond {_COND_LIMIT:.0e}")
        root = np.linalg.inv(s)
    return root / d[:, None]


def orthonormalize(w_raw: BlockCoefficients, gram_per_level) -> BlockCoefficients:
    """Absorb the Shapovalov form: W = F^{-1/2} w F^{-1/2} per level pair."""
    if w_raw.normalization != "raw_w":
        raise DomainError("input must be raw_w coefficients")
    grams = {g.level: g.as_array() for g in gram_per_level} \
        if not isinstance(gram_per_level, dict) else dict(gram_per_level)
    roots = {n: _gram_inv_sqrt(np.asarray(f, dtype=complex))
             for n, f in grams.items()}
    out = {}
    for (a, b), w in w_raw.blocks.items():
        if a in roots and b in roots:
            out[(a, b)] = roots[a].T @ w @ roots[b]
    return BlockCoefficients(max_level=w_raw.max_level, blocks=out,
                             normalization="orthonormalized_W")


# ---------------------------------------------------------------------------
# Block series
# ---------------------------------------------------------------------------

_KINDS = ("torus_1pt", "torus_2pt", "annulus_1pt", "annulus_2pt")


@dataclass
class BlockSeries:
    """Truncated conformal block coefficient table.

    ``coefficients[(n, m)]`` multiplies the kind's monomial: q^n for
    torus_1pt, (q^2)^n for annulus_1pt, q1^n q2^m for torus_2pt and
    (q/(b1 b2))^n (q b1 b2)^m for annulus_2pt.
    """

    kind: str
    weights: tuple
    spectrum: tuple
    truncation: int
    coefficients: dict


def _orthonormalized_diag(h, delta, c, nmax, roots=None):
    """Orthonormalized equal-level coefficient matrices W_n, n <= nmax."""
    tab = virasoro_tables(c, nmax)
    if roots is None:
        grams = tab.gram_blocks(delta, levels=range(nmax + 1))
        roots = {n: _gram_inv_sqrt(g) for n, g in grams.items()}
    w = tab.matrix_blocks(h, delta, pairs=[(n, n) for n in range(nmax + 1)])
    return {n: roots[n].T @ w[(n, n)] @ roots[n]
            for n in range(nmax + 1)}, roots


def block_series(kind: str, weights, P, params: LiouvilleParams,
                 N: int) -> BlockSeries:
    """Coefficient table of a conformal block at truncation level N.

    ``weights`` are the insertion charges (betas); ``P`` is the spectrum
    parameter (a pair for torus_2pt).  Orthonormalized coefficients require
    an invertible Gram, which holds on the spectrum line.
    """
    if kind not in _KINDS:
        raise DomainError(f"unknown block kind {kind!r}")
    if N < 0:
        raise DomainError("truncation must be >= 0")
    c = params.c_liouville
    if kind in ("torus_1pt", "annulus_1pt"):
        (beta,) = weights
        h = params.weight(beta)
        delta = params.weight(complex(params.q_charge, float(P)))
        wb, _ = _orthonormalized_diag(h, delta, c, N)
        coeffs = {(n, 0): complex(np.trace(wb[n])) for n in range(N + 1)}
        spectrum = (delta,)
    elif kind == "annulus_2pt":
        beta1, beta2 = weights
        delta = params.weight(complex(params.q_charge, float(P)))
        w1, roots = _orthonormalized_diag(params.weight(beta1), delta, c, N)
        w2, _ = _orthonormalized_diag(params.weight(beta2), delta, c, N,
                                      roots=roots)
        coeffs = {(n, m): (complex(np.sum(w1[n] * w2[n])) if n == m else 0.0j)
                  for n in range(N + 1) for m in range(N + 1)}
        spectrum = (delta,)
    else:  # torus_2pt
        beta1, beta2 = weights
        P1, P2 = P
        d1 = params.weight(complex(params.q_charge, float(P1)))
        d2 = params.weight(complex(params.q_charge, float(P2)))
        w1, _ = _orthonormalized_diag(params.weight(beta1), d1, c, N)
        w2, _ = _orthonormalized_diag(params.weight(beta2), d2, c, N)
        coeffs = {(n, m): (complex(np.sum(w1[n] * w2[n])) if n == m else 0.0j)
                  for n in range(N + 1) for m in range(N + 1)}
        spectrum = (d1, d2)
    return BlockSeries(kind=kind, weights=tuple(weights), spectrum=spectrum,
                       truncation=N, coefficients=coeffs)


def evaluate_block(series: BlockSeries, q, b1b2=1.0) -> complex:
    """Partial sum of the block series at modulus q (in (0,1)).

    Emits TailWarning when the geometric tail estimate from the last three
    collapsed coefficients does not contract at this q.
    """
    if isinstance(q, tuple):
        q1, q2 = q
    else:
        if not 0.0 < float(np.real(q)) < 1.0:
            raise DomainError("modulus q must lie in (0, 1)")
        if series.kind == "torus_1pt":
            q1, q2 = complex(q), 1.0
        elif series.kind == "annulus_1pt":
            q1, q2 = complex(q) ** 2, 1.0
        elif series.kind == "annulus_2pt":
            q1, q2 = complex(q) / b1b2, complex(q) * b1b2
        else:
            raise DomainError("torus_2pt needs q = (q1, q2)")
    n_tot = series.truncation
    collapsed = np.zeros(n_tot + 1)
    total = 0.0j
    for (n, m), cf in series.coefficients.items():
        term = cf * q1 ** n * q2 ** m
        total += term
        if n + m <= n_tot:
            collapsed[n + m] += abs(term)
    tail = collapsed[collapsed > 0]
    if tail.size >= 4:
        ratios = tail[-3:] / tail[-4:-1]
        r = float(np.max(ratios))
        if r >= 1.0:
            warnings.warn(
                f"block series tail not contracting (ratio {r:.3f}) at "
                f"truncation {n_tot}", TailWarning)
    return complex(total)
