"""Exact sparse integer linear algebra.

Everything here works over arbitrary-precision integers (or, where noted, the
prime field Z/p).  The module provides:

  * SparseIntMatrix        -- immutable sparse matrix with exact entries
  * smith_normal_form      -- SNF with unimodular transforms u*M*v = diag(s)
  * kernel_basis           -- saturated basis of the integer kernel lattice
  * solve_in_lattice       -- membership/solution in a column lattice
  * present_fg_abelian     -- invariant-factor presentation of Z^r / relations
  * FgAbelianGroup, AbelianHom, FgSubgroup  -- finitely generated abelian
    groups with generator data, homomorphisms, kernels/images/fixed points
  * FieldEchelon etc.      -- the mod-p counterparts used for rank cross-checks

Pivoting is deterministic: structural (Markowitz-style minimal fill) with
minimal-magnitude and lowest-index tie-breaks, so results are reproducible
bit for bit.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

Vector = Sequence[int]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# ---------------------------------------------------------------------------
# sparse matrices


class SparseIntMatrix:
    """Immutable sparse integer matrix; only nonzero entries are stored."""

    __slots__ = ("rows", "cols", "entries", "_col_cache")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.rows = rows
        self.cols = cols
        store: dict[tuple[int, int], int] = {}
        if entries:
            if isinstance(entries, dict):
                items = (((r, c), v) for (r, c), v in entries.items())
            else:
                items = (((r, c), v) for r, c, v in entries)
            for (r, c), v in items:
                if not (0 <= r < rows and 0 <= c < cols):
                    raise ValueError(f"entry index {(r, c)} out of range for {rows}x{cols}")
                if v:
                    store[(r, c)] = int(v)
        self.entries = store
        self._col_cache = None

    # -- construction helpers

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[int]], cols: int | None = None) -> "SparseIntMatrix":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        entries = {}
        for r, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged rows")
            for c, v in enumerate(row):
                if v:
                    entries[(r, c)] = int(v)
        return cls(rows, cols, entries)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[dict[int, int] | Sequence[int]]) -> "SparseIntMatrix":
        entries = {}
        for c, col in enumerate(columns):
            items = col.items() if isinstance(col, dict) else enumerate(col)
            for r, v in items:
                if v:
                    entries[(r, c)] = int(v)
        return cls(nrows, len(columns), entries)

    @classmethod
    def identity(cls, n: int) -> "SparseIntMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseIntMatrix":
        return cls(rows, cols)

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: int | None = None, cols: int | None = None) -> "SparseIntMatrix":
        n = len(values)
        return cls(rows if rows is not None else n, cols if cols is not None else n,
                   {(i, i): v for i, v in enumerate(values) if v})

    # -- accessors

    def get(self, r: int, c: int) -> int:
        return self.entries.get((r, c), 0)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def columns(self) -> dict[int, list[tuple[int, int]]]:
        """Column index: col -> sorted list of (row, value)."""
        if self._col_cache is None:
            cache: dict[int, list[tuple[int, int]]] = defaultdict(list)
            for (r, c), v in sorted(self.entries.items(), key=lambda kv: (kv[0][1], kv[0][0])):
                cache[c].append((r, v))
            self._col_cache = dict(cache)
        return self._col_cache

    def column(self, c: int) -> list[tuple[int, int]]:
        return self.columns().get(c, [])

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def transpose(self) -> "SparseIntMatrix":
        return SparseIntMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def to_mod(self, p: int) -> "SparseIntMatrix":
        return SparseIntMatrix(self.rows, self.cols,
                               {(r, c): v % p for (r, c), v in self.entries.items() if v % p})

    # -- arithmetic

    def mul(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matrix product")
        left_cols = self.columns()
        acc: dict[tuple[int, int], int] = defaultdict(int)
        for (b, c), v in other.entries.items():
            for a, w in left_cols.get(b, ()):
                acc[(a, c)] += w * v
        return SparseIntMatrix(self.rows, other.cols, {k: v for k, v in acc.items() if v})

    __matmul__ = mul

    def mul_vec(self, vec: Vector) -> list[int]:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        out = [0] * self.rows
        for (r, c), v in self.entries.items():
            x = vec[c]
            if x:
                out[r] += v * x
        return out

    def scale(self, k: int) -> "SparseIntMatrix":
        if k == 0:
            return SparseIntMatrix.zero(self.rows, self.cols)
        return SparseIntMatrix(self.rows, self.cols, {key: k * v for key, v in self.entries.items()})

    def add(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in matrix sum")
        acc = dict(self.entries)
        for key, v in other.entries.items():
            nv = acc.get(key, 0) + v
            if nv:
                acc[key] = nv
            else:
                acc.pop(key, None)
        return SparseIntMatrix(self.rows, self.cols, acc)

    def hstack(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        entries = dict(self.entries)
        for (r, c), v in other.entries.items():
            entries[(r, c + self.cols)] = v
        return SparseIntMatrix(self.rows, self.cols + other.cols, entries)

    def __eq__(self, other):
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(sorted(self.entries.items()))))

    def __repr__(self):
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


# ---------------------------------------------------------------------------
# mutable workspaces for elimination


class _Cols:
    """Column-major elimination workspace (optionally over Z/p)."""

    __slots__ = ("cols", "row_index", "mod")

    def __init__(self, ncols: int, mod: int = 0):
        self.cols: list[dict[int, int]] = [dict() for _ in range(ncols)]
        self.row_index: dict[int, set[int]] = defaultdict(set)
        self.mod = mod

    @classmethod
    def from_matrix(cls, m: SparseIntMatrix, mod: int = 0) -> "_Cols":
        ws = cls(m.cols, mod)
        for (r, c), v in m.entries.items():
            if mod:
                v %= mod
                if not v:
                    continue
            ws.cols[c][r] = v
            ws.row_index[r].add(c)
        return ws

    @classmethod
    def identity(cls, n: int, mod: int = 0) -> "_Cols":
        ws = cls(n, mod)
        for i in range(n):
            ws.cols[i][i] = 1
            ws.row_index[i].add(i)
        return ws

    def axpy(self, src: int, dst: int, k: int) -> None:
        # col[dst] += k * col[src]
        if not k:
            return
        cd = self.cols[dst]
        ri = self.row_index
        mod = self.mod
        for r, v in self.cols[src].items():
            nv = cd.get(r, 0) + k * v
            if mod:
                nv %= mod
            if nv:
                if r not in cd:
                    ri[r].add(dst)
                cd[r] = nv
            elif r in cd:
                del cd[r]
                ri[r].discard(dst)

    def combine(self, ci: int, cj: int, x: int, y: int, z: int, w: int) -> None:
        # (col[ci], col[cj]) <- (x*ci + y*cj, z*ci + w*cj)
        a, b = self.cols[ci], self.cols[cj]
        mod = self.mod
        na: dict[int, int] = {}
        nb: dict[int, int] = {}
        for r in a.keys() | b.keys():
            va = a.get(r, 0)
            vb = b.get(r, 0)
            va2 = x * va + y * vb
            vb2 = z * va + w * vb
            if mod:
                va2 %= mod
                vb2 %= mod
            if va2:
                na[r] = va2
            if vb2:
                nb[r] = vb2
        ri = self.row_index
        for r in a.keys() | b.keys():
            ri[r].discard(ci)
            ri[r].discard(cj)
        for r in na:
            ri[r].add(ci)
        for r in nb:
            ri[r].add(cj)
        self.cols[ci] = na
        self.cols[cj] = nb

    def swap(self, i: int, j: int) -> None:
        if i == j:
            return
        ki = set(self.cols[i])
        kj = set(self.cols[j])
        self.cols[i], self.cols[j] = self.cols[j], self.cols[i]
        ri = self.row_index
        for r in ki - kj:
            ri[r].discard(i)
            ri[r].add(j)
        for r in kj - ki:
            ri[r].discard(j)
            ri[r].add(i)

    def scale(self, c: int, s: int) -> None:
        col = self.cols[c]
        mod = self.mod
        if mod:
            dead = []
            for r in col:
                v = (col[r] * s) % mod
                if v:
                    col[r] = v
                else:
                    dead.append(r)
            for r in dead:
                del col[r]
                self.row_index[r].discard(c)
        else:
            for r in col:
                col[r] *= s

    def to_matrix(self, nrows: int) -> SparseIntMatrix:
        entries = {}
        for c, col in enumerate(self.cols):
            for r, v in col.items():
                entries[(r, c)] = v
        return SparseIntMatrix(nrows, len(self.cols), entries)


class _Rows:
    """Row-major workspace with a column index; supports row and column ops."""

    __slots__ = ("rows", "col_index")

    def __init__(self, nrows: int):
        self.rows: list[dict[int, int]] = [dict() for _ in range(nrows)]
        self.col_index: dict[int, set[int]] = defaultdict(set)

    @classmethod
    def from_matrix(cls, m: SparseIntMatrix) -> "_Rows":
        ws = cls(m.rows)
        for (r, c), v in m.entries.items():
            ws.rows[r][c] = v
            ws.col_index[c].add(r)
        return ws

    @classmethod
    def identity(cls, n: int) -> "_Rows":
        ws = cls(n)
        for i in range(n):
            ws.rows[i][i] = 1
            ws.col_index[i].add(i)
        return ws

    # row operations ------------------------------------------------------

    def row_axpy(self, src: int, dst: int, k: int) -> None:
        if not k:
            return
        rd = self.rows[dst]
        ci = self.col_index
        for c, v in self.rows[src].items():
            nv = rd.get(c, 0) + k * v
            if nv:
                if c not in rd:
                    ci[c].add(dst)
                rd[c] = nv
            elif c in rd:
                del rd[c]
                ci[c].discard(dst)

    def row_combine(self, ri_: int, rj: int, x: int, y: int, z: int, w: int) -> None:
        a, b = self.rows[ri_], self.rows[rj]
        na: dict[int, int] = {}
        nb: dict[int, int] = {}
        for c in a.keys() | b.keys():
            va = a.get(c, 0)
            vb = b.get(c, 0)
            va2 = x * va + y * vb
            vb2 = z * va + w * vb
            if va2:
                na[c] = va2
            if vb2:
                nb[c] = vb2
        ci = self.col_index
        for c in a.keys() | b.keys():
            ci[c].discard(ri_)
            ci[c].discard(rj)
        for c in na:
            ci[c].add(ri_)
        for c in nb:
            ci[c].add(rj)
        self.rows[ri_] = na
        self.rows[rj] = nb

    def row_swap(self, i: int, j: int) -> None:
        if i == j:
            return
        ki = set(self.rows[i])
        kj = set(self.rows[j])
        self.rows[i], self.rows[j] = self.rows[j], self.rows[i]
        ci = self.col_index
        for c in ki - kj:
            ci[c].discard(i)
            ci[c].add(j)
        for c in kj - ki:
            ci[c].discard(j)
            ci[c].add(i)

    def row_scale(self, r: int, s: int) -> None:
        row = self.rows[r]
        for c in row:
            row[c] *= s

    # column operations ---------------------------------------------------

    def col_axpy(self, src: int, dst: int, k: int) -> None:
        if not k:
            return
        ci = self.col_index
        for r in list(ci.get(src, ())):
            v = self.rows[r][src]
            row = self.rows[r]
            nv = row.get(dst, 0) + k * v
            if nv:
                if dst not in row:
                    ci[dst].add(r)
                row[dst] = nv
            elif dst in row:
                del row[dst]
                ci[dst].discard(r)

    def col_combine(self, cic: int, cj: int, x: int, y: int, z: int, w: int) -> None:
        ci = self.col_index
        touched = set(ci.get(cic, ())) | set(ci.get(cj, ()))
        for r in touched:
            row = self.rows[r]
            va = row.get(cic, 0)
            vb = row.get(cj, 0)
            va2 = x * va + y * vb
            vb2 = z * va + w * vb
            for c, nv in ((cic, va2), (cj, vb2)):
                if nv:
                    if c not in row:
                        ci[c].add(r)
                    row[c] = nv
                elif c in row:
                    del row[c]
                    ci[c].discard(r)

    def col_swap(self, i: int, j: int) -> None:
        if i == j:
            return
        ci = self.col_index
        touched = set(ci.get(i, ())) | set(ci.get(j, ()))
        for r in touched:
            row = self.rows[r]
            vi = row.pop(i, 0)
            vj = row.pop(j, 0)
            if vj:
                row[i] = vj
            if vi:
                row[j] = vi
        ci[i] = {r for r in touched if i in self.rows[r]}
        ci[j] = {r for r in touched if j in self.rows[r]}

    def col_scale(self, c: int, s: int) -> None:
        for r in self.col_index.get(c, ()):
            self.rows[r][c] *= s

    def to_matrix(self, ncols: int) -> SparseIntMatrix:
        entries = {}
        for r, row in enumerate(self.rows):
            for c, v in row.items():
                entries[(r, c)] = v
        return SparseIntMatrix(len(self.rows), ncols, entries)


# ---------------------------------------------------------------------------
# column echelon form over Z: kernels, rank, lattice solves


class ColumnEchelon:
    """Integer column echelon form M*V = H by unimodular column operations.

    Pivot rows are strictly increasing and every non-pivot column entry at a
    pivot row is cleared, so lattice membership reduces to forced divisions.
    The zero columns of H correspond to a saturated basis of ker(M).
    """

    def __init__(self, m: SparseIntMatrix, want_transform: bool = True):
        self.nrows = m.rows
        self.ncols = m.cols
        ws = _Cols.from_matrix(m)
        v = _Cols.identity(m.cols) if want_transform else None
        pivots: list[tuple[int, int]] = []
        front = 0
        for r in range(m.rows):
            live = sorted(c for c in ws.row_index.get(r, ()) if c >= front)
            if not live:
                continue
            # gcd cascade: leave a single nonzero in this row among live cols
            while len(live) > 1:
                live.sort(key=lambda c: (abs(ws.cols[c][r]), c))
                c0 = live[0]
                a = ws.cols[c0][r]
                for c in live[1:]:
                    q = ws.cols[c][r] // a
                    if q:
                        ws.axpy(c0, c, -q)
                        if v is not None:
                            v.axpy(c0, c, -q)
                live = [c for c in live if r in ws.cols[c] and ws.cols[c].get(r)]
            c0 = live[0]
            if ws.cols[c0][r] < 0:
                ws.scale(c0, -1)
                if v is not None:
                    v.scale(c0, -1)
            if c0 != front:
                ws.swap(c0, front)
                if v is not None:
                    v.swap(c0, front)
            pivots.append((r, front))
            front += 1
        self.rank = front
        self.pivots = pivots
        self._h = ws
        self._v = v

    def kernel_matrix(self) -> SparseIntMatrix:
        if self._v is None:
            raise ValueError("echelon was computed without transform")
        cols = []
        for c in range(self.rank, self.ncols):
            assert not self._h.cols[c], "nonzero column beyond rank"
            cols.append(dict(self._v.cols[c]))
        return SparseIntMatrix.from_columns(self.ncols, cols)

    def echelon_matrix(self) -> SparseIntMatrix:
        return self._h.to_matrix(self.nrows)

    def transform_matrix(self) -> SparseIntMatrix:
        if self._v is None:
            raise ValueError("echelon was computed without transform")
        return self._v.to_matrix(self.ncols)

    def solve(self, b: Vector | dict[int, int]) -> list[int] | None:
        """Solve M*x = b over Z, or return None if b is outside the lattice."""
        if self._v is None:
            raise ValueError("echelon was computed without transform")
        if isinstance(b, dict):
            res = {r: v for r, v in b.items() if v}
        else:
            if len(b) != self.nrows:
                raise ValueError("vector length mismatch")
            res = {r: v for r, v in enumerate(b) if v}
        y: dict[int, int] = {}
        for (pr, pc) in self.pivots:
            val = res.get(pr)
            if not val:
                continue
            piv = self._h.cols[pc][pr]
            if val % piv:
                return None
            q = val // piv
            y[pc] = q
            for r2, w in self._h.cols[pc].items():
                nv = res.get(r2, 0) - q * w
                if nv:
                    res[r2] = nv
                else:
                    res.pop(r2, None)
        if res:
            return None
        x = [0] * self.ncols
        for c, q in y.items():
            for r2, w in self._v.cols[c].items():
                x[r2] += q * w
        return x

    def solve_sparse(self, b: dict[int, int]) -> dict[int, int] | None:
        x = self.solve(b)
        if x is None:
            return None
        return {i: v for i, v in enumerate(x) if v}


def kernel_basis(m: SparseIntMatrix) -> SparseIntMatrix:
    """Columns form a basis of the full (saturated) integer kernel lattice."""
    return ColumnEchelon(m).kernel_matrix()


def rank_z(m: SparseIntMatrix) -> int:
    return ColumnEchelon(m, want_transform=False).rank


def solve_in_lattice(m: SparseIntMatrix, b: Vector) -> list[int] | None:
    """Return x with m*x = b if b lies in the column lattice of m, else None."""
    return ColumnEchelon(m).solve(b)


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SnfResult:
    """u * m * v = diag(s) with u, v unimodular and s_1 | s_2 | ... positive."""

    s: tuple[int, ...]
    u: SparseIntMatrix
    v: SparseIntMatrix

    def diagonal_matrix(self, rows: int, cols: int) -> SparseIntMatrix:
        return SparseIntMatrix.diagonal(self.s, rows, cols)


class _SnfEngine:
    def __init__(self, m: SparseIntMatrix, want_u: bool, want_v: bool,
                 want_u_inv: bool = False, want_v_inv: bool = False):
        self.m = m
        self.ws = _Rows.from_matrix(m)
        self.u = _Rows.identity(m.rows) if want_u else None
        self.u_inv = _Cols.identity(m.rows) if want_u_inv else None
        self.v = _Cols.identity(m.cols) if want_v else None
        self.v_inv = _Rows.identity(m.cols) if want_v_inv else None
        self.diag: list[int] = []
        self._run()

    # elementary ops with transform bookkeeping --------------------------

    def _row_axpy(self, src, dst, k):
        self.ws.row_axpy(src, dst, k)
        if self.u is not None:
            self.u.row_axpy(src, dst, k)
        if self.u_inv is not None:
            # E = I + k e_dst e_src^T; U^-1 <- U^-1 E^-1: col src -= k * col dst
            self.u_inv.axpy(dst, src, -k)

    def _row_combine(self, i, j, x, y, z, w):
        self.ws.row_combine(i, j, x, y, z, w)
        if self.u is not None:
            self.u.row_combine(i, j, x, y, z, w)
        if self.u_inv is not None:
            # E^-1 = [[w, -y], [-z, x]] for det(E) = 1
            self.u_inv.combine(i, j, w, -z, -y, x)

    def _row_swap(self, i, j):
        self.ws.row_swap(i, j)
        if self.u is not None:
            self.u.row_swap(i, j)
        if self.u_inv is not None:
            self.u_inv.swap(i, j)

    def _row_scale(self, i, s):
        self.ws.row_scale(i, s)
        if self.u is not None:
            self.u.row_scale(i, s)
        if self.u_inv is not None:
            self.u_inv.scale(i, s)

    def _col_axpy(self, src, dst, k):
        self.ws.col_axpy(src, dst, k)
        if self.v is not None:
            self.v.axpy(src, dst, k)
        if self.v_inv is not None:
            # F = I + k e_src e_dst^T; V^-1 <- F^-1 V^-1: row src -= k * row dst
            self.v_inv.row_axpy(dst, src, -k)

    def _col_combine(self, i, j, x, y, z, w):
        self.ws.col_combine(i, j, x, y, z, w)
        if self.v is not None:
            self.v.combine(i, j, x, y, z, w)
        if self.v_inv is not None:
            self.v_inv.row_combine(i, j, w, -z, -y, x)

    def _col_swap(self, i, j):
        self.ws.col_swap(i, j)
        if self.v is not None:
            self.v.swap(i, j)
        if self.v_inv is not None:
            self.v_inv.row_swap(i, j)

    def _col_scale(self, i, s):
        self.ws.col_scale(i, s)
        if self.v is not None:
            self.v.scale(i, s)
        if self.v_inv is not None:
            self.v_inv.row_scale(i, s)

    # pivot selection: structural fill estimate, then magnitude, then index

    def _choose_pivot(self, t: int) -> tuple[int, int] | None:
        ws = self.ws
        best_c = None
        best_cn = None
        for c, rows in ws.col_index.items():
            if c < t or not rows:
                continue
            n = len(rows)
            if best_cn is None or n < best_cn or (n == best_cn and c < best_c):
                best_c, best_cn = c, n
        if best_c is None:
            return None
        best_r = None
        best_key = None
        for r in ws.col_index[best_c]:
            key = (len(ws.rows[r]), abs(ws.rows[r][best_c]), r)
            if best_key is None or key < best_key:
                best_key, best_r = key, r
        return best_r, best_c

    def _run(self):
        t = 0
        ws = self.ws
        limit = min(self.m.rows, self.m.cols)
        while t < limit:
            picked = self._choose_pivot(t)
            if picked is None:
                break
            r0, c0 = picked
            self._row_swap(r0, t)
            self._col_swap(c0, t)
            while True:
                self._clear_position(t)
                piv = ws.rows[t][t]
                if piv < 0:
                    self._row_scale(t, -1)
                    piv = -piv
                if piv == 1:
                    break
                offender = self._find_nondivisible(t, piv)
                if offender is None:
                    break
                # fold the offending row into the pivot row and re-clear
                self._row_axpy(offender, t, 1)
            self.diag.append(ws.rows[t][t])
            t += 1

    def _clear_position(self, t: int):
        """Make row t and column t zero except at (t, t)."""
        ws = self.ws
        while True:
            # clear column t with row ops
            changed = True
            while changed:
                changed = False
                for r in sorted(ws.col_index.get(t, ())):
                    if r == t:
                        continue
                    a = ws.rows[t].get(t, 0)
                    b = ws.rows[r].get(t, 0)
                    if not b:
                        continue
                    if a and b % a == 0:
                        self._row_axpy(t, r, -(b // a))
                    elif not a:
                        self._row_swap(t, r)
                        changed = True
                        break
                    else:
                        g, x, y = xgcd(a, b)
                        self._row_combine(t, r, x, y, -(b // g), a // g)
                    changed = True
                    break
            # clear row t with col ops
            row_t = ws.rows[t]
            others = sorted(c for c in row_t if c != t)
            if not others:
                # column may have been refilled? row ops don't touch col t once clear
                col_ok = all(r == t for r in ws.col_index.get(t, ()))
                if col_ok:
                    return
                continue
            for c in others:
                a = row_t.get(t, 0)
                b = row_t.get(c, 0)
                if not b:
                    continue
                if a and b % a == 0:
                    self._col_axpy(t, c, -(b // a))
                elif not a:
                    self._col_swap(t, c)
                else:
                    g, x, y = xgcd(a, b)
                    self._col_combine(t, c, x, y, -(b // g), a // g)
            # col ops may refill column t's lower part; loop until stable
            if all(r == t for r in ws.col_index.get(t, ())) and \
               all(c == t for c in ws.rows[t]):
                return

    def _find_nondivisible(self, t: int, piv: int) -> int | None:
        """Row index of some active entry not divisible by piv, or None."""
        ws = self.ws
        for c in sorted(ws.col_index):
            if c <= t:
                continue
            for r in sorted(ws.col_index[c]):
                if r <= t:
                    continue
                if ws.rows[r][c] % piv:
                    return r
        return None


def smith_normal_form(m: SparseIntMatrix) -> SnfResult:
    """Smith normal form with transforms; deterministic for fixed input."""
    eng = _SnfEngine(m, want_u=True, want_v=True)
    return SnfResult(tuple(eng.diag),
                     eng.u.to_matrix(m.rows),
                     eng.v.to_matrix(m.cols))


def invariant_factors(m: SparseIntMatrix) -> tuple[int, ...]:
    """Diagonal of the Smith form, computed without transform bookkeeping."""
    eng = _SnfEngine(m, want_u=False, want_v=False)
    return tuple(eng.diag)


# ---------------------------------------------------------------------------
# finitely generated abelian groups


def _factorint(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def invariant_factors_from_orders(orders: Iterable[int]) -> tuple[int, ...]:
    """Canonical divisibility chain for a direct sum of finite cyclic groups."""
    by_prime: dict[int, list[int]] = defaultdict(list)
    for d in orders:
        if d in (0, 1):
            if d == 0:
                raise ValueError("order 0 is not a finite cyclic order")
            continue
        for p, e in _factorint(d).items():
            by_prime[p].append(e)
    width = max((len(v) for v in by_prime.values()), default=0)
    factors = []
    for j in range(width):
        f = 1
        for p, exps in by_prime.items():
            exps_sorted = sorted(exps, reverse=True)
            if j < len(exps_sorted):
                f *= p ** exps_sorted[j]
        factors.append(f)
    factors.reverse()  # increasing divisibility chain
    return tuple(factors)


class FgAbelianGroup:
    """A finitely generated abelian group in invariant-factor form.

    Optionally carries generator data: vectors expressing the abstract
    generators in an ambient coordinate space plus a reduction routine
    sending an ambient vector to its coordinates (torsion coords first, in
    the order of `torsion`, then free coords).
    """

    __slots__ = ("free_rank", "torsion", "ambient_rank", "gens", "_reducer")

    def __init__(self, free_rank: int, torsion: Sequence[int],
                 ambient_rank: int | None = None,
                 gens: Sequence[Sequence[int]] | None = None,
                 reducer: Callable[[Vector], tuple[int, ...]] | None = None):
        torsion = tuple(int(t) for t in torsion)
        for a, b in zip(torsion, torsion[1:]):
            if b % a:
                raise ValueError(f"torsion {torsion} is not a divisibility chain")
        if any(t < 2 for t in torsion):
            raise ValueError("torsion coefficients must be >= 2")
        self.free_rank = free_rank
        self.torsion = torsion
        self.ambient_rank = ambient_rank
        self.gens = tuple(tuple(g) for g in gens) if gens is not None else None
        self._reducer = reducer

    @classmethod
    def trivial(cls) -> "FgAbelianGroup":
        return cls(0, ())

    @classmethod
    def from_orders(cls, free_rank: int, orders: Iterable[int]) -> "FgAbelianGroup":
        return cls(free_rank, invariant_factors_from_orders(orders))

    @property
    def ngens(self) -> int:
        return len(self.torsion) + self.free_rank

    def gen_orders(self) -> tuple[int, ...]:
        """Per-generator order, 0 meaning infinite."""
        return self.torsion + (0,) * self.free_rank

    def order(self) -> int | None:
        if self.free_rank:
            return None
        return math.prod(self.torsion) if self.torsion else 1

    def exponent(self) -> int | None:
        if self.free_rank:
            return None
        return self.torsion[-1] if self.torsion else 1

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def reduce(self, vec: Vector) -> tuple[int, ...]:
        if self._reducer is None:
            raise ValueError("group carries no generator data")
        return self._reducer(vec)

    def normalize(self, coords: Vector) -> tuple[int, ...]:
        out = []
        for i, v in enumerate(coords):
            if i < len(self.torsion):
                out.append(v % self.torsion[i])
            else:
                out.append(v)
        return tuple(out)

    # groups compare by isomorphism type
    def __eq__(self, other):
        if not isinstance(other, FgAbelianGroup):
            return NotImplemented
        return self.free_rank == other.free_rank and self.torsion == other.torsion

    def __hash__(self):
        return hash((self.free_rank, self.torsion))

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"FgAbelianGroup(free_rank={self.free_rank}, torsion={self.torsion})"


def present_fg_abelian(ambient_rank: int, relations: SparseIntMatrix) -> FgAbelianGroup:
    """Invariant-factor form of Z^ambient_rank modulo the column lattice.

    Generator data is populated: generators are ambient vectors, and the
    reducer maps an ambient vector to its coordinates in the quotient.
    """
    if relations.rows != ambient_rank:
        raise ValueError("relation matrix must have ambient_rank rows")
    eng = _SnfEngine(relations, want_u=True, want_v=False, want_u_inv=True)
    diag = eng.diag
    kept = [(i, d) for i, d in enumerate(diag) if d >= 2]
    frees = list(range(len(diag), ambient_rank))
    torsion = tuple(d for _, d in kept)
    coord_positions = [i for i, _ in kept] + frees
    orders = list(torsion) + [0] * len(frees)

    u_rows = [dict(eng.u.rows[i]) for i in coord_positions]
    gens = []
    for i in coord_positions:
        col = eng.u_inv.cols[i]
        vec = [0] * ambient_rank
        for r, v in col.items():
            vec[r] = v
        gens.append(tuple(vec))

    def reducer(vec: Vector) -> tuple[int, ...]:
        if len(vec) != ambient_rank:
            raise ValueError("ambient vector length mismatch")
        out = []
        for row, o in zip(u_rows, orders):
            y = 0
            for j, w in row.items():
                x = vec[j]
                if x:
                    y += w * x
            out.append(y % o if o else y)
        return tuple(out)

    return FgAbelianGroup(len(frees), torsion, ambient_rank=ambient_rank,
                          gens=gens, reducer=reducer)


# ---------------------------------------------------------------------------
# homomorphisms, kernels, images, fixed points


def _relation_matrix(group: FgAbelianGroup) -> SparseIntMatrix:
    """Columns t_i * e_i for the finite-order generators."""
    cols = []
    for i, t in enumerate(group.torsion):
        cols.append({i: t})
    return SparseIntMatrix.from_columns(group.ngens, cols)


class AbelianHom:
    """A homomorphism between presented f.g. abelian groups.

    `matrix` has one column per source generator giving the image in target
    coordinates.  Well-definedness (source relations land in the target
    relation lattice) is checked at construction.
    """

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: FgAbelianGroup, target: FgAbelianGroup,
                 matrix: Sequence[Sequence[int]]):
        matrix = [list(row) for row in matrix]
        if len(matrix) != target.ngens or any(len(row) != source.ngens for row in matrix):
            raise ValueError("hom matrix shape must be target.ngens x source.ngens")
        t_orders = target.gen_orders()
        for j, o in enumerate(source.gen_orders()):
            if not o:
                continue
            for i, to in enumerate(t_orders):
                val = o * matrix[i][j]
                if (to and val % to) or (not to and val):
                    raise ValueError(
                        f"ill-defined hom: order-{o} generator {j} maps outside relations")
        # store canonically (torsion coordinates reduced)
        for i, to in enumerate(t_orders):
            if to:
                matrix[i] = [v % to for v in matrix[i]]
        self.source = source
        self.target = target
        self.matrix = tuple(tuple(row) for row in matrix)

    @classmethod
    def identity(cls, group: FgAbelianGroup) -> "AbelianHom":
        n = group.ngens
        return cls(group, group, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, source: FgAbelianGroup, target: FgAbelianGroup) -> "AbelianHom":
        return cls(source, target, [[0] * source.ngens for _ in range(target.ngens)])

    @classmethod
    def scalar(cls, group: FgAbelianGroup, k: int) -> "AbelianHom":
        n = group.ngens
        return cls(group, group, [[k if i == j else 0 for j in range(n)] for i in range(n)])

    def apply(self, coords: Vector) -> tuple[int, ...]:
        if len(coords) != self.source.ngens:
            raise ValueError("coordinate length mismatch")
        out = [0] * self.target.ngens
        for i, row in enumerate(self.matrix):
            out[i] = sum(w * x for w, x in zip(row, coords))
        return self.target.normalize(out)

    def compose(self, other: "AbelianHom") -> "AbelianHom":
        """self after other."""
        if other.target is not self.source and other.target != self.source:
            raise ValueError("composition type mismatch")
        cols = []
        for j in range(other.source.ngens):
            col = [other.matrix[i][j] for i in range(other.target.ngens)]
            cols.append(self.apply(col))
        matrix = [[cols[j][i] for j in range(len(cols))] for i in range(self.target.ngens)]
        return AbelianHom(other.source, self.target, matrix)

    def is_zero_map(self) -> bool:
        orders = self.target.gen_orders()
        for i, row in enumerate(self.matrix):
            for v in row:
                if orders[i]:
                    if v % orders[i]:
                        return False
                elif v:
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, AbelianHom):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.matrix == other.matrix)

    def __repr__(self):
        return f"AbelianHom({self.source} -> {self.target})"

    def kernel(self) -> "FgSubgroup":
        return kernel_of_hom(self)

    def image(self) -> "FgSubgroup":
        return image_of_hom(self)


def make_hom(source: FgAbelianGroup, target: FgAbelianGroup,
             matrix: Sequence[Sequence[int]]) -> AbelianHom:
    return AbelianHom(source, target, matrix)


@dataclass
class FgSubgroup:
    """A subgroup of a presented group, as its own presentation plus inclusion."""

    ambient: FgAbelianGroup
    group: FgAbelianGroup
    inclusion: AbelianHom
    _membership: ColumnEchelon

    def order(self) -> int | None:
        return self.group.order()

    def contains(self, coords: Vector) -> bool:
        return self._membership.solve(list(coords)) is not None

    def same_subgroup(self, other: "FgSubgroup") -> bool:
        if self.ambient != other.ambient:
            return False
        mine = [list(col) for col in zip(*self.inclusion.matrix)] if self.group.ngens else []
        theirs = [list(col) for col in zip(*other.inclusion.matrix)] if other.group.ngens else []
        return all(other.contains(g) for g in mine) and all(self.contains(g) for g in theirs)


def _subgroup_from_generators(ambient: FgAbelianGroup,
                              gen_cols: Sequence[Sequence[int]]) -> FgSubgroup:
    """Subgroup of `ambient` generated by the classes of the given vectors."""
    m = ambient.ngens
    rel = _relation_matrix(ambient)
    gmat = SparseIntMatrix.from_columns(m, [dict(enumerate(g)) for g in gen_cols])
    g = gmat.cols
    # relations among the chosen generators: c with G*c in the relation lattice
    block = gmat.hstack(rel)
    ker = kernel_basis(block)
    rel_cols = []
    for c in range(ker.cols):
        col = {r: v for (r, v) in ker.column(c) if r < g}
        rel_cols.append(col)
    presented = present_fg_abelian(g, SparseIntMatrix.from_columns(g, rel_cols))
    # inclusion: push each abstract generator through G into ambient coords
    incl_cols = []
    for gen in (presented.gens or ()):
        vec = gmat.mul_vec(list(gen))
        incl_cols.append(ambient.normalize(vec))
    matrix = [[incl_cols[j][i] for j in range(len(incl_cols))] for i in range(m)]
    inclusion = AbelianHom(presented, ambient, matrix)
    membership = ColumnEchelon(block)
    return FgSubgroup(ambient, presented, inclusion, membership)


def kernel_of_hom(h: AbelianHom) -> FgSubgroup:
    m_s, m_t = h.source.ngens, h.target.ngens
    hm = SparseIntMatrix.from_columns(
        m_t, [{i: h.matrix[i][j] for i in range(m_t) if h.matrix[i][j]} for j in range(m_s)])
    block = hm.hstack(_relation_matrix(h.target))
    ker = kernel_basis(block)
    gens = []
    for c in range(ker.cols):
        vec = [0] * m_s
        for r, v in ker.column(c):
            if r < m_s:
                vec[r] = v
        gens.append(vec)
    # always include the source relations so the lattice contains them
    for i, t in enumerate(h.source.torsion):
        vec = [0] * m_s
        vec[i] = t
        gens.append(vec)
    return _subgroup_from_generators(h.source, gens)


def image_of_hom(h: AbelianHom) -> FgSubgroup:
    m_t = h.target.ngens
    cols = [[h.matrix[i][j] for i in range(m_t)] for j in range(h.source.ngens)]
    return _subgroup_from_generators(h.target, cols)


def fixed_points_of_hom_family(group: FgAbelianGroup,
                               actions: Sequence[AbelianHom]) -> FgSubgroup:
    """Subgroup of elements fixed by every endomorphism in the family."""
    m = group.ngens
    for a in actions:
        if a.source != group or a.target != group:
            raise ValueError("actions must be endomorphisms of the group")
    if not actions:
        return _subgroup_from_generators(
            group, [[1 if i == j else 0 for i in range(m)] for j in range(m)])
    rel = _relation_matrix(group)
    k = rel.cols
    blocks = []
    for a in actions:
        entries = {}
        for i in range(m):
            for j in range(m):
                v = a.matrix[i][j] - (1 if i == j else 0)
                if v:
                    entries[(i, j)] = v
        blocks.append(SparseIntMatrix(m, m, entries))
    # stacked system: for each action, (rho - 1) x + rel * y_rho = 0
    n_actions = len(actions)
    big_entries = {}
    for bi, blk in enumerate(blocks):
        for (r, c), v in blk.entries.items():
            big_entries[(bi * m + r, c)] = v
        for (r, c), v in rel.entries.items():
            big_entries[(bi * m + r, m + bi * k + c)] = v
    big = SparseIntMatrix(n_actions * m, m + n_actions * k, big_entries)
    ker = kernel_basis(big)
    gens = []
    for c in range(ker.cols):
        vec = [0] * m
        for r, v in ker.column(c):
            if r < m:
                vec[r] = v
        if any(vec):
            gens.append(vec)
    for i, t in enumerate(group.torsion):
        vec = [0] * m
        vec[i] = t
        gens.append(vec)
    return _subgroup_from_generators(group, gens)


# ---------------------------------------------------------------------------
# arithmetic over Z/p (rank cross-checks and field homology)


class FieldEchelon:
    """Column echelon form over Z/p with transform; mirrors ColumnEchelon."""

    def __init__(self, m: SparseIntMatrix, p: int, want_transform: bool = True):
        self.p = p
        self.nrows = m.rows
        self.ncols = m.cols
        ws = _Cols.from_matrix(m, mod=p)
        v = _Cols.identity(m.cols, mod=p) if want_transform else None
        pivots: list[tuple[int, int]] = []
        front = 0
        for r in range(m.rows):
            live = sorted(c for c in ws.row_index.get(r, ()) if c >= front)
            if not live:
                continue
            c0 = live[0]
            inv = pow(ws.cols[c0][r], -1, p)
            if inv != 1:
                ws.scale(c0, inv)
                if v is not None:
                    v.scale(c0, inv)
            for c in live[1:]:
                k = (-ws.cols[c][r]) % p
                ws.axpy(c0, c, k)
                if v is not None:
                    v.axpy(c0, c, k)
            if c0 != front:
                ws.swap(c0, front)
                if v is not None:
                    v.swap(c0, front)
            pivots.append((r, front))
            front += 1
        self.rank = front
        self.pivots = pivots
        self._h = ws
        self._v = v

    def kernel_matrix(self) -> SparseIntMatrix:
        if self._v is None:
            raise ValueError("echelon was computed without transform")
        cols = []
        for c in range(self.rank, self.ncols):
            assert not self._h.cols[c], "nonzero column beyond rank"
            cols.append(dict(self._v.cols[c]))
        return SparseIntMatrix.from_columns(self.ncols, cols)

    def solve(self, b: Vector | dict[int, int]) -> list[int] | None:
        if self._v is None:
            raise ValueError("echelon was computed without transform")
        p = self.p
        if isinstance(b, dict):
            res = {r: v % p for r, v in b.items() if v % p}
        else:
            res = {r: v % p for r, v in enumerate(b) if v % p}
        y: dict[int, int] = {}
        for (pr, pc) in self.pivots:
            val = res.get(pr)
            if not val:
                continue
            q = val  # pivot normalized to 1
            y[pc] = q
            for r2, w in self._h.cols[pc].items():
                nv = (res.get(r2, 0) - q * w) % p
                if nv:
                    res[r2] = nv
                else:
                    res.pop(r2, None)
        if res:
            return None
        x = [0] * self.ncols
        for c, q in y.items():
            for r2, w in self._v.cols[c].items():
                x[r2] = (x[r2] + q * w) % p
        return x


def rank_mod_p(m: SparseIntMatrix, p: int) -> int:
    return FieldEchelon(m, p, want_transform=False).rank


class FieldRowSpace:
    """Incrementally reduced row space over Z/p (for quotient coordinates)."""

    def __init__(self, p: int):
        self.p = p
        self.rows: dict[int, dict[int, int]] = {}  # pivot coord -> normalized row

    def reduce(self, vec: dict[int, int]) -> dict[int, int]:
        p = self.p
        vec = {k: v % p for k, v in vec.items() if v % p}
        while vec:
            lead = min(vec)
            row = self.rows.get(lead)
            if row is None:
                return vec
            k = vec[lead]
            for c, w in row.items():
                nv = (vec.get(c, 0) - k * w) % p
                if nv:
                    vec[c] = nv
                else:
                    vec.pop(c, None)
        return vec

    def add(self, vec: dict[int, int]) -> bool:
        """Insert a vector; returns True if it enlarged the space."""
        red = self.reduce(dict(vec))
        if not red:
            return False
        lead = min(red)
        inv = pow(red[lead], -1, self.p)
        self.rows[lead] = {c: (v * inv) % self.p for c, v in red.items()}
        return True

    @property
    def dim(self) -> int:
        return len(self.rows)
