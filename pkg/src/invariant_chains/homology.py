"""Homology of complex slices, induced maps, and exactness machinery.

Integral homology at degree n is read off exactly: the free rank is
dim C_n - rank d_n - rank d_{n+1}, and the torsion coefficients are the
nonunit invariant factors of d_{n+1} (the torsion of C_n/B_n, which equals
that of Z_n/B_n because C_n/Z_n is free).  Generator data is materialized
lazily per degree: a saturated kernel basis, the presentation of the
quotient in kernel coordinates, and a reducer carrying any cycle vector to
homology coordinates.  Mod-p homology is computed by field elimination;
for composite m the universal-coefficient formula on the integral profile
is used.  For prime coefficients both routes run and must agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .chains import ChainMap, ComplexSlice, InvariantSES
from .errors import InternalCheckError
from .groups import GroupAction
from .linalg import (AbelianHom, ColumnEchelon, FgAbelianGroup, FgSubgroup, FieldEchelon,
                     FieldRowSpace, SparseIntMatrix, fixed_points_of_hom_family,
                     image_of_hom, invariant_factors, kernel_of_hom, present_fg_abelian,
                     rank_mod_p)

COEFF_Z = 0


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n ** 0.5) + 1))


@dataclass
class _IntBundle:
    kernel: SparseIntMatrix
    ech_kernel: ColumnEchelon
    presented: FgAbelianGroup


@dataclass
class _FieldBundle:
    kernel: SparseIntMatrix
    ech_kernel: FieldEchelon
    image_space: FieldRowSpace
    free_coords: list[int]
    group: FgAbelianGroup


class HomologyProfile:
    """Per-degree homology groups of a slice, with lazy generator data."""

    def __init__(self, slice_: ComplexSlice, coefficients: int = COEFF_Z):
        self.slice = slice_
        if slice_.modulus:
            if coefficients not in (COEFF_Z, slice_.modulus):
                raise ValueError(
                    f"complex is defined over Z/{slice_.modulus}; cannot change ring")
            self.coeff = slice_.modulus
            self.mode = "field"
        elif coefficients == COEFF_Z:
            self.coeff = 0
            self.mode = "int"
        elif _is_prime(coefficients):
            self.coeff = coefficients
            self.mode = "field"
        else:
            if coefficients < 2:
                raise ValueError(f"bad coefficient modulus {coefficients}")
            self.coeff = coefficients
            self.mode = "uct"
        self.top_degree = slice_.max_degree - 1

        self._groups: dict[int, FgAbelianGroup] = {}
        self._int_factors: dict[int, tuple[int, ...]] = {}
        self._int_bundles: dict[int, _IntBundle] = {}
        self._field_bundles: dict[int, _FieldBundle] = {}
        self.uct_groups: dict[int, FgAbelianGroup] = {}
        # the integral profile backing UCT computations (shared via homology())
        self._integral: HomologyProfile | None = None
        if self.mode in ("uct", "field") and not slice_.modulus:
            self._integral = homology(slice_, COEFF_Z)

        for n in range(self.top_degree + 1):
            self._groups[n] = self._compute_group(n)
        if self.mode == "field" and self._integral is not None:
            for n in range(self.top_degree + 1):
                expected = self._integral.group_with_coefficients(n, self.coeff)
                self.uct_groups[n] = expected
                if expected != self._groups[n]:
                    raise InternalCheckError(
                        f"mod-{self.coeff} homology at degree {n}: field result "
                        f"{self._groups[n]} != universal-coefficient result {expected}")

    # -- group computation -------------------------------------------------

    def _factors(self, n: int) -> tuple[int, ...]:
        """Invariant factors of d_n (n = 0 gives the empty boundary)."""
        if n == 0 or n > self.slice.max_degree:
            return ()
        if n not in self._int_factors:
            self._int_factors[n] = invariant_factors(self.slice.d(n))
        return self._int_factors[n]

    def _compute_group(self, n: int) -> FgAbelianGroup:
        if self.mode == "int":
            rank_dn = len(self._factors(n))
            above = self._factors(n + 1)
            free = self.slice.sizes[n] - rank_dn - len(above)
            torsion = tuple(d for d in above if d >= 2)
            return FgAbelianGroup(free, torsion)
        if self.mode == "field":
            p = self.coeff
            r_n = rank_mod_p(self.slice.d(n), p) if n >= 1 else 0
            r_up = rank_mod_p(self.slice.d(n + 1), p)
            b = self.slice.sizes[n] - r_n - r_up
            return FgAbelianGroup(0, (p,) * b)
        return self._integral.group_with_coefficients(n, self.coeff)

    def group(self, n: int) -> FgAbelianGroup:
        if not 0 <= n <= self.top_degree:
            raise ValueError(f"degree {n} not computed (top degree {self.top_degree})")
        return self._groups[n]

    def groups(self) -> list[FgAbelianGroup]:
        return [self._groups[n] for n in range(self.top_degree + 1)]

    def group_with_coefficients(self, n: int, m: int) -> FgAbelianGroup:
        """Universal coefficients: H_n (x) Z/m extended by Tor(H_{n-1}, Z/m)."""
        if self.mode != "int":
            raise ValueError("universal coefficients need the integral profile")
        g_n = self.group(n)
        orders = [m] * g_n.free_rank + [math.gcd(t, m) for t in g_n.torsion]
        if n >= 1:
            orders += [math.gcd(t, m) for t in self.group(n - 1).torsion]
        return FgAbelianGroup.from_orders(0, orders)

    # -- generator data -----------------------------------------------------

    def _int_bundle(self, n: int) -> _IntBundle:
        if n not in self._int_bundles:
            d_n = self.slice.d(n)
            kernel = ColumnEchelon(d_n).kernel_matrix()
            ech_kernel = ColumnEchelon(kernel)
            d_up = self.slice.d(n + 1)
            x_cols = []
            for c in range(d_up.cols):
                col = dict(d_up.column(c))
                sol = ech_kernel.solve(col)
                if sol is None:
                    raise InternalCheckError("boundary column is not a cycle")
                x_cols.append({i: v for i, v in enumerate(sol) if v})
            x = SparseIntMatrix.from_columns(kernel.cols, x_cols)
            presented = present_fg_abelian(kernel.cols, x)
            if FgAbelianGroup(presented.free_rank, presented.torsion) != self._groups[n]:
                raise InternalCheckError(
                    f"generator presentation at degree {n} disagrees with the "
                    f"rank/torsion computation")
            self._int_bundles[n] = _IntBundle(kernel, ech_kernel, presented)
        return self._int_bundles[n]

    def _field_bundle(self, n: int) -> _FieldBundle:
        if n not in self._field_bundles:
            p = self.coeff
            d_n = self.slice.d(n).to_mod(p)
            kernel = FieldEchelon(d_n, p).kernel_matrix()
            ech_kernel = FieldEchelon(kernel, p)
            space = FieldRowSpace(p)
            d_up = self.slice.d(n + 1).to_mod(p)
            for c in range(d_up.cols):
                col = dict(d_up.column(c))
                sol = ech_kernel.solve(col)
                if sol is None:
                    raise InternalCheckError("boundary column is not a cycle mod p")
                space.add({i: v for i, v in enumerate(sol) if v})
            free_coords = [i for i in range(kernel.cols) if i not in space.rows]
            group = FgAbelianGroup(0, (p,) * len(free_coords))
            if group != self._groups[n]:
                raise InternalCheckError(
                    f"mod-{p} generator data at degree {n} disagrees with ranks")
            self._field_bundles[n] = _FieldBundle(kernel, ech_kernel, space,
                                                  free_coords, group)
        return self._field_bundles[n]

    def generators(self, n: int) -> list[list[int]]:
        """Explicit generating cycle vectors in the chain basis at degree n."""
        self.group(n)
        if self.mode == "int":
            bundle = self._int_bundle(n)
            return [bundle.kernel.mul_vec(list(g)) for g in bundle.presented.gens]
        if self.mode == "field":
            bundle = self._field_bundle(n)
            out = []
            for i in bundle.free_coords:
                vec = [0] * self.slice.sizes[n]
                for r, v in bundle.kernel.column(i):
                    vec[r] = v
                out.append(vec)
            return out
        raise ValueError("no generator data for composite coefficients")

    def reduce(self, n: int, vec: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of a cycle vector in the homology basis at degree n."""
        self.group(n)
        if self.mode == "int":
            bundle = self._int_bundle(n)
            sol = bundle.ech_kernel.solve(list(vec))
            if sol is None:
                raise InternalCheckError("vector to reduce is not a cycle")
            return bundle.presented.reduce(sol)
        if self.mode == "field":
            p = self.coeff
            bundle = self._field_bundle(n)
            sol = bundle.ech_kernel.solve([v % p for v in vec])
            if sol is None:
                raise InternalCheckError("vector to reduce is not a cycle mod p")
            red = bundle.image_space.reduce({i: v for i, v in enumerate(sol) if v})
            return tuple(red.get(i, 0) for i in bundle.free_coords)
        raise ValueError("no generator data for composite coefficients")

    # -- reporting ----------------------------------------------------------

    @property
    def coeff_str(self) -> str:
        return "Z" if self.coeff == 0 else f"Z/{self.coeff}"

    def rows(self) -> list[dict]:
        out = []
        for n in range(self.top_degree + 1):
            g = self.group(n)
            out.append({"degree": n, "free_rank": g.free_rank, "torsion": list(g.torsion)})
        return out

    def __repr__(self):
        parts = ", ".join(f"H_{n}={self.group(n)}" for n in range(self.top_degree + 1))
        return f"HomologyProfile({self.slice.name}; {self.coeff_str}; {parts})"


_profile_cache: dict[tuple[int, int], tuple[ComplexSlice, HomologyProfile]] = {}


def homology(slice_: ComplexSlice, coefficients: int = COEFF_Z) -> HomologyProfile:
    """Homology of a slice over Z (coefficients=0) or Z/m; results are cached."""
    key = (id(slice_), coefficients)
    hit = _profile_cache.get(key)
    if hit is not None and hit[0] is slice_:
        return hit[1]
    prof = HomologyProfile(slice_, coefficients)
    _profile_cache[key] = (slice_, prof)
    return prof


def clear_profile_cache() -> None:
    _profile_cache.clear()


# ---------------------------------------------------------------------------
# induced maps


def induced_map(f: ChainMap, source_h: HomologyProfile, target_h: HomologyProfile,
                n: int) -> AbelianHom:
    """Push source homology generators through a chain map and reduce."""
    if source_h.slice is not f.source or target_h.slice is not f.target:
        raise ValueError("profiles do not match the chain map's slices")
    if source_h.mode == "field" and target_h.mode != "field":
        raise ValueError("cannot induce from a mod-p profile into an integral one")
    if source_h.mode == "field" and source_h.coeff != target_h.coeff:
        raise ValueError("coefficient mismatch between profiles")
    src_group = source_h.group(n)
    dst_group = target_h.group(n)
    cols = []
    for gen in source_h.generators(n):
        pushed = f.mat(n).mul_vec(gen)
        cols.append(target_h.reduce(n, pushed))
    matrix = [[cols[j][i] for j in range(len(cols))] for i in range(dst_group.ngens)]
    return AbelianHom(src_group, dst_group, matrix)


def action_on_homology(action: GroupAction, profile: HomologyProfile,
                       n: int) -> list[AbelianHom]:
    """The automorphisms of H_n induced by each element of Q."""
    slice_ = profile.slice
    if slice_.kind != "bar":
        raise ValueError("the Q-action on homology is computed on the full bar complex")
    if slice_.sizes[1] != action.g.order:
        raise ValueError("profile does not belong to the acted-on group")
    from .chains import decode_tuple, encode_tuple  # local import to avoid cycle

    order = action.g.order
    group = profile.group(n)
    gens = profile.generators(n)
    homs = []
    for qi in range(action.q.order):
        p = action.perm[qi]
        entries = {}
        for t in range(order ** n):
            tup = decode_tuple(order, n, t)
            entries[(encode_tuple(order, tuple(p[x] for x in tup)), t)] = 1
        mat = SparseIntMatrix(order ** n, order ** n, entries)
        cols = [profile.reduce(n, mat.mul_vec(g)) for g in gens]
        matrix = [[cols[j][i] for j in range(len(cols))] for i in range(group.ngens)]
        homs.append(AbelianHom(group, group, matrix))
    return homs


def fixed_homology(action: GroupAction, profile: HomologyProfile, n: int) -> FgSubgroup:
    """Subgroup of H_n fixed by the induced Q-action."""
    return fixed_points_of_hom_family(profile.group(n), action_on_homology(action, profile, n))


# ---------------------------------------------------------------------------
# connecting homomorphism and long exact sequence


def connecting_homomorphism(ses: InvariantSES, n: int,
                            validate_lifts: bool = True) -> AbelianHom:
    """Zig-zag map h_n(coker N) -> H_{n-1}(orbit space) of the norm sequence.

    Lift a cokernel cycle into the invariant complex, take its boundary,
    divide back through the (diagonal) norm, and reduce in the orbit-space
    profile.  Independence of the lift is spot-checked on perturbed lifts.
    """
    d_prof = homology(ses.quotient)
    coinv_prof = homology(ses.coinvariants)
    p = ses.p
    src = d_prof.group(n)
    dst = coinv_prof.group(n - 1)

    proj = ses.project.mat(n)
    d_to_inv = [-1] * ses.quotient.sizes[n]
    for (i, j), v in proj.entries.items():
        if v == 1:
            d_to_inv[i] = j
    norm_diag = ses.norm.mat(n - 1)
    inv_d = ses.invariants.d(n)

    free_positions = [j for j in range(ses.invariants.sizes[n]) if j not in set(d_to_inv)]

    def push(lift: list[int]) -> tuple[int, ...]:
        w = inv_d.mul_vec(lift)
        y = [0] * ses.coinvariants.sizes[n - 1]
        for j, val in enumerate(w):
            if not val:
                continue
            s = norm_diag.get(j, j)
            if s == 0 or val % s:
                raise InternalCheckError("boundary of lift is not in the norm image")
            y[j] = val // s
        if n - 1 >= 1:
            if any(ses.coinvariants.d(n - 1).mul_vec(y)):
                raise InternalCheckError("pulled-back chain is not a cycle")
        return coinv_prof.reduce(n - 1, y)

    cols = []
    for gen in d_prof.generators(n):
        lift = [0] * ses.invariants.sizes[n]
        for i, c in enumerate(gen):
            if c:
                lift[d_to_inv[i]] = c % p
        coords = push(lift)
        if validate_lifts:
            if d_to_inv:
                alt = list(lift)
                alt[d_to_inv[0]] += p
                if push(alt) != coords:
                    raise InternalCheckError("connecting map depends on the lift")
            if free_positions:
                alt = list(lift)
                alt[free_positions[0]] += 1
                if push(alt) != coords:
                    raise InternalCheckError("connecting map depends on the lift")
        cols.append(coords)
    matrix = [[cols[j][i] for j in range(len(cols))] for i in range(dst.ngens)]
    return AbelianHom(src, dst, matrix)


@dataclass
class LesNode:
    """A candidate exact sequence: groups[i] --maps[i]--> groups[i+1]."""

    labels: list[str]
    groups: list[FgAbelianGroup]
    maps: list[AbelianHom]

    def __post_init__(self):
        if len(self.groups) != len(self.labels) or len(self.maps) != len(self.groups) - 1:
            raise ValueError("sequence shape mismatch")
        for i, m in enumerate(self.maps):
            if m.source != self.groups[i] or m.target != self.groups[i + 1]:
                raise ValueError(f"map {i} does not connect its neighbouring groups")


@dataclass
class ExactnessRecord:
    label: str
    composite_zero: bool
    image_order: int
    kernel_order: int

    @property
    def exact(self) -> bool:
        return self.composite_zero and self.image_order == self.kernel_order


@dataclass
class ExactnessReport:
    records: list[ExactnessRecord]

    @property
    def ok(self) -> bool:
        return all(r.exact for r in self.records)


def exactness_check(node: LesNode) -> ExactnessReport:
    """At each interior node: composite is zero and |im in| = |ker out|."""
    records = []
    for i in range(1, len(node.groups) - 1):
        f, g = node.maps[i - 1], node.maps[i]
        composite = g.compose(f)
        im_f = image_of_hom(f).order()
        ker_g = kernel_of_hom(g).order()
        im_g = image_of_hom(g).order()
        here = node.groups[i].order()
        if None in (im_f, ker_g, im_g, here):
            raise ValueError("exactness check needs finite groups")
        if ker_g * im_g != here:
            raise InternalCheckError("kernel/image orders do not multiply to the group order")
        records.append(ExactnessRecord(node.labels[i], composite.is_zero_map(),
                                       im_f, ker_g))
    return ExactnessReport(records)


def invariant_les(ses: InvariantSES, top_degree: int) -> LesNode:
    """The reduced long exact sequence of the norm cokernel, degrees top..1."""
    if top_degree + 1 > ses.max_degree:
        raise ValueError("sequence needs boundaries one degree above its top")
    coinv_prof = homology(ses.coinvariants)
    inv_prof = homology(ses.invariants)
    d_prof = homology(ses.quotient)
    labels: list[str] = []
    groups: list[FgAbelianGroup] = []
    maps: list[AbelianHom] = []

    def push(label, group):
        labels.append(label)
        groups.append(group)

    for n in range(top_degree, 0, -1):
        if n == top_degree:
            push(f"H~_{n}(orbit space)", coinv_prof.group(n))
        maps.append(induced_map(ses.norm, coinv_prof, inv_prof, n))
        push(f"H~_{n}(invariants)", inv_prof.group(n))
        maps.append(induced_map(ses.project, inv_prof, d_prof, n))
        push(f"h_{n}(coker N)", d_prof.group(n))
        maps.append(connecting_homomorphism(ses, n))
        push(f"H~_{n - 1}(orbit space)", coinv_prof.group(n - 1))
    return LesNode(labels, groups, maps)


# ---------------------------------------------------------------------------
# engine cross-checks


@dataclass
class UctRecord:
    degree: int
    prime: int
    field_betti: int
    uct_betti: int

    @property
    def ok(self) -> bool:
        return self.field_betti == self.uct_betti


def uct_crosscheck(slice_: ComplexSlice, primes: Sequence[int] = (2, 3, 5)) -> list[UctRecord]:
    """Field Betti numbers vs. universal coefficients on the integral profile."""
    if slice_.modulus:
        raise ValueError("UCT cross-check applies to integral complexes")
    prof = homology(slice_, COEFF_Z)
    records = []
    ranks: dict[tuple[int, int], int] = {}

    def rk(n: int, p: int) -> int:
        if n == 0 or n > slice_.max_degree:
            return 0
        if (n, p) not in ranks:
            ranks[(n, p)] = rank_mod_p(slice_.d(n), p)
        return ranks[(n, p)]

    for p in primes:
        for n in range(prof.top_degree + 1):
            field_b = slice_.sizes[n] - rk(n, p) - rk(n + 1, p)
            g_n = prof.group(n)
            uct_b = g_n.free_rank + sum(1 for t in g_n.torsion if t % p == 0)
            if n >= 1:
                uct_b += sum(1 for t in prof.group(n - 1).torsion if t % p == 0)
            records.append(UctRecord(n, p, field_b, uct_b))
    return records


def dd_zero(slice_: ComplexSlice) -> bool:
    """Re-verify d.d = 0 (also enforced at construction)."""
    for n in range(2, slice_.max_degree + 1):
        prod = slice_.d(n - 1).mul(slice_.d(n))
        if slice_.modulus:
            prod = prod.to_mod(slice_.modulus)
        if not prod.is_zero():
            return False
    return True
