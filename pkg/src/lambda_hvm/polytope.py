"""The stabilizer polytope, its polar dual Lambda, and vertex certification.

Lambda = {X Hermitian, Tr X = 1, Tr(P_sigma X) >= 0 for every pure stabilizer
state sigma}.  Operators are flattened to real coordinate vectors

    (X_00, ..., X_{D-1,D-1}, Re X_01, Im X_01, Re X_02, ...)

so that Tr(P X) is an exact linear functional; all coordinates are real
cyclotomic numbers.  A vertex certificate is exact: every inequality holds,
and the facets active at the point span (after projecting out the trace
direction) a space of dimension D^2 - 1, making the point the unique
solution of its active system.

Vertex enumeration is exact and complete: brute force over active subsets at
the smallest instances, double description on the facet cone otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Iterable, Optional, Sequence

from .cyclotomic import CycNumber, zeta
from .dd import extreme_rays
from .linalg import CycMatrix, exact_rank, exact_solve
from .pauli import (PhasePoint, pauli_mono, pauli_order, phase_space,
                    symplectic_product)
from .stabilizer import (IsotropicSubgroup, StabilizerProjector,
                         ValueAssignment, closure_under_inference,
                         enumerate_isotropics, noncontextual_assignments,
                         projector, projector_matrix, value_assignments)

__all__ = [
    "coord_order",
    "operator_coords",
    "matrix_from_coords",
    "functional_vector",
    "coords_key",
    "stabilizer_states",
    "LambdaHRep",
    "lambda_hrep",
    "hrep_from_operators",
    "membership",
    "VertexCertificate",
    "VertexRejection",
    "certify_vertex",
    "VertexSet",
    "enumerate_vertices",
    "cnc_phase_point",
    "additive_assignments",
    "wigner_operator",
    "pauli_coefficients",
    "detect_cnc_form",
    "PauliBound",
    "pauli_bound",
    "polar_dual_vertices",
    "duality_dilation_check",
    "save_vertex_file",
    "load_vertex_file",
    "save_facet_file",
    "load_facet_file",
]

BRUTE_FORCE_LIMIT = 2000  # max number of active subsets for exhaustive search


def coord_order(d: int) -> int:
    """Cyclotomic order of the coordinate field: needs both mu and i."""
    return lcm(pauli_order(d), 4)


# ---------------------------------------------------------------------------
# coordinates


def _to_order(x: CycNumber, order: int) -> CycNumber:
    return x.promoted(lcm(x.order, order))


def operator_coords(mat: CycMatrix, d: int) -> tuple[CycNumber, ...]:
    """Flatten a Hermitian matrix to real coordinates, exactly.

    Coordinates are promoted at least into the facet coordinate field;
    operators with entries in a larger cyclotomic field (e.g. magic states)
    keep the larger order, and mixed-order arithmetic handles the rest.
    """
    order = coord_order(d)
    dim = mat.rows
    out = []
    for i in range(dim):
        x = mat[i, i]
        if not x.is_real():
            raise ValueError("matrix has a non-real diagonal entry")
        out.append(_to_order(x, order))
    for i in range(dim):
        for j in range(i + 1, dim):
            x = mat[i, j]
            out.append(_to_order(x.real_part(), order))
            out.append(_to_order(x.imag_part(), order))
    return tuple(out)


def matrix_from_coords(coords: Sequence[CycNumber], d: int, n: int) -> CycMatrix:
    dim = d ** n
    if len(coords) != dim * dim:
        raise ValueError(f"need {dim * dim} coordinates")
    i_unit = zeta(4)
    rows = [[CycNumber.zero() for _ in range(dim)] for _ in range(dim)]
    for i in range(dim):
        rows[i][i] = coords[i]
    k = dim
    for i in range(dim):
        for j in range(i + 1, dim):
            re, im = coords[k], coords[k + 1]
            k += 2
            rows[i][j] = re + i_unit * im
            rows[j][i] = re - i_unit * im
    return CycMatrix(rows)


def functional_vector(mat: CycMatrix, d: int) -> tuple[CycNumber, ...]:
    """Vector f with Tr(mat . X) = f . coords(X) for Hermitian X."""
    order = coord_order(d)
    dim = mat.rows
    out = []
    for i in range(dim):
        x = mat[i, i]
        if not x.is_real():
            raise ValueError("functional needs a Hermitian operator")
        out.append(_to_order(x, order))
    for i in range(dim):
        for j in range(i + 1, dim):
            x = mat[i, j]
            out.append(_to_order(2 * x.real_part(), order))
            out.append(_to_order(2 * x.imag_part(), order))
    return tuple(out)


def coords_key(coords: Sequence[CycNumber], d: int) -> Optional[tuple]:
    """Canonical hashable key inside the facet coordinate field.

    Values represented in a larger field are demoted exactly when possible;
    None means the point genuinely lies outside the field (so it cannot be
    a vertex of this polytope).
    """
    order = coord_order(d)
    out = []
    for c in coords:
        if order % c.order == 0:
            p = c.promoted(order)
        else:
            p = c.demoted(order)
            if p is None:
                return None
        out.append((p.num, p.den))
    return tuple(out)


def _dot(f: Sequence[CycNumber], x: Sequence[CycNumber]) -> CycNumber:
    acc = CycNumber.zero()
    for a, b in zip(f, x):
        if not (a.is_zero() or b.is_zero()):
            acc = acc + a * b
    return acc


# ---------------------------------------------------------------------------
# stabilizer states and the H-representation


@lru_cache(maxsize=None)
def stabilizer_states(d: int, n: int) -> tuple[StabilizerProjector, ...]:
    """All pure stabilizer states as rank-1 projectors, deduplicated."""
    out = []
    seen = set()
    for group in enumerate_isotropics(d, n, only_maximal=True):
        for r in value_assignments(group):
            proj = projector(group, r)
            key = coords_key(operator_coords(proj.matrix, d), d)
            if key not in seen:
                seen.add(key)
                out.append(proj)
    return tuple(out)


@dataclass(frozen=True)
class LambdaHRep:
    """Facet description: one inequality Tr(F_i X) >= 0 per operator F_i."""

    d: int
    n: int
    labels: tuple[str, ...]
    operators: tuple[CycMatrix, ...]
    vectors: tuple[tuple[CycNumber, ...], ...]

    @property
    def dim(self) -> int:
        return (self.d ** self.n) ** 2

    def facet_count(self) -> int:
        return len(self.vectors)

    def trace_vector(self) -> tuple[CycNumber, ...]:
        dim = self.d ** self.n
        one, zero = CycNumber.one(), CycNumber.zero()
        return tuple([one] * dim + [zero] * (dim * dim - dim))


def hrep_from_operators(d: int, n: int, named_ops: Iterable[tuple[str, CycMatrix]]) -> LambdaHRep:
    labels, ops, vecs = [], [], []
    for name, mat in named_ops:
        labels.append(name)
        ops.append(mat)
        vecs.append(functional_vector(mat, d))
    return LambdaHRep(d, n, tuple(labels), tuple(ops), tuple(vecs))


@lru_cache(maxsize=None)
def lambda_hrep(d: int, n: int) -> LambdaHRep:
    """The H-representation of Lambda: one facet per pure stabilizer state."""
    if d < 2:
        raise ValueError("qudit dimension must be >= 2")
    states = stabilizer_states(d, n)
    names = []
    for proj in states:
        gens = ",".join(g.serialize() for g in proj.group.generators)
        vals = ",".join(str(proj.assignment(g)) for g in proj.group.generators)
        names.append(f"I=<{gens}>;r=({vals})")
    return hrep_from_operators(d, n, zip(names, (p.matrix for p in states)))


def membership(coords: Sequence[CycNumber], hrep: LambdaHRep) -> tuple[bool, list[int], list[int]]:
    """(is_member, active facet indices, violated facet indices), exact."""
    active, violated = [], []
    for idx, vec in enumerate(hrep.vectors):
        s = _dot(vec, coords).sign()
        if s == 0:
            active.append(idx)
        elif s < 0:
            violated.append(idx)
    return not violated, active, violated


# ---------------------------------------------------------------------------
# certification


@dataclass(frozen=True)
class VertexCertificate:
    active: tuple[int, ...]
    rank: int


@dataclass(frozen=True)
class VertexRejection:
    reason: str
    violated: tuple[int, ...]
    rank: int


def _projected_rows(hrep: LambdaHRep, indices: Iterable[int]) -> list[list[CycNumber]]:
    """Facet functionals restricted to the trace-zero subspace."""
    dim = hrep.d ** hrep.n
    inv_dim = Fraction(1, dim)
    rows = []
    for idx in indices:
        vec = hrep.vectors[idx]
        tr = hrep.operators[idx].trace() * inv_dim
        row = list(vec)
        for i in range(dim):
            row[i] = row[i] - tr
        rows.append(row)
    return rows


def _greedy_independent(rows: list[list[CycNumber]], target: int) -> list[int]:
    """Float Gram-Schmidt preselection of a likely-independent row subset."""
    import numpy as np

    basis: list = []
    chosen: list[int] = []
    for idx, row in enumerate(rows):
        v = np.array([x.approx().real for x in row], dtype=float)
        for b in basis:
            v = v - (v @ b) * b
        norm = float(np.linalg.norm(v))
        if norm > 1e-9:
            basis.append(v / norm)
            chosen.append(idx)
            if len(chosen) == target:
                break
    return chosen


def certify_vertex(coords: Sequence[CycNumber], hrep: LambdaHRep):
    """Exact vertex certificate for a trace-one operator, or a rejection.

    Checks every facet inequality and that the active functionals pin the
    point uniquely inside the trace-one affine space (projected rank
    D^2 - 1).  A float Gram-Schmidt pass preselects candidate rows; the
    certificate itself is always an exact rank computation, with a full
    exact fallback before any rejection.
    """
    target = hrep.dim - 1
    ok, active, violated = membership(coords, hrep)
    if not ok:
        return VertexRejection("facet inequality violated", tuple(violated), -1)
    if not active:
        return VertexRejection("interior point: no active facets", (), 0)
    rows = _projected_rows(hrep, active)
    if len(rows) > target:
        subset = _greedy_independent(rows, target)
        if len(subset) == target and exact_rank([rows[i] for i in subset]) == target:
            return VertexCertificate(tuple(active), target)
    rank = exact_rank(rows)
    if rank != target:
        return VertexRejection(f"active set rank {rank} < {target}", (), rank)
    return VertexCertificate(tuple(active), rank)


# ---------------------------------------------------------------------------
# vertex enumeration


@dataclass(frozen=True)
class VertexInfo:
    index: int
    matrix: CycMatrix
    coords: tuple[CycNumber, ...]
    certificate: VertexCertificate


class VertexSet:
    """Certified vertices of Lambda with a canonical exact index."""

    def __init__(self, hrep: LambdaHRep, vertices: Sequence[VertexInfo]):
        self.hrep = hrep
        self.d, self.n = hrep.d, hrep.n
        self.vertices = tuple(vertices)
        self.index = {coords_key(v.coords, self.d): v.index for v in self.vertices}

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __getitem__(self, idx: int) -> VertexInfo:
        return self.vertices[idx]

    def lookup(self, coords: Sequence[CycNumber]) -> Optional[int]:
        return self.index.get(coords_key(coords, self.d))

    def lookup_matrix(self, mat: CycMatrix) -> Optional[int]:
        return self.lookup(operator_coords(mat, self.d))


def _vertices_from_coord_list(hrep: LambdaHRep, coord_list: Iterable[Sequence[CycNumber]]) -> VertexSet:
    infos = []
    seen = set()
    for coords in coord_list:
        key = coords_key(coords, hrep.d)
        if key in seen:
            continue
        cert = certify_vertex(coords, hrep)
        if not isinstance(cert, VertexCertificate):
            raise AssertionError(f"enumerated point failed certification: {cert}")
        seen.add(key)
        infos.append((key, coords, cert))
    infos.sort(key=lambda item: item[0])
    out = [VertexInfo(i, matrix_from_coords(c, hrep.d, hrep.n), tuple(c), cert)
           for i, (_, c, cert) in enumerate(infos)]
    return VertexSet(hrep, out)


def _enumerate_brute_force(hrep: LambdaHRep) -> VertexSet:
    """Solve every (D^2-1)-subset of facet equalities plus the trace row.

    Complete: a vertex has some independent active subset of that size, so
    it appears as the unique solution of at least one subsystem.
    """
    dim = hrep.dim
    need = dim - 1
    one = CycNumber.one()
    zero = CycNumber.zero()
    trace_row = list(hrep.trace_vector())
    found = []
    for subset in itertools.combinations(range(hrep.facet_count()), need):
        rows = [list(hrep.vectors[i]) for i in subset] + [trace_row]
        rhs = [zero] * need + [one]
        sol = exact_solve(rows, rhs)
        if sol is None:
            continue
        ok, _, _ = membership(sol, hrep)
        if ok:
            found.append(sol)
    return _vertices_from_coord_list(hrep, found)


def _enumerate_dd(hrep: LambdaHRep, progress=None) -> VertexSet:
    """Double description on the homogenization cone {Tr(F_i X) >= 0}."""
    rays = extreme_rays(hrep.vectors, hrep.dim, progress=progress)
    dim = hrep.d ** hrep.n
    coord_list = []
    for ray in rays:
        c = list(ray.coords)
        if not isinstance(c[0], CycNumber):
            c = [CycNumber.from_rational(Fraction(v)) for v in c]
        tr = c[0]
        for v in c[1:dim]:
            tr = tr + v
        s = tr.sign()
        if s <= 0:
            raise AssertionError("cone ray with nonpositive trace: Lambda unbounded?")
        inv = tr.inverse()
        coord_list.append([v * inv for v in c])
    return _vertices_from_coord_list(hrep, coord_list)


def enumerate_vertices(hrep: LambdaHRep, method: str = "auto", progress=None) -> VertexSet:
    """Complete certified vertex enumeration of the polytope.

    method: "brute" forces active-subset search, "dd" forces double
    description, "auto" picks brute force when the subset count is small.
    """
    if method not in ("auto", "brute", "dd"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        from math import comb
        n_subsets = comb(hrep.facet_count(), hrep.dim - 1)
        method = "brute" if n_subsets <= BRUTE_FORCE_LIMIT else "dd"
    if method == "brute":
        return _enumerate_brute_force(hrep)
    return _enumerate_dd(hrep, progress=progress)


# ---------------------------------------------------------------------------
# phase-point operators


def cnc_phase_point(points: Iterable[PhasePoint], gamma: ValueAssignment) -> CycMatrix:
    """A_Omega^gamma = (1/d^n) sum_{b in Omega} omega^{-gamma(b)} T_b.

    Requires Omega closed under inference and gamma noncontextual on it;
    Hermiticity then holds for every d and is verified exactly.
    """
    pts = sorted(set(points), key=lambda p: (p.az, p.ax))
    some = pts[0]
    d, n = some.d, some.n
    closed = closure_under_inference(pts)
    if closed != set(pts):
        raise ValueError("the support is not closed under inference")
    lookup = gamma.as_dict()
    if set(lookup) != set(pts):
        raise ValueError("assignment domain does not match the support")
    mat = projector_matrix(d, n, pts, lookup).scale(Fraction(len(pts), d ** n))
    if not mat.is_hermitian():
        raise ValueError("phase-point operator is not Hermitian: invalid assignment")
    return mat


def additive_assignments(d: int, n: int) -> list[dict[PhasePoint, int]]:
    """All d^{2n} additive functions gamma: E -> Z_d as explicit tables."""
    basis = [PhasePoint.unit_z(d, n, k) for k in range(n)] + \
            [PhasePoint.unit_x(d, n, k) for k in range(n)]
    out = []
    for values in itertools.product(range(d), repeat=2 * n):
        table = {}
        for point in phase_space(d, n):
            digits = list(point.az) + list(point.ax)
            table[point] = sum(v * c for v, c in zip(values, digits)) % d
        out.append(table)
    return out


def wigner_operator(d: int, n: int, gamma: dict[PhasePoint, int]) -> CycMatrix:
    """A_gamma = (1/d^n) sum_u omega^{gamma(u)} T_u (sign convention +gamma)."""
    neg = {p: (-v) % d for p, v in gamma.items()}
    return projector_matrix(d, n, list(neg), neg).scale(Fraction(len(neg), d ** n))


def pauli_coefficients(mat: CycMatrix, d: int, n: int) -> dict[PhasePoint, CycNumber]:
    """x_a = Tr(T_a^dag M), so M = (1/d^n) sum_a x_a T_a."""
    out = {}
    for a in phase_space(d, n):
        mono = pauli_mono(a).dagger()
        acc = CycNumber.zero()
        for j, (p, e) in enumerate(zip(mono.perm, mono.exps)):
            x = mat[j, p]
            if not x.is_zero():
                acc = acc + zeta(pauli_order(d), e) * x
        out[a] = acc
    return out


def detect_cnc_form(mat: CycMatrix, d: int, n: int):
    """If mat = A_Omega^gamma for a cnc pair, return (support, assignment).

    Otherwise return None.  Detection is exact: Pauli coefficients must be
    roots of unity on an inference-closed support carrying a noncontextual
    assignment matching them.
    """
    coeffs = pauli_coefficients(mat, d, n)
    omega = zeta(pauli_order(d), 1 if d % 2 else 2)
    support = []
    gamma = {}
    for a, x in coeffs.items():
        if x.is_zero():
            continue
        for k in range(d):
            if x == omega ** ((-k) % d):
                support.append(a)
                gamma[a] = k
                break
        else:
            return None
    support_set = set(support)
    if closure_under_inference(support) != support_set:
        return None
    assignment = ValueAssignment.from_dict(d, gamma)
    from .stabilizer import assignment_is_valid
    if not assignment_is_valid(support, assignment):
        return None
    return frozenset(support), assignment


# ---------------------------------------------------------------------------
# the Pauli expectation bound


@dataclass(frozen=True)
class PauliBound:
    max_abs_squared: CycNumber
    argmax: PhasePoint

    def leq_one(self) -> bool:
        return (CycNumber.one() - self.max_abs_squared).sign() >= 0

    def value(self) -> float:
        return float(self.max_abs_squared) ** 0.5


def pauli_bound(mat: CycMatrix, d: int, n: int) -> PauliBound:
    """max_a |Tr(T_a X)| over all Pauli labels, compared exactly via |.|^2.

    Tr(T_a^dag X) ranges over the same modulus set as Tr(T_a X) since
    T_a^dag = T_{-a}.
    """
    best = None
    arg = None
    for a, x in pauli_coefficients(mat, d, n).items():
        m = x.abs_squared()
        if best is None or (m - best).sign() > 0:
            best, arg = m, a
    return PauliBound(best, arg)


# ---------------------------------------------------------------------------
# duality and dilation checks


def polar_dual_vertices(d: int, n: int, operators: Sequence[CycMatrix],
                        method: str = "auto") -> VertexSet:
    """Vertices of {X in Herm_1 : Tr(V_i X) >= 0} for the given operators."""
    hrep = hrep_from_operators(d, n, ((f"op{i}", m) for i, m in enumerate(operators)))
    return enumerate_vertices(hrep, method=method)


def _dilate(mat: CycMatrix, c: Fraction, d: int, n: int) -> CycMatrix:
    dim = d ** n
    mixed = CycMatrix.identity(dim, Fraction(1, dim))
    return mixed + (mat - mixed).scale(c)


def duality_dilation_check(d: int, n: int, lambda_vertices: Optional[VertexSet] = None,
                           dilations: Sequence[Fraction] = (Fraction(1, 2), Fraction(1), Fraction(2)),
                           method: str = "auto") -> dict:
    """Exact duality report for the stabilizer polytope and Wigner simplex.

    Verifies (i) double duality Lambda* = SP on computed vertex sets,
    (ii) the dilation identity (c.M)* = (1/c).M* on the simplex spanned by
    the additive phase-point operators, (iii) their trace orthogonality, and
    (iv) the inclusion-exclusion expansion over a line cover (n = 1).
    Raises AssertionError with a witness on any failure.
    """
    report: dict = {"d": d, "n": n}
    hrep = lambda_hrep(d, n)
    if lambda_vertices is None:
        lambda_vertices = enumerate_vertices(hrep, method=method)
    report["lambda_vertex_count"] = len(lambda_vertices)

    # (i) Lambda* should be exactly SP: its vertices are the stabilizer states
    dual = polar_dual_vertices(d, n, [v.matrix for v in lambda_vertices], method=method)
    sp_keys = {coords_key(operator_coords(p.matrix, d), d) for p in stabilizer_states(d, n)}
    dual_keys = {coords_key(v.coords, d) for v in dual}
    assert dual_keys == sp_keys, "double dual of SP does not return SP"
    report["double_dual_ok"] = True
    report["sp_vertex_count"] = len(sp_keys)

    # (ii)+(iii) Wigner simplex: self-dual up to the d^n trace normalization
    gammas = additive_assignments(d, n)
    points = [wigner_operator(d, n, g) for g in gammas]
    dim = d ** n
    for i, a in enumerate(points):
        for j, b in enumerate(points):
            expected = dim if i == j else 0
            assert (a @ b).trace() == expected, "phase-point trace orthogonality failed"
    report["simplex_orthogonality"] = f"Tr(A A') = {dim} * delta (d^n, not 1)"

    simplex_keys = {coords_key(operator_coords(p, d), d) for p in points}
    dual_simplex = polar_dual_vertices(d, n, points, method=method)
    assert {coords_key(v.coords, d) for v in dual_simplex} == simplex_keys, \
        "Wigner simplex is not self-dual"
    report["simplex_self_dual"] = True

    for c in dilations:
        dilated = [_dilate(p, c, d, n) for p in points]
        dual_of_dilated = polar_dual_vertices(d, n, dilated, method=method)
        expected = {coords_key(operator_coords(_dilate(p, 1 / c, d, n), d), d) for p in points}
        assert {coords_key(v.coords, d) for v in dual_of_dilated} == expected, \
            f"dilation identity failed at c = {c}"
    report["dilation_ok"] = [str(c) for c in dilations]

    # (iv) inclusion-exclusion over a line cover (single qudit only)
    if n == 1:
        report["inclusion_exclusion_ok"] = _check_inclusion_exclusion(d)
    return report


def _check_inclusion_exclusion(d: int) -> bool:
    """A_gamma = (1/d) sum_{S subset cover} (-1)^{|S|+1} |<a_S>| P^{gamma}_{<a_S>}.

    The cover is the set of maximal cyclic subgroups of E; P here is the
    formal projector-shaped sum with +gamma phases, and the identity is a
    pure inclusion-exclusion statement about coefficients.
    """
    lines: dict[tuple, IsotropicSubgroup] = {}
    for a in phase_space(d, 1):
        if a.is_zero():
            continue
        g = IsotropicSubgroup.from_generators(d, 1, [a])
        lines.setdefault(g.key(), g)
    cover = [g for g in lines.values()
             if not any(set(g.elements) < set(h.elements) for h in lines.values())]
    gammas = additive_assignments(d, 1)
    for gamma in gammas:
        target = wigner_operator(d, 1, gamma)
        acc = CycMatrix.zeros(d, d)
        for size in range(1, len(cover) + 1):
            for subset in itertools.combinations(cover, size):
                inter = set(subset[0].elements)
                for g in subset[1:]:
                    inter &= set(g.elements)
                pts = sorted(inter, key=lambda p: (p.az, p.ax))
                neg = {p: (-gamma[p]) % d for p in pts}
                formal = projector_matrix(d, 1, pts, neg).scale(Fraction(len(pts), d))
                acc = acc + formal if size % 2 else acc - formal
        if acc != target:
            raise AssertionError("inclusion-exclusion expansion failed")
    return True


# ---------------------------------------------------------------------------
# vertex-set files


def save_vertex_file(path: str, vset: VertexSet):
    """Text format: header line, then one vertex per line (tab-separated)."""
    order = coord_order(vset.d)
    with open(path, "w") as fh:
        fh.write(f"# lambda-vertices d={vset.d} n={vset.n} count={len(vset)} order={order}\n")
        for v in vset.vertices:
            fh.write("\t".join(c.serialize() for c in v.coords) + "\n")


def save_facet_file(path: str, hrep: LambdaHRep):
    """Facet functionals in the same exact per-line coordinate format."""
    order = coord_order(hrep.d)
    with open(path, "w") as fh:
        fh.write(f"# lambda-facets d={hrep.d} n={hrep.n} count={hrep.facet_count()} order={order}\n")
        for label, vec in zip(hrep.labels, hrep.vectors):
            fh.write(label + "\t" + "\t".join(c.serialize() for c in vec) + "\n")


def load_facet_file(path: str) -> LambdaHRep:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# lambda-facets"):
            raise ValueError("not a facet file")
        fields = dict(kv.split("=") for kv in header.split()[2:])
        d, n, count = int(fields["d"]), int(fields["n"]), int(fields["count"])
        labels, ops, vecs = [], [], []
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            toks = line.split("\t")
            labels.append(toks[0])
            coords = [CycNumber.parse(t) for t in toks[1:]]
            vecs.append(tuple(coords))
            # recover the operator: facet vectors double the off-diagonal parts
            dim = d ** n
            fixed = list(coords)
            for k in range(dim, dim * dim):
                fixed[k] = fixed[k] / 2
            ops.append(matrix_from_coords(fixed, d, n))
        if len(vecs) != count:
            raise ValueError(f"facet count mismatch: header {count}, body {len(vecs)}")
    return LambdaHRep(d, n, tuple(labels), tuple(ops), tuple(vecs))


def load_vertex_file(path: str) -> VertexSet:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# lambda-vertices"):
            raise ValueError("not a vertex-set file")
        fields = dict(kv.split("=") for kv in header.split()[2:])
        d, n, count = int(fields["d"]), int(fields["n"]), int(fields["count"])
        hrep = lambda_hrep(d, n)
        coord_list = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            coord_list.append([CycNumber.parse(tok) for tok in line.split("\t")])
        if len(coord_list) != count:
            raise ValueError(f"vertex count mismatch: header {count}, body {len(coord_list)}")
    return _vertices_from_coord_list(hrep, coord_list)
