"""The hidden-variable model: states as probability distributions over the
polytope vertices, deterministic Clifford vertex dynamics, probabilistic
measurement update kernels, the sampling simulator, and the exact
quantum-mechanical oracle it is cross-validated against.

Two arithmetic modes run through the same code paths:

exact    rational feasibility LP on the power-basis coefficients of the
         coordinates (splitting one cyclotomic equation into deg many
         rational ones), kernels with exact cyclotomic weights;
numeric  nonnegative least squares on float coordinates, verified against
         the exact operators to 1e-10 and renormalized.

Decompositions are not unique; any feasible one is valid, and both backends
are deterministic (Bland pivoting / NNLS on canonically ordered columns).
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .cyclotomic import CycNumber, zeta
from .exact_lp import feasible_point
from .linalg import CycMatrix
from .pauli import (CliffordElement, PhasePoint, pauli_mono, pauli_order,
                    phase_space)
from .polytope import VertexSet, cnc_phase_point, membership, operator_coords
from .stabilizer import (IsotropicSubgroup, ValueAssignment,
                         assignment_is_valid, projector_matrix,
                         value_assignments)

__all__ = [
    "DecompositionInfeasible",
    "VertexSetIncomplete",
    "StateDistribution",
    "HiddenVariableModel",
    "TransitionKernel",
    "born_rule_aggregate",
    "CliffordOp",
    "MeasureOp",
    "Circuit",
    "random_circuit",
    "simulate_run",
    "run_shots",
    "ShotRecord",
    "oracle_simulate",
    "oracle_distribution",
    "OracleBranch",
    "verify_circuit_born",
    "chi_square",
    "PhiMapSpec",
    "phi_apply",
    "embed_leading",
    "embed_trailing",
    "lem_trace_reduction",
    "lem_coefficient_trace",
    "cnc_form_image",
]

NUMERIC_RESIDUAL = 1e-10
PROB_CLIP = 1e-12


class DecompositionInfeasible(ValueError):
    """The operator admits no convex decomposition over the vertex set."""

    def __init__(self, message: str, violated: Sequence[str] = ()):
        super().__init__(message)
        self.violated = tuple(violated)


class VertexSetIncomplete(RuntimeError):
    """A Clifford image or measurement post-state escaped the vertex index."""


# ---------------------------------------------------------------------------
# distributions over vertices


@dataclass
class StateDistribution:
    """Probability weights over vertex indices; weights are Fractions,
    cyclotomic reals (exact mode) or floats (numeric mode)."""

    vset: VertexSet
    weights: dict[int, object]
    mode: str

    def support(self) -> list[int]:
        return sorted(self.weights)

    def probability(self, alpha: int) -> float:
        w = self.weights.get(alpha, 0)
        return float(w)

    def float_items(self) -> list[tuple[int, float]]:
        cached = getattr(self, "_float_items", None)
        if cached is None:
            cached = [(a, float(w)) for a, w in sorted(self.weights.items())]
            self._float_items = cached
        return cached

    def reconstruct(self) -> CycMatrix:
        acc = None
        for alpha, w in sorted(self.weights.items()):
            term = self.vset[alpha].matrix.scale(w if not isinstance(w, float) else Fraction(w))
            acc = term if acc is None else acc + term
        return acc

    def reconstruct_complex(self) -> np.ndarray:
        dim = self.vset.d ** self.vset.n
        acc = np.zeros((dim, dim), dtype=complex)
        for alpha, w in self.weights.items():
            acc += float(w) * _vertex_complex(self.vset, alpha)
        return acc


def _vertex_complex(vset: VertexSet, alpha: int) -> np.ndarray:
    cache = getattr(vset, "_complex_cache", None)
    if cache is None:
        cache = {}
        vset._complex_cache = cache
    mat = cache.get(alpha)
    if mat is None:
        mat = vset[alpha].matrix.to_complex()
        cache[alpha] = mat
    return mat


# ---------------------------------------------------------------------------
# traces against projectors


def trace_with_pauli(mat: CycMatrix, b: PhasePoint) -> CycNumber:
    """Tr(T_b M), using the monomial structure of T_b."""
    mono = pauli_mono(b)
    order = pauli_order(b.d)
    acc = CycNumber.zero(order)
    for j, (p, e) in enumerate(zip(mono.perm, mono.exps)):
        x = mat[j, p]
        if not x.is_zero():
            acc = acc + zeta(order, e) * x
    return acc


def trace_with_projector(group: IsotropicSubgroup, r: ValueAssignment, mat: CycMatrix) -> CycNumber:
    """Tr(Pi_I^r M) exactly."""
    d = group.d
    order = pauli_order(d)
    t = 1 if d % 2 else 2
    acc = CycNumber.zero(order)
    for b in group.elements:
        acc = acc + zeta(order, (-t * r(b)) % order) * trace_with_pauli(mat, b)
    return acc * Fraction(1, len(group))


# ---------------------------------------------------------------------------
# the model: decomposition, Clifford action, measurement kernels


@dataclass
class TransitionKernel:
    """q_{alpha,I}(beta, r): weights over (vertex, assignment-index) pairs."""

    alpha: int
    group: IsotropicSubgroup
    assignments: tuple[ValueAssignment, ...]
    entries: dict[tuple[int, int], object]      # (beta, r_index) -> weight
    marginals: tuple[object, ...]               # Q(r_index | alpha) = Tr(Pi A)

    def outcome_distribution(self) -> list[tuple[int, float]]:
        return [(i, float(m)) for i, m in enumerate(self.marginals)]

    def branch(self, r_index: int) -> list[tuple[int, object]]:
        return sorted((beta, w) for (beta, ri), w in self.entries.items() if ri == r_index)

    def sample_items(self) -> list[tuple[tuple[int, int], float]]:
        cached = getattr(self, "_sample_items", None)
        if cached is None:
            cached = [((beta, ri), float(w))
                      for (beta, ri), w in sorted(self.entries.items())]
            self._sample_items = cached
        return cached


class HiddenVariableModel:
    """Vertex set plus memoized kernels and Clifford vertex permutations."""

    def __init__(self, vset: VertexSet, mode: str = "exact"):
        if mode not in ("exact", "numeric"):
            raise ValueError("mode must be 'exact' or 'numeric'")
        self.vset = vset
        self.mode = mode
        self._kernels: dict[tuple, TransitionKernel] = {}
        self._perms: dict[int, tuple[CliffordElement, dict[int, int]]] = {}
        self._float_cols: Optional[np.ndarray] = None

    # -- state decomposition -------------------------------------------------

    def decompose(self, rho: CycMatrix) -> StateDistribution:
        """A probability vector p with sum_alpha p(alpha) A_alpha = rho.

        Existence is guaranteed for every operator inside the polytope; an
        exact membership scan names a violated facet otherwise.
        """
        key = self.vset.lookup_matrix(rho)
        if key is not None:
            one = Fraction(1) if self.mode == "exact" else 1.0
            return StateDistribution(self.vset, {key: one}, self.mode)
        if self.mode == "exact":
            dist = self._decompose_exact(rho)
        else:
            dist = self._decompose_numeric(rho)
        if dist is None:
            ok, _, violated = membership(operator_coords(rho, self.vset.d), self.vset.hrep)
            if not ok:
                names = [self.vset.hrep.labels[i] for i in violated]
                raise DecompositionInfeasible(
                    f"operator lies outside the polytope; violated: {names[0]}", names)
            raise VertexSetIncomplete("operator is in the polytope but no decomposition was found")
        return dist

    def _decompose_exact(self, rho: CycMatrix) -> Optional[StateDistribution]:
        cols = [v.coords for v in self.vset.vertices]
        target = operator_coords(rho, self.vset.d)
        rows, rhs = [], []
        for pos in range(len(target)):
            row = [col[pos] for col in cols]
            b = target[pos]
            if all(x.is_zero() for x in row):
                if not b.is_zero():
                    return None
                continue
            rows.append(row)
            rhs.append(b)
        rows.append([Fraction(1)] * len(cols))
        rhs.append(Fraction(1))
        sol = feasible_point(rows, rhs)
        if sol is None:
            return None
        weights = {}
        for i, w in enumerate(sol):
            nonzero = (w != 0) if isinstance(w, Fraction) else not w.is_zero()
            if nonzero:
                weights[i] = w
        dist = StateDistribution(self.vset, weights, "exact")
        assert dist.reconstruct() == rho, "exact decomposition failed to reconstruct"
        return dist

    def _float_matrix(self) -> np.ndarray:
        if self._float_cols is None:
            cols = []
            for v in self.vset.vertices:
                cols.append([c.approx().real for c in v.coords])
            self._float_cols = np.array(cols, dtype=float).T
        return self._float_cols

    def _decompose_numeric(self, rho: CycMatrix) -> Optional[StateDistribution]:
        from scipy.optimize import nnls

        a = self._float_matrix()
        target = np.array([c.approx().real for c in operator_coords(rho, self.vset.d)])
        a_aug = np.vstack([a, np.ones((1, a.shape[1]))])
        b_aug = np.concatenate([target, [1.0]])
        sol, _ = nnls(a_aug, b_aug)
        weights = {i: float(w) for i, w in enumerate(sol) if w > PROB_CLIP}
        total = sum(weights.values())
        if not weights or abs(total - 1.0) > 1e-6:
            return None
        weights = {i: w / total for i, w in weights.items()}
        dist = StateDistribution(self.vset, weights, "numeric")
        residual = np.max(np.abs(dist.reconstruct_complex() - rho.to_complex()))
        if residual > NUMERIC_RESIDUAL:
            return None
        return dist

    # -- Clifford dynamics ------------------------------------------------------

    def clifford_permutation(self, u: CliffordElement) -> dict[int, int]:
        entry = self._perms.get(id(u))
        if entry is None:
            mapping: dict[int, int] = {}
            for v in self.vset:
                image = u.apply(v.matrix)
                idx = self.vset.lookup_matrix(image)
                if idx is None:
                    raise VertexSetIncomplete(
                        f"Clifford image of vertex {v.index} not in the vertex set")
                mapping[v.index] = idx
            if sorted(mapping.values()) != list(range(len(self.vset))):
                raise VertexSetIncomplete("Clifford action is not a bijection on the vertex set")
            entry = (u, mapping)
            self._perms[id(u)] = entry
        return entry[1]

    def update(self, alpha: int, u: CliffordElement) -> int:
        return self.clifford_permutation(u)[alpha]

    # -- measurement kernels ------------------------------------------------------

    def kernel(self, alpha: int, group: IsotropicSubgroup) -> TransitionKernel:
        key = (group.key(), alpha)
        kern = self._kernels.get(key)
        if kern is not None:
            return kern
        assignments = tuple(value_assignments(group))
        a_mat = self.vset[alpha].matrix
        entries: dict[tuple[int, int], object] = {}
        marginals: list[object] = []
        for ri, r in enumerate(assignments):
            t = trace_with_projector(group, r, a_mat)
            if not t.is_real():
                raise AssertionError("projector trace must be real")
            sgn = t.sign()
            if sgn < 0:
                raise AssertionError("negative outcome weight on a polytope vertex")
            marginals.append(t if self.mode == "exact" else float(t))
            if sgn == 0:
                continue
            proj = projector_matrix(group.d, group.n, group.elements, r.as_dict())
            post = proj @ a_mat @ proj
            scaled = post.scale(t.inverse())
            dist = self.decompose(scaled)
            for beta, w in dist.weights.items():
                q = (t * w) if self.mode == "exact" else float(t) * w
                entries[(beta, ri)] = q
        kern = TransitionKernel(alpha, group, assignments, entries, tuple(marginals))
        if self.mode == "exact":
            total = CycNumber.zero()
            for w in kern.entries.values():
                total = total + w
            assert total == 1, "kernel normalization failed"
        else:
            assert abs(sum(kern.entries.values()) - 1.0) < 1e-9, "kernel normalization failed"
        self._kernels[key] = kern
        return kern


def born_rule_aggregate(model: HiddenVariableModel, dist: StateDistribution,
                        group: IsotropicSubgroup) -> list[tuple[ValueAssignment, object]]:
    """Outcome distribution r -> sum_alpha p(alpha) Q_I(r | alpha).

    Equals Tr(Pi_I^r rho) for the state the distribution reconstructs; exact
    in exact mode.
    """
    assignments = value_assignments(group)
    kerns = {a: model.kernel(a, group) for a in dist.weights}
    out = []
    for ri, r in enumerate(assignments):
        if model.mode == "exact":
            acc = CycNumber.zero()
            for a, w in dist.weights.items():
                acc = acc + kerns[a].marginals[ri] * w
        else:
            acc = sum(float(kerns[a].marginals[ri]) * float(w)
                      for a, w in dist.weights.items())
        out.append((r, acc))
    return out


# ---------------------------------------------------------------------------
# circuits


@dataclass(frozen=True)
class CliffordOp:
    element: CliffordElement
    label: str


@dataclass(frozen=True)
class MeasureOp:
    point: PhasePoint

    def group(self) -> IsotropicSubgroup:
        return _cyclic_group(self.point)


@lru_cache(maxsize=None)
def _cyclic_group(point: PhasePoint) -> IsotropicSubgroup:
    return IsotropicSubgroup.from_generators(point.d, point.n, [point])


@dataclass(frozen=True)
class Circuit:
    d: int
    n: int
    state: CycMatrix
    state_name: str
    ops: tuple[Union[CliffordOp, MeasureOp], ...]

    def __post_init__(self):
        dim = self.d ** self.n
        if self.state.rows != dim:
            raise ValueError("input state has the wrong dimension")
        for op in self.ops:
            if isinstance(op, MeasureOp):
                if (op.point.d, op.point.n) != (self.d, self.n):
                    raise ValueError("measurement label on the wrong system")
                if op.point.is_zero():
                    raise ValueError("trivial measurement: label must be nonzero")
            elif isinstance(op, CliffordOp):
                if (op.element.d, op.element.n) != (self.d, self.n):
                    raise ValueError("Clifford gate on the wrong system")

    def measurement_count(self) -> int:
        return sum(1 for op in self.ops if isinstance(op, MeasureOp))


def random_circuit(d: int, n: int, depth: int, rng: random.Random,
                   gate_pool: Sequence[CliffordElement], state: CycMatrix,
                   state_name: str = "custom") -> Circuit:
    """Alternating random generator gates and random single-label measurements."""
    points = [p for p in phase_space(d, n) if not p.is_zero()]
    ops: list[Union[CliffordOp, MeasureOp]] = []
    for _ in range(depth):
        gate = rng.choice(list(gate_pool))
        ops.append(CliffordOp(gate, gate.name))
        ops.append(MeasureOp(rng.choice(points)))
    return Circuit(d, n, state, state_name, tuple(ops))


# ---------------------------------------------------------------------------
# the sampling simulator


@dataclass(frozen=True)
class ShotRecord:
    shot: int
    outcomes: tuple[int, ...]
    final_vertex: int


def _sample(rng: random.Random, items: Sequence[tuple[object, float]]):
    u = rng.random()
    acc = 0.0
    for key, w in items:
        acc += w
        if u < acc:
            return key
    return items[-1][0]


def simulate_run(circuit: Circuit, model: HiddenVariableModel,
                 p_in: StateDistribution, seed: int) -> ShotRecord:
    """One trajectory of the sampling algorithm, deterministic given the seed."""
    rng = random.Random(seed)
    alpha = _sample(rng, p_in.float_items())
    outcomes = []
    for op in circuit.ops:
        if isinstance(op, CliffordOp):
            alpha = model.update(alpha, op.element)
        else:
            kern = model.kernel(alpha, op.group())
            beta, ri = _sample(rng, kern.sample_items())
            outcomes.append(kern.assignments[ri](op.point))
            alpha = beta
    return ShotRecord(seed, tuple(outcomes), alpha)


def run_shots(circuit: Circuit, model: HiddenVariableModel, p_in: StateDistribution,
              shots: int, seed: int, threads: Optional[int] = None) -> list[ShotRecord]:
    """Seeded independent trajectories; per-shot streams make the output
    independent of scheduling."""
    shot_seeds = [(seed * 0x9E3779B97F4A7C15 + k) % 2 ** 63 for k in range(shots)]
    if threads is None:
        threads = int(os.environ.get("LAMBDA_HVM_THREADS", "1"))
    records = []
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        # warm the caches single-threaded on the first shot to avoid racing
        if shots:
            records.append(simulate_run(circuit, model, p_in, shot_seeds[0]))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records.extend(pool.map(
                lambda s: simulate_run(circuit, model, p_in, s), shot_seeds[1:]))
    else:
        records = [simulate_run(circuit, model, p_in, s) for s in shot_seeds]
    return [ShotRecord(k, rec.outcomes, rec.final_vertex)
            for k, rec in enumerate(records)]


# ---------------------------------------------------------------------------
# the exact quantum oracle


@dataclass(frozen=True)
class OracleBranch:
    outcomes: tuple[int, ...]
    probability: CycNumber
    state: CycMatrix

    def prob_float(self) -> float:
        return float(self.probability)


def oracle_simulate(circuit: Circuit) -> list[OracleBranch]:
    """Dense exact chain-rule evaluation of every outcome sequence.

    Zero-probability branches are pruned by exact sign tests; returned
    probabilities sum to one.
    """
    branches = [OracleBranch((), CycNumber.one(), circuit.state)]
    for op in circuit.ops:
        nxt = []
        if isinstance(op, CliffordOp):
            for br in branches:
                nxt.append(OracleBranch(br.outcomes, br.probability, op.element.apply(br.state)))
        else:
            group = op.group()
            assignments = value_assignments(group)
            for br in branches:
                for r in assignments:
                    p = trace_with_projector(group, r, br.state)
                    if not p.is_real():
                        raise AssertionError("Born probability must be real")
                    if p.sign() <= 0:
                        continue
                    proj = projector_matrix(group.d, group.n, group.elements, r.as_dict())
                    post = (proj @ br.state @ proj).scale(p.inverse())
                    nxt.append(OracleBranch(br.outcomes + (r(op.point),), br.probability * p, post))
        branches = nxt
    return branches


def oracle_distribution(circuit: Circuit) -> dict[tuple[int, ...], float]:
    out: dict[tuple[int, ...], float] = {}
    for br in oracle_simulate(circuit):
        out[br.outcomes] = out.get(br.outcomes, 0.0) + br.prob_float()
    return out


# ---------------------------------------------------------------------------
# layered cross-validation of the model against the oracle


def verify_circuit_born(circuit: Circuit, model: HiddenVariableModel,
                        tol: float = NUMERIC_RESIDUAL) -> dict:
    """Layer-by-layer comparison of the model with quantum mechanics.

    At every measurement the Born rule aggregate sum_alpha p(alpha) Q(r|alpha)
    is compared with Tr(Pi rho) for every outcome, then the chain-rule
    posterior is reconstructed and compared with the exact post-measurement
    state; the walk follows the most likely branch.  Exact mode asserts
    equality; numeric mode asserts agreement within tol.
    """
    rho = circuit.state
    dist = model.decompose(rho)
    exact = model.mode == "exact"
    layers = 0
    max_prob_err = 0.0
    max_state_err = 0.0
    for op in circuit.ops:
        if isinstance(op, CliffordOp):
            rho = op.element.apply(rho)
            perm = model.clifford_permutation(op.element)
            dist = StateDistribution(model.vset, {perm[a]: w for a, w in dist.weights.items()},
                                     dist.mode)
            continue
        group = op.group()
        kerns = {a: model.kernel(a, group) for a in dist.weights}
        assignments = value_assignments(group)
        probs_qm, probs_sim = [], []
        for ri, r in enumerate(assignments):
            p_qm = trace_with_projector(group, r, rho)
            if exact:
                p_sim = CycNumber.zero()
                for a, w in dist.weights.items():
                    p_sim = p_sim + kerns[a].marginals[ri] * w
                assert p_sim == p_qm, "Born aggregate differs from the oracle"
                err = 0.0
            else:
                p_sim = sum(float(kerns[a].marginals[ri]) * float(w)
                            for a, w in dist.weights.items())
                err = abs(p_sim - float(p_qm))
                assert err <= tol, f"Born aggregate off by {err}"
            max_prob_err = max(max_prob_err, err)
            probs_qm.append(p_qm)
            probs_sim.append(p_sim)
        layers += 1
        # descend into the most likely branch
        floats = [float(p) for p in probs_qm]
        ri = max(range(len(floats)), key=lambda i: (floats[i], -i))
        r = assignments[ri]
        p_qm = probs_qm[ri]
        proj = projector_matrix(group.d, group.n, group.elements, r.as_dict())
        rho = (proj @ rho @ proj).scale(p_qm.inverse())
        posterior: dict[int, object] = {}
        for a, w in dist.weights.items():
            for beta, q in kerns[a].branch(ri):
                prev = posterior.get(beta)
                term = (w * q) if exact else float(w) * float(q)
                posterior[beta] = term if prev is None else prev + term
        if exact:
            inv = p_qm.inverse()
            posterior = {b: v * inv for b, v in posterior.items()}
            dist = StateDistribution(model.vset, posterior, "exact")
            assert dist.reconstruct() == rho, "chain-rule post-state mismatch"
        else:
            total = sum(posterior.values())
            posterior = {b: v / total for b, v in posterior.items()}
            dist = StateDistribution(model.vset, posterior, "numeric")
            err = float(np.max(np.abs(dist.reconstruct_complex() - rho.to_complex())))
            assert err <= tol, f"chain-rule post-state off by {err}"
            max_state_err = max(max_state_err, err)
    return {"layers": layers, "max_prob_err": max_prob_err, "max_state_err": max_state_err}


# ---------------------------------------------------------------------------
# sampling statistics


def chi_square(counts: dict[tuple[int, ...], int],
               probs: dict[tuple[int, ...], float], shots: int,
               min_expected: float = 5.0) -> tuple[float, float]:
    """(statistic, p-value) of the frequencies against the oracle distribution.

    Bins with small expectation are merged to keep the test applicable.
    """
    from scipy.stats import chi2

    unknown = set(counts) - set(probs)
    if unknown:
        raise AssertionError(f"observed outcome outside the oracle support: {unknown}")
    items = sorted(probs.items(), key=lambda kv: (-kv[1], kv[0]))
    big = [(k, p) for k, p in items if p * shots >= min_expected]
    small = [(k, p) for k, p in items if p * shots < min_expected]
    f_obs = [counts.get(k, 0) for k, _ in big]
    f_exp = [p * shots for _, p in big]
    if small:
        f_obs.append(sum(counts.get(k, 0) for k, _ in small))
        f_exp.append(sum(p for _, p in small) * shots)
    stat = sum((o - e) ** 2 / e for o, e in zip(f_obs, f_exp) if e > 0)
    dof = max(len(f_exp) - 1, 1)
    return stat, float(chi2.sf(stat, dof))


# ---------------------------------------------------------------------------
# embedding the m-qudit model into the n-qudit model


def embed_leading(a: PhasePoint, n: int) -> PhasePoint:
    pad = n - a.n
    return PhasePoint(a.d, n, a.az + (0,) * pad, a.ax + (0,) * pad)


def embed_trailing(b: PhasePoint, n: int) -> PhasePoint:
    pad = n - b.n
    return PhasePoint(b.d, n, (0,) * pad + b.az, (0,) * pad + b.ax)


def _leading_part(k: PhasePoint, m: int) -> PhasePoint:
    return PhasePoint(k.d, m, k.az[:m], k.ax[:m])


def _trailing_part(k: PhasePoint, m: int) -> PhasePoint:
    return PhasePoint(k.d, k.n - m, k.az[m:], k.ax[m:])


@dataclass(frozen=True)
class PhiMapSpec:
    """X -> U (X tensor Pi_J^r) U^dag from m to n qudits.

    J is a maximal isotropic subgroup of the trailing (n-m)-qudit phase
    space, so Pi_J^r is a stabilizer state there and traces are preserved.
    """

    m: int
    n: int
    j_group: IsotropicSubgroup        # over (d, n-m)
    r: ValueAssignment
    u: Optional[CliffordElement] = None

    def __post_init__(self):
        if not 0 < self.m < self.n:
            raise ValueError("need 0 < m < n")
        d = self.j_group.d
        if self.j_group.n != self.n - self.m:
            raise ValueError("J must live on the trailing n-m qudits")
        if len(self.j_group) != d ** (self.n - self.m):
            raise ValueError("J must be maximal on the trailing sector")
        if not assignment_is_valid(self.j_group.elements, self.r):
            raise ValueError("invalid value assignment on J")
        if self.u is not None and (self.u.d, self.u.n) != (d, self.n):
            raise ValueError("U must act on the full n-qudit system")

    @property
    def d(self) -> int:
        return self.j_group.d

    def ancilla_projector(self) -> CycMatrix:
        return projector_matrix(self.d, self.n - self.m, self.j_group.elements, self.r.as_dict())


def phi_apply(x: CycMatrix, spec: PhiMapSpec) -> CycMatrix:
    out = x.kron(spec.ancilla_projector())
    if spec.u is not None:
        out = spec.u.apply(out)
    return out


def lem_trace_reduction(x: CycMatrix, spec: PhiMapSpec,
                        group_i: IsotropicSubgroup, s: ValueAssignment) -> dict:
    """Both sides of the trace-reduction identity Tr(Pi_I^s Phi(X)).

    Evaluates the closed forms against exact matrix algebra: the printed
    variant (subgroup K n E_m, prefactor |K|/2^n), the d^n-normalized
    variant, and the general variant using the projection of K onto the
    leading sector with the transported assignment.  Returns which variants
    match the matrix value.
    """
    if spec.u is not None:
        raise ValueError("trace reduction is stated for the identity Clifford")
    d, m, n = spec.d, spec.m, spec.n
    lhs = trace_with_projector(group_i, s, phi_apply(x, spec))

    j_members = set(spec.j_group.elements)
    k_points = [k for k in group_i.elements if _trailing_part(k, m) in j_members]
    # delta: s and r must agree on K n J (trailing labels with zero leading part)
    delta = all(s(k) == spec.r(_trailing_part(k, m))
                for k in k_points if _leading_part(k, m).is_zero())

    zero_cyc = CycNumber.zero()
    if not delta:
        rhs_general = zero_cyc
        rhs_printed = zero_cyc
    else:
        # printed form: K n E_m with s restricted there
        km_points = [k for k in k_points if _trailing_part(k, m).is_zero()]
        km_leading = [_leading_part(k, m) for k in km_points]
        km_values = {_leading_part(k, m): s(k) for k in km_points}
        tr_km = _formal_projector_trace(km_leading, km_values, x)
        rhs_printed = tr_km * Fraction(len(k_points), 1)

        # general form: the projection of K with the transported assignment
        proj_values: dict[PhasePoint, int] = {}
        for k in k_points:
            lead = _leading_part(k, m)
            val = (s(k) - spec.r(_trailing_part(k, m))) % d
            if proj_values.setdefault(lead, val) != val:
                raise AssertionError("transported assignment is inconsistent")
        proj_group = IsotropicSubgroup.from_generators(
            d, m, [p for p in proj_values if not p.is_zero()])
        if set(proj_group.elements) != set(proj_values):
            raise AssertionError("projected tight set is not a subgroup")
        s_tilde = ValueAssignment.from_dict(d, proj_values)
        if not assignment_is_valid(proj_group.elements, s_tilde):
            raise AssertionError("transported assignment is not noncontextual")
        tr_gen = _formal_projector_trace(list(proj_group.elements),
                                         {p: s_tilde(p) for p in proj_group.elements}, x)
        rhs_general = tr_gen * Fraction(len(k_points), 1)

    return {
        "lhs": lhs,
        "k_size": len(k_points),
        "delta": delta,
        "matches_printed_2n": lhs == rhs_printed * Fraction(1, 2 ** n),
        "matches_printed_dn": lhs == rhs_printed * Fraction(1, d ** n),
        "matches_general_dn": lhs == rhs_general * Fraction(1, d ** n),
    }


def _formal_projector_trace(points: Sequence[PhasePoint], values: dict[PhasePoint, int],
                            x: CycMatrix) -> CycNumber:
    """Tr((1/|S|) sum omega^{-v(b)} T_b . X) for a labeled point set."""
    if not points:
        return CycNumber.zero()
    d = points[0].d
    order = pauli_order(d)
    t = 1 if d % 2 else 2
    acc = CycNumber.zero(order)
    for b in points:
        acc = acc + zeta(order, (-t * values[b]) % order) * trace_with_pauli(x, b)
    return acc * Fraction(1, len(points))


def lem_coefficient_trace(y: CycMatrix, spec: PhiMapSpec,
                          iprime: IsotropicSubgroup, sprime: ValueAssignment) -> tuple[CycNumber, CycNumber]:
    """Both sides of Tr(Pi_{I'+J}^{s'*r} Y) = Tr(Pi_{I'}^{s'} Y~).

    Y is any Hermitian n-qudit operator with zero trace; Y~ collapses the
    trailing sector with the J-average of the Pauli coefficients.
    """
    d, m, n = spec.d, spec.m, spec.n
    dim_m = d ** m
    # s'*r on I' + J (direct sum inside E_n)
    big_points = []
    big_values = {}
    for a in iprime.elements:
        ea = embed_leading(a, n)
        for b in spec.j_group.elements:
            eb = embed_trailing(b, n)
            big_points.append(ea + eb)
            big_values[ea + eb] = (sprime(a) + spec.r(b)) % d
    lhs = _formal_projector_trace(big_points, big_values, y)

    # collapsed operator on the leading sector
    order = pauli_order(d)
    t = 1 if d % 2 else 2
    inv_j = Fraction(1, len(spec.j_group))
    acc = CycMatrix.zeros(dim_m, dim_m)
    for a in phase_space(d, m):
        za = CycNumber.zero()
        for b in spec.j_group.elements:
            label = embed_leading(a, n) + embed_trailing(b, n)
            za = za + zeta(order, (t * spec.r(b)) % order) * _pauli_dagger_coeff(y, label)
        za = za * inv_j
        if not za.is_zero():
            acc = acc + pauli_mono(a).to_matrix().scale(za)
    ytilde = acc.scale(Fraction(1, dim_m))
    rhs = trace_with_projector(iprime, sprime, ytilde)
    return lhs, rhs


def _pauli_dagger_coeff(y: CycMatrix, label: PhasePoint) -> CycNumber:
    """z_a = Tr(T_a^dag Y)."""
    mono = pauli_mono(label).dagger()
    order = pauli_order(label.d)
    acc = CycNumber.zero(order)
    for j, (p, e) in enumerate(zip(mono.perm, mono.exps)):
        x = y[j, p]
        if not x.is_zero():
            acc = acc + zeta(order, e) * x
    return acc


def cnc_form_image(support: Iterable[PhasePoint], gamma: ValueAssignment,
                   spec: PhiMapSpec) -> tuple[CycMatrix, CycMatrix]:
    """(Phi(A_Omega^gamma), A_{Omega+J}^{gamma*r}) for exact comparison."""
    if spec.u is not None:
        raise ValueError("the exact form comparison is stated for the identity Clifford")
    pts = sorted(set(support), key=lambda p: (p.az, p.ax))
    a_m = cnc_phase_point(pts, gamma)
    image = phi_apply(a_m, spec)
    big_points = []
    big_values = {}
    for a in pts:
        ea = embed_leading(a, spec.n)
        for b in spec.j_group.elements:
            eb = embed_trailing(b, spec.n)
            big_points.append(ea + eb)
            big_values[ea + eb] = (gamma(a) + spec.r(b)) % spec.d
    expected = projector_matrix(spec.d, spec.n, big_points, big_values).scale(
        Fraction(len(big_points), spec.d ** spec.n))
    return image, expected
