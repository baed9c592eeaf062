"""Total unimodularity certification and TU instance generators.

The TU check is a brute-force enumeration of square submatrix determinants
in exact integer arithmetic, guarded to desk scale.  The generators build
node-arc incidence and bipartite assignment instances, the canonical TU
families, optionally dropping the redundant last row so the equality
system has full row rank.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from tulp.errors import GuardExceededError, SingularMatrixError
from tulp.exactlin import det_int, invert
from tulp.lp_model import StandardFormLP
from tulp.sparse import SparseMatrix

TU_GUARD = 8  # max of min(rows, cols) for the brute-force check


@dataclass(frozen=True)
class TuCertificate:
    """Verdict of the brute-force check; on rejection the witness holds the
    lexicographically first violating (rows, cols, determinant)."""

    verdict: bool
    witness: tuple[tuple[int, ...], tuple[int, ...], int] | None
    submatrices_checked: int


def is_totally_unimodular(matrix: SparseMatrix) -> TuCertificate:
    """Check every square submatrix determinant against {-1, 0, 1}.

    Exponential enumeration, guarded at min(rows, cols) <= 8; sizes are
    scanned in increasing order with lexicographic row/column subsets, so
    the first violation reported is deterministic.
    """
    if not matrix.is_integer:
        raise ValueError("TU check requires exact-integer entries")
    m, n = matrix.shape
    if min(m, n) > TU_GUARD:
        raise GuardExceededError(
            f"TU check guard: min(rows, cols) must be at most {TU_GUARD}")
    dense = matrix.exact_dense()
    checked = 0
    # size 1: scan entries in position order
    for i in range(m):
        for j in range(n):
            checked += 1
            if abs(dense[i][j]) > 1:
                return TuCertificate(False, ((i,), (j,), dense[i][j]), checked)
    for k in range(2, min(m, n) + 1):
        for rows in itertools.combinations(range(m), k):
            picked = [dense[i] for i in rows]
            for cols in itertools.combinations(range(n), k):
                checked += 1
                det = det_int([[row[j] for j in cols] for row in picked])
                if abs(det) > 1:
                    return TuCertificate(False, (rows, cols, det), checked)
    return TuCertificate(True, None, checked)


@dataclass(frozen=True)
class FlowInstanceSpec:
    """Minimum-cost-flow instance description.

    Arcs are (tail, head) pairs with 0-based node ids; supplies must sum
    to zero.  Supplies or costs left as None are filled deterministically
    from the generator seed (supplies via a random nonnegative integer
    flow, so the instance is always feasible; costs uniformly from
    [1, max_cost], so it is bounded).
    """

    n_nodes: int
    arcs: tuple[tuple[int, int], ...]
    supplies: tuple[int, ...] | None = None
    costs: tuple[int, ...] | None = None
    drop_last_row: bool = True
    max_cost: int = 5

    def __post_init__(self):
        for tail, head in self.arcs:
            if tail == head:
                raise ValueError(f"self-loop at node {tail}")
            if not (0 <= tail < self.n_nodes and 0 <= head < self.n_nodes):
                raise ValueError(f"arc ({tail}, {head}) references a missing node")
        if self.supplies is not None:
            if len(self.supplies) != self.n_nodes:
                raise ValueError("need one supply per node")
            if sum(self.supplies) != 0:
                raise ValueError("supplies must sum to zero")
        if self.costs is not None and len(self.costs) != len(self.arcs):
            raise ValueError("need one cost per arc")


def incidence_matrix(n_nodes: int, arcs) -> SparseMatrix:
    """Node-arc incidence: +1 at the tail, -1 at the head of each arc."""
    trips = []
    for a, (tail, head) in enumerate(arcs):
        trips.append((tail, a, 1))
        trips.append((head, a, -1))
    return SparseMatrix(n_nodes, len(arcs), trips)


def gen_min_cost_flow(spec: FlowInstanceSpec, seed: int = 0) -> StandardFormLP:
    """Build the equality-form LP of a min-cost-flow instance.

    With drop_last_row the redundant final conservation row is removed,
    restoring full row rank (otherwise the dual optimal set is unbounded
    along the all-ones direction).
    """
    rng = np.random.default_rng(seed)
    n_arcs = len(spec.arcs)
    costs = spec.costs
    if costs is None:
        costs = tuple(int(v) for v in rng.integers(1, spec.max_cost + 1, n_arcs))
    supplies = spec.supplies
    if supplies is None:
        incidence = incidence_matrix(spec.n_nodes, spec.arcs)
        for _ in range(100):
            flow = rng.integers(0, 4, n_arcs)
            supplies = tuple(int(v) for v in np.rint(incidence.matvec(flow.astype(float))))
            if any(supplies):
                break
        else:
            raise ValueError("could not draw a nonzero supply vector")
    matrix = incidence_matrix(spec.n_nodes, spec.arcs)
    b = list(supplies)
    if spec.drop_last_row:
        matrix = matrix.take(range(spec.n_nodes - 1), range(n_arcs))
        b = b[:-1]
    return StandardFormLP(matrix, np.array(b, dtype=float), np.array(costs, dtype=float))


def random_flow_spec(n_nodes: int, n_arcs: int, seed: int,
                     max_cost: int = 5, drop_last_row: bool = True) -> FlowInstanceSpec:
    """Random weakly-connected digraph (spanning tree plus extra arcs)."""
    if n_arcs < n_nodes - 1:
        raise ValueError("need at least n_nodes - 1 arcs for connectivity")
    rng = np.random.default_rng(seed)
    arcs = []
    for v in range(1, n_nodes):
        u = int(rng.integers(0, v))
        arcs.append((u, v) if rng.integers(0, 2) else (v, u))
    existing = set(arcs)
    while len(arcs) < n_arcs:
        u, v = (int(w) for w in rng.integers(0, n_nodes, 2))
        if u != v and (u, v) not in existing:
            arcs.append((u, v))
            existing.add((u, v))
    return FlowInstanceSpec(n_nodes=n_nodes, arcs=tuple(arcs),
                            drop_last_row=drop_last_row, max_cost=max_cost)


def gen_assignment(n: int, costs=None, seed: int = 0, max_cost: int = 9) -> StandardFormLP:
    """Bipartite assignment LP: row and column sums equal one.

    One redundant constraint (the last column sum) is dropped, so the
    matrix is (2n - 1) x n^2 and keeps full row rank.  Costs default to
    integers drawn uniformly from [1, max_cost].
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    if costs is None:
        costs = rng.integers(1, max_cost + 1, (n, n))
    costs = np.asarray(costs)
    if costs.shape != (n, n):
        raise ValueError("costs must be an n x n array")
    trips = []
    for i in range(n):
        for j in range(n):
            var = i * n + j
            trips.append((i, var, 1))              # row-sum constraint
            if j < n - 1:
                trips.append((n + j, var, 1))      # column-sum constraint (last dropped)
    matrix = SparseMatrix(2 * n - 1, n * n, trips)
    b = np.ones(2 * n - 1)
    c = costs.reshape(-1).astype(float)
    return StandardFormLP(matrix, b, c)


def tu_closure_build(matrix: SparseMatrix, variant: str, unit_index: int = 0) -> SparseMatrix:
    """TU-preserving constructions used by the closure property tests.

    variant:
      "append_unit"  -> [A e_i] with e_i the unit_index-th basis column
      "transpose"    -> A.T
      "blockdiag"    -> [[A, 0], [0, A.T]]
    """
    m, n = matrix.shape
    if variant == "append_unit":
        if not 0 <= unit_index < m:
            raise ValueError("unit_index out of range")
        trips = list(matrix.triplets()) + [(unit_index, n, 1)]
        return SparseMatrix(m, n + 1, trips)
    if variant == "transpose":
        return matrix.transpose()
    if variant == "blockdiag":
        trips = list(matrix.triplets())
        trips += [(m + c, n + r, v) for r, c, v in matrix.triplets()]
        return SparseMatrix(m + n, n + m, trips)
    raise ValueError(f"unknown variant {variant!r}")


def tu_inverse_check(matrix: SparseMatrix) -> tuple[int, float]:
    """Exact inverse of a nonsingular TU matrix.

    Asserts every inverse entry lies in {-1, 0, 1} and that the spectral
    norm of the inverse is at most the dimension; returns
    (max |entry|, |A^-1|_2).
    """
    m, n = matrix.shape
    if m != n:
        raise ValueError("matrix must be square")
    dense = matrix.exact_dense()
    if det_int(dense) == 0:
        raise SingularMatrixError("matrix is singular")
    inverse = invert(dense)
    max_abs = 0
    for row in inverse:
        for v in row:
            if v.denominator != 1 or abs(v) > 1:
                raise ValueError(
                    f"inverse entry {v} outside {{-1, 0, 1}}: input is not TU")
            max_abs = max(max_abs, abs(int(v)))
    float_inv = np.array([[float(v) for v in row] for row in inverse])
    norm = float(np.linalg.norm(float_inv, 2))
    if norm > m * (1.0 + 1e-12):
        raise ValueError(f"inverse norm {norm} exceeds the dimension bound {m}")
    return max_abs, norm


def sample_tu_submatrix(matrix: SparseMatrix, size: int, rng,
                        square: bool = True, extra_cols: int = 0,
                        max_tries: int = 200) -> SparseMatrix | None:
    """Random nonsingular (or full-row-rank) TU submatrix, None if unlucky.

    With square=False the result has `size` rows, size + extra_cols
    columns, and full row rank; used to draw test stacks.
    """
    m, n = matrix.shape
    cols_needed = size + (0 if square else extra_cols)
    if size > m or cols_needed > n:
        return None
    dense = matrix.exact_dense()
    for _ in range(max_tries):
        rows = sorted(rng.choice(m, size=size, replace=False).tolist())
        cols = sorted(rng.choice(n, size=cols_needed, replace=False).tolist())
        sub = [[dense[i][j] for j in cols] for i in rows]
        if square:
            if det_int(sub) != 0:
                return SparseMatrix(size, cols_needed,
                                    [(i, j, sub[i][j]) for i in range(size)
                                     for j in range(cols_needed) if sub[i][j]])
        else:
            fsub = np.array(sub, dtype=float)
            if np.linalg.matrix_rank(fsub) == size:
                return SparseMatrix(size, cols_needed,
                                    [(i, j, sub[i][j]) for i in range(size)
                                     for j in range(cols_needed) if sub[i][j]])
    return None


def fraction_vector(values, denom: int) -> list[Fraction]:
    """Integers over a common denominator, as the bound-check stacks expect."""
    return [Fraction(int(v), denom) for v in values]
