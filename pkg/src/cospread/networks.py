"""Two-layer multiplex networks with controllable degree structure.

Builds undirected, unweighted, simple graph layers over a shared node set:

* configuration-model layers from a degree distribution,
* layers with a prescribed intra-layer degree-degree correlation, generated
  edges-first from a mixing matrix (the joint degree distribution of the two
  endpoints of a uniformly random edge),
* coupling of the two layers with a prescribed joint distribution of
  (info-degree, phy-degree) node types.

Dyad and edge bookkeeping uses the ordered convention throughout: an
undirected edge {i, j} contributes both (i, j) and (j, i), so a symmetric
mixing matrix sums to 1 over ordered degree pairs and its row sums are the
edge-stub marginals q_k = k p_k / <k>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

TAIL_MASS = 1e-6  # probability mass allowed beyond the truncated support
PROB_TOL = 1e-12


def apportion(weights, total):
    """Round ``weights / sum(weights) * total`` to integers summing to ``total``.

    Largest-remainder method; ties broken by index order so the result is
    deterministic. Residual error is at most one unit per entry.
    """
    w = np.asarray(weights, dtype=float)
    if w.sum() <= 0:
        raise ValueError("weights must have positive sum")
    target = w / w.sum() * total
    base = np.floor(target).astype(np.int64)
    short = int(total - base.sum())
    if short > 0:
        order = np.argsort(-(target - base), kind="stable")
        base[order[:short]] += 1
    return base


# ---------------------------------------------------------------------------
# Degree distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeDistribution:
    """Discrete distribution over positive integer degrees.

    ``degrees`` is ascending; ``probs`` sums to 1 within 1e-12. Unbounded
    variants are truncated at the smallest maximum degree keeping cumulative
    mass >= 1 - 1e-6 and renormalized, so the support is always finite.
    """

    degrees: np.ndarray
    probs: np.ndarray
    name: str = "explicit"

    def __post_init__(self):
        degs = np.asarray(self.degrees, dtype=np.int64)
        ps = np.asarray(self.probs, dtype=float)
        if degs.ndim != 1 or ps.shape != degs.shape or len(degs) == 0:
            raise ConfigurationError("degree support and probabilities must be matching 1-d arrays")
        if np.any(degs < 1):
            raise ConfigurationError("all supported degrees must be positive integers")
        if np.any(np.diff(degs) <= 0):
            raise ConfigurationError("degree support must be strictly increasing")
        if np.any(ps < 0) or abs(ps.sum() - 1.0) > PROB_TOL:
            raise ConfigurationError("probabilities must be nonnegative and sum to 1 within 1e-12")
        object.__setattr__(self, "degrees", degs)
        object.__setattr__(self, "probs", ps)

    @classmethod
    def regular(cls, k):
        return cls(np.array([int(k)]), np.array([1.0]), name=f"regular({k})")

    @classmethod
    def poisson(cls, mean):
        """Poisson(mean) conditioned on k >= 1, truncated to tail mass <= 1e-6."""
        if mean <= 0:
            raise ConfigurationError("poisson mean must be positive")
        kmax = 1
        # walk the pmf until the conditioned cumulative mass reaches the target
        logp = -mean
        cum = 0.0
        cond = 1.0 - math.exp(-mean)
        probs = []
        k = 0
        while True:
            if k >= 1:
                probs.append(math.exp(logp) / cond)
                cum += probs[-1]
                kmax = k
                if cum >= 1.0 - TAIL_MASS:
                    break
            k += 1
            logp += math.log(mean) - math.log(k)
        ps = np.array(probs)
        ps /= ps.sum()
        return cls(np.arange(1, kmax + 1), ps, name=f"poisson({mean})")

    @classmethod
    def truncated_power_law(cls, exponent, cutoff_scale, max_degree):
        """P(k) proportional to k**(-exponent) * exp(-k / cutoff_scale), 1 <= k <= max_degree."""
        if max_degree < 1:
            raise ConfigurationError("max_degree must be >= 1")
        ks = np.arange(1, int(max_degree) + 1)
        w = ks.astype(float) ** (-exponent) * np.exp(-ks / cutoff_scale)
        return cls(ks, w / w.sum(), name=f"truncated_power_law({exponent},{cutoff_scale},{max_degree})")

    @classmethod
    def two_point(cls, k_lo, k_hi, p_lo):
        if not 0 <= p_lo <= 1:
            raise ConfigurationError("p_lo must lie in [0, 1]")
        if not k_lo < k_hi:
            raise ConfigurationError("two_point requires k_lo < k_hi")
        return cls(np.array([int(k_lo), int(k_hi)]), np.array([p_lo, 1.0 - p_lo]),
                   name=f"two_point({k_lo},{k_hi},{p_lo})")

    @classmethod
    def explicit(cls, table):
        """``table`` maps degree -> probability; renormalized if slightly off."""
        degs = np.array(sorted(table), dtype=np.int64)
        ps = np.array([table[k] for k in degs], dtype=float)
        s = ps.sum()
        if s <= 0:
            raise ConfigurationError("explicit degree table has empty support")
        return cls(degs, ps / s)

    @property
    def mean(self):
        return float(self.degrees @ self.probs)

    @property
    def second_moment(self):
        return float((self.degrees.astype(float) ** 2) @ self.probs)

    def stub_marginals(self):
        """q_k = k p_k / <k>, the degree of a uniformly random edge end."""
        q = self.degrees * self.probs
        return q / q.sum()


def sample_degree_sequence(dist, n, rng):
    """Draw n degrees i.i.d. from ``dist``; resample one entry until the sum is even."""
    if n < 1:
        raise ValueError("n must be >= 1")
    degs = rng.choice(dist.degrees, size=n, p=dist.probs)
    if degs.sum() % 2 == 1:
        if len(dist.degrees) == 1:
            raise ConfigurationError(
                f"cannot reach an even stub total: regular degree {dist.degrees[0]} with n={n}")
        i = int(rng.integers(n))
        parity = degs[i] % 2
        while True:
            d = int(rng.choice(dist.degrees, p=dist.probs))
            if d % 2 != parity:
                degs[i] = d
                break
    return degs.astype(np.int64)


# ---------------------------------------------------------------------------
# Layers
# ---------------------------------------------------------------------------


@dataclass
class Layer:
    """One undirected simple layer in CSR-like adjacency form.

    ``degrees`` is the requested degree sequence (before self-loop/multi-edge
    cleanup); realized degrees can be smaller by O(1) per erased edge.
    """

    n_nodes: int
    indptr: np.ndarray
    indices: np.ndarray
    degrees: np.ndarray
    n_erased: int = 0

    @property
    def n_edges(self):
        return len(self.indices) // 2

    def neighbors(self, i):
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def realized_degrees(self):
        return np.diff(self.indptr)

    def edge_array(self):
        """(m, 2) array of undirected edges with u < v."""
        u = np.repeat(np.arange(self.n_nodes), self.realized_degrees())
        v = self.indices
        keep = u < v
        return np.stack([u[keep], v[keep]], axis=1)


def _layer_from_edges(n, u, v, requested_degrees):
    """Build a Layer from endpoint arrays, erasing self-loops and multi-edges."""
    total_before = len(u)
    keep = u != v
    u, v = u[keep], v[keep]
    lo = np.minimum(u, v).astype(np.int64)
    hi = np.maximum(u, v).astype(np.int64)
    key = lo * n + hi
    uniq = np.unique(key)
    lo = (uniq // n).astype(np.int32)
    hi = (uniq % n).astype(np.int32)
    n_erased = total_before - len(uniq)
    ends = np.concatenate([lo, hi])
    other = np.concatenate([hi, lo])
    order = np.argsort(ends, kind="stable")
    indices = other[order].astype(np.int32)
    counts = np.bincount(ends, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return Layer(n, indptr, indices, np.asarray(requested_degrees, dtype=np.int64), n_erased)


def build_configuration_layer(degrees, rng):
    """Uniform stub matching for a given degree sequence, then cleanup."""
    degrees = np.asarray(degrees, dtype=np.int64)
    if degrees.sum() % 2 == 1:
        raise ValueError("degree sequence must have an even sum")
    n = len(degrees)
    stubs = np.repeat(np.arange(n, dtype=np.int32), degrees)
    rng.shuffle(stubs)
    return _layer_from_edges(n, stubs[0::2], stubs[1::2], degrees)


# ---------------------------------------------------------------------------
# Intra-layer degree-degree correlation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MixingMatrix:
    """Joint degree distribution E of the two ends of a uniformly random edge.

    Symmetric, nonnegative, sums to 1 over ordered pairs. Row sums are the
    stub marginals q_k, from which the node degree distribution follows as
    p_k = (q_k / k) / sum_k' (q_k' / k').
    """

    degrees: np.ndarray
    E: np.ndarray

    def __post_init__(self):
        degs = np.asarray(self.degrees, dtype=np.int64)
        E = np.asarray(self.E, dtype=float)
        if E.shape != (len(degs), len(degs)):
            raise ConfigurationError("mixing matrix shape must match the degree support")
        if np.any(E < -PROB_TOL):
            raise ConfigurationError("mixing matrix entries must be nonnegative")
        if abs(E.sum() - 1.0) > PROB_TOL:
            raise ConfigurationError("mixing matrix must sum to 1 within 1e-12")
        if not np.allclose(E, E.T, atol=PROB_TOL):
            raise ConfigurationError("mixing matrix must be symmetric (undirected layer)")
        object.__setattr__(self, "degrees", degs)
        object.__setattr__(self, "E", np.maximum(E, 0.0))

    def stub_marginals(self):
        return self.E.sum(axis=1)

    def degree_distribution(self):
        q = self.stub_marginals()
        p = q / self.degrees
        p = p / p.sum()
        return DegreeDistribution(self.degrees, p / p.sum())

    @property
    def mean_degree(self):
        p = self.degree_distribution().probs
        return float(self.degrees @ p)

    def assortativity(self):
        """Pearson correlation of the endpoint degrees under E; nan if degenerate."""
        q = self.stub_marginals()
        k = self.degrees.astype(float)
        mu = k @ q
        var = (k ** 2) @ q - mu ** 2
        if var <= PROB_TOL:
            return float("nan")
        exy = k @ self.E @ k
        return float((exy - mu ** 2) / var)

    @classmethod
    def uncorrelated(cls, dist):
        """Configuration-model mixing: independent stub degrees, E = q q^T."""
        q = dist.stub_marginals()
        return cls(dist.degrees, np.outer(q, q))


def two_point_mixing_bounds(k1, k2, p1):
    """Valid range of the diagonal entry a for a two-degree mixing matrix."""
    p2 = 1.0 - p1
    mean_k = k1 * p1 + k2 * p2
    lo = max(0.0, (k1 * p1 - k2 * p2) / mean_k)
    hi = k1 * p1 / mean_k
    return lo, hi


def two_point_mixing_matrix(k1, k2, p1, a):
    """Two-degree mixing matrix with diagonal entry ``a`` for the low-degree class.

    The assortativity is linear in a:
    r = (a - k1^2 p1^2 / <k>^2) / (k1 k2 p1 p2 / <k>^2).
    """
    p2 = 1.0 - p1
    mean_k = k1 * p1 + k2 * p2
    lo, hi = two_point_mixing_bounds(k1, k2, p1)
    if not lo - 1e-15 <= a <= hi + 1e-15:
        raise ValueError(f"a={a} outside the valid interval [{lo}, {hi}]")
    a = min(max(a, lo), hi)
    off = k1 * p1 / mean_k - a
    E = np.array([[a, off], [off, (k2 * p2 - k1 * p1) / mean_k + a]])
    return MixingMatrix(np.array([k1, k2]), np.maximum(E, 0.0) / np.maximum(E, 0.0).sum())


def two_point_a_for_assortativity(k1, k2, p1, r):
    """Invert the linear relation between assortativity and the diagonal entry a."""
    p2 = 1.0 - p1
    mean_k = k1 * p1 + k2 * p2
    return r * (k1 * k2 * p1 * p2) / mean_k ** 2 + (k1 * p1 / mean_k) ** 2


def two_point_mixing_for_assortativity(k1, k2, p1, r):
    return two_point_mixing_matrix(k1, k2, p1, two_point_a_for_assortativity(k1, k2, p1, r))


def _integer_edge_counts(mixing, node_counts):
    """Integer undirected edge counts per degree-class pair, stub-exact.

    Rounds the real-valued targets 2M E[i, j] (i < j) and M E[i, i], then
    repairs per-class stub totals with unit edge moves so every class consumes
    exactly k * n_k stubs. Residual slack is O(1) edges per class.
    """
    degs = mixing.degrees
    nk = len(degs)
    stubs = degs * node_counts
    if stubs.sum() % 2 == 1:
        raise ConfigurationError("total stub count is odd; adjust node counts")
    m_edges = stubs.sum() // 2
    target = np.zeros((nk, nk))
    for i in range(nk):
        for j in range(i, nk):
            target[i, j] = (2.0 if i != j else 1.0) * m_edges * mixing.E[i, j]
    m = np.floor(target).astype(np.int64)

    def used(mm):
        out = mm.sum(axis=1) + mm.sum(axis=0) - np.diag(mm)  # each off-diag cell once per side
        return out + np.diag(mm)  # a diagonal edge consumes two stubs of its class

    max_iter = 4 * nk * nk + int(np.abs(stubs - used(m)).sum()) + 16
    for _ in range(max_iter):
        deficit = stubs - used(m)
        if not deficit.any():
            return m
        pos = np.flatnonzero(deficit > 0)
        neg = np.flatnonzero(deficit < 0)
        if len(pos) >= 2:
            # connect the two neediest classes, preferring the largest remainder
            i, j = sorted(pos[np.argsort(-deficit[pos], kind="stable")][:2])
            m[i, j] += 1
        elif len(pos) == 1 and deficit[pos[0]] >= 2:
            m[pos[0], pos[0]] += 1
        elif len(pos) == 1 and len(neg) > 0:
            # a single leftover stub: steal an edge end from an over-used class
            i = pos[0]
            moved = False
            for j in neg:
                for a_ in range(nk):
                    lo2, hi2 = min(a_, int(j)), max(a_, int(j))
                    if m[lo2, hi2] > 0:
                        m[lo2, hi2] -= 1
                        other = a_  # the end that stays
                        m[min(other, int(i)), max(other, int(i))] += 1
                        moved = True
                        break
                if moved:
                    break
            if not moved:
                raise ConfigurationError("stub/edge counts inconsistent after rounding")
        elif len(neg) > 0:
            # only over-used classes remain: drop one of their edges
            j = neg[0]
            removed = False
            for a_ in range(nk):
                lo2, hi2 = min(a_, int(j)), max(a_, int(j))
                if m[lo2, hi2] > 0:
                    m[lo2, hi2] -= 1
                    removed = True
                    break
            if not removed:
                raise ConfigurationError("stub/edge counts inconsistent after rounding")
        else:  # single class with deficit 1 and no surplus anywhere: odd total
            raise ConfigurationError("stub/edge counts inconsistent after rounding")
    raise ConfigurationError("edge-count repair did not converge")


def build_correlated_layer(mixing, n, rng, node_counts=None):
    """Generate a layer matching a mixing matrix (edges-first construction).

    Creates the required number of edges between degree classes, then deals
    the class-k edge ends uniformly at random onto the class-k nodes (k ends
    per node), and finally erases self-loops and duplicate edges.
    ``node_counts`` pins the per-class node counts (used when the layer must
    agree with an externally apportioned joint degree-type table).
    """
    degs = mixing.degrees
    p = mixing.degree_distribution().probs
    if node_counts is None:
        node_counts = apportion(p, n)
    else:
        node_counts = np.asarray(node_counts, dtype=np.int64).copy()
        if node_counts.sum() != n or len(node_counts) != len(degs):
            raise ConfigurationError("node_counts must match n and the degree support")
    stubs = degs * node_counts
    if stubs.sum() % 2 == 1:
        # move one node between classes whose degrees differ by an odd amount
        done = False
        for i in range(len(degs)):
            for j in range(len(degs)):
                if node_counts[i] > 0 and (degs[i] - degs[j]) % 2 == 1:
                    node_counts[i] -= 1
                    node_counts[j] += 1
                    done = True
                    break
            if done:
                break
        if not done:
            raise ConfigurationError(
                "cannot reach an even stub total for this degree support and n")
    m = _integer_edge_counts(mixing, node_counts)

    # nodes 0..n-1 grouped by class, then shuffled stub lists per class
    bounds = np.concatenate([[0], np.cumsum(node_counts)])
    class_nodes = [np.arange(bounds[i], bounds[i + 1], dtype=np.int32) for i in range(len(degs))]
    stub_lists = []
    for i, k in enumerate(degs):
        s = np.repeat(class_nodes[i], k)
        rng.shuffle(s)
        stub_lists.append(s)
    ptr = [0] * len(degs)

    def take(cls_idx, count):
        s = ptr[cls_idx]
        ptr[cls_idx] += count
        return stub_lists[cls_idx][s:s + count]

    us, vs = [], []
    for i in range(len(degs)):
        for j in range(i, len(degs)):
            cnt = int(m[i, j])
            if cnt == 0:
                continue
            if i == j:
                ends = take(i, 2 * cnt)
                us.append(ends[0::2])
                vs.append(ends[1::2])
            else:
                us.append(take(i, cnt))
                vs.append(take(j, cnt))
    u = np.concatenate(us) if us else np.empty(0, dtype=np.int32)
    v = np.concatenate(vs) if vs else np.empty(0, dtype=np.int32)
    requested = np.repeat(degs, node_counts)
    layer = _layer_from_edges(n, u, v, requested)
    # node ids are contiguous by class after construction; shuffle labels so
    # the node index carries no degree information
    perm = rng.permutation(n).astype(np.int32)
    return _relabel_layer(layer, perm)


def _relabel_layer(layer, perm):
    """Relabel node ids through ``perm`` (perm[old] = new)."""
    edges = layer.edge_array()
    u = perm[edges[:, 0]]
    v = perm[edges[:, 1]]
    degs = np.empty_like(layer.degrees)
    degs[perm] = layer.degrees
    out = _layer_from_edges(layer.n_nodes, u.astype(np.int32), v.astype(np.int32), degs)
    return Layer(out.n_nodes, out.indptr, out.indices, degs, layer.n_erased)


# ---------------------------------------------------------------------------
# Inter-layer coupling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InterLayerCoupling:
    """Joint distribution C of a node's (info-layer degree, phy-layer degree)."""

    info_degrees: np.ndarray
    phy_degrees: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.C, dtype=float)
        if C.shape != (len(self.info_degrees), len(self.phy_degrees)):
            raise ConfigurationError("coupling matrix shape must match the degree supports")
        if np.any(C < -PROB_TOL) or abs(C.sum() - 1.0) > PROB_TOL:
            raise ConfigurationError("coupling entries must be nonnegative and sum to 1")
        object.__setattr__(self, "info_degrees", np.asarray(self.info_degrees, dtype=np.int64))
        object.__setattr__(self, "phy_degrees", np.asarray(self.phy_degrees, dtype=np.int64))
        object.__setattr__(self, "C", np.maximum(C, 0.0))

    def info_marginal(self):
        return self.C.sum(axis=1)

    def phy_marginal(self):
        return self.C.sum(axis=0)

    def pearson(self):
        """Pearson correlation of the two degrees under C; nan if degenerate."""
        ki = self.info_degrees.astype(float)
        kp = self.phy_degrees.astype(float)
        pi, pp = self.info_marginal(), self.phy_marginal()
        mi, mp = ki @ pi, kp @ pp
        vi = (ki ** 2) @ pi - mi ** 2
        vp = (kp ** 2) @ pp - mp ** 2
        if vi <= PROB_TOL or vp <= PROB_TOL:
            return float("nan")
        exy = ki @ self.C @ kp
        return float((exy - mi * mp) / math.sqrt(vi * vp))

    @classmethod
    def uncorrelated(cls, info_dist, phy_dist):
        return cls(info_dist.degrees, phy_dist.degrees,
                   np.outer(info_dist.probs, phy_dist.probs))


def two_point_inter_bounds(q1, q2):
    """Feasible range for the top-left entry of a 2x2 coupling matrix.

    The lower bound must be max{0, q1 + q2 - 1} or the complementary entry
    goes negative.
    """
    return max(0.0, q1 + q2 - 1.0), min(q1, q2)


def two_point_inter_matrix(q1, q2, a, info_degrees=(2, 8), phy_degrees=(2, 8)):
    """2x2 inter-layer coupling with marginals (q1, 1-q1) and (q2, 1-q2)."""
    lo, hi = two_point_inter_bounds(q1, q2)
    if not lo - 1e-15 <= a <= hi + 1e-15:
        raise ValueError(f"a={a} outside the valid interval [{lo}, {hi}]")
    a = min(max(a, lo), hi)
    C = np.array([[a, q1 - a], [q2 - a, 1.0 - q1 - q2 + a]])
    return InterLayerCoupling(np.asarray(info_degrees), np.asarray(phy_degrees),
                              np.maximum(C, 0.0) / np.maximum(C, 0.0).sum())


def two_point_a_for_inter_pearson(q1, q2, r, info_degrees=(2, 8), phy_degrees=(2, 8)):
    """Invert the linear relation between the inter-layer Pearson coefficient and a."""
    ki1, ki2 = info_degrees
    kp1, kp2 = phy_degrees
    si = abs(ki1 - ki2) * math.sqrt(q1 * (1.0 - q1))
    sp = abs(kp1 - kp2) * math.sqrt(q2 * (1.0 - q2))
    slope = (ki1 - ki2) * (kp1 - kp2) / (si * sp)
    return q1 * q2 + r / slope


# ---------------------------------------------------------------------------
# Multiplex assembly and measurement
# ---------------------------------------------------------------------------


@dataclass
class MultiplexNetwork:
    """Two layers over a shared node index set (0..n-1)."""

    n_nodes: int
    info: Layer
    phy: Layer
    meta: dict = field(default_factory=dict)

    def export_edge_list(self, fh):
        """Text export: header line ``nodes N`` then ``<layer> <i> <j>`` lines."""
        fh.write(f"nodes {self.n_nodes}\n")
        for name, layer in (("info", self.info), ("phy", self.phy)):
            for u, v in layer.edge_array():
                fh.write(f"{name} {u} {v}\n")


def couple_layers(info_layer, phy_layer, coupling, rng):
    """Pair info-layer nodes with phy-layer nodes to realize a joint degree type.

    ``coupling`` may be None (uniformly random bijection) or an
    InterLayerCoupling; in the latter case the per-degree node counts of both
    layers must match the rounded marginals of N * C, otherwise a
    configuration error reports the per-class deficit.
    """
    n = info_layer.n_nodes
    if phy_layer.n_nodes != n:
        raise ConfigurationError("layers must have the same number of nodes")
    if coupling is None:
        perm = rng.permutation(n).astype(np.int32)  # perm[phy_node] = shared id
        phy = _relabel_layer(phy_layer, perm)
        return MultiplexNetwork(n, info_layer, phy,
                                meta={"info_erased": info_layer.n_erased,
                                      "phy_erased": phy_layer.n_erased})

    joint = apportion(coupling.C.ravel(), n).reshape(coupling.C.shape)
    info_need = joint.sum(axis=1)
    phy_need = joint.sum(axis=0)
    info_have = {int(k): int(c) for k, c in
                 zip(*np.unique(info_layer.degrees, return_counts=True))}
    phy_have = {int(k): int(c) for k, c in
                zip(*np.unique(phy_layer.degrees, return_counts=True))}
    deficits = []
    for k, need in zip(coupling.info_degrees, info_need):
        if info_have.get(int(k), 0) != need:
            deficits.append(f"info degree {k}: have {info_have.get(int(k), 0)}, need {need}")
    for k, need in zip(coupling.phy_degrees, phy_need):
        if phy_have.get(int(k), 0) != need:
            deficits.append(f"phy degree {k}: have {phy_have.get(int(k), 0)}, need {need}")
    if set(info_have) - set(int(k) for k in coupling.info_degrees):
        deficits.append("info layer has degrees outside the coupling support")
    if set(phy_have) - set(int(k) for k in coupling.phy_degrees):
        deficits.append("phy layer has degrees outside the coupling support")
    if deficits:
        raise ConfigurationError("coupling infeasible for realized degree sequences: "
                                 + "; ".join(deficits))

    info_pool = {int(k): rng.permutation(np.flatnonzero(info_layer.degrees == k)).tolist()
                 for k in coupling.info_degrees}
    phy_pool = {int(k): rng.permutation(np.flatnonzero(phy_layer.degrees == k)).tolist()
                for k in coupling.phy_degrees}
    perm = np.empty(n, dtype=np.int32)  # perm[phy_node] = shared (info) id
    for i, ki in enumerate(coupling.info_degrees):
        for j, kj in enumerate(coupling.phy_degrees):
            cnt = int(joint[i, j])
            for _ in range(cnt):
                a = info_pool[int(ki)].pop()
                b = phy_pool[int(kj)].pop()
                perm[b] = a
    phy = _relabel_layer(phy_layer, perm)
    return MultiplexNetwork(n, info_layer, phy,
                            meta={"info_erased": info_layer.n_erased,
                                  "phy_erased": phy_layer.n_erased})


def measure_intra_assortativity(layer):
    """Sample Pearson coefficient of realized endpoint degrees over edges.

    Returns nan when the endpoint degrees have zero variance (regular layers).
    """
    edges = layer.edge_array()
    if len(edges) == 0:
        raise ValueError("layer has no edges")
    d = layer.realized_degrees().astype(float)
    x = np.concatenate([d[edges[:, 0]], d[edges[:, 1]]])
    y = np.concatenate([d[edges[:, 1]], d[edges[:, 0]]])
    vx = x.var()
    if vx <= 1e-12:
        return float("nan")
    return float(((x - x.mean()) * (y - y.mean())).mean() / vx)


def measure_inter_correlation(network):
    """Sample Pearson coefficient, over nodes, of the two intra-layer degrees."""
    di = network.info.realized_degrees().astype(float)
    dp = network.phy.realized_degrees().astype(float)
    vi, vp = di.var(), dp.var()
    if vi <= 1e-12 or vp <= 1e-12:
        return float("nan")
    return float(((di - di.mean()) * (dp - dp.mean())).mean() / math.sqrt(vi * vp))
