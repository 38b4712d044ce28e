"""Discretized root surfaces: fibers, continuation matching, pullbacks.

``build_bundle`` solves the polynomial fiber at every sample, then glues
adjacent fibers with minimum-total-squared-distance assignments.  An edge
whose best assignment is not clearly separated from the runner-up is
bisected adaptively (exact coefficient evaluation when the polynomial
carries expressions, linear interpolation otherwise) until the matching
is unambiguous or the fibers are inside the branch tolerance, where
sheets genuinely merge and the minimal assignment is accepted.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, funcspec
from .base import BaseSpace, Location, SelfMap

MAX_ENUM_DEGREE = 7            # exhaustive assignment enumeration above this uses LSAP


class BundleError(RuntimeError):
    pass


class AmbiguousMatchError(BundleError):
    """Sheet matching stayed ambiguous at maximum refinement depth."""


@dataclass(frozen=True)
class Tolerances:
    """All numeric thresholds, pinned in one place and carried into verdicts."""

    root_residual: float = 1e-9
    branch_tol: float = 1e-6
    match_margin: float = 2.0
    max_refine_depth: int = 12
    merge_scale: float = 8.0          # merge value agreement, in local sheet movements
    fit_jump_factor: float = 50.0
    quotient_divergence: float = 1e6
    quotient_cauchy: float = 1e-4
    admissible_zero_tol: float = 1e-9

    def as_dict(self):
        return {
            "root_residual": self.root_residual,
            "branch_tol": self.branch_tol,
            "match_margin": self.match_margin,
            "max_refine_depth": self.max_refine_depth,
            "merge_scale": self.merge_scale,
            "fit_jump_factor": self.fit_jump_factor,
            "quotient_divergence": self.quotient_divergence,
            "quotient_cauchy": self.quotient_cauchy,
            "admissible_zero_tol": self.admissible_zero_tol,
        }


DEFAULT_TOL = Tolerances()


# -- polynomials ---------------------------------------------------------------


class MonicPolynomial:
    """Monic polynomial whose lower coefficients are sampled functions.

    ``coeff_values[s, k]`` is c_k at sample s; the leading coefficient is
    an implicit 1.  ``source`` provides exact off-sample coefficients when
    the polynomial came from expressions, a factored root list, or a
    pullback; otherwise off-sample coefficients are linear interpolants.
    """

    def __init__(self, base: BaseSpace, coeff_values, source=None):
        coeff_values = np.asarray(coeff_values, dtype=complex)
        if coeff_values.ndim != 2 or coeff_values.shape[0] != base.n_samples:
            raise BundleError("coefficient array must be (n_samples, degree)")
        if coeff_values.shape[1] < 2:
            raise BundleError("polynomial degree must be at least 2")
        if not np.all(np.isfinite(coeff_values)):
            raise BundleError("non-finite polynomial coefficient")
        self.base = base
        self.coeff_values = coeff_values
        self.source = source

    @property
    def degree(self) -> int:
        return self.coeff_values.shape[1]

    @property
    def coeffs(self) -> list[funcspec.SampledFunction]:
        return [funcspec.SampledFunction(self.base, self.coeff_values[:, k])
                for k in range(self.degree)]

    def coeffs_at(self, loc: Location) -> np.ndarray:
        """Coefficients at an off-sample location (exact when possible)."""
        if self.source is not None:
            return self.source(self.base, loc)
        a, b = self.base.edges[loc.edge]
        return (1.0 - loc.t) * self.coeff_values[a] + loc.t * self.coeff_values[b]

    def coeffs_at_coord(self, coord) -> np.ndarray:
        if self.source is not None and self.base.kind == "torus2":
            # torus coordinates have no single-chart Location; sources take them raw
            return self.source.at_coords(self.base, np.asarray(coord)[None, :])[0]
        return self.coeffs_at(self.base.coordinate_location(coord))

    def coeff_values_at_coords(self, coords) -> np.ndarray:
        """Vectorized coefficient evaluation at an array of coordinates."""
        coords = np.asarray(coords)
        if self.source is not None and hasattr(self.source, "at_coords"):
            return self.source.at_coords(self.base, coords)
        out = np.empty((len(coords), self.degree), dtype=complex)
        for i, c in enumerate(coords):
            out[i] = self.coeffs_at(self.base.coordinate_location(c))
        return out


def _coord_env(kind, coords):
    coords = np.asarray(coords)
    if kind == "interval":
        return {"x": coords}
    if kind == "circle":
        return {"theta": coords}
    if kind == "torus2":
        return {"theta1": coords[..., 0], "theta2": coords[..., 1]}
    raise BundleError(f"no coordinate chart on base kind {kind!r}")


class ExprSource:
    """Exact coefficients from one expression per lower coefficient."""

    def __init__(self, exprs):
        self.exprs = exprs

    def __call__(self, base, loc):
        coord = base.location_coordinate(loc)
        return np.array([funcspec.eval_at_coord(e, base.kind, coord)
                         for e in self.exprs])

    def at_coords(self, base, coords):
        env = _coord_env(base.kind, coords)
        n = len(coords)
        cols = [np.broadcast_to(np.asarray(funcspec._eval(e, env), dtype=complex), (n,))
                for e in self.exprs]
        return np.column_stack(cols)


class FactoredSource:
    """Exact coefficients expanded from root-curve expressions."""

    def __init__(self, root_exprs):
        self.root_exprs = root_exprs

    def __call__(self, base, loc):
        coord = base.location_coordinate(loc)
        roots = np.array([funcspec.eval_at_coord(e, base.kind, coord)
                          for e in self.root_exprs])
        return _expand_monic(roots[None, :])[0]

    def at_coords(self, base, coords):
        env = _coord_env(base.kind, coords)
        n = len(coords)
        cols = [np.broadcast_to(np.asarray(funcspec._eval(e, env), dtype=complex), (n,))
                for e in self.root_exprs]
        return _expand_monic(np.column_stack(cols))


class PullbackSource:
    """Coefficients of the base polynomial evaluated at self-map images."""

    def __init__(self, poly, smap):
        self.poly = poly
        self.smap = smap

    def __call__(self, base, loc):
        coord = base.location_coordinate(loc)
        image = self.smap.image_coordinate(coord)
        return self.poly.coeffs_at_coord(image)

    def at_coords(self, base, coords):
        images = self.smap.image_coords_array(np.asarray(coords))
        return self.poly.coeff_values_at_coords(images)


def _expand_monic(roots: np.ndarray) -> np.ndarray:
    """Lower coefficients (ascending) of prod (t - r) per row of roots."""
    m, n = roots.shape
    acc = np.zeros((m, n + 1), dtype=complex)
    acc[:, 0] = 1.0
    for j in range(n):
        lam = roots[:, j][:, None]
        nxt = np.zeros_like(acc)
        nxt[:, 1 : j + 2] = acc[:, : j + 1]
        nxt[:, : j + 1] -= lam * acc[:, : j + 1]
        acc = nxt
    return acc[:, :n]


def poly_from_exprs(base: BaseSpace, coeff_texts) -> MonicPolynomial:
    """Monic polynomial from expression strings for c_0..c_{n-1}."""
    exprs = [funcspec.parse(t) if isinstance(t, str) else t for t in coeff_texts]
    values = np.column_stack([funcspec.evaluate(e, base).values for e in exprs])
    return MonicPolynomial(base, values, source=ExprSource(exprs))


def poly_from_roots(base: BaseSpace, root_texts) -> MonicPolynomial:
    """Monic polynomial expanded from root-curve expressions (factored form)."""
    exprs = [funcspec.parse(t) if isinstance(t, str) else t for t in root_texts]
    roots = np.column_stack([funcspec.evaluate(e, base).values for e in exprs])
    return MonicPolynomial(base, _expand_monic(roots), source=FactoredSource(exprs))


def poly_from_values(base: BaseSpace, coeff_values) -> MonicPolynomial:
    """Monic polynomial from sampled coefficient values only."""
    return MonicPolynomial(base, np.column_stack(
        [np.asarray(c.values if isinstance(c, funcspec.SampledFunction) else c)
         for c in coeff_values]))


def pullback_polynomial(p: MonicPolynomial, smap: SelfMap) -> MonicPolynomial:
    """The polynomial with coefficients composed with the self-map."""
    if smap.base is not p.base:
        raise BundleError("self-map and polynomial live on different bases")
    base = p.base
    if base.kind in ("interval", "circle", "torus2"):
        image_coords = np.array(
            [base.location_coordinate(loc) for loc in smap.images])
        values = p.coeff_values_at_coords(image_coords)
    else:
        values = np.empty_like(p.coeff_values)
        for s in range(base.n_samples):
            values[s] = p.coeffs_at(smap.images[s])
    return MonicPolynomial(p.base, values, source=PullbackSource(p, smap))


# -- fibers ---------------------------------------------------------------------


def solve_fiber(coeffs, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """All roots (with multiplicity) of one monic fiber, canonically ordered."""
    coeffs = np.asarray(coeffs, dtype=complex)[None, :]
    roots = _kernels.solve_fibers(coeffs)
    res = _kernels.residuals(coeffs, roots)
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    if np.max(res) > tol.root_residual * scale:
        raise BundleError(f"fiber solve residual {np.max(res):.3e} above tolerance")
    return roots[0]


def _min_fiber_gap(fibers: np.ndarray) -> np.ndarray:
    """Minimal pairwise root distance per fiber row."""
    m, n = fibers.shape
    if n < 2:
        return np.full(m, np.inf)
    gap = np.full(m, np.inf)
    for i, j in itertools.combinations(range(n), 2):
        gap = np.minimum(gap, np.abs(fibers[:, i] - fibers[:, j]))
    return gap


_PERM_CACHE: dict[int, np.ndarray] = {}


def _perms(n: int) -> np.ndarray:
    if n not in _PERM_CACHE:
        _PERM_CACHE[n] = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    return _PERM_CACHE[n]


def _match_batch(tails: np.ndarray, heads: np.ndarray):
    """Best assignments tail-slot -> head-slot per row, with runner-up costs.

    Enumerates all permutations in lexicographic order (ties resolve to the
    lexicographically smallest permutation), so results are deterministic.
    """
    m, n = tails.shape
    if n > MAX_ENUM_DEGREE:
        return _match_batch_lsap(tails, heads)
    perms = _perms(n)
    dist = np.abs(tails[:, :, None] - heads[:, None, :]) ** 2
    costs = np.zeros((m, len(perms)))
    for i in range(n):
        costs += dist[:, i, perms[:, i]]
    order = np.argsort(costs, axis=1, kind="stable")
    best_idx = order[:, 0]
    best = costs[np.arange(m), best_idx]
    second = costs[np.arange(m), order[:, 1]] if len(perms) > 1 else np.full(m, np.inf)
    return perms[best_idx], best, second


def _match_batch_lsap(tails, heads):
    from scipy.optimize import linear_sum_assignment

    m, n = tails.shape
    perms = np.empty((m, n), dtype=np.intp)
    best = np.empty(m)
    second = np.empty(m)
    for e in range(m):
        cost = np.abs(tails[e][:, None] - heads[e][None, :]) ** 2
        rows, cols = linear_sum_assignment(cost)
        perms[e] = cols
        best[e] = cost[rows, cols].sum()
        runner = np.inf
        for i in range(n):                       # best assignment avoiding each pair
            masked = cost.copy()
            masked[i, cols[i]] = np.inf
            r2, c2 = linear_sum_assignment(masked)
            total = masked[r2, c2].sum()
            runner = min(runner, total)
        second[e] = runner
    return perms, best, second


@dataclass
class RootBundle:
    """The discretized root surface of a monic polynomial."""

    base: BaseSpace
    degree: int
    fibers: np.ndarray                  # (S, n) complex, canonically ordered
    edge_perms: np.ndarray              # (E, n) tail slot -> head slot
    branch_flags: np.ndarray            # (S,) bool
    refinement: dict = field(default_factory=dict)   # edge id -> midpoint params
    poly: MonicPolynomial | None = None
    tol: Tolerances = DEFAULT_TOL

    def inverse_perm(self, edge_id: int) -> np.ndarray:
        inv = np.empty(self.degree, dtype=np.intp)
        inv[self.edge_perms[edge_id]] = np.arange(self.degree)
        return inv

    def step_perm(self, edge_id: int, direction: int) -> np.ndarray:
        return self.edge_perms[edge_id] if direction > 0 else self.inverse_perm(edge_id)

    def merge_clusters(self, sample: int) -> list[list[int]]:
        """Slots whose root values coincide within branch tolerance."""
        n = self.degree
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        vals = self.fibers[sample]
        for i in range(n):
            for j in range(i + 1, n):
                if abs(vals[i] - vals[j]) < self.tol.branch_tol:
                    parent[find(i)] = find(j)
        groups: dict[int, list[int]] = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        return [sorted(g) for g in sorted(groups.values())]

    def local_motion(self, sample: int) -> float:
        """Largest sheet movement along edges incident to ``sample``."""
        worst = 0.0
        for eid, direction in self.base.incident(sample):
            a, b = self.base.edge_endpoint(eid, direction)
            perm = self.step_perm(eid, direction)
            move = np.max(np.abs(self.fibers[b][perm] - self.fibers[a]))
            worst = max(worst, float(move))
        return worst


def build_bundle(p: MonicPolynomial, tol: Tolerances = DEFAULT_TOL) -> RootBundle:
    """Solve and glue all fibers of ``p`` into a :class:`RootBundle`."""
    base = p.base
    fibers = _kernels.solve_fibers(p.coeff_values)
    res = _kernels.residuals(p.coeff_values, fibers)
    scale = max(1.0, float(np.max(np.abs(p.coeff_values))))
    if np.max(res) > tol.root_residual * scale:
        worst = int(np.argmax(np.max(res, axis=1)))
        raise BundleError(
            f"fiber residual {np.max(res):.3e} above tolerance at sample {worst}")
    flags = _min_fiber_gap(fibers) < tol.branch_tol

    edges = np.asarray(base.edges, dtype=np.intp)
    tails = fibers[edges[:, 0]]
    heads = fibers[edges[:, 1]]
    perms, best, second = _match_batch(tails, heads)
    near_branch = flags[edges[:, 0]] | flags[edges[:, 1]]
    ambiguous = np.flatnonzero(~near_branch & (second < tol.match_margin * best))

    refinement: dict[int, list[float]] = {}
    for eid in ambiguous:
        midpoints: list[float] = []
        perms[eid] = _refine_match(p, int(eid), 0.0, 1.0,
                                   tails[eid], heads[eid], 0, tol, midpoints)
        refinement[int(eid)] = midpoints

    return RootBundle(base, p.degree, fibers, perms, flags,
                      refinement=refinement, poly=p, tol=tol)


def _refine_match(p, eid, t0, t1, f0, f1, depth, tol, midpoints):
    perm, best, second = _match_batch(f0[None, :], f1[None, :])
    perm, best, second = perm[0], best[0], second[0]
    gap0 = _min_fiber_gap(f0[None, :])[0]
    gap1 = _min_fiber_gap(f1[None, :])[0]
    if second >= tol.match_margin * best:
        return perm
    if gap0 < tol.branch_tol or gap1 < tol.branch_tol:
        return perm                     # sheets genuinely merge; accept minimum
    if depth >= tol.max_refine_depth:
        raise AmbiguousMatchError(
            f"edge {eid}: matching ambiguous at depth {depth} "
            f"(best {best:.3e}, runner-up {second:.3e})")
    tm = 0.5 * (t0 + t1)
    midpoints.append(tm)
    fm = solve_fiber(p.coeffs_at(Location(eid, tm)), tol)
    left = _refine_match(p, eid, t0, tm, f0, fm, depth + 1, tol, midpoints)
    right = _refine_match(p, eid, tm, t1, fm, f1, depth + 1, tol, midpoints)
    return right[left]


def pullback(p: MonicPolynomial, smap: SelfMap, tol: Tolerances = DEFAULT_TOL) -> RootBundle:
    """Bundle of the coefficient-composed polynomial; its fiber over x is
    the fiber of ``p`` over the self-map image of x."""
    return build_bundle(pullback_polynomial(p, smap), tol)


# -- discriminant and admissibility ---------------------------------------------


def discriminant(p: MonicPolynomial, check: bool = True,
                 tol: Tolerances = DEFAULT_TOL) -> funcspec.SampledFunction:
    """Product of squared root differences per fiber.

    With ``check`` the values are cross-checked against the resultant of p
    and its derivative away from branch-flagged samples.
    """
    fibers = _kernels.solve_fibers(p.coeff_values)
    n = p.degree
    prod = np.ones(p.base.n_samples, dtype=complex)
    for i, j in itertools.combinations(range(n), 2):
        prod *= (fibers[:, i] - fibers[:, j]) ** 2
    if check:
        res = resultant_discriminant(p)
        flags = _min_fiber_gap(fibers) < tol.branch_tol
        denom = np.maximum(np.abs(prod), 1.0)
        rel = np.abs(prod - res) / denom
        bad = rel > 1e-6
        bad &= ~flags
        if np.any(bad):
            worst = int(np.argmax(np.where(bad, rel, 0.0)))
            raise BundleError(
                f"discriminant product and resultant disagree at sample {worst} "
                f"(relative error {rel[worst]:.3e})")
    return funcspec.SampledFunction(p.base, prod)


def resultant_discriminant(p: MonicPolynomial) -> np.ndarray:
    """Discriminant via the Sylvester resultant of p and p'."""
    n = p.degree
    S = p.base.n_samples
    desc = np.concatenate([np.ones((S, 1), dtype=complex),
                           p.coeff_values[:, ::-1]], axis=1)      # t^n .. t^0
    k = np.arange(n, 0, -1, dtype=float)
    ddesc = desc[:, :n] * k[None, :]                              # derivative, deg n-1
    size = 2 * n - 1
    syl = np.zeros((S, size, size), dtype=complex)
    for i in range(n - 1):
        syl[:, i, i : i + n + 1] = desc
    for j in range(n):
        syl[:, n - 1 + j, j : j + n] = ddesc
    det = np.linalg.det(syl)
    sign = -1.0 if (n * (n - 1) // 2) % 2 else 1.0
    return sign * det


@dataclass
class AdmissibilityReport:
    admissible: bool
    zero_tol: float
    window: int
    runs: list[dict]


def is_admissible(p: MonicPolynomial, zero_tol: float | None = None,
                  window: int | None = None) -> AdmissibilityReport:
    """Discrete proxy for the discriminant zero set having empty interior.

    The polynomial is admissible when no connected run of ``window``
    samples (along any edge path) keeps |D| below ``zero_tol``.  The
    default window scales with resolution so verdicts are stable under
    sample refinement.
    """
    if zero_tol is None:
        zero_tol = DEFAULT_TOL.admissible_zero_tol
    S = p.base.n_samples
    if window is None:
        window = max(8, math.ceil(0.02 * S))
    d = discriminant(p, check=False).values
    marked = np.abs(d) < zero_tol
    runs = []
    seen = np.zeros(S, dtype=bool)
    for s in range(S):
        if not marked[s] or seen[s]:
            continue
        comp = _marked_component(p.base, marked, s)
        seen[list(comp)] = True
        span = _component_path_span(p.base, comp)
        if span >= window:
            runs.append({
                "samples": sorted(comp)[:50],
                "size": len(comp),
                "path_span": span,
            })
    return AdmissibilityReport(p.degree >= 2 and not runs, zero_tol, window, runs)


def _marked_component(base, marked, start):
    comp = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        for eid, direction in base.incident(cur):
            _, nxt = base.edge_endpoint(eid, direction)
            if marked[nxt] and nxt not in comp:
                comp.add(nxt)
                stack.append(nxt)
    return comp


def _component_path_span(base, comp):
    """Longest shortest-path sample count inside the component.

    Exact for path/cycle-shaped components; a marked component containing
    a full cycle is treated as spanning everything.
    """
    edges_inside = sum(1 for a, b in base.edges if a in comp and b in comp)
    if edges_inside >= len(comp):
        return len(base.coords) + len(comp)      # contains a cycle
    far, _ = _bfs_far(base, comp, next(iter(comp)))
    _, depth = _bfs_far(base, comp, far)
    return depth + 1


def _bfs_far(base, comp, start):
    dist = {start: 0}
    queue = [start]
    far, fdist = start, 0
    while queue:
        cur = queue.pop(0)
        for eid, direction in base.incident(cur):
            _, nxt = base.edge_endpoint(eid, direction)
            if nxt in comp and nxt not in dist:
                dist[nxt] = dist[cur] + 1
                if dist[nxt] > fdist:
                    far, fdist = nxt, dist[nxt]
                queue.append(nxt)
    return far, fdist


# -- evaluation on bundles --------------------------------------------------------


def evaluate_poly_on_bundle(q_values, bundle: RootBundle) -> np.ndarray:
    """Values of sum q_k(x) * lambda^k at every bundle point (x, lambda).

    ``q_values`` is a (S, m) coefficient array (or list of SampledFunctions)
    of any degree m >= 1; no monic leading term is implied here.
    """
    if isinstance(q_values, (list, tuple)):
        q_values = np.column_stack(
            [c.values if isinstance(c, funcspec.SampledFunction) else np.asarray(c)
             for c in q_values])
    q_values = np.asarray(q_values, dtype=complex)
    out = np.zeros_like(bundle.fibers)
    for k in range(q_values.shape[1] - 1, -1, -1):
        out = out * bundle.fibers + q_values[:, k][:, None]
    return out
