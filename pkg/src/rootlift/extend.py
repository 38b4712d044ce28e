"""Deciding the two extension problems on discretized root surfaces.

A lift is a fiber-preserving assignment g that sends sheets of a source
bundle A to sheets of a target bundle B over the same base, consistently
with edge continuations and single-valued where source sheets merge.
Existence of such a lift decides extension to the full function algebra
of the root surface; membership of a lift in the polynomial subalgebra
(coefficient fitting plus a divided-quotient finiteness probe at branch
points) decides extension to the Arens-Hoffman extension.

The search enumerates sheet assignments at one basepoint and transports
them along a spanning tree; co-tree edges become permutation-equivariance
constraints and branch merges become value-agreement constraints, so the
combinatorial search is exact at the sampling resolution.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import monodromy as monod
from .bundle import (DEFAULT_TOL, MonicPolynomial, RootBundle, Tolerances,
                     build_bundle, is_admissible, pullback_polynomial,
                     solve_fiber)


class ExtendError(RuntimeError):
    pass


class InadmissibleError(ExtendError):
    pass


# -- the lift constraint problem --------------------------------------------------


class LiftProblem:
    """Fiber-assignment constraints between two bundles over one base."""

    def __init__(self, source: RootBundle, target: RootBundle,
                 tol: Tolerances = DEFAULT_TOL):
        if source.base is not target.base:
            raise ExtendError("source and target bundles live on different bases")
        self.source = source
        self.target = target
        self.tol = tol
        self.base = source.base
        self.basepoint = self._pick_basepoint()
        self._build_transports()
        self._build_loop_constraints()
        self._build_merge_constraints()

    # most-merged sample first: it carries the strongest unary pruning
    def _pick_basepoint(self) -> int:
        flags = np.flatnonzero(self.source.branch_flags)
        if len(flags) == 0:
            return 0
        best, best_pairs = int(flags[0]), -1
        for s in flags:
            pairs = sum(len(c) * (len(c) - 1) // 2
                        for c in self.source.merge_clusters(int(s)))
            if pairs > best_pairs:
                best, best_pairs = int(s), pairs
        return best

    def _build_transports(self):
        base = self.base
        nA, nB = self.source.degree, self.target.degree
        S = base.n_samples
        self.TA = np.empty((S, nA), dtype=np.intp)
        self.TB = np.empty((S, nB), dtype=np.intp)
        self.TA[self.basepoint] = np.arange(nA)
        self.TB[self.basepoint] = np.arange(nB)
        tree, _ = base.spanning_tree(self.basepoint)
        self._tree = tree
        in_tree = set()
        for sample, eid, direction in tree:
            parent, _ = base.edge_endpoint(eid, direction)
            self.TA[sample] = self.source.step_perm(eid, direction)[self.TA[parent]]
            self.TB[sample] = self.target.step_perm(eid, direction)[self.TB[parent]]
            in_tree.add(eid)
        self._cotree = [eid for eid in range(base.n_edges) if eid not in in_tree]
        self.invTA = np.empty_like(self.TA)
        rows = np.arange(S)[:, None]
        self.invTA[rows, self.TA] = np.arange(nA)[None, :]
        self.invTB = np.empty_like(self.TB)
        self.invTB[rows, self.TB] = np.arange(nB)[None, :]

    def _build_loop_constraints(self):
        """Each co-tree edge x->y yields g0 . rhoA = rhoB . g0 at the basepoint."""
        self.loop_pairs: list[tuple[np.ndarray, np.ndarray]] = []
        for eid in self._cotree:
            a, b = self.base.edges[eid]
            rhoA = self.invTA[b][self.source.edge_perms[eid][self.TA[a]]]
            rhoB = self.invTB[b][self.target.edge_perms[eid][self.TB[a]]]
            self.loop_pairs.append((rhoA, rhoB))

    def merge_tolerance(self, sample: int) -> float:
        return self.tol.branch_tol + self.tol.merge_scale * self.target.local_motion(sample)

    def _build_merge_constraints(self):
        """Branch merges, pulled back to basepoint slots as allowed-value matrices."""
        nB = self.target.degree
        combined: dict[tuple[int, int], np.ndarray] = {}
        self.merge_samples: list[int] = []
        for s in np.flatnonzero(self.source.branch_flags):
            s = int(s)
            clusters = [c for c in self.source.merge_clusters(s) if len(c) > 1]
            if not clusters:
                continue
            self.merge_samples.append(s)
            vals = self.target.fibers[s][self.TB[s]]   # value of basepoint slot v at s
            allowed = np.abs(vals[:, None] - vals[None, :]) <= self.merge_tolerance(s)
            for cluster in clusters:
                slots = [int(self.invTA[s][i]) for i in cluster]
                for x, y in itertools.combinations(slots, 2):
                    key = (min(x, y), max(x, y))
                    mat = allowed if x < y else allowed.T
                    if key in combined:
                        combined[key] = combined[key] & mat
                    else:
                        combined[key] = mat.copy()
        self.merge_pairs = [(a, b, m) for (a, b), m in sorted(combined.items())]
        self._merge_by_slot: dict[int, list[tuple[int, np.ndarray, bool]]] = {}
        for a, b, m in self.merge_pairs:
            self._merge_by_slot.setdefault(a, []).append((b, m, False))
            self._merge_by_slot.setdefault(b, []).append((a, m, True))

    # -- enumeration ------------------------------------------------------------

    def enumerate(self, max_count: int | None = None) -> list["LiftWitness"]:
        """All lifts in deterministic (lexicographic basepoint map) order."""
        nA, nB = self.source.degree, self.target.degree
        g0 = np.full(nA, -1, dtype=np.intp)
        out: list[LiftWitness] = []

        def assign(slot, value, trail):
            stack = [(slot, value)]
            while stack:
                s, v = stack.pop()
                if g0[s] >= 0:
                    if g0[s] != v:
                        return False
                    continue
                for other, mat, flipped in self._merge_by_slot.get(s, ()):
                    if g0[other] >= 0:
                        ok = mat[g0[other], v] if flipped else mat[v, g0[other]]
                        if not ok:
                            return False
                g0[s] = v
                trail.append(s)
                for rhoA, rhoB in self.loop_pairs:
                    stack.append((int(rhoA[s]), int(rhoB[v])))
            return True

        def search(pos):
            if max_count is not None and len(out) >= max_count:
                return
            while pos < nA and g0[pos] >= 0:
                pos += 1
            if pos == nA:
                out.append(LiftWitness(self, tuple(int(v) for v in g0)))
                return
            for v in range(nB):
                trail: list[int] = []
                if assign(pos, v, trail):
                    search(pos + 1)
                for s in trail:
                    g0[s] = -1
                if max_count is not None and len(out) >= max_count:
                    return

        search(0)
        return out

    def solution_count(self) -> int:
        return len(self.enumerate())

    def assignments_for(self, g0) -> np.ndarray:
        """Per-sample sheet maps G with G[x, i] the target slot of source slot i."""
        g0 = np.asarray(g0, dtype=np.intp)
        rows = np.arange(self.base.n_samples)[:, None]
        return self.TB[rows, g0[self.invTA]]


@dataclass
class LiftWitness:
    """One lift: the basepoint assignment plus lazily materialized values."""

    problem: LiftProblem
    g0: tuple[int, ...]
    _assignments: np.ndarray | None = field(default=None, repr=False)
    _values: np.ndarray | None = field(default=None, repr=False)

    @property
    def assignments(self) -> np.ndarray:
        if self._assignments is None:
            self._assignments = self.problem.assignments_for(self.g0)
        return self._assignments

    @property
    def values(self) -> np.ndarray:
        """f on the source bundle: value of the assigned target sheet."""
        if self._values is None:
            rows = np.arange(self.problem.base.n_samples)[:, None]
            self._values = self.problem.target.fibers[rows, self.assignments]
        return self._values


def validate_witness(problem: LiftProblem, witness: LiftWitness) -> dict:
    """Re-check every lift constraint directly against the raw bundles."""
    A, B = problem.source, problem.target
    G = witness.assignments
    edges = np.asarray(problem.base.edges, dtype=np.intp)
    permsA = A.edge_perms
    permsB = B.edge_perms
    lhs = np.take_along_axis(G[edges[:, 1]], permsA, axis=1)
    rhs = np.take_along_axis(permsB, G[edges[:, 0]], axis=1)
    edge_ok = bool(np.array_equal(lhs, rhs))
    merge_ok = True
    worst_spread = 0.0
    for s in np.flatnonzero(A.branch_flags):
        s = int(s)
        tol = problem.merge_tolerance(s)
        for cluster in A.merge_clusters(s):
            if len(cluster) < 2:
                continue
            vals = B.fibers[s][G[s][cluster]]
            spread = float(np.max(np.abs(vals[:, None] - vals[None, :])))
            worst_spread = max(worst_spread, spread)
            if spread > tol:
                merge_ok = False
    fiber_ok = bool(np.array_equal(
        witness.values,
        B.fibers[np.arange(problem.base.n_samples)[:, None], G]))
    return {
        "edge_constraints": edge_ok,
        "merge_constraints": merge_ok,
        "worst_merge_spread": worst_spread,
        "fiber_membership": fiber_ok,
        "valid": edge_ok and merge_ok and fiber_ok,
    }


# -- verdicts ---------------------------------------------------------------------


@dataclass
class Verdict:
    answer: str                       # yes | no | inconclusive
    witness: LiftWitness | None = None
    certificate: dict | None = None
    diagnostics: dict = field(default_factory=dict)
    fit: object = None                # FitResult of the accepted lift, when relevant

    def to_json(self, witness_ref=None) -> dict:
        return {
            "answer": self.answer,
            "certificate_kind": None if self.certificate is None
            else self.certificate.get("kind"),
            "certificate_data": self.certificate,
            "witness_ref": witness_ref,
            "tolerances": self.diagnostics.get("tolerances"),
            "resolution": self.diagnostics.get("resolution"),
        }


def _distinct_count(values: np.ndarray, tol: float) -> int:
    """Count value clusters under the coincidence tolerance."""
    vals = list(values)
    reps: list[complex] = []
    for v in vals:
        for r in reps:
            if abs(v - r) < tol:
                break
        else:
            reps.append(v)
    return len(reps)


def _strip_obstruction(problem: LiftProblem):
    """Circle fast paths: winding divisibility, then forced-pairing counting.

    Returns a certificate dict when a sound obstruction is found, else None.
    Both arguments are consequences of the loop-equivariance constraint, so
    they are valid with or without branch merges.
    """
    if problem.base.kind != "circle" or not problem.loop_pairs:
        return None
    rhoA, rhoB = problem.loop_pairs[0]
    cyclesA = monod.permutation_cycles(rhoA)
    cyclesB = monod.permutation_cycles(rhoB)
    lensB = [len(c) for c in cyclesB]
    pairing = []
    for cyc in cyclesA:
        targets = [k for k, c in enumerate(cyclesB) if len(cyc) % len(c) == 0]
        if not targets:
            return {
                "kind": "strip_divisibility",
                "source_winding": len(cyc),
                "target_windings": sorted(lensB),
            }
        pairing.append(targets)
    if any(len(t) != 1 for t in pairing):
        return None                    # pairing not forced; leave it to the search
    required_slots = sorted({slot for targets in pairing
                             for slot in cyclesB[targets[0]]})
    tolv = problem.tol.branch_tol
    A, B = problem.source, problem.target
    for s in range(problem.base.n_samples):
        srcv = A.fibers[s]
        reqv = B.fibers[s][problem.TB[s][required_slots]]
        n_src = _distinct_count(srcv, tolv)
        n_req = _distinct_count(reqv, tolv)
        if n_src < n_req:
            return {
                "kind": "fiber_count",
                "sample": int(s),
                "coordinate": problem.base.location_coordinate(
                    problem.base.sample_location(s)),
                "source_distinct": n_src,
                "target_distinct": n_req,
                "pairing": [[len(cyclesA[i]), len(cyclesB[t[0]])]
                            for i, t in enumerate(pairing)],
            }
    return None


def recheck_certificate(problem: LiftProblem, certificate: dict) -> bool:
    """Independent re-derivation of a negative certificate."""
    if certificate["kind"] == "strip_divisibility":
        sA = monod.strips(problem.source).windings
        sB = monod.strips(problem.target).windings
        a = certificate["source_winding"]
        return a in sA and all(a % b != 0 for b in sB)
    if certificate["kind"] == "fiber_count":
        s = certificate["sample"]
        strict = 0.5 * problem.tol.branch_tol
        n_src = _distinct_count(problem.source.fibers[s], strict)
        return n_src == certificate["source_distinct"] and (
            n_src < certificate["target_distinct"])
    if certificate["kind"] == "csp_exhaustion":
        return problem.solution_count() == 0
    return False


def _base_diagnostics(problem: LiftProblem, tol: Tolerances) -> dict:
    return {
        "resolution": problem.base.n_samples,
        "tolerances": tol.as_dict(),
        "basepoint": problem.basepoint,
    }


def decide_lift(problem: LiftProblem, count_solutions: bool = True) -> Verdict:
    """Existence decision with fast-path certificates and full enumeration."""
    tol = problem.tol
    cert = _strip_obstruction(problem)
    if cert is not None:
        if not recheck_certificate(problem, cert):
            raise ExtendError("fast-path certificate failed its recheck")
        verdict = Verdict("no", certificate=cert,
                          diagnostics=_base_diagnostics(problem, tol))
        return verdict
    if count_solutions:
        lifts = problem.enumerate()
    else:
        lifts = problem.enumerate(max_count=1)
    if lifts:
        witness = lifts[0]
        report = validate_witness(problem, witness)
        if not report["valid"]:
            raise ExtendError(f"witness failed independent validation: {report}")
        diag = _base_diagnostics(problem, tol)
        diag["solution_count"] = len(lifts) if count_solutions else None
        diag["validator"] = report
        return Verdict("yes", witness=witness, diagnostics=diag)
    cert = {
        "kind": "csp_exhaustion",
        "basepoint": problem.basepoint,
        "source_degree": problem.source.degree,
        "target_degree": problem.target.degree,
        "loop_constraints": len(problem.loop_pairs),
        "merge_samples": [int(s) for s in problem.merge_samples],
    }
    return Verdict("no", certificate=cert,
                   diagnostics=_base_diagnostics(problem, tol))


def lift_problem(p: MonicPolynomial, smap, tol: Tolerances = DEFAULT_TOL,
                 require_admissible: bool = True) -> LiftProblem:
    if require_admissible:
        report = is_admissible(p, zero_tol=tol.admissible_zero_tol)
        if not report.admissible:
            raise InadmissibleError(
                f"polynomial is not admissible: {len(report.runs)} flat "
                f"discriminant run(s)")
    A = build_bundle(p, tol)
    B = build_bundle(pullback_polynomial(p, smap), tol)
    return LiftProblem(A, B, tol)


def cole_extendable(p: MonicPolynomial, smap, tol: Tolerances = DEFAULT_TOL) -> Verdict:
    """Does the induced endomorphism extend to all continuous functions on
    the root surface?  Decided by lift existence."""
    problem = lift_problem(p, smap, tol)
    return decide_lift(problem)


def enumerate_lifts(p: MonicPolynomial, smap, max_count: int | None = None,
                    tol: Tolerances = DEFAULT_TOL) -> list[LiftWitness]:
    problem = lift_problem(p, smap, tol)
    return problem.enumerate(max_count=max_count)


# -- polynomial-subalgebra membership ----------------------------------------------


@dataclass
class FitResult:
    accepted: bool
    coeffs: np.ndarray | None          # (S, n), NaN rows at skipped samples
    fitted_mask: np.ndarray | None
    refusal: dict | None = None


def ah_fit(bundle: RootBundle, values: np.ndarray,
           tol: Tolerances = DEFAULT_TOL) -> FitResult:
    """Fit f as a degree < n polynomial in the root coordinate.

    Solves the per-sample Vandermonde system at samples with pairwise
    distinct fibers, then accepts iff the recovered coefficient functions
    are discretely continuous (resolution-scaled jump bound) including
    across skipped branch runs.
    """
    base = bundle.base
    n = bundle.degree
    S = base.n_samples
    fit_mask = ~bundle.branch_flags
    fibers = bundle.fibers[fit_mask]
    V = fibers[:, :, None] ** np.arange(n)[None, None, :]
    try:
        qs = np.linalg.solve(V, values[fit_mask][:, :, None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise ExtendError(
            "singular Vandermonde away from branch flags; bundle is corrupt"
        ) from exc
    coeffs = np.full((S, n), np.nan, dtype=complex)
    coeffs[fit_mask] = qs

    if bundle.poly is not None:
        pv = bundle.poly.coeff_values
        edges = np.asarray(base.edges, dtype=np.intp)
        osc = float(np.max(np.abs(pv[edges[:, 1]] - pv[edges[:, 0]]))) if len(edges) else 0.0
    else:
        osc = float(np.max(np.abs(values))) * 1e-3
    bound = tol.fit_jump_factor * osc * n + 1e-8 * (1.0 + float(np.max(np.abs(values))))

    for eid, (a, b) in enumerate(base.edges):
        if not (fit_mask[a] and fit_mask[b]):
            continue
        jump = float(np.max(np.abs(coeffs[b] - coeffs[a])))
        if jump > bound:
            return FitResult(False, coeffs, fit_mask, refusal={
                "kind": "coefficient_jump",
                "edge": eid,
                "samples": [int(a), int(b)],
                "jump": jump,
                "bound": bound,
            })

    # continuity across skipped branch runs: flank-to-flank jumps
    skipped = np.flatnonzero(~fit_mask)
    seen: set[int] = set()
    for s in skipped:
        s = int(s)
        if s in seen:
            continue
        run = {s}
        stack = [s]
        while stack:
            cur = stack.pop()
            for eid, direction in base.incident(cur):
                _, nxt = base.edge_endpoint(eid, direction)
                if not fit_mask[nxt] and nxt not in run:
                    run.add(nxt)
                    stack.append(nxt)
        seen |= run
        flanks = sorted({base.edge_endpoint(eid, d)[1]
                         for r in run for eid, d in base.incident(r)
                         if fit_mask[base.edge_endpoint(eid, d)[1]]})
        for i in range(len(flanks)):
            for j in range(i + 1, len(flanks)):
                jump = float(np.max(np.abs(coeffs[flanks[j]] - coeffs[flanks[i]])))
                if jump > bound * (len(run) + 1):
                    return FitResult(False, coeffs, fit_mask, refusal={
                        "kind": "branch_flank_jump",
                        "run_samples": sorted(int(r) for r in run),
                        "flanks": [int(flanks[i]), int(flanks[j])],
                        "jump": jump,
                        "bound": bound * (len(run) + 1),
                    })
    return FitResult(True, coeffs, fit_mask)


@dataclass
class QuotientReport:
    verdict: str                       # finite | divergent | inconclusive
    sample: int
    branch_coordinate: float | None
    quotients: list[float]
    detail: str = ""


def _track_pair(fiber: np.ndarray, prev_pair: np.ndarray) -> np.ndarray:
    """Continue an ordered root pair to the nearest pair in a new fiber."""
    d0 = np.abs(fiber - prev_pair[0])
    d1 = np.abs(fiber - prev_pair[1])
    i0 = int(np.argmin(d0))
    i1 = int(np.argmin(d1))
    if i0 == i1:
        alt0 = np.argsort(d0)
        alt1 = np.argsort(d1)
        if d0[alt0[1]] + d1[i1] <= d0[i0] + d1[alt1[1]]:
            i0 = int(alt0[1])
        else:
            i1 = int(alt1[1])
    return np.array([fiber[i0], fiber[i1]])


def divided_quotient_test(problem: LiftProblem, witness: LiftWitness,
                          sample: int, tol: Tolerances = DEFAULT_TOL) -> QuotientReport:
    """Finiteness probe for the two-sheet divided quotient at a branch.

    Follows the coalescing sheet pair (and its image pair) on a dyadic
    sequence of points converging to the located branch coordinate, from
    both sides; divergent when the quotient magnitude grows monotonically
    past the divergence bound, finite when the tail is Cauchy.
    """
    base = problem.base
    if base.kind not in ("interval", "circle"):
        return QuotientReport("inconclusive", sample, None, [],
                              "quotient probing needs an interval or circle base")
    A, B = problem.source, problem.target
    if A.poly is None or B.poly is None:
        return QuotientReport("inconclusive", sample, None, [],
                              "no exact coefficient source available")
    clusters = [c for c in A.merge_clusters(sample) if len(c) > 1]
    if len(clusters) != 1 or len(clusters[0]) != 2:
        raise ExtendError(
            f"branch structure at sample {sample} is not two-sheeted")
    pair_slots = clusters[0]

    if base.kind == "interval":
        h = 1.0 / (base.n_samples - 1)
    else:
        h = 2.0 * math.pi / base.n_samples

    def wrap(y):
        if base.kind == "circle":
            return y % (2.0 * math.pi)
        return min(max(y, 0.0), 1.0)

    y0 = _locate_branch(problem, sample, h, wrap, tol)

    root_scale = 1.0 + float(np.max(np.abs(A.fibers[sample])))
    min_gap = 32.0 * np.finfo(float).eps * root_scale
    # below this, an image-pair difference is root-solver noise, not signal
    b_floor = 32.0 * np.finfo(float).eps * (
        1.0 + float(np.max(np.abs(B.fibers[sample]))))
    quotients_all: list[float] = []
    side_verdicts = []
    for side in (+1.0, -1.0):
        start = y0 + side * 2.0 * h
        if base.kind == "interval" and not (0.0 <= start <= 1.0):
            continue
        u = base.nearest_sample(base.coordinate_location(wrap(start)))
        slots = _transport_slots(A, sample, u, pair_slots)
        if slots is None:
            continue
        targets = witness.assignments[u][slots]
        if targets[0] == targets[1]:
            # both branches ride one target sheet: the quotient vanishes
            side_verdicts.append("finite")
            quotients_all.extend([0.0] * 8)
            continue
        a_pair = A.fibers[u][slots]
        b_pair = B.fibers[u][targets]
        qs: list[complex] = []
        d = 2.0 * h
        for _ in range(60):
            y = wrap(y0 + side * d)
            fibA = solve_fiber(A.poly.coeffs_at_coord(y), tol)
            fibB = solve_fiber(B.poly.coeffs_at_coord(y), tol)
            a_pair = _track_pair(fibA, a_pair)
            b_pair = _track_pair(fibB, b_pair)
            denom = a_pair[0] - a_pair[1]
            if abs(denom) < min_gap:
                break
            numer = b_pair[0] - b_pair[1]
            qs.append(numer / denom if abs(numer) >= b_floor else 0.0)
            d *= 0.5
        side_verdicts.append(_classify_quotients(qs, tol))
        quotients_all.extend(abs(q) for q in qs)
    if not side_verdicts:
        return QuotientReport("inconclusive", sample, y0, quotients_all,
                              "no side of the branch could be probed")
    if "divergent" in side_verdicts:
        verdict = "divergent"
    elif all(v == "finite" for v in side_verdicts):
        verdict = "finite"
    else:
        verdict = "inconclusive"
    return QuotientReport(verdict, sample, y0, quotients_all)


def _locate_branch(problem: LiftProblem, sample: int, h: float, wrap, tol) -> float:
    """Ternary search for the true coalescence coordinate near a flagged
    sample; cached per (problem, sample)."""
    cache = getattr(problem, "_branch_coords", None)
    if cache is None:
        cache = problem._branch_coords = {}
    if sample in cache:
        return cache[sample]
    A = problem.source
    base = problem.base
    c_star = base.location_coordinate(base.sample_location(sample))

    def gap_at(y):
        fib = solve_fiber(A.poly.coeffs_at_coord(wrap(y)), tol)
        m = np.inf
        for i in range(len(fib)):
            for j in range(i + 1, len(fib)):
                m = min(m, abs(fib[i] - fib[j]))
        return m

    lo, hi = c_star - 1.5 * h, c_star + 1.5 * h
    if base.kind == "interval":
        lo, hi = max(lo, 0.0), min(hi, 1.0)
    for _ in range(70):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if gap_at(m1) <= gap_at(m2):
            hi = m2
        else:
            lo = m1
    y0 = 0.5 * (lo + hi)
    cache[sample] = y0
    return y0


def _transport_slots(bundle: RootBundle, src: int, dst: int, slots):
    """Follow slots from sample src to sample dst along a sample path."""
    base = bundle.base
    if src == dst:
        return list(slots)
    prev = {src: None}
    queue = [src]
    while queue:
        cur = queue.pop(0)
        if cur == dst:
            break
        for eid, direction in base.incident(cur):
            _, nxt = base.edge_endpoint(eid, direction)
            if nxt not in prev:
                prev[nxt] = (cur, eid, direction)
                queue.append(nxt)
    if dst not in prev:
        return None
    steps = []
    cur = dst
    while prev[cur] is not None:
        par, eid, direction = prev[cur]
        steps.append((eid, direction))
        cur = par
    out = list(slots)
    for eid, direction in reversed(steps):
        perm = bundle.step_perm(eid, direction)
        out = [int(perm[i]) for i in out]
    return out


def _classify_quotients(qs, tol: Tolerances) -> str:
    if len(qs) < 6:
        return "inconclusive"
    mags = [abs(q) for q in qs]
    tail = mags[-5:]
    if mags[-1] > tol.quotient_divergence and all(
            tail[i] < tail[i + 1] for i in range(4)):
        return "divergent"
    diffs = [abs(qs[i + 1] - qs[i]) for i in range(len(qs) - 5, len(qs) - 1)]
    if all(d <= tol.quotient_cauchy * max(1.0, mags[-1]) for d in diffs):
        return "finite"
    return "inconclusive"


def ah_extendable(p: MonicPolynomial, smap, tol: Tolerances = DEFAULT_TOL,
                  max_lifts: int = 4096) -> Verdict:
    """Does the induced endomorphism extend to the polynomial subalgebra?

    Yes iff some lift both fits as a polynomial in the root coordinate and
    has finite divided quotients at every two-sheet branch point.
    """
    return decide_subalgebra(lift_problem(p, smap, tol), tol, max_lifts)


def decide_subalgebra(problem: LiftProblem, tol: Tolerances = DEFAULT_TOL,
                      max_lifts: int = 4096) -> Verdict:
    lifts = problem.enumerate(max_count=max_lifts + 1)
    truncated = len(lifts) > max_lifts
    lifts = lifts[:max_lifts]
    diag = _base_diagnostics(problem, tol)
    diag["lift_count"] = len(lifts)
    if not lifts:
        cole = decide_lift(problem)
        return Verdict("no", certificate={
            "kind": "no_lift",
            "lift_certificate": cole.certificate,
        }, diagnostics=diag)

    branch_samples = [int(s) for s in np.flatnonzero(problem.source.branch_flags)
                      if any(len(c) > 1 for c in problem.source.merge_clusters(int(s)))]
    refusals = []
    any_inconclusive = truncated
    for k, lift in enumerate(lifts):
        # the divided-quotient finiteness condition is necessary; probe it first
        reports = []
        failed = False
        inconclusive = False
        for s in branch_samples:
            clusters = [c for c in problem.source.merge_clusters(s) if len(c) > 1]
            if len(clusters) != 1 or len(clusters[0]) != 2:
                inconclusive = True
                reports.append({"sample": s, "verdict": "inconclusive",
                                "detail": "branch is not two-sheeted"})
                continue
            rep = divided_quotient_test(problem, lift, s, tol)
            reports.append({"sample": s, "verdict": rep.verdict,
                            "branch_coordinate": rep.branch_coordinate})
            if rep.verdict == "divergent":
                failed = True
                break
            if rep.verdict == "inconclusive":
                inconclusive = True
        if failed:
            refusals.append({"lift": k, "stage": "divided_quotient",
                             "reports": reports})
            continue
        fit = ah_fit(problem.source, lift.values, tol)
        if not fit.accepted:
            refusals.append({"lift": k, "stage": "fit", "refusal": fit.refusal})
            continue
        if inconclusive:
            any_inconclusive = True
            refusals.append({"lift": k, "stage": "divided_quotient",
                             "reports": reports})
            continue
        diag["accepted_lift"] = k
        diag["quotient_reports"] = reports
        return Verdict("yes", witness=lift, diagnostics=diag, fit=fit)
    answer = "inconclusive" if any_inconclusive else "no"
    return Verdict(answer, certificate={
        "kind": "all_lifts_refused",
        "refusals": refusals,
    }, diagnostics=diag)


# -- cross-checks -------------------------------------------------------------------


def ah_implies_cole_check(p: MonicPolynomial, smap,
                          tol: Tolerances = DEFAULT_TOL) -> dict:
    """Consistency report: a polynomial-subalgebra extension forces a
    full-surface extension, never the other way."""
    ah = ah_extendable(p, smap, tol)
    cole = cole_extendable(p, smap, tol)
    consistent = not (ah.answer == "yes" and cole.answer == "no")
    return {"ah": ah, "cole": cole, "consistent": consistent}


def root_implies_extendable_check(p: MonicPolynomial, smap,
                                  tol: Tolerances = DEFAULT_TOL) -> dict:
    """If the pulled-back polynomial has a continuous root, the extension
    to the polynomial subalgebra must exist."""
    from .closedness import has_root

    pt = pullback_polynomial(p, smap)
    root = has_root(pt, tol=tol, require_admissible=False)
    ah = ah_extendable(p, smap, tol)
    consistent = not (root.answer == "yes" and ah.answer != "yes")
    return {"has_root": root, "ah": ah, "consistent": consistent}
