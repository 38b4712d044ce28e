"""Discretized compact base spaces and sampled continuous self-maps.

A :class:`BaseSpace` is a finite 1-complex standing in for a compact
space: an interval, a circle, a subdivided multigraph, or a torus grid.
Samples carry coordinates, oriented edges carry the adjacency, and
``loop_basis`` generates the discrete fundamental group.  Self-maps are
stored per sample as a :class:`Location` (edge + parameter) so that
images need not land on sample points.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


class BaseSpaceError(ValueError):
    """Invalid construction parameters or continuity violations."""


@dataclass(frozen=True)
class Location:
    """A point of the base: parameter ``t`` in [0, 1] along an oriented edge."""

    edge: int
    t: float


@dataclass
class BaseSpace:
    kind: str                      # interval | circle | graph | torus2
    coords: np.ndarray             # (S,) float for interval/circle, (S,2) for torus2/graph
    edges: list[tuple[int, int]]   # oriented (tail, head) sample indices
    loop_basis: list[list[tuple[int, int]]] = field(default_factory=list)
    # each loop is a closed walk of (edge_id, direction) with direction +-1
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n_samples)]
        for eid, (a, b) in enumerate(self.edges):
            if a == b:
                raise BaseSpaceError(f"edge {eid} connects a sample to itself")
            self._adj[a].append((eid, +1))
            self._adj[b].append((eid, -1))
        for loop in self.loop_basis:
            if not loop:
                raise BaseSpaceError("empty loop in loop_basis")
            walk = self.walk_samples(loop)
            if walk[0] != walk[-1]:
                raise BaseSpaceError("loop_basis entry is not a closed walk")

    # -- structure ---------------------------------------------------------

    @property
    def n_samples(self) -> int:
        return len(self.coords)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def incident(self, sample: int) -> list[tuple[int, int]]:
        """Edges at ``sample`` as (edge_id, direction); +1 when it is the tail."""
        return self._adj[sample]

    def edge_endpoint(self, edge_id: int, direction: int) -> tuple[int, int]:
        a, b = self.edges[edge_id]
        return (a, b) if direction > 0 else (b, a)

    def walk_samples(self, walk: list[tuple[int, int]]) -> list[int]:
        """Sample sequence visited by a walk of (edge_id, direction) steps."""
        tail, head = self.edge_endpoint(*walk[0])
        out = [tail, head]
        for eid, direction in walk[1:]:
            a, b = self.edge_endpoint(eid, direction)
            if a != out[-1]:
                raise BaseSpaceError("walk is not edge-connected")
            out.append(b)
        return out

    def spanning_tree(self, root: int = 0) -> tuple[list[tuple[int, int, int]], list[int]]:
        """BFS spanning tree from ``root``.

        Returns ``(tree, order)`` where ``tree[k] = (sample, parent_edge,
        direction)`` gives, for each non-root sample in BFS order, the edge
        used to reach it (direction +1 means traversed tail->head), and
        ``order`` is the BFS visit order including the root.
        """
        seen = [False] * self.n_samples
        seen[root] = True
        order = [root]
        tree: list[tuple[int, int, int]] = []
        dq = deque([root])
        while dq:
            cur = dq.popleft()
            for eid, direction in self._adj[cur]:
                _, nxt = self.edge_endpoint(eid, direction)
                if not seen[nxt]:
                    seen[nxt] = True
                    tree.append((nxt, eid, direction))
                    order.append(nxt)
                    dq.append(nxt)
        if not all(seen):
            raise BaseSpaceError("base space is not connected")
        return tree, order

    # -- coordinates -------------------------------------------------------

    def sample_location(self, sample: int) -> Location:
        """Canonical location of a sample: parameter 0 on an outgoing edge."""
        for eid, direction in self._adj[sample]:
            if direction > 0:
                return Location(eid, 0.0)
        eid, _ = self._adj[sample][0]
        return Location(eid, 1.0)

    def location_coordinate(self, loc: Location):
        """Exact coordinate of a location (kind-specific scalar or pair).

        Endpoint parameters return the sample coordinate bit-exactly, so a
        snapped sample location evaluates like the sample itself.
        """
        a, b = self.edges[loc.edge]
        if loc.t == 0.0:
            s = a
        elif loc.t == 1.0:
            s = b
        else:
            s = None
        if self.kind == "interval":
            if s is not None:
                return float(self.coords[s])
            return float(self.coords[a] + loc.t * (self.coords[b] - self.coords[a]))
        if self.kind == "circle":
            if s is not None:
                return float(self.coords[s])
            ca, cb = float(self.coords[a]), float(self.coords[b])
            delta = (cb - ca) % TWO_PI
            return (ca + loc.t * delta) % TWO_PI
        if self.kind == "torus2":
            if s is not None:
                return (float(self.coords[s][0]), float(self.coords[s][1]))
            ca, cb = self.coords[a], self.coords[b]
            d0 = (cb[0] - ca[0]) % TWO_PI
            d1 = (cb[1] - ca[1]) % TWO_PI
            return ((ca[0] + loc.t * d0) % TWO_PI, (ca[1] + loc.t * d1) % TWO_PI)
        # graph: report (combinatorial edge id, global parameter) when known
        ca, cb = self.coords[a], self.coords[b]
        return (float(ca[0]), float(ca[1] + loc.t * (cb[1] - ca[1])))

    def coordinate_location(self, coord) -> Location:
        """Inverse of :meth:`location_coordinate` for coordinate-charted kinds."""
        if self.kind == "interval":
            x = min(max(float(coord), 0.0), 1.0)
            n = self.n_samples
            pos = x * (n - 1)
            e = min(int(pos), n - 2)
            return Location(e, pos - e)
        if self.kind == "circle":
            n = self.n_samples
            theta = float(coord) % TWO_PI
            pos = theta / TWO_PI * n
            e = min(int(pos), n - 1)
            return Location(e, pos - e)
        raise BaseSpaceError(f"no global chart for base kind {self.kind!r}")

    def nearest_sample(self, loc: Location) -> int:
        a, b = self.edges[loc.edge]
        return a if loc.t < 0.5 else b

    def edge_distance(self, loc_a: Location, loc_b: Location) -> float:
        """Distance between two locations measured in edge lengths."""
        if self.kind == "interval":
            n = self.n_samples
            return abs(self.location_coordinate(loc_a) - self.location_coordinate(loc_b)) * (n - 1)
        if self.kind == "circle":
            n = self.n_samples
            d = abs(self.location_coordinate(loc_a) - self.location_coordinate(loc_b)) % TWO_PI
            return min(d, TWO_PI - d) / TWO_PI * n
        if self.kind == "torus2":
            n, m = self.meta["shape"]
            (a0, a1), (b0, b1) = self.location_coordinate(loc_a), self.location_coordinate(loc_b)
            d0 = abs(a0 - b0) % TWO_PI
            d1 = abs(a1 - b1) % TWO_PI
            return min(d0, TWO_PI - d0) / TWO_PI * n + min(d1, TWO_PI - d1) / TWO_PI * m
        # graph: hop count between the nearest samples
        src, dst = self.nearest_sample(loc_a), self.nearest_sample(loc_b)
        if src == dst:
            return abs(loc_a.t - 0.5) + abs(loc_b.t - 0.5)
        dist = {src: 0}
        dq = deque([src])
        while dq:
            cur = dq.popleft()
            for eid, direction in self._adj[cur]:
                _, nxt = self.edge_endpoint(eid, direction)
                if nxt not in dist:
                    dist[nxt] = dist[cur] + 1
                    if nxt == dst:
                        return float(dist[nxt]) + 1.0
                    dq.append(nxt)
        return math.inf


@dataclass
class SelfMap:
    """A continuous self-map of a base, sampled as per-sample image locations."""

    base: BaseSpace
    images: list[Location]
    exprs: tuple | None = None     # parsed coordinate expressions, when given

    def image_coordinate(self, coord):
        """Exact image coordinate; falls back to sample-image interpolation."""
        if self.exprs is not None:
            from . import funcspec

            kind = self.base.kind
            if kind == "interval":
                val = funcspec.eval_scalar(self.exprs[0], {"x": coord})
                return _real_coordinate(val, "interval")
            if kind == "circle":
                val = funcspec.eval_scalar(self.exprs[0], {"theta": coord})
                return _real_coordinate(val, "circle")
            if kind == "torus2":
                env = {"theta1": coord[0], "theta2": coord[1]}
                v1 = funcspec.eval_scalar(self.exprs[0], env)
                v2 = funcspec.eval_scalar(self.exprs[1], env)
                return (_real_coordinate(v1, "circle"), _real_coordinate(v2, "circle"))
        loc = self.base.coordinate_location(coord)
        a, b = self.base.edges[loc.edge]
        ca = self.base.location_coordinate(self.images[a])
        cb = self.base.location_coordinate(self.images[b])
        return _interp_coordinate(self.base.kind, ca, cb, loc.t)

    def image_coords_array(self, coords: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`image_coordinate` over a coordinate array."""
        kind = self.base.kind
        if self.exprs is not None:
            from . import funcspec

            if kind == "interval":
                vals = np.asarray(funcspec._eval(self.exprs[0], {"x": coords}))
                return _real_coordinates_array(vals, "interval", coords.shape)
            if kind == "circle":
                vals = np.asarray(funcspec._eval(self.exprs[0], {"theta": coords}))
                return _real_coordinates_array(vals, "circle", coords.shape)
            if kind == "torus2":
                env = {"theta1": coords[..., 0], "theta2": coords[..., 1]}
                v1 = _real_coordinates_array(
                    np.asarray(funcspec._eval(self.exprs[0], env)), "circle",
                    coords[..., 0].shape)
                v2 = _real_coordinates_array(
                    np.asarray(funcspec._eval(self.exprs[1], env)), "circle",
                    coords[..., 1].shape)
                return np.stack([v1, v2], axis=-1)
        return np.array([self.image_coordinate(c) for c in coords])


def _real_coordinate(value, kind):
    value = complex(value)
    if abs(value.imag) > 1e-9:
        raise BaseSpaceError(f"self-map image {value} is not a real coordinate")
    x = value.real
    if kind == "interval":
        if x < -1e-9 or x > 1.0 + 1e-9:
            raise BaseSpaceError(f"self-map image {x} outside [0, 1]")
        return min(max(x, 0.0), 1.0)
    return x % TWO_PI


def _real_coordinates_array(values, kind, shape):
    values = np.broadcast_to(np.asarray(values, dtype=complex), shape)
    if np.any(np.abs(values.imag) > 1e-9):
        raise BaseSpaceError("self-map image is not a real coordinate")
    x = values.real.copy()
    if kind == "interval":
        if np.any(x < -1e-9) or np.any(x > 1.0 + 1e-9):
            raise BaseSpaceError("self-map image outside [0, 1]")
        return np.clip(x, 0.0, 1.0)
    return x % TWO_PI


def _interp_coordinate(kind, ca, cb, t):
    if kind == "interval":
        return ca + t * (cb - ca)
    if kind == "circle":
        d = (cb - ca + math.pi) % TWO_PI - math.pi   # shortest signed arc
        return (ca + t * d) % TWO_PI
    if kind == "torus2":
        return tuple(
            _interp_coordinate("circle", ca[i], cb[i], t) for i in range(2)
        )
    raise BaseSpaceError(f"cannot interpolate image coordinates on kind {kind!r}")


# -- constructors ------------------------------------------------------------


def make_interval(n: int) -> BaseSpace:
    """Path of ``n`` samples at coordinates i/(n-1) on [0, 1]."""
    if n < 2:
        raise BaseSpaceError("interval needs at least 2 samples")
    coords = np.linspace(0.0, 1.0, n)
    edges = [(i, i + 1) for i in range(n - 1)]
    return BaseSpace("interval", coords, edges)


def make_circle(n: int) -> BaseSpace:
    """Cycle of ``n`` samples at angles 2*pi*i/n."""
    if n < 3:
        raise BaseSpaceError("circle needs at least 3 samples")
    coords = TWO_PI * np.arange(n) / n
    edges = [(i, (i + 1) % n) for i in range(n)]
    loop = [(i, +1) for i in range(n)]
    return BaseSpace("circle", coords, edges, [loop])


def make_torus2(n: int, m: int) -> BaseSpace:
    """n x m wraparound grid with the two generator loops."""
    if n < 3 or m < 3:
        raise BaseSpaceError("torus grid needs at least 3 samples per direction")
    coords = np.empty((n * m, 2))
    for i in range(n):
        for j in range(m):
            coords[i * m + j] = (TWO_PI * i / n, TWO_PI * j / m)
    edges = []
    eid_right = {}
    eid_up = {}
    for i in range(n):
        for j in range(m):
            s = i * m + j
            eid_right[(i, j)] = len(edges)
            edges.append((s, ((i + 1) % n) * m + j))
            eid_up[(i, j)] = len(edges)
            edges.append((s, i * m + (j + 1) % m))
    loop1 = [(eid_right[(i, 0)], +1) for i in range(n)]
    loop2 = [(eid_up[(0, j)], +1) for j in range(m)]
    return BaseSpace("torus2", coords, edges, [loop1, loop2], meta={"shape": (n, m)})


def make_graph(n_vertices: int, cedges: list[tuple[int, int]], samples_per_edge: int) -> BaseSpace:
    """Subdivide a connected multigraph into a sampled 1-complex.

    Each combinatorial edge becomes ``samples_per_edge`` segments.  The loop
    basis comes from the co-tree edges of a spanning tree, so its size is
    ``len(cedges) - n_vertices + 1``.
    """
    if samples_per_edge < 2:
        raise BaseSpaceError("samples_per_edge must be at least 2")
    if n_vertices < 1:
        raise BaseSpaceError("graph needs at least one vertex")
    coords: list[tuple[float, float]] = [(-1.0, float(v)) for v in range(n_vertices)]
    edges: list[tuple[int, int]] = []
    for ceid, (u, v) in enumerate(cedges):
        if not (0 <= u < n_vertices and 0 <= v < n_vertices):
            raise BaseSpaceError(f"combinatorial edge {ceid} references unknown vertex")
        prev = u
        for k in range(1, samples_per_edge):
            coords.append((float(ceid), k / samples_per_edge))
            cur = len(coords) - 1
            edges.append((prev, cur))
            prev = cur
        edges.append((prev, v))
    base = BaseSpace("graph", np.array(coords), edges, meta={"cedges": list(cedges)})
    tree, _ = base.spanning_tree(0)   # also checks connectivity
    in_tree = {eid for _, eid, _ in tree}
    parent = {s: (eid, direction) for s, eid, direction in tree}
    loops = []
    for eid, (a, b) in enumerate(edges):
        if eid in in_tree:
            continue
        loops.append(_fundamental_cycle(base, parent, eid, a, b))
    base.loop_basis = loops
    base.__post_init__()
    return base


def _fundamental_cycle(base, parent, eid, a, b):
    """Closed walk: co-tree edge a->b, then the tree path b -> LCA -> a."""
    chain_a = []                                 # tree edges from a upward
    ancestors = {a: 0}
    s = a
    while s in parent:
        peid, pdir = parent[s]
        chain_a.append((peid, pdir))
        s = base.edge_endpoint(peid, pdir)[0]
        ancestors[s] = len(chain_a)
    chain_b = []                                 # tree edges from b up to the LCA
    s = b
    while s not in ancestors:
        peid, pdir = parent[s]
        chain_b.append((peid, pdir))
        s = base.edge_endpoint(peid, pdir)[0]
    walk = [(eid, +1)]
    for peid, pdir in chain_b:                   # descend from b to the LCA
        walk.append((peid, -pdir))
    for peid, pdir in reversed(chain_a[: ancestors[s]]):   # LCA back down to a
        walk.append((peid, pdir))
    return walk


# -- self-map sampling --------------------------------------------------------


def sample_selfmap(base: BaseSpace, spec, continuity_bound: float = 2.0) -> SelfMap:
    """Sample a self-map given as coordinate expression(s) or a location table.

    ``spec`` may be an expression string (interval/circle), a pair of
    expression strings (torus2), or an explicit list of Locations /
    coordinates.  Images of adjacent samples must stay within
    ``continuity_bound`` edge lengths of each other.
    """
    exprs = None
    if isinstance(spec, str) or (
        isinstance(spec, (tuple, list))
        and len(spec) == 2
        and all(isinstance(s, str) for s in spec)
        and base.kind == "torus2"
    ):
        from . import funcspec

        texts = [spec] if isinstance(spec, str) else list(spec)
        exprs = tuple(funcspec.parse(t) for t in texts)
        images = []
        for s in range(base.n_samples):
            coord = base.location_coordinate(base.sample_location(s))
            images.append(_image_location(base, exprs, coord))
    else:
        images = []
        for item in spec:
            if isinstance(item, Location):
                images.append(item)
            else:
                images.append(base.coordinate_location(item))
    if len(images) != base.n_samples:
        raise BaseSpaceError("self-map table length differs from sample count")
    smap = SelfMap(base, images, exprs)
    _check_discrete_continuity(smap, continuity_bound)
    return smap


def _image_location(base, exprs, coord):
    from . import funcspec

    kind = base.kind
    if kind == "interval":
        val = funcspec.eval_scalar(exprs[0], {"x": coord})
        return base.coordinate_location(_real_coordinate(val, "interval"))
    if kind == "circle":
        val = funcspec.eval_scalar(exprs[0], {"theta": coord})
        return base.coordinate_location(_real_coordinate(val, "circle"))
    if kind == "torus2":
        env = {"theta1": coord[0], "theta2": coord[1]}
        t1 = _real_coordinate(funcspec.eval_scalar(exprs[0], env), "circle")
        t2 = _real_coordinate(funcspec.eval_scalar(exprs[1], env), "circle")
        return _torus_location(base, t1, t2)
    raise BaseSpaceError(f"expression self-maps unsupported on kind {kind!r}")


def _torus_location(base, t1, t2, snap=1e-9):
    """Location of a torus point; it must lie on the sample grid lines."""
    n, m = base.meta["shape"]
    i = (t1 / TWO_PI * n) % n
    j = (t2 / TWO_PI * m) % m
    i_int = abs(i - round(i)) < snap * n
    j_int = abs(j - round(j)) < snap * m
    if not (i_int or j_int):
        raise BaseSpaceError(
            "torus self-map image does not lie on the sample grid lines")

    def edge_to(src, dst):
        for eid, direction in base.incident(src):
            if direction > 0 and base.edges[eid][1] == dst:
                return eid
        raise BaseSpaceError("torus grid edge lookup failed")

    if i_int and j_int:
        s = (int(round(i)) % n) * m + (int(round(j)) % m)
        return base.sample_location(s)
    if i_int:
        ii = int(round(i)) % n
        j0 = int(j) % m
        s = ii * m + j0
        return Location(edge_to(s, ii * m + (j0 + 1) % m), j - int(j))
    jj = int(round(j)) % m
    i0 = int(i) % n
    s = i0 * m + jj
    return Location(edge_to(s, ((i0 + 1) % n) * m + jj), i - int(i))


def _check_discrete_continuity(smap: SelfMap, bound: float):
    base = smap.base
    for eid, (a, b) in enumerate(base.edges):
        d = base.edge_distance(smap.images[a], smap.images[b])
        if d > bound + 1e-9:
            raise BaseSpaceError(
                f"self-map violates discrete continuity on edge {eid}: "
                f"image distance {d:.3f} edges exceeds bound {bound}"
            )


def identity_selfmap(base: BaseSpace) -> SelfMap:
    """The identity map, snapped exactly onto sample locations."""
    images = [base.sample_location(s) for s in range(base.n_samples)]
    return SelfMap(base, images, None)
