"""CVRP instance model and TSPLIB/CVRPLIB file handling.

Internally the depot is always node 0 and customers are numbered 1..n in
file order, regardless of the numbering used by the input file.  Distances
are stored as a dense symmetric matrix; EUC_2D coordinates are rounded to
the nearest integer on parse (the benchmark-library convention, required to
reproduce published objective values).

Published rounded-euclidean files can violate the triangle inequality by
one unit per hop, so :func:`parse_instance` validates with a slack of 1.
Synthetic instances built in code should be checked with
``validate_triangle(inst, slack=0)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np


class ParseError(ValueError):
    """Malformed instance file; message carries the offending line."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


@dataclass(frozen=True)
class Instance:
    """A CVRP instance: depot 0, customers 1..n, metric distances.

    ``dist`` is (n+1)x(n+1), ``demands`` has length n+1 with a zero entry
    for the depot.  Instances are immutable and safe to share.
    """

    name: str
    n: int
    dist: np.ndarray
    demands: np.ndarray
    capacity: int
    coords: np.ndarray | None = None
    depot_index: int = field(default=0, init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("instance needs at least one customer")
        dist = np.asarray(self.dist, dtype=float)
        demands = np.asarray(self.demands, dtype=np.int64)
        if dist.shape != (self.n + 1, self.n + 1):
            raise ValueError(f"distance matrix must be {self.n + 1}x{self.n + 1}")
        if demands.shape != (self.n + 1,):
            raise ValueError(f"demand vector must have length {self.n + 1}")
        if not np.allclose(dist, dist.T, atol=1e-9):
            raise ValueError("distance matrix must be symmetric")
        if np.any(np.diag(dist) != 0.0):
            raise ValueError("distance matrix must be zero on the diagonal")
        if np.any(dist < 0.0):
            raise ValueError("distances must be nonnegative")
        if demands[0] != 0:
            raise ValueError("depot demand must be zero")
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")
        if np.any(demands[1:] <= 0):
            raise ValueError("customer demands must be positive")
        if np.any(demands[1:] > self.capacity):
            raise ValueError("every customer demand must fit the vehicle capacity")
        dist.setflags(write=False)
        demands.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "demands", demands)
        if self.coords is not None:
            coords = np.asarray(self.coords, dtype=float)
            coords.setflags(write=False)
            object.__setattr__(self, "coords", coords)

    @property
    def customers(self):
        return range(1, self.n + 1)


@dataclass(frozen=True)
class Route:
    """An ordered, capacity-feasible visit sequence; the column unit."""

    customers: tuple
    cost: float
    demand: int

    @property
    def customer_set(self):
        return frozenset(self.customers)

    def key(self):
        """Dedup key: a symmetric metric makes a route and its reversal the
        same column, so the lexicographically smaller orientation is
        canonical."""
        rev = tuple(reversed(self.customers))
        return min(self.customers, rev)


def route_cost(inst, seq):
    """Cost of the closed tour depot -> seq -> depot."""
    seq = list(seq)
    if not seq:
        raise ValueError("route must visit at least one customer")
    for v in seq:
        if not 1 <= v <= inst.n:
            raise ValueError(f"customer index {v} out of range 1..{inst.n}")
    nodes = [0] + seq + [0]
    return float(sum(inst.dist[a, b] for a, b in zip(nodes, nodes[1:])))


def make_route(inst, seq):
    """Build a validated Route from a customer sequence."""
    seq = tuple(seq)
    if len(set(seq)) != len(seq):
        raise ValueError("route visits a customer twice")
    cost = route_cost(inst, seq)
    demand = int(inst.demands[list(seq)].sum())
    if demand > inst.capacity:
        raise ValueError(f"route demand {demand} exceeds capacity {inst.capacity}")
    return Route(customers=seq, cost=cost, demand=demand)


def scale_demands(inst):
    """Divide capacity and demands by their greatest common divisor.

    Returns (scaled capacity, scaled demand vector, divisor); the scaled
    data satisfies gcd(K, d_1..d_n) = 1.
    """
    g = int(np.gcd.reduce(np.concatenate(([inst.capacity], inst.demands[1:]))))
    scaled = inst.demands // g
    scaled.setflags(write=False)
    return inst.capacity // g, scaled, g


def max_route_customers(inst):
    """Largest number of customers any capacity-feasible route can contain,
    found by packing the smallest demands first."""
    order = np.sort(inst.demands[1:])
    total = 0
    m = 0
    for d in order:
        if total + d > inst.capacity:
            break
        total += d
        m += 1
    return m


def validate_triangle(inst, slack=0.0):
    """Check t(u,w) <= t(u,v) + t(v,w) + slack for all triples.

    Parsed rounded-euclidean instances are checked with slack 1 (rounding
    can break the inequality by one unit per hop); synthetic metric data
    should pass with slack 0.  Raises ValueError listing the worst triple.
    """
    d = inst.dist
    via = np.min(d[:, :, None] + d[None, :, :], axis=1)
    excess = d - via
    worst = float(excess.max())
    if worst > slack + 1e-9:
        u, w = np.unravel_index(np.argmax(excess), excess.shape)
        raise ValueError(
            f"triangle inequality violated by {worst:g} at pair ({u},{w})"
        )


def _nint(x):
    return math.floor(x + 0.5)


_HEADER_KEYS = {
    "NAME",
    "TYPE",
    "COMMENT",
    "DIMENSION",
    "CAPACITY",
    "EDGE_WEIGHT_TYPE",
    "EDGE_WEIGHT_FORMAT",
    "DISPLAY_DATA_TYPE",
    "NODE_COORD_TYPE",
}

_SECTION_KEYS = {
    "NODE_COORD_SECTION",
    "DEMAND_SECTION",
    "DEPOT_SECTION",
    "EDGE_WEIGHT_SECTION",
    "DISPLAY_DATA_SECTION",
}


def parse_instance(text):
    """Parse TSPLIB-style CVRP file contents into an :class:`Instance`.

    Supports EDGE_WEIGHT_TYPE EUC_2D (with NODE_COORD_SECTION) and EXPLICIT
    (FULL_MATRIX, LOWER_ROW or UPPER_ROW).  The depot is taken from
    DEPOT_SECTION when present, else it is the unique zero-demand node, and
    is remapped to internal index 0.
    """
    lines = text.splitlines()
    headers = {}
    sections = {}
    i = 0
    while i < len(lines):
        raw = lines[i]
        line = raw.strip()
        i += 1
        if not line:
            continue
        if line == "EOF":
            break
        key = line.split(":")[0].strip().split()[0] if line else ""
        if key in _SECTION_KEYS or line in _SECTION_KEYS:
            name = key if key in _SECTION_KEYS else line
            start = i
            body = []
            while i < len(lines):
                nxt = lines[i].strip()
                nxt_key = nxt.split(":")[0].strip().split()[0] if nxt else ""
                if nxt == "EOF" or nxt_key in _SECTION_KEYS or (
                    ":" in nxt and nxt_key in _HEADER_KEYS
                ):
                    break
                body.append((i + 1, nxt))
                i += 1
            sections[name] = (start, body)
        elif ":" in line:
            k, _, v = line.partition(":")
            headers[k.strip()] = (i, v.strip())
        else:
            raise ParseError(f"unrecognized line {line!r}", i)

    def header(key, required=True):
        if key not in headers:
            if required:
                raise ParseError(f"missing {key} header")
            return None
        return headers[key][1]

    dim_s = header("DIMENSION")
    try:
        dim = int(dim_s)
    except ValueError:
        raise ParseError(f"DIMENSION is not an integer: {dim_s!r}", headers["DIMENSION"][0])
    if dim < 2:
        raise ParseError(f"DIMENSION must be at least 2, got {dim}")
    cap_s = header("CAPACITY")
    try:
        capacity = int(cap_s)
    except ValueError:
        raise ParseError(f"CAPACITY is not an integer: {cap_s!r}", headers["CAPACITY"][0])
    if capacity <= 0:
        raise ParseError(f"CAPACITY must be positive, got {capacity}")
    ewt = header("EDGE_WEIGHT_TYPE")
    name = header("NAME", required=False) or "unnamed"

    # demands
    if "DEMAND_SECTION" not in sections:
        raise ParseError("missing DEMAND_SECTION")
    demand_by_node = {}
    for line_no, line in sections["DEMAND_SECTION"][1]:
        parts = line.split()
        if len(parts) < 2:
            raise ParseError(f"demand entry needs 'node demand': {line!r}", line_no)
        node = int(parts[0])
        try:
            dval = int(parts[1])
        except ValueError:
            raise ParseError(f"demand must be an integer: {parts[1]!r}", line_no)
        if float(parts[1]) != dval:
            raise ParseError(f"fractional demand not supported: {parts[1]!r}", line_no)
        demand_by_node[node] = dval
    if set(demand_by_node) != set(range(1, dim + 1)):
        raise ParseError("DEMAND_SECTION must cover nodes 1..DIMENSION exactly")

    # depot
    depot_node = None
    if "DEPOT_SECTION" in sections:
        for line_no, line in sections["DEPOT_SECTION"][1]:
            for tok in line.split():
                v = int(tok)
                if v == -1:
                    break
                if depot_node is not None and v != depot_node:
                    raise ParseError("multiple depots are not supported", line_no)
                depot_node = v
    if depot_node is None:
        zeros = [v for v, d in demand_by_node.items() if d == 0]
        if len(zeros) != 1:
            raise ParseError("cannot identify depot: need DEPOT_SECTION or a unique zero-demand node")
        depot_node = zeros[0]
    if demand_by_node[depot_node] != 0:
        raise ParseError(f"depot node {depot_node} has nonzero demand")

    # distances
    coords = None
    if ewt == "EUC_2D":
        if "NODE_COORD_SECTION" not in sections:
            raise ParseError("EUC_2D instance needs NODE_COORD_SECTION")
        coord_by_node = {}
        for line_no, line in sections["NODE_COORD_SECTION"][1]:
            parts = line.split()
            if len(parts) < 3:
                raise ParseError(f"coordinate entry needs 'node x y': {line!r}", line_no)
            coord_by_node[int(parts[0])] = (float(parts[1]), float(parts[2]))
        if set(coord_by_node) != set(range(1, dim + 1)):
            raise ParseError("NODE_COORD_SECTION must cover nodes 1..DIMENSION exactly")
        full = np.zeros((dim, dim))
        pts = np.array([coord_by_node[v] for v in range(1, dim + 1)])
        for a in range(dim):
            for b in range(a + 1, dim):
                d = _nint(math.hypot(pts[a, 0] - pts[b, 0], pts[a, 1] - pts[b, 1]))
                full[a, b] = full[b, a] = d
        coords_full = pts
    elif ewt == "EXPLICIT":
        fmt = header("EDGE_WEIGHT_FORMAT")
        if "EDGE_WEIGHT_SECTION" not in sections:
            raise ParseError("EXPLICIT instance needs EDGE_WEIGHT_SECTION")
        start, body = sections["EDGE_WEIGHT_SECTION"]
        tokens = []
        for line_no, line in body:
            for tok in line.split():
                try:
                    tokens.append(float(tok))
                except ValueError:
                    raise ParseError(f"bad weight token {tok!r}", line_no)
        full = np.zeros((dim, dim))
        if fmt == "FULL_MATRIX":
            need = dim * dim
            if len(tokens) != need:
                raise ParseError(f"FULL_MATRIX needs {need} weights, got {len(tokens)}", start)
            full = np.array(tokens).reshape(dim, dim)
            if not np.allclose(full, full.T, atol=1e-9):
                raise ParseError("explicit matrix is not symmetric", start)
        elif fmt in ("LOWER_ROW", "UPPER_ROW"):
            need = dim * (dim - 1) // 2
            if len(tokens) != need:
                raise ParseError(f"{fmt} needs {need} weights, got {len(tokens)}", start)
            it = iter(tokens)
            if fmt == "LOWER_ROW":
                pairs = ((a, b) for a in range(1, dim) for b in range(a))
            else:
                pairs = ((a, b) for a in range(dim - 1) for b in range(a + 1, dim))
            for a, b in pairs:
                w = next(it)
                full[a, b] = full[b, a] = w
        else:
            raise ParseError(f"unsupported EDGE_WEIGHT_FORMAT {fmt!r}")
        if "DISPLAY_DATA_SECTION" in sections or "NODE_COORD_SECTION" in sections:
            sec = sections.get("DISPLAY_DATA_SECTION") or sections["NODE_COORD_SECTION"]
            coord_by_node = {}
            for line_no, line in sec[1]:
                parts = line.split()
                if len(parts) >= 3:
                    coord_by_node[int(parts[0])] = (float(parts[1]), float(parts[2]))
            if set(coord_by_node) == set(range(1, dim + 1)):
                coords_full = np.array([coord_by_node[v] for v in range(1, dim + 1)])
            else:
                coords_full = None
        else:
            coords_full = None
    else:
        raise ParseError(f"unsupported EDGE_WEIGHT_TYPE {ewt!r}")

    # remap: depot -> 0, customers keep file order
    order = [depot_node] + [v for v in range(1, dim + 1) if v != depot_node]
    idx = [v - 1 for v in order]
    dist = full[np.ix_(idx, idx)]
    demands = np.array([demand_by_node[v] for v in order], dtype=np.int64)
    if coords_full is not None:
        coords = coords_full[idx]

    inst = Instance(name=name, n=dim - 1, dist=dist, demands=demands,
                    capacity=capacity, coords=coords)
    validate_triangle(inst, slack=1.0)
    return inst


def serialize_instance(inst):
    """Write an Instance back to TSPLIB text (inverse of parse on fields)."""
    out = [f"NAME : {inst.name}", "TYPE : CVRP", f"DIMENSION : {inst.n + 1}"]
    if inst.coords is not None:
        out.append("EDGE_WEIGHT_TYPE : EUC_2D")
    else:
        out.append("EDGE_WEIGHT_TYPE : EXPLICIT")
        out.append("EDGE_WEIGHT_FORMAT : FULL_MATRIX")
    out.append(f"CAPACITY : {inst.capacity}")
    if inst.coords is not None:
        out.append("NODE_COORD_SECTION")
        for v in range(inst.n + 1):
            x, y = inst.coords[v]
            out.append(f" {v + 1} {x:g} {y:g}")
    else:
        out.append("EDGE_WEIGHT_SECTION")
        for v in range(inst.n + 1):
            out.append(" " + " ".join(f"{d:g}" for d in inst.dist[v]))
    out.append("DEMAND_SECTION")
    for v in range(inst.n + 1):
        out.append(f" {v + 1} {int(inst.demands[v])}")
    out.append("DEPOT_SECTION")
    out.append(" 1")
    out.append(" -1")
    out.append("EOF")
    return "\n".join(out) + "\n"
