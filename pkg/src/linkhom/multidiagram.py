"""Combinatorial Heegaard multi-diagrams and positive-domain search.

A multi-diagram carries several blue curve systems at once on the doubled
surface.  Every system is pushed off the branch points (at system-indexed
offsets), parallel curves of consecutive systems are perturbed with a
finger to meet twice, and curves of different smoothings meet near the
branch points they share.

Curves are laid out as closed rational polylines; the planar arrangement,
rotations and faces are computed from coordinates, and the doubling reuses
the branched-diagram machinery (branch cuts dissolve with a sheet swap).

The bundled fixture is the multi-diagram of the full cube face of the
positive Hopf diagram - the two-circle, two-arc configuration - used to
count positive Whitney rectangles between its four curve systems.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

from .branched import BranchedDiagram, Domain, _Graph, _solve_rational


def _seg_intersection(p1, p2, q1, q2):
    """Proper intersection of two open segments, or None (exact)."""
    (x1, y1), (x2, y2) = p1, p2
    (x3, y3), (x4, y4) = q1, q2
    d = (x2 - x1) * (y4 - y3) - (y2 - y1) * (x4 - x3)
    if d == 0:
        return None
    t = ((x3 - x1) * (y4 - y3) - (y3 - y1) * (x4 - x3)) / d
    u = ((x3 - x1) * (y2 - y1) - (y3 - y1) * (x2 - x1)) / d
    if 0 < t < 1 and 0 < u < 1:
        return (x1 + t * (x2 - x1), y1 + t * (y2 - y1))
    return None


def _on_segment(p, a, b):
    """p strictly inside segment ab (exact)."""
    if p == a or p == b:
        return False
    cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    if cross != 0:
        return False
    dot = (p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1])
    if dot <= 0:
        return False
    sq = (b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2
    return dot < sq


class PLArrangement:
    """A planar arrangement of rational polylines.

    Closed curves are given by their vertex cycle; open paths (cuts, link
    arcs) by endpoint-to-endpoint vertex chains.  Intersections must be
    transverse segment crossings or endpoints lying in the interior of
    another curve's segment (T junctions at branch points).
    """

    def __init__(self):
        self.paths = {}  # cid -> (points, closed)
        self.cuts = set()

    def add(self, cid, points, closed=True, is_cut=False):
        self.paths[cid] = ([(Fraction(x), Fraction(y)) for x, y in points], closed)
        if is_cut:
            self.cuts.add(cid)

    def build(self):
        segs = []
        for cid, (pts, closed) in self.paths.items():
            n = len(pts)
            rng = range(n) if closed else range(n - 1)
            for k in rng:
                segs.append((cid, k, pts[k], pts[(k + 1) % n]))
        points = set()
        for cid, (pts, closed) in self.paths.items():
            points.update(pts)
        events = {}
        for i in range(len(segs)):
            c1, k1, p1, p2 = segs[i]
            for j in range(i + 1, len(segs)):
                c2, k2, q1, q2 = segs[j]
                if c1 == c2:
                    continue
                pt = _seg_intersection(p1, p2, q1, q2)
                if pt is not None:
                    points.add(pt)
                    events.setdefault((c1, k1), []).append(pt)
                    events.setdefault((c2, k2), []).append(pt)
        # T junctions: existing endpoints on segment interiors
        for cid, k, a, b in segs:
            for p in points:
                if _on_segment(p, a, b) and p not in events.get((cid, k), ()):
                    events.setdefault((cid, k), []).append(p)

        def param(p, a, b):
            if b[0] != a[0]:
                return (p[0] - a[0]) / (b[0] - a[0])
            return (p[1] - a[1]) / (b[1] - a[1])

        g = _Graph()
        for p in points:
            g.add_vertex(p)
        chains = {}
        cut_edges = set()
        for cid, (pts, closed) in self.paths.items():
            n = len(pts)
            rng = range(n) if closed else range(n - 1)
            chain = []
            for k in rng:
                a, b = pts[k], pts[(k + 1) % n]
                mids = sorted(set(events.get((cid, k), ())), key=lambda p: param(p, a, b))
                run = [a] + mids + [b]
                for s in range(len(run) - 1):
                    e = g.add_edge(run[s], run[s + 1], ("pl", cid))
                    chain.append((e, run[s], run[s + 1]))
                    if cid in self.cuts:
                        cut_edges.add(e)
            chains[cid] = chain
        incident = {}
        for e, (v0, v1, _own) in g.edges.items():
            incident.setdefault(v0, []).append((e, 0))
            incident.setdefault(v1, []).append((e, 1))
        for v, ends in incident.items():
            def angle(end):
                e, w = end
                v0, v1, _ = g.edges[e]
                other = v1 if w == 1 else v0
                if other == v:
                    other = v0 if w == 1 else v1
                return math.atan2(float(other[1] - v[1]), float(other[0] - v[0]))

            ordered = sorted(ends, key=angle)
            g.set_rotation(v, list(reversed(ordered)))
        return g, chains, cut_edges


class MultiDiagram(BranchedDiagram):
    """A doubled multi-diagram from a PL arrangement.

    ``systems`` maps curve id -> system tag; A-curves ("A" system) live on
    both sheets, other curves on the sheet pattern determined by their cut
    crossings.
    """

    def __init__(self, pl, systems, curve_filter=None):
        g, chains, cut_edges = pl.build()
        cutv = set()
        for e in cut_edges:
            v0, v1, _ = g.edges[e]
            cutv.add(v0)
            cutv.add(v1)
        curve_edges = {}
        for cid, chain in chains.items():
            if cid in pl.cuts:
                continue
            if curve_filter is not None and not curve_filter(cid):
                continue
            if systems[cid] == "A":
                lifts = []
                for (e, a, b) in chain:
                    lifts.append((e, 0))
                    lifts.append((e, 1))
                curve_edges[cid] = lifts
            else:
                sheet = 0
                lifts = []
                for (e, a, b) in chain:
                    lifts.append((e, sheet))
                    if b in cutv and _is_cut_crossing(g, b, cut_edges):
                        sheet ^= 1
                assert sheet == 0, f"{cid} crosses cuts an odd number of times"
                curve_edges[cid] = lifts
        self.systems = systems
        super().__init__(
            None,
            "multi",
            (g, {k: set(v) for k, v in curve_edges.items()}, cut_edges),
        )

    def genus(self):
        branch = sum(
            1
            for v, ends in self.graph.rot.items()
            if sum(1 for (e, w) in ends if e in self.cut_edges) == 1
        )
        return (branch - 2) // 2

    def outer_region_pair(self):
        """Region lifts of the unbounded face (the basepoint pair)."""
        def extent(orbit):
            xs = []
            for (e, w) in orbit:
                v0, v1, _ = self.graph.edges[e]
                xs.extend([v0[0], v1[0]])
            return max(xs) - min(xs)

        fi = max(range(len(self.down_faces)), key=lambda k: extent(self.down_faces[k]))
        return (self.region_of_cell(fi, 0), self.region_of_cell(fi, 1))

    def intersections(self, sys1, sys2):
        """Crossing vertex lifts between two systems."""
        out = []
        for key, quads in self.crossings.items():
            owners = set()
            for cid, path in self.curves.items():
                for item in path:
                    e, s = item[0], item[1]
                    for w in (0, 1):
                        v = self.graph.edges[e][w]
                        if self._vertex_lift_key(v, e, w, s) == key:
                            owners.add(self.systems[cid])
            if owners == {sys1, sys2}:
                out.append(key)
        return out


def _is_cut_crossing(g, v, cut_edges):
    """True when v is a transverse crossing with a cut (2 cut ends)."""
    n = sum(1 for (e, w) in g.rot[v] if e in cut_edges)
    return n == 2


class DomainSearcher:
    """Reusable bounded positive-domain search on a multi-diagram.

    The corner conditions' coefficient matrix does not depend on the
    corner specification, so it is reduced once with symbolic right-hand
    sides (linear in the per-vertex corner contributions).
    """

    def __init__(self, md):
        self.md = md
        rows = []
        nvars = len(md.regions)
        g = md.graph
        for cid, path in md.curves.items():
            sysid = md.systems[cid]
            jumps = []
            verts = []
            for item in path:
                e, s = item[0], item[1]
                direction = 1 if len(item) == 2 else -1
                fL = md.side_face[(e, 1)]
                fR = md.side_face[(e, 0)]
                L = md.region_of_cell(fL, s)
                R = md.region_of_cell(fR, s)
                if direction == -1:
                    L, R = R, L
                jumps.append((L, R))
                w_end = 1 if direction == 1 else 0
                v = g.edges[e][w_end]
                verts.append(md._vertex_lift_key(v, e, w_end, s))
            m = len(path)
            for k in range(m):
                v = verts[k]
                L2, R2 = jumps[(k + 1) % m]
                L1, R1 = jumps[k]
                row = {}
                for reg, coef in ((L2, 1), (R2, -1), (L1, -1), (R1, 1)):
                    row[reg] = row.get(reg, 0) + coef
                row = {r: Fraction(c) for r, c in row.items() if c}
                rhs = {(v, sysid): Fraction(1)}
                rows.append((row, rhs))
        rw1, rw2 = md.outer_region_pair()
        rows.append(({rw1: Fraction(1)}, {}))
        rows.append(({rw2: Fraction(1)}, {}))
        pivots = {}
        null_rhs = []
        for row, rhs in rows:
            row = dict(row)
            rhs = dict(rhs)
            placed = False
            while row:
                p = min(row)
                if p in pivots:
                    prow, prhs = pivots[p]
                    coef = row[p] / prow[p]
                    for k2, v2 in prow.items():
                        row[k2] = row.get(k2, Fraction(0)) - coef * v2
                        if row[k2] == 0:
                            del row[k2]
                    for k2, v2 in prhs.items():
                        rhs[k2] = rhs.get(k2, Fraction(0)) - coef * v2
                        if rhs[k2] == 0:
                            del rhs[k2]
                else:
                    pivots[p] = (row, rhs)
                    placed = True
                    break
            if not placed:
                null_rhs.append(rhs)
        self.nvars = nvars
        self.pivots = pivots
        self.null_rhs = null_rhs
        self.free = [r for r in range(nvars) if r not in pivots]

    def _corner_value(self, rhs, corners):
        out = Fraction(0)
        for (v, sysid), coef in rhs.items():
            c = corners.get((v, sysid), 0)
            if c:
                out += coef * c
        return out

    def search(self, corner_spec, bound=2, sign=1):
        """corner_spec: vertex key -> (earlier system, later system)."""
        corners = {}
        for v, (a, b) in corner_spec.items():
            corners[(v, b)] = sign
            corners[(v, a)] = -sign
        for rhs in self.null_rhs:
            if self._corner_value(rhs, corners) != 0:
                return []
        found = []
        vals = {}
        free = self.free
        pivots = self.pivots

        def backsub():
            out = [None] * self.nvars
            for r in free:
                out[r] = Fraction(vals[r])
            for p in sorted(pivots, reverse=True):
                prow, prhs = pivots[p]
                acc = self._corner_value(prhs, corners)
                for k2, v2 in prow.items():
                    if k2 != p:
                        acc -= v2 * out[k2]
                out[p] = acc / prow[p]
            return out

        def rec(i):
            if i == len(free):
                vec = backsub()
                if all(v.denominator == 1 and 0 <= v <= bound for v in vec):
                    dom = [int(v) for v in vec]
                    if dom not in found:
                        found.append(dom)
                return
            for val in range(bound + 1):
                vals[free[i]] = val
                rec(i + 1)

        rec(0)
        return [Domain(d) for d in found]


def positive_domain_search(md, corner_spec, bound=2, sign=1):
    """All nonnegative domains with coefficients <= bound, zero
    multiplicity at both outer-face lifts, and the prescribed corners.

    corner_spec maps a crossing vertex key to the pair of system tags
    (earlier, later) whose polygon corner sits there.
    """
    searcher = getattr(md, "_searcher", None)
    if searcher is None:
        searcher = DomainSearcher(md)
        md._searcher = searcher
    return searcher.search(corner_spec, bound, sign)


def _stadium(P, Q, n_dir, t, u, bump=None):
    """Hexagonal stadium around the chord P->Q.

    n_dir is the (unscaled) normal direction; t the side offset factor and
    u the end extension factor along the chord direction.  ``bump``
    optionally inserts a finger (list of points) into the +n side.
    """
    P = (Fraction(P[0]), Fraction(P[1]))
    Q = (Fraction(Q[0]), Fraction(Q[1]))
    n = (Fraction(n_dir[0]), Fraction(n_dir[1]))
    d = (Q[0] - P[0], Q[1] - P[1])
    # unit-ish chord direction with entries +-1
    dd = (1 if d[0] > 0 else (-1 if d[0] < 0 else 0),
          1 if d[1] > 0 else (-1 if d[1] < 0 else 0))
    t = Fraction(t)
    u = Fraction(u)
    A = (P[0] + t * n[0], P[1] + t * n[1])
    B = (Q[0] + t * n[0], Q[1] + t * n[1])
    C = (Q[0] + u * dd[0], Q[1] + u * dd[1])
    D = (Q[0] - t * n[0], Q[1] - t * n[1])
    E = (P[0] - t * n[0], P[1] - t * n[1])
    F = (P[0] - u * dd[0], P[1] - u * dd[1])
    side = [A, B]
    if bump:
        side = [A] + [(Fraction(x), Fraction(y)) for x, y in bump] + [B]
    return side + [C, D, E, F]


def config1_fixture():
    """The bundled Configuration-1 multi-diagram.

    Built from the positive Hopf diagram's full cube face along the path
    (0,0) -> (1,0) -> (1,1): four curve systems A, 0, 1, 2 on the genus-3
    doubled surface, with all blue systems pushed off the branch points.
    """
    pl = PLArrangement()
    systems = {}

    def b(ci, p):
        cx = 24 * ci
        return {0: (cx, -4), 1: (cx + 4, 0), 2: (cx, 4), 3: (cx - 4, 0)}[p]

    # branch cuts (fixed, B-smoothing pattern)
    for ci in range(2):
        cx = 24 * ci
        pl.add(("cut", ci, "A"), [b(ci, 1), (cx + Fraction(16, 5), Fraction(16, 5)), b(ci, 2)],
               closed=False, is_cut=True)
        pl.add(("cut", ci, "B"), [b(ci, 3), (cx - Fraction(16, 5), -Fraction(16, 5)), b(ci, 0)],
               closed=False, is_cut=True)

    # link arcs (the A system); PD X(1,3,2,4) X(3,1,4,2)
    arcs = {
        1: [b(0, 0), (0, -11), (33, -11), (33, 0), b(1, 1)],
        2: [b(0, 2), (0, 7), (14, 7), (14, Fraction(3, 2)), (20 - Fraction(59, 10), 0), b(1, 3)],
        3: [b(0, 1), (9, 0), (15, -7), (24, -7), b(1, 0)],
        4: [b(0, 3), (-9, 0), (-9, 10), (24, 10), b(1, 2)],
    }
    for a, pts in arcs.items():
        pl.add(("A", a), pts, closed=False)
        systems[("A", a)] = "A"

    # blue systems: path bits per crossing: c0 (0,1,1), c1 (0,0,1)
    bits = {(0, 0): 0, (0, 1): 1, (0, 2): 1, (1, 0): 0, (1, 1): 0, (1, 2): 1}
    t_of = {0: Fraction(1, 2), 1: Fraction(3, 4), 2: Fraction(1)}
    u_of = {0: Fraction(7, 10), 1: Fraction(11, 5), 2: Fraction(13, 5)}
    # fingers: outer system pokes into its parallel partner's +n side
    for ci in range(2):
        cx = 24 * ci
        for s in range(3):
            bit = bits[(ci, s)]
            t, u = t_of[s], u_of[s]
            if bit == 0:
                chords = [((b(ci, 1), b(ci, 2)), (1, 1)), ((b(ci, 3), b(ci, 0)), (1, 1))]
            else:
                chords = [((b(ci, 0), b(ci, 1)), (1, -1)), ((b(ci, 2), b(ci, 3)), (1, -1))]
            for idx, ((P, Q), n) in enumerate(chords):
                bump = None
                if ci == 1 and s == 1 and bits[(ci, 0)] == bits[(ci, 1)]:
                    # finger through system 0's parallel stadium
                    M = ((P[0] + Q[0]) / 2 + t * n[0], (P[1] + Q[1]) / 2 + t * n[1])
                    dd = (Q[0] - P[0], Q[1] - P[1])
                    dn = (1 if dd[0] > 0 else -1, 1 if dd[1] > 0 else (-1 if dd[1] < 0 else 1))
                    tip_t = t_of[0] - Fraction(1, 4)
                    Tip = ((P[0] + Q[0]) / 2 + tip_t * n[0], (P[1] + Q[1]) / 2 + tip_t * n[1])
                    h = Fraction(9, 20)
                    bump = [
                        (M[0] - h * dn[0], M[1] - h * dn[1]),
                        Tip,
                        (M[0] + h * dn[0], M[1] + h * dn[1]),
                    ]
                if ci == 0 and s == 2 and bits[(ci, 1)] == bits[(ci, 2)]:
                    M = ((P[0] + Q[0]) / 2 + t * n[0], (P[1] + Q[1]) / 2 + t * n[1])
                    dd = (Q[0] - P[0], Q[1] - P[1])
                    dn = (1 if dd[0] > 0 else -1, 1 if dd[1] > 0 else (-1 if dd[1] < 0 else 1))
                    tip_t = t_of[1] - Fraction(1, 4)
                    Tip = ((P[0] + Q[0]) / 2 + tip_t * n[0], (P[1] + Q[1]) / 2 + tip_t * n[1])
                    h = Fraction(9, 20)
                    bump = [
                        (M[0] - h * dn[0], M[1] - h * dn[1]),
                        Tip,
                        (M[0] + h * dn[0], M[1] + h * dn[1]),
                    ]
                cid = ("B", ci, s, idx)
                pl.add(cid, _stadium(P, Q, n, t, u, bump))
                systems[cid] = s
    return pl, systems


def config1_multidiagram(curve_filter=None):
    pl, systems = config1_fixture()
    return MultiDiagram(pl, systems, curve_filter)


def _matchings(md):
    """Perfect matchings of curve pairs at their intersection points."""
    curves = sorted(md.curves, key=str)
    points = {}
    for key in md.crossings:
        owners = set()
        for cid, path in md.curves.items():
            for item in path:
                e, s = item[0], item[1]
                for w in (0, 1):
                    v = md.graph.edges[e][w]
                    if md._vertex_lift_key(v, e, w, s) == key:
                        owners.add(cid)
        if len(owners) == 2:
            points.setdefault(frozenset(owners), []).append(key)
    out = []

    def rec(remaining, chosen):
        if not remaining:
            out.append(frozenset(chosen))
            return
        c = remaining[0]
        for pair, pts in points.items():
            if c in pair:
                other = next(x for x in pair if x != c)
                if other == c or other not in remaining:
                    continue
                rest = [x for x in remaining if x not in (c, other)]
                for p in pts:
                    rec(rest, chosen + [p])

    rec(curves, [])
    return [set(m) for m in {frozenset(m) for m in out}]


def _alpha_predicate(md):
    """Treat the lexicographically first system of the diagram as alpha."""
    tags = sorted({str(t) for t in md.systems.values() if any(
        c in md.curves for c in md.systems if md.systems[c] == t
    )})
    present = sorted({str(md.systems[c]) for c in md.curves})
    first = present[0]
    return lambda cid: str(md.systems[cid]) == first


def _top_generator(md):
    """The highest (mu - 2 n_w)-graded matching of a two-system diagram."""
    from .branched import domain_between, euler_measures

    gens = _matchings(md)
    assert gens, "no generators"
    measures = euler_measures(md)
    rw = md.outer_region_pair()
    alpha = _alpha_predicate(md)
    base = gens[0]
    best = None
    best_gr = None
    for g in gens:
        dom = domain_between(md, frozenset(g), frozenset(base), alpha)
        if dom is None:
            continue
        mu = maslov_index_points(md, dom, g, base, measures)
        nw = dom.coeffs[rw[0]] + dom.coeffs[rw[1]]
        gr = mu - 2 * nw
        if best_gr is None or gr > best_gr:
            best_gr = gr
            best = g
    return best


def maslov_index_points(md, dom, x_points, y_points, measures):
    from fractions import Fraction as F

    e = sum(F(c) * measures[r] for r, c in enumerate(dom.coeffs) if c)
    nx = F(0)
    for p in x_points:
        quads = md.crossings[p]
        nx += F(sum(dom.coeffs[q["region"]] for q in quads), 4)
    ny = F(0)
    for p in y_points:
        quads = md.crossings[p]
        ny += F(sum(dom.coeffs[q["region"]] for q in quads), 4)
    return e + nx + ny


def _corner_generator(md, system, labels_by_idx):
    """The (A, system)-generator with the given labels.

    labels_by_idx maps stadium index (0 or 1) per crossing pair... for the
    Hopf fixture the circles are {arcs of idx-0 stadiums} and {idx-1};
    labels_by_idx: dict circle key -> '+'/'-'; the matching per circle is
    resolved by relative grading (the + orientation is the higher one).
    """
    raise NotImplementedError


def config1_demo(bound=2):
    """Reproduce the Configuration-1 discrepancy numbers.

    Returns a dict with the positive-rectangle counts for the two corner
    specs (the labeling-preserving one and the grading-rule-breaking one)
    plus the top generators used.
    """
    pl, systems = config1_fixture()
    md = MultiDiagram(pl, systems)

    sub01 = MultiDiagram(pl, systems, lambda c: systems[c] in (0, 1))
    sub12 = MultiDiagram(pl, systems, lambda c: systems[c] in (1, 2))
    theta1 = _top_generator(sub01)
    theta2 = _top_generator(sub12)

    subA0 = MultiDiagram(pl, systems, lambda c: systems[c] in ("A", 0))
    subA2 = MultiDiagram(pl, systems, lambda c: systems[c] in ("A", 2))

    def graded_generators(sub):
        from .branched import domain_between, euler_measures

        gens = _matchings(sub)
        measures = euler_measures(sub)
        rw = sub.outer_region_pair()
        alpha = _alpha_predicate(sub)
        base = gens[0]
        out = []
        for g in gens:
            dom = domain_between(sub, frozenset(g), frozenset(base), alpha)
            mu = maslov_index_points(sub, dom, g, base, measures)
            nw = dom.coeffs[rw[0]] + dom.coeffs[rw[1]]
            out.append((mu - 2 * nw, g))
        return out

    gensA0 = graded_generators(subA0)
    gensA2 = graded_generators(subA2)
    top_x = max(gensA0, key=lambda t: t[0])[1]   # v+ (x) v+ on the starting circles
    # on the ending side, identify per-circle labels: generators are
    # matchings; circle identity = stadium index (0: arcs {1,3}, 1: {2,4})
    # the outer ending circle is the one whose stadiums sit on chords
    # b0-b1 / b2-b3 matched with the outer region; resolved below by gr
    ordered = sorted(gensA2, key=lambda t: -t[0])
    top_y = ordered[0][1]          # v+ (x) v+
    # the two middle generators differ by one circle flip; find the one
    # whose flipped circle is the INNER ending circle: its complement is
    # v+ (outer) (x) v- (inner)
    mids = [g for gr, g in gensA2 if gr == sorted({gr for gr, _ in gensA2})[1]]

    results = {}
    for name, ygen in [("pp_to_pm_candidates", mids), ("pp_to_pp", [top_y])]:
        counts = []
        for y in ygen:
            spec = {}
            for p in top_x:
                spec[p] = ("A", 0)
            for p in theta1:
                spec[p] = (0, 1)
            for p in theta2:
                spec[p] = (1, 2)
            for p in y:
                spec[p] = (2, "A")
            doms = positive_domain_search(md, spec, bound)
            counts.append(len(doms))
        results[name] = counts
    return {
        "theta1": sorted(map(str, theta1)),
        "theta2": sorted(map(str, theta2)),
        "x": sorted(map(str, top_x)),
        "counts_pp_to_pm": results["pp_to_pm_candidates"],
        "counts_pp_to_pp": results["pp_to_pp"],
    }
