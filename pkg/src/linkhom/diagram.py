"""Planar link diagrams: PD-code parsing, faces, resolutions, oracles.

Conventions used throughout the package:

* A crossing ``X(a,b,c,d)`` lists the four arc labels counterclockwise
  starting from the incoming under-strand (PD convention).  Slot ``p`` of
  crossing ``c`` sits at compass direction S, E, N, W for ``p = 0..3``.
* The two smoothings of a crossing are named by the Kauffman letters:
  the A-smoothing joins slots (0,1) and (2,3); the B-smoothing joins
  slots (1,2) and (3,0).  Rotating the over-strand counterclockwise
  sweeps the regions merged by the A-smoothing.
* Resolution bits default to the geometric-spectral-sequence convention:
  bit 0 = B-smoothing, bit 1 = A-smoothing (the opposite of the usual
  Khovanov-homology convention; pass ``zero="A"`` for the usual one).
* Crossing-free unknot components enter via ``O(k)`` tokens and are
  placed side by side in the canonical outer face.
"""

from __future__ import annotations

import cmath
import json
import re

from .errors import (
    ArcUsedNotTwice,
    DisconnectedDiagram,
    InconsistentSigns,
    MalformedToken,
    NonPlanarRotationSystem,
    SignsRequired,
    UnknownFace,
)
from .laurent import Laurent

_TOKEN_RE = re.compile(
    r"""X\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*([+-]?)
      | O\(\s*(\d+)\s*\)
      | (\S+)""",
    re.VERBOSE,
)

A_PAIRS = ((0, 1), (2, 3))
B_PAIRS = ((1, 2), (3, 0))


def _canonical_tuple(t):
    # The PD tuple anchored at either end of the under-strand names the
    # same crossing; pick the lexicographically smaller anchoring.
    rot = (t[2], t[3], t[0], t[1])
    return min(t, rot)


class Face:
    """A complementary region of the diagram on the sphere."""

    __slots__ = ("id", "boundary", "corners")

    def __init__(self, id, boundary, corners):
        self.id = id
        self.boundary = boundary  # tuple of (arc, side) pairs, cyclic
        self.corners = corners  # frozenset of corner darts (crossing, pos)

    def __repr__(self):
        return f"Face({self.id})"


class PlanarDiagram:
    """A link diagram given by PD code plus optional crossing-free circles.

    Immutable after construction.  ``signs[i]`` is +1, -1 or None when the
    sign of crossing ``i`` is not derivable and was not supplied.
    """

    def __init__(self, crossings, signs=None, free_circles=0):
        self.crossings = tuple(_canonical_tuple(tuple(t)) for t in crossings)
        self.free_circles = int(free_circles)
        explicit = tuple(signs) if signs is not None else (None,) * len(self.crossings)
        if len(explicit) != len(self.crossings):
            raise MalformedToken("one sign per crossing required")
        self._validate_arcs()
        self._build_topology()
        self.signs = self._resolve_signs(explicit)

    # -- validation and topology ------------------------------------------

    def _validate_arcs(self):
        counts = {}
        for t in self.crossings:
            for a in t:
                counts[a] = counts.get(a, 0) + 1
        bad = sorted(a for a, k in counts.items() if k != 2)
        if bad:
            raise ArcUsedNotTwice(f"arcs used other than twice: {bad}")
        self.arcs = sorted(counts)
        self.arc_count = len(self.arcs)

    def _build_topology(self):
        c = len(self.crossings)
        arc_darts = {}
        for ci, t in enumerate(self.crossings):
            for p, a in enumerate(t):
                arc_darts.setdefault(a, []).append((ci, p))
        self.arc_darts = {a: tuple(sorted(ds)) for a, ds in arc_darts.items()}

        # graph components via shared arcs
        parent = list(range(c))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for ds in self.arc_darts.values():
            r1, r2 = find(ds[0][0]), find(ds[1][0])
            if r1 != r2:
                parent[r1] = r2
        self.graph_component = tuple(find(i) for i in range(c))

        # faces: orbits of the corner walk  (c,p) -> theta(c, p+1)
        faces = []
        corner_face = {}
        seen = set()
        for ci in range(c):
            for p in range(4):
                if (ci, p) in seen:
                    continue
                orbit = []
                boundary = []
                cur = (ci, p)
                while cur not in seen:
                    seen.add(cur)
                    orbit.append(cur)
                    cc, pp = cur
                    a = self.crossings[cc][(pp + 1) % 4]
                    side = 0 if (cc, (pp + 1) % 4) == self.arc_darts[a][0] else 1
                    boundary.append((a, side))
                    cur = self._theta(cc, (pp + 1) % 4)
                fid = _face_id(boundary)
                face = Face(fid, tuple(boundary), frozenset(orbit))
                faces.append(face)
                for d in orbit:
                    corner_face[d] = face

        # per-component Euler check: V - E + F = 2 on the sphere
        comp_faces = {}
        for f in faces:
            comp = self.graph_component[next(iter(f.corners))[0]]
            comp_faces.setdefault(comp, []).append(f)
        for comp, flist in comp_faces.items():
            nv = sum(1 for i in range(c) if self.graph_component[i] == comp)
            ne = 2 * nv
            if nv - ne + len(flist) != 2:
                raise NonPlanarRotationSystem(
                    f"rotation system is not spherical: V-E+F = "
                    f"{nv - ne + len(flist)} != 2 on a component"
                )

        # merge the outer face of every graph component (and host the free
        # circles there); a connected diagram keeps its faces untouched.
        comps = sorted(comp_faces)
        outer_ids = {}
        for comp in comps:
            anchor = min(i for i in range(c) if self.graph_component[i] == comp)
            outer_ids[comp] = corner_face[(anchor, 0)].id
        self._faces = []
        merged_corners = []
        merged_boundary = []
        need_merge = len(comps) > 1 or (self.free_circles > 0 and c > 0)
        for f in faces:
            comp = self.graph_component[next(iter(f.corners))[0]]
            if need_merge and f.id == outer_ids[comp]:
                merged_corners.extend(f.corners)
                merged_boundary.append(f.boundary)
            else:
                self._faces.append(f)
        if c == 0:
            self._faces.append(Face("outer", (), frozenset()))
        elif need_merge:
            self._faces.append(
                Face("outer", tuple(merged_boundary), frozenset(merged_corners))
            )
        for i in range(self.free_circles):
            self._faces.append(Face(f"o:{i}", (), frozenset()))
        self._faces.sort(key=lambda f: f.id)
        self._corner_face = {}
        for f in self._faces:
            for d in f.corners:
                self._corner_face[d] = f

        # link components (strands through crossings)
        aparent = {a: a for a in self.arcs}

        def afind(x):
            while aparent[x] != x:
                aparent[x] = aparent[aparent[x]]
                x = aparent[x]
            return x

        for t in self.crossings:
            for u, v in ((0, 2), (1, 3)):
                ru, rv = afind(t[u]), afind(t[v])
                if ru != rv:
                    aparent[ru] = rv
        self.arc_component = {a: afind(a) for a in self.arcs}

    def _theta(self, ci, p):
        a = self.crossings[ci][p]
        d1, d2 = self.arc_darts[a]
        return d2 if (ci, p) == d1 else d1

    # -- orientations and signs -------------------------------------------

    def _traverse_components(self):
        """Orient every link component; returns per-crossing entry slots.

        Returns dict crossing -> (under_entry_slot, over_entry_slot) for the
        chosen orientations (smallest arc of each component, smaller dart
        first).
        """
        visited_arcs = set()
        under_entry = {}
        over_entry = {}
        for start_arc in self.arcs:
            if start_arc in visited_arcs:
                continue
            dart = self.arc_darts[start_arc][1]  # walk toward the larger dart
            arc = start_arc
            while True:
                visited_arcs.add(arc)
                ci, p = dart  # entering crossing ci at slot p
                if p in (0, 2):
                    under_entry[ci] = p
                else:
                    over_entry[ci] = p
                out = (p + 2) % 4
                arc = self.crossings[ci][out]
                dart = self._theta(ci, out)
                if arc == start_arc and dart == self.arc_darts[start_arc][1]:
                    break
        return under_entry, over_entry

    def _resolve_signs(self, explicit):
        c = len(self.crossings)
        if c == 0:
            return ()
        under_entry, over_entry = self._traverse_components()
        base = []
        inter = []
        for ci in range(c):
            u, o = under_entry[ci], over_entry[ci]
            s = 1 if (u, o) in ((0, 3), (2, 1)) else -1
            base.append(s)
            cu = self.arc_component[self.crossings[ci][0]]
            co = self.arc_component[self.crossings[ci][1]]
            inter.append(None if cu == co else (cu, co))

        if all(e is None for e in explicit):
            if all(x is None for x in inter):
                return tuple(base)
            # inter-component signs depend on relative orientations
            return tuple(
                base[i] if inter[i] is None else None for i in range(c)
            )

        # consistency of explicit signs: flipping one component flips the
        # sign of every crossing between it and another component
        flips = {}
        for ci in range(c):
            e = explicit[ci]
            if e is None:
                continue
            if inter[ci] is None:
                if e != base[ci]:
                    raise InconsistentSigns(
                        f"crossing {ci} has self-crossing sign {base[ci]}, "
                        f"annotation says {e}"
                    )
            else:
                cu, co = inter[ci]
                want = 0 if e == base[ci] else 1
                flips.setdefault(cu, {})
                flips.setdefault(co, {})
                flips[cu][co] = flips[co][cu] = (ci, want)
        # 2-color the component graph
        color = {}
        for node in sorted(flips):
            if node in color:
                continue
            color[node] = 0
            stack = [node]
            while stack:
                x = stack.pop()
                for y, (ci, want) in flips[x].items():
                    expected = color[x] ^ want
                    if y in color:
                        if color[y] != expected:
                            raise InconsistentSigns(
                                f"sign annotations are not realizable "
                                f"(conflict at crossing {ci})"
                            )
                    else:
                        color[y] = expected
                        stack.append(y)
        out = []
        for ci in range(c):
            e = explicit[ci]
            if e is not None:
                out.append(e)
            elif inter[ci] is None:
                out.append(base[ci])
            else:
                cu, co = inter[ci]
                if cu in color and co in color:
                    out.append(base[ci] * (-1 if color[cu] ^ color[co] else 1))
                else:
                    out.append(None)
        return tuple(out)

    # -- basic data ---------------------------------------------------------

    @property
    def crossing_count(self):
        return len(self.crossings)

    def _signed_counts(self):
        if any(s is None for s in self.signs):
            missing = [i for i, s in enumerate(self.signs) if s is None]
            raise SignsRequired(
                f"crossing signs required but unknown at {missing}; annotate "
                f"the PD code with +/- suffixes"
            )
        np = sum(1 for s in self.signs if s == 1)
        return np, len(self.signs) - np

    @property
    def n_plus(self):
        return self._signed_counts()[0]

    @property
    def n_minus(self):
        return self._signed_counts()[1]

    @property
    def writhe(self):
        np, nm = self._signed_counts()
        return np - nm

    def faces(self):
        return list(self._faces)

    def face(self, face_id):
        for f in self._faces:
            if f.id == face_id:
                return f
        if face_id.startswith("#"):
            try:
                return self._faces[int(face_id[1:])]
            except (ValueError, IndexError):
                pass
        raise UnknownFace(f"no face with id {face_id!r}")

    def is_connected(self):
        return (
            len(set(self.graph_component)) <= 1
            and not (self.free_circles and self.crossings)
            and self.free_circles <= 1
        )

    def __eq__(self, other):
        return (
            isinstance(other, PlanarDiagram)
            and self.crossings == other.crossings
            and self.signs == other.signs
            and self.free_circles == other.free_circles
        )

    def __hash__(self):
        return hash((self.crossings, self.signs, self.free_circles))

    def __repr__(self):
        return f"PlanarDiagram(c={self.crossing_count}, free={self.free_circles})"

    def to_pd_text(self):
        parts = []
        for t, s in zip(self.crossings, self.signs):
            suffix = "" if s is None else ("+" if s > 0 else "-")
            parts.append(f"X({t[0]},{t[1]},{t[2]},{t[3]}){suffix}")
        if self.free_circles:
            parts.append(f"O({self.free_circles})")
        return " ".join(parts)

    def to_json_dict(self):
        return {
            "crossings": [list(t) for t in self.crossings],
            "signs": list(self.signs),
            "free_circles": self.free_circles,
            "arc_count": self.arc_count,
        }


def _face_id(boundary):
    """Lexicographically smallest rotation of the boundary word."""
    if not boundary:
        return "outer"
    words = []
    n = len(boundary)
    for k in range(n):
        rot = boundary[k:] + boundary[:k]
        words.append("|".join(f"{a}{'+' if s == 0 else '-'}" for a, s in rot))
    return min(words)


def parse_pd(text):
    """Parse PD-code text into a validated PlanarDiagram.

    Grammar: whitespace/comma separated ``X(a,b,c,d)`` terms, each with an
    optional ``+`` or ``-`` sign suffix, plus optional ``O(k)`` terms adding
    k crossing-free unknot components.
    """
    crossings = []
    signs = []
    free = 0
    pos = 0
    cleaned = text.strip()
    while pos < len(cleaned):
        ch = cleaned[pos]
        if ch.isspace() or ch == ",":
            pos += 1
            continue
        m = _TOKEN_RE.match(cleaned, pos)
        if not m or m.group(7):
            raise MalformedToken(f"unrecognized token at {cleaned[pos:pos+20]!r}")
        if m.group(6) is not None:
            free += int(m.group(6))
        else:
            t = tuple(int(m.group(i)) for i in range(1, 5))
            crossings.append(t)
            suffix = m.group(5)
            signs.append(None if not suffix else (1 if suffix == "+" else -1))
        pos = m.end()
    return PlanarDiagram(crossings, signs, free)


def mirror(diagram):
    """The mirror diagram: over/under swapped at every crossing.

    Realized by rotating each PD tuple one position; all signs flip.
    """
    crossings = [(t[1], t[2], t[3], t[0]) for t in diagram.crossings]
    signs = [None if s is None else -s for s in diagram.signs]
    return PlanarDiagram(crossings, signs, diagram.free_circles)


class Resolution:
    """A vertex of the cube of resolutions: one bit per crossing."""

    __slots__ = ("bits",)

    def __init__(self, bits):
        self.bits = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("resolution bits must be 0 or 1")

    @property
    def weight(self):
        return sum(self.bits)

    def __len__(self):
        return len(self.bits)

    def __eq__(self, other):
        return isinstance(other, Resolution) and self.bits == other.bits

    def __hash__(self):
        return hash(self.bits)

    def __le__(self, other):
        return all(a <= b for a, b in zip(self.bits, other.bits))

    def __lt__(self, other):
        return self <= other and self.bits != other.bits

    def flip(self, i):
        bits = list(self.bits)
        bits[i] ^= 1
        return Resolution(bits)

    def __repr__(self):
        return "".join(map(str, self.bits))


class Circle:
    """One circle of a resolved diagram.

    ``walk`` lists the crossing visits in cyclic order as
    (crossing, slot_in, slot_out); ``arc_seq[k]`` is the arc traversed
    right after visit k.  Free circles have an empty walk and a
    ``free_index``.
    """

    __slots__ = ("arcs", "arc_seq", "walk", "free_index", "key")

    def __init__(self, arcs, walk, free_index=None):
        self.arc_seq = tuple(arcs)
        self.arcs = frozenset(arcs)
        self.walk = tuple(walk)
        self.free_index = free_index
        self.key = min(self.arcs) if self.arcs else ("o", free_index)

    def __repr__(self):
        if self.free_index is not None:
            return f"Circle(o:{self.free_index})"
        return f"Circle({sorted(self.arcs)})"


class ResolvedDiagram:
    """Circles of one complete resolution plus embedding data.

    Carries the region structure of the circle arrangement (regions are
    unions of diagram faces merged through the smoothing channels), the
    surgery-arc attachment sites per crossing, the nesting tree, and,
    once basepoints are chosen, per-circle triviality flags.
    """

    def __init__(self, diagram, resolution, zero="B"):
        if len(resolution) != diagram.crossing_count:
            raise ValueError("resolution length must equal crossing count")
        if zero not in ("A", "B"):
            raise ValueError("zero smoothing must be 'A' or 'B'")
        self.diagram = diagram
        self.resolution = resolution
        self.zero = zero
        self.basepoints = None
        self.triviality = None
        self._trace()
        self._regions()

    def smoothing(self, ci):
        b = self.resolution.bits[ci]
        letter = ("B", "A") if self.zero == "B" else ("A", "B")
        return letter[b]

    def _pairs(self, ci):
        return A_PAIRS if self.smoothing(ci) == "A" else B_PAIRS

    def _trace(self):
        D = self.diagram
        c = D.crossing_count
        hop = {}
        for ci in range(c):
            for u, v in self._pairs(ci):
                hop[(ci, u)] = (ci, v)
                hop[(ci, v)] = (ci, u)
        circles = []
        seen = set()
        for ci in range(c):
            for p in range(4):
                if (ci, p) in seen:
                    continue
                walk = []
                arcs = []
                cur = (ci, p)  # arriving dart
                while cur not in seen:
                    seen.add(cur)
                    out = hop[cur]
                    seen.add(out)
                    walk.append((cur[0], cur[1], out[1]))
                    arcs.append(D.crossings[out[0]][out[1]])
                    cur = D._theta(*out)
                circles.append(Circle(arcs, walk))
        for i in range(D.free_circles):
            circles.append(Circle((), (), free_index=i))
        circles.sort(key=lambda circ: (circ.free_index is not None, circ.key))
        self.circles = circles

    def _regions(self):
        D = self.diagram
        face_ids = [f.id for f in D._faces]
        parent = {fid: fid for fid in face_ids}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)

        corner_face = D._corner_face
        for ci in range(D.crossing_count):
            if self.smoothing(ci) == "A":
                ch = ((ci, 1), (ci, 3))  # NE and SW quadrants merge
            else:
                ch = ((ci, 0), (ci, 2))  # SE and NW quadrants merge
            union(corner_face[ch[0]].id, corner_face[ch[1]].id)
        self._find = find
        self.region_of_face = {fid: find(fid) for fid in face_ids}
        self.regions = sorted(set(self.region_of_face.values()))

        # each circle borders exactly two regions
        sides = []
        for circ in self.circles:
            if circ.free_index is not None:
                sides.append((self.region_of_face[f"o:{circ.free_index}"], None))
                continue
            left = right = None
            for ci, s_in, s_out in circ.walk:
                lf = corner_face[(ci, s_out)].id
                rf = corner_face[(ci, (s_out - 1) % 4)].id
                lr, rr = find(lf), find(rf)
                if left is None:
                    left, right = lr, rr
                else:
                    assert (left, right) == (lr, rr), "inconsistent circle sides"
            sides.append((left, right))
        # free circles: the outer side is the host face's region
        host = self.region_of_face.get("outer")
        self.circle_sides = [
            (left, host if right is None else right) for left, right in sides
        ]

        # surgery-arc attachment sites: per crossing the two smoothing
        # strands; site0 is the strand containing slot 0
        occupied = {}
        for idx, circ in enumerate(self.circles):
            for pos, (ci, s_in, s_out) in enumerate(circ.walk):
                occupied[(ci, frozenset((s_in, s_out)))] = (idx, pos)
        self.sites = {}
        for ci in range(D.crossing_count):
            pairs = self._pairs(ci)
            strands = [frozenset(pr) for pr in pairs]
            strands.sort(key=lambda s: 0 not in s)
            entries = []
            for strand in strands:
                idx, pos = occupied[(ci, strand)]
                circ = self.circles[idx]
                _, s_in, s_out = circ.walk[pos]
                side = "L" if s_out == (s_in + 1) % 4 else "R"
                entries.append((idx, pos, side, strand))
            self.sites[ci] = tuple(entries)

        self._build_tree()

    def _build_tree(self):
        # region adjacency across circles is a tree on the sphere:
        # n disjoint circles cut the sphere into n+1 regions
        adj = {r: [] for r in self.regions}
        for idx, (left, right) in enumerate(self.circle_sides):
            adj[left].append((right, idx))
            adj[right].append((left, idx))
        assert len(self.regions) == len(self.circles) + 1, (
            f"region count {len(self.regions)} != circles+1 "
            f"{len(self.circles) + 1}"
        )
        self._region_adj = adj

    @property
    def circle_count(self):
        return len(self.circles)

    def region_of(self, face_id):
        f = self.diagram.face(face_id)
        return self.region_of_face[f.id]

    def nesting_parent(self, reference_region=None):
        """Rooted nesting: maps circle index -> parent circle index or None.

        The tree of regions is rooted at ``reference_region`` (default: the
        region of the lexicographically smallest face id); a circle's parent
        is the next circle on the way to the root.
        """
        root = reference_region
        if root is None:
            root = self.region_of_face[min(self.region_of_face)]
        parent_edge = {root: None}
        order = [root]
        seen = {root}
        i = 0
        while i < len(order):
            r = order[i]
            i += 1
            for nbr, circ in self._region_adj[r]:
                if nbr not in seen:
                    seen.add(nbr)
                    parent_edge[nbr] = (r, circ)
                    order.append(nbr)
        par = {}
        for idx, (left, right) in enumerate(self.circle_sides):
            # the circle's far region is the one whose parent edge is idx
            far = left if parent_edge.get(left, (None, -1))[1] == idx else right
            up = parent_edge[far][0]
            pe = parent_edge.get(up)
            par[idx] = None if pe is None else pe[1]
        return par

    def contains(self, outer_idx, inner_idx, reference_region=None):
        par = self.nesting_parent(reference_region)
        cur = par[inner_idx]
        while cur is not None:
            if cur == outer_idx:
                return True
            cur = par[cur]
        return False

    def classify(self, z_face, w_face):
        """Return a copy with triviality flags for basepoints z, w.

        A circle is nontrivial iff it separates z from w, i.e. its edge lies
        on the region-tree path between the two basepoint regions.
        """
        rz = self.region_of(z_face)
        rw = self.region_of(w_face)
        out = ResolvedDiagram(self.diagram, self.resolution, self.zero)
        out.basepoints = (z_face, w_face)
        if rz == rw:
            out.triviality = tuple(True for _ in self.circles)
            return out
        # BFS path between regions
        prev = {rz: None}
        queue = [rz]
        qi = 0
        while qi < len(queue):
            r = queue[qi]
            qi += 1
            if r == rw:
                break
            for nbr, circ in self._region_adj[r]:
                if nbr not in prev:
                    prev[nbr] = (r, circ)
                    queue.append(nbr)
        on_path = set()
        cur = rw
        while prev[cur] is not None:
            r, circ = prev[cur]
            on_path.add(circ)
            cur = r
        out.triviality = tuple(i not in on_path for i in range(len(self.circles)))
        return out

    def to_json_dict(self):
        d = {
            "resolution": list(self.resolution.bits),
            "zero_smoothing": self.zero,
            "circles": [
                sorted(c.arcs) if c.free_index is None else f"o:{c.free_index}"
                for c in self.circles
            ],
        }
        if self.triviality is not None:
            d["basepoints"] = list(self.basepoints)
            d["trivial"] = list(self.triviality)
        return d


def resolve(diagram, resolution, zero="B"):
    """Resolve every crossing of the diagram according to the bit vector."""
    if not isinstance(resolution, Resolution):
        resolution = Resolution(resolution)
    return ResolvedDiagram(diagram, resolution, zero)


def classify_triviality(resolved, z_face, w_face):
    return resolved.classify(z_face, w_face)


# -- independent oracles ----------------------------------------------------


def _state_circles(diagram, bits, zero="B"):
    """Circle count of one smoothing state via union-find on arcs.

    Deliberately independent of ResolvedDiagram's tracing.
    """
    parent = {a: a for a in diagram.arcs}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    n = 0
    for ci, t in enumerate(diagram.crossings):
        letter = ("B", "A")[bits[ci]] if zero == "B" else ("A", "B")[bits[ci]]
        pairs = A_PAIRS if letter == "A" else B_PAIRS
        for u, v in pairs:
            ru, rv = find(t[u]), find(t[v])
            if ru != rv:
                parent[ru] = rv
    n = len({find(a) for a in diagram.arcs})
    return n + diagram.free_circles


def kauffman_bracket(diagram, zero="B"):
    """State-sum bracket data over all 2^c resolutions.

    Returns a dict with Laurent polynomials:
      * ``bracket``    - sum over states of A^(#0-states - #1-states) *
                         delta^(circles-1), delta = -A^2 - A^-2.  With the
                         default bit convention (0 = B-smoothing) this is the
                         classical Kauffman bracket of the mirror diagram.
      * ``normalized`` - (-A^3)^writhe * bracket; a link invariant.
      * ``jones_unreduced_q`` - delta * normalized rewritten in q = -A^-2.
    """
    c = diagram.crossing_count
    delta = Laurent({2: -1, -2: -1})
    total = Laurent.zero()
    for code in range(1 << c):
        bits = [(code >> i) & 1 for i in range(c)]
        n = _state_circles(diagram, bits, zero)
        w = sum(bits)
        total = total + Laurent.term(1, c - 2 * w) * delta ** (n - 1)
    if c == 0:
        total = delta ** max(diagram.free_circles - 1, 0) if diagram.free_circles else Laurent.one()
    writhe = diagram.writhe if c else 0
    sign = -1 if writhe % 2 else 1
    normalized = Laurent.term(sign, 3 * writhe) * total
    unreduced = delta * normalized
    # substitute q = -A^-2: A^e = (-q)^(-e/2) = (-1)^(e/2) q^(-e/2)
    q_coeffs = {}
    for e, coef in unreduced.coeffs.items():
        assert e % 2 == 0
        k = -e // 2
        q_coeffs[k] = q_coeffs.get(k, 0) + coef * (-1 if (e // 2) % 2 else 1)
    return {
        "bracket": total,
        "normalized": normalized,
        "jones_unreduced_q": Laurent(q_coeffs),
    }


def jones_unnormalized(diagram, zero="B"):
    """The graded-Euler-characteristic polynomial from the state sum.

    P(q) = sum over states I of (-1)^(|I| - n-) q^(|I| - 3 n- + n+) *
    (q + 1/q)^(circles of the state).  Computed entirely from union-find
    circle counts; shares no code with the chain complex.
    """
    c = diagram.crossing_count
    np_, nm = diagram._signed_counts() if c else (0, 0)
    dq = Laurent({1: 1, -1: 1})
    total = Laurent.zero()
    for code in range(1 << c):
        bits = [(code >> i) & 1 for i in range(c)]
        n = _state_circles(diagram, bits, zero)
        w = sum(bits)
        coef = -1 if (w - nm) % 2 else 1
        total = total + Laurent.term(coef, w - nm + np_ - 2 * nm) * dq**n
    return total


def determinant(diagram):
    """|det| of a Goeritz matrix from a checkerboard coloring.

    Equals the link determinant.  Requires a connected diagram.
    """
    c = diagram.crossing_count
    if c == 0:
        if diagram.free_circles == 1:
            return 1
        raise DisconnectedDiagram("determinant needs a connected diagram")
    if not diagram.is_connected():
        raise DisconnectedDiagram("determinant needs a connected diagram")
    diagram._signed_counts()  # signs must be available

    # 2-color the faces (adjacent across each arc side)
    faces = diagram.faces()
    index = {f.id: i for i, f in enumerate(faces)}
    color = {0: 0}
    # adjacency: for each arc, the faces on its two sides
    arc_sides = {}
    for f in faces:
        for a, side in f.boundary:
            arc_sides.setdefault(a, {})[side] = index[f.id]
    queue = [0]
    qi = 0
    while qi < len(queue):
        i = queue[qi]
        qi += 1
        for a, side in faces[i].boundary:
            j = arc_sides[a][1 - side]
            if j not in color:
                color[j] = color[i] ^ 1
                queue.append(j)
            elif color[j] == color[i]:
                raise NonPlanarRotationSystem("faces are not checkerboard colorable")
    whites = [i for i in range(len(faces)) if color[i] == 0]
    wpos = {i: k for k, i in enumerate(whites)}
    m = len(whites)
    G = [[0] * m for _ in range(m)]
    corner_face = diagram._corner_face
    for ci in range(c):
        quad = [index[corner_face[(ci, p)].id] for p in range(4)]
        wh = [p for p in range(4) if color[quad[p]] == 0]
        # the A-regions (corners 1 and 3) are swept rotating the over-strand
        eta = 1 if set(wh) == {1, 3} else -1
        i, j = quad[wh[0]], quad[wh[1]]
        if i != j:
            a, b = wpos[i], wpos[j]
            G[a][b] -= eta
            G[b][a] -= eta
    for k in range(m):
        G[k][k] = -sum(G[k][j] for j in range(m) if j != k)
    # delete row/column 0 and take |det| by fraction-free elimination
    sub = [row[1:] for row in G[1:]]
    return abs(_int_det(sub))


def _int_det(mat):
    """Bareiss fraction-free determinant of an integer matrix."""
    n = len(mat)
    if n == 0:
        return 1
    m = [row[:] for row in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def jones_determinant(diagram):
    """|V(-1)| via the normalized bracket; cross-oracle for determinant()."""
    v = kauffman_bracket(diagram)["normalized"]
    val = v.eval_complex(cmath.exp(1j * cmath.pi / 4))
    r = round(abs(val))
    if abs(abs(val) - r) > 1e-6:
        raise ArithmeticError(f"non-integral Jones evaluation {val}")
    return r


def diagram_to_json(diagram):
    return json.dumps(diagram.to_json_dict(), sort_keys=True)
