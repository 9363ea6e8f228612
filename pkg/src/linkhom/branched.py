"""Combinatorial branched and bouquet Heegaard diagrams of a resolution.

The Heegaard surface is the double cover of the projection sphere branched
over the points where the resolved link crosses it (4 per crossing, 2 per
crossing-free component).  Everything is built from a downstairs planar
arrangement - red arms, blue smoothing strands, branch cuts, and for
bouquet diagrams the slid curve around each crossing - with a rotation
system, then doubled: every downstairs face and edge has a lift on each
sheet, walls that belong to no curve are dissolved (crossing a branch cut
switches sheets), and branch points have a single preimage.

Local conventions at a crossing (slots 0..3 at compass S,E,N,W):
    * branch points b0..b3 sit at the four slots;
    * cuts are fixed independently of the resolution: cutA joins b1-b2
      through NE, cutB joins b3-b0 through SW;
    * the 0-smoothing strands run center-side of the cuts (bB1 = b1-b2,
      bB2 = b3-b0) and the 1-smoothing strands through the free quadrants
      (bA1 = b0-b1 through SE, bA2 = b2-b3 through NW);
    * the bouquet's slid curve is an octagon crossing each arm once
      (y0..y3) and each cut twice (z1,z2 on cutA, z3,z0 on cutB), changing
      sheets along the two corridors behind the cuts.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from .diagram import resolve
from .errors import NoDomainError, UnsupportedForBouquet

A_SIDE = 0
B_SIDE = 1


class _Graph:
    """A downstairs arrangement: vertices with rotations, labeled edges."""

    def __init__(self):
        self.rot = {}  # vertex -> list of edge-ends in CCW order
        self.edges = {}  # edge id -> (v0, v1, owner)
        self._next = 0

    def add_vertex(self, v, rotation_size=None):
        self.rot.setdefault(v, [])

    def add_edge(self, v0, v1, owner):
        e = self._next
        self._next += 1
        self.edges[e] = (v0, v1, owner)
        return e

    def set_rotation(self, v, ends):
        """ends: list of (edge id, which_end); the template lists them in
        the compass order of the local pictures, which is opposite to the
        diagram's global rotation convention, so they are stored
        reversed."""
        self.rot[v] = list(reversed(ends))

    def end_vertex(self, e, w):
        return self.edges[e][w]

    def faces(self):
        """Faces of the embedded graph: orbits of the face walk.

        Directed edge (e, w) means 'traversing e toward end w'.  Arriving
        at v = end w of e, the walk leaves along the next end clockwise
        (previous in CCW order), keeping the face on the left.
        """
        nxt = {}
        for v, ends in self.rot.items():
            n = len(ends)
            for k, (e, w) in enumerate(ends):
                prev = ends[(k - 1) % n]
                nxt[(e, w)] = (prev[0], 1 - prev[1])
        faces = []
        seen = set()
        for start in sorted(nxt):
            if start in seen:
                continue
            orbit = []
            cur = start
            while cur not in seen:
                seen.add(cur)
                orbit.append(cur)
                cur = nxt[cur]
            faces.append(tuple(orbit))
        return faces


def _build_downstairs(rd, variant):
    """The arrangement for one resolved diagram.

    Returns (graph, curves, cut_edges) where curves maps curve id ->
    list of (edge, sheet) lifts, and cut_edges is the set of cut edge ids.
    """
    D = rd.diagram
    g = _Graph()
    cut_edges = set()
    curve_edges = {}  # curve id -> list of (edge, sheet)

    def curve_add(cid, e, sheets=(0, 1)):
        for s in sheets:
            curve_edges.setdefault(cid, []).append((e, s))

    # per-crossing template vertices
    bouquet = variant == "bouquet"
    arm_outer = {}  # (ci, p) -> (vertex, end-target for the global arc edge)
    local_edges = {}
    for ci in range(D.crossing_count):
        bit = rd.resolution.bits[ci]
        b = {p: ("b", ci, p) for p in range(4)}
        for p in range(4):
            g.add_vertex(b[p])
        # cuts
        if bouquet:
            z = {k: ("z", ci, k) for k in range(4)}  # z1,z2 on cutA; z3,z0 on cutB
            for k in (0, 1, 2, 3):
                g.add_vertex(z[k])
            cutA_1 = g.add_edge(b[1], z[1], ("cut", ci, "A"))
            cutA_m = g.add_edge(z[1], z[2], ("cut", ci, "A"))
            cutA_2 = g.add_edge(z[2], b[2], ("cut", ci, "A"))
            cutB_3 = g.add_edge(b[3], z[3], ("cut", ci, "B"))
            cutB_m = g.add_edge(z[3], z[0], ("cut", ci, "B"))
            cutB_0 = g.add_edge(z[0], b[0], ("cut", ci, "B"))
            for e in (cutA_1, cutA_m, cutA_2, cutB_3, cutB_m, cutB_0):
                cut_edges.add(e)
        else:
            cutA = g.add_edge(b[1], b[2], ("cut", ci, "A"))
            cutB = g.add_edge(b[3], b[0], ("cut", ci, "B"))
            cut_edges.add(cutA)
            cut_edges.add(cutB)
        # blue strands for this resolution
        if bit == 0:
            blue1 = g.add_edge(b[1], b[2], ("B", ci, 1))  # center side of cutA
            blue2 = g.add_edge(b[3], b[0], ("B", ci, 0))  # center side of cutB
            strands = {1: blue1, 0: blue2}
        else:
            blue1 = g.add_edge(b[0], b[1], ("B", ci, 0))  # SE
            blue2 = g.add_edge(b[2], b[3], ("B", ci, 1))  # NW
            strands = {0: blue1, 1: blue2}
        # the strand containing slot 0 is site 0 of the crossing
        for site, e in strands.items():
            curve_add(("B", ci, site), e)
        # arms
        if bouquet:
            y = {p: ("y", ci, p) for p in range(4)}
            for p in range(4):
                g.add_vertex(y[p])
            arm_in = {p: g.add_edge(b[p], y[p], ("arm", ci, p)) for p in range(4)}
            for p in range(4):
                arm_outer[(ci, p)] = y[p]
            # the slid octagon
            kept = 0 if bit == 0 else 0  # site 0 strand is kept in both cases
            cx = ("Cx", ci)
            e_y1z1 = g.add_edge(y[1], z[1], cx)
            e_z1z2 = g.add_edge(z[1], z[2], cx)
            e_z2y2 = g.add_edge(z[2], y[2], cx)
            e_y2y3 = g.add_edge(y[2], y[3], cx)
            e_y3z3 = g.add_edge(y[3], z[3], cx)
            e_z3z0 = g.add_edge(z[3], z[0], cx)
            e_z0y0 = g.add_edge(z[0], y[0], cx)
            e_y0y1 = g.add_edge(y[0], y[1], cx)
            curve_edges.setdefault(cx, [])
            for e, s in (
                (e_y1z1, 0),
                (e_z1z2, 1),
                (e_z2y2, 0),
                (e_y2y3, 0),
                (e_y3z3, 0),
                (e_z3z0, 1),
                (e_z0y0, 0),
                (e_y0y1, 0),
            ):
                curve_edges[cx].append((e, s))
            local_edges[ci] = dict(
                arm_in=arm_in,
                octagon=(e_y1z1, e_z1z2, e_z2y2, e_y2y3, e_y3z3, e_z3z0, e_z0y0, e_y0y1),
            )
        else:
            arm_in = {}
            for p in range(4):
                arm_outer[(ci, p)] = b[p]
            local_edges[ci] = dict(arm_in=None)

        # rotations (CCW) at the template vertices
        def ends_of(v, *spec):
            out = []
            for e, w in spec:
                out.append((e, w))
            return out

        def end(e, v):
            v0, v1, _ = g.edges[e]
            return (e, 0 if v0 == v else 1)

        if bouquet:
            armend = {p: end(arm_in[p], b[p]) for p in range(4)}
            cutd = {
                (1,): end(cutA_1, b[1]),
                (2,): end(cutA_2, b[2]),
                (3,): end(cutB_3, b[3]),
                (0,): end(cutB_0, b[0]),
            }
        else:
            # arms attach later (global arc edges); placeholder filled below
            armend = {}
            cutd = {
                (1,): end(cutA, b[1]),
                (2,): end(cutA, b[2]),
                (3,): end(cutB, b[3]),
                (0,): end(cutB, b[0]),
            }
        blue_end = {}
        if bit == 0:
            blue_end[1] = end(strands[1], b[1])
            blue_end[2] = end(strands[1], b[2])
            blue_end[3] = end(strands[0], b[3])
            blue_end[0] = end(strands[0], b[0])
        else:
            blue_end[0] = end(strands[0], b[0])
            blue_end[1] = end(strands[0], b[1])
            blue_end[2] = end(strands[1], b[2])
            blue_end[3] = end(strands[1], b[3])
        # CCW orders derived from the template geometry:
        #   b0: [blue_to_b3?, ...] per bit; see module docstring sketch
        rot_spec = {}
        if bit == 0:
            rot_spec[0] = ["blue", "cut", "arm"]
            rot_spec[1] = ["arm", "cut", "blue"]
            rot_spec[2] = ["arm", "blue", "cut"]
            rot_spec[3] = ["arm", "cut", "blue"]
        else:
            rot_spec[0] = ["cut", "arm", "blue"]
            rot_spec[1] = ["arm", "cut", "blue"]
            rot_spec[2] = ["arm", "blue", "cut"]
            rot_spec[3] = ["blue", "arm", "cut"]
        self_rot = {}
        for p in range(4):
            order = []
            for kind in rot_spec[p]:
                if kind == "arm":
                    order.append(("ARM", p))
                elif kind == "cut":
                    order.append(cutd[(p,)])
                else:
                    order.append(blue_end[p])
            self_rot[p] = order
        local_edges[ci]["b_rot"] = self_rot
        local_edges[ci]["b"] = b
        if bouquet:
            # y rotations: [cx_cw, arm_b, cx_ccw, arm_port] patterns
            octs = local_edges[ci]["octagon"]
            (e_y1z1, e_z1z2, e_z2y2, e_y2y3, e_y3z3, e_z3z0, e_z0y0, e_y0y1) = octs
            y_rot = {
                0: [end(e_y0y1, y[0]), end(arm_in[0], y[0]), end(e_z0y0, y[0]), ("PORT", 0)],
                1: [("PORT", 1), end(e_y1z1, y[1]), end(arm_in[1], y[1]), end(e_y0y1, y[1])],
                2: [("PORT", 2), end(e_y2y3, y[2]), end(arm_in[2], y[2]), end(e_z2y2, y[2])],
                3: [end(arm_in[3], y[3]), end(e_y2y3, y[3]), ("PORT", 3), end(e_y3z3, y[3])],
            }
            local_edges[ci]["y_rot"] = y_rot
            local_edges[ci]["y"] = y
            z_rot = {
                1: [end(cutA_m, z[1]), end(e_y1z1, z[1]), end(cutA_1, z[1]), end(e_z1z2, z[1])],
                2: [end(cutA_2, z[2]), end(e_z2y2, z[2]), end(cutA_m, z[2]), end(e_z1z2, z[2])],
                3: [end(cutB_m, z[3]), end(e_y3z3, z[3]), end(cutB_3, z[3]), end(e_z3z0, z[3])],
                0: [end(cutB_0, z[0]), end(e_z0y0, z[0]), end(cutB_m, z[0]), end(e_z3z0, z[0])],
            }
            for k in range(4):
                g.set_rotation(z[k], z_rot[k])

    # free circles
    free_info = {}
    for i in range(D.free_circles):
        q0 = ("q", i, 0)
        q1 = ("q", i, 1)
        g.add_vertex(q0)
        g.add_vertex(q1)
        red = g.add_edge(q0, q1, ("A", ("o", i)))
        blue = g.add_edge(q0, q1, ("B", ("o", i)))
        cut = g.add_edge(q0, q1, ("cut", ("o", i)))
        cut_edges.add(cut)
        curve_add(("A", ("o", i)), red)
        curve_add(("B", ("o", i)), blue)
        # rotations: red on top, cut inside, blue below
        g.set_rotation(q0, [(red, 0), (cut, 0), (blue, 0)])
        g.set_rotation(q1, [(cut, 1), (red, 1), (blue, 1)])
        free_info[i] = (red, blue)

    # global arc edges
    for arc in D.arcs:
        (c1, p1), (c2, p2) = D.arc_darts[arc]
        v1 = arm_outer[(c1, p1)]
        v2 = arm_outer[(c2, p2)]
        e = g.add_edge(v1, v2, ("arc", arc))
        curve_add(("A", arc), e)
        if variant == "bouquet":
            curve_add(("A", arc), local_edges[c1]["arm_in"][p1])
            if (c2, p2) != (c1, p1):
                curve_add(("A", arc), local_edges[c2]["arm_in"][p2])
        # patch the placeholder rotations
        for (ci, p), vv in ((( c1, p1), v1), ((c2, p2), v2)):
            pass

    # resolve ARM/PORT placeholders now that arc edges exist
    arc_end_at = {}
    for e, (v0, v1, owner) in g.edges.items():
        if owner[0] == "arc":
            arc_end_at.setdefault(v0, []).append((e, 0))
            arc_end_at.setdefault(v1, []).append((e, 1))
    for ci in range(D.crossing_count):
        info = local_edges[ci]
        b = info["b"]
        for p in range(4):
            order = []
            for item in info["b_rot"][p]:
                if item == ("ARM", p):
                    if variant == "bouquet":
                        e = info["arm_in"][p]
                        v0, v1, _ = g.edges[e]
                        order.append((e, 0 if v0 == b[p] else 1))
                    else:
                        cand = arc_end_at[b[p]].pop(0)
                        order.append(cand)
                else:
                    order.append(item)
            g.set_rotation(b[p], order)
        if variant == "bouquet":
            y = info["y"]
            for p in range(4):
                order = []
                for item in info["y_rot"][p]:
                    if isinstance(item, tuple) and item[0] == "PORT":
                        cand = arc_end_at[y[p]].pop(0)
                        order.append(cand)
                    else:
                        order.append(item)
                g.set_rotation(y[p], order)
    return g, curve_edges, cut_edges


def _diagram_face_of_side(diagram, arc, side):
    """Diagram face id carrying the boundary pair (arc, side)."""
    for f in diagram._faces:
        for a, s in (
            f.boundary
            if not f.boundary or isinstance(f.boundary[0][0], int)
            else [p for cyc in f.boundary for p in cyc]
        ):
            if a == arc and s == side:
                return f.id
    raise AssertionError((arc, side))


class BranchedDiagram:
    """The doubled surface with its curve systems and region data."""

    def __init__(self, rd, variant="branched", arrangement=None):
        self.resolved = rd
        self.diagram = rd.diagram if rd is not None else None
        self.variant = variant
        if arrangement is None:
            g, curve_edges, cut_edges = _build_downstairs(rd, variant)
        else:
            g, curve_edges, cut_edges = arrangement
        self.graph = g
        self.cut_edges = cut_edges
        self.curve_edges = {cid: set(lifts) for cid, lifts in curve_edges.items()}
        self._lift_owner = {}
        for cid, lifts in self.curve_edges.items():
            for lift in lifts:
                self._lift_owner[lift] = cid
        self._build_surface()
        self._trace_curves()
        self._find_crossings()
        self.basepoints = {}

    # -- surface ------------------------------------------------------------

    def _build_surface(self):
        g = self.graph
        faces = g.faces()
        self.down_faces = faces
        side_face = {}
        for fi, orbit in enumerate(faces):
            for (e, w) in orbit:
                # traversing e toward end w with the face on the left
                side_face[(e, w)] = fi
        self.side_face = side_face

        # graph components (the arrangement splits along resolved circles)
        comp_parent = {v: v for v in g.rot}

        def cfind(x):
            while comp_parent[x] != x:
                comp_parent[x] = comp_parent[comp_parent[x]]
                x = comp_parent[x]
            return x

        for e, (v0, v1, _own) in g.edges.items():
            r0, r1 = cfind(v0), cfind(v1)
            if r0 != r1:
                comp_parent[max(r0, r1)] = min(r0, r1)
        face_comp = {}
        for fi, orbit in enumerate(faces):
            e, w = orbit[0]
            face_comp[fi] = cfind(g.edges[e][0])
        comp_faces = {}
        for fi, comp in face_comp.items():
            comp_faces.setdefault(comp, []).append(fi)
        for comp, flist in comp_faces.items():
            nv = sum(1 for v in g.rot if cfind(v) == comp)
            ne = sum(1 for e, (v0, _v1, _o) in g.edges.items() if cfind(v0) == comp)
            assert nv - ne + len(flist) == 2, (
                f"arrangement component not spherical: {nv - ne + len(flist)}"
            )

        # tag the big downstairs faces with regions of the circle arrangement
        rd = self.resolved
        self.face_region_tag = {}
        if rd is None:
            assert len(comp_faces) == 1, "pre-built arrangements must be connected"
        for fi, orbit in enumerate(faces):
            if rd is None:
                break
            for (e, w) in orbit:
                owner = g.edges[e][2]
                if owner[0] == "arc":
                    arc = owner[1]
                    dface = _diagram_face_of_side(self.diagram, arc, 0 if w == 0 else 1)
                    self.face_region_tag[fi] = rd.region_of_face[dface]
                    break
                if owner[0] == "A" and isinstance(owner[1], tuple):
                    # free circle: the face between red and cut is "inside"
                    others = {g.edges[e2][2][0] for (e2, _w2) in orbit}
                    i = owner[1][1]
                    if "cut" in others:
                        self.face_region_tag[fi] = rd.region_of_face[f"o:{i}"]
                    else:
                        host = rd.region_of_face.get("outer")
                        if host is None:
                            host = min(rd.region_of_face.values())
                        # outside face of the free circle: its host region
                        left, right = rd.circle_sides[
                            next(
                                k
                                for k, circ in enumerate(rd.circles)
                                if circ.free_index == i
                            )
                        ]
                        inside = rd.region_of_face[f"o:{i}"]
                        self.face_region_tag[fi] = right if left == inside else left
                    break

        # cells and region union-find
        cells = [(fi, s) for fi in range(len(faces)) for s in (0, 1)]
        parent = {c: c for c in cells}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

        # place the components into one sphere: for every region of the
        # circle arrangement, the tagged faces of distinct components are
        # one global face
        by_region = {}
        for fi, reg in self.face_region_tag.items():
            by_region.setdefault(reg, {}).setdefault(face_comp[fi], []).append(fi)
        merged = 0
        for reg, groups in sorted(by_region.items()):
            comps = sorted(groups)
            anchor = min(groups[comps[0]])
            for comp in comps[1:]:
                fi = min(groups[comp])
                union((fi, 0), (anchor, 0))
                union((fi, 1), (anchor, 1))
                merged += 1
        assert len(comp_faces) - 1 == merged, (
            f"component placement incomplete: {len(comp_faces)} components, "
            f"{merged} merges"
        )

        self._dissolved = set()
        for e in g.edges:
            fL = side_face[(e, 1)]  # face on the left traveling 0->1
            fR = side_face[(e, 0)]
            if e in self.cut_edges:
                union((fL, 0), (fR, 1))
                union((fL, 1), (fR, 0))
                self._dissolved.add((e, 0))
                self._dissolved.add((e, 1))
            else:
                for s in (0, 1):
                    if (e, s) not in self._lift_owner:
                        union((fL, s), (fR, s))
                        self._dissolved.add((e, s))
        self._cell_find = find
        regions = sorted({find(c) for c in cells})
        self.regions = regions
        self.region_index = {r: i for i, r in enumerate(regions)}
        self.cell_region = {c: self.region_index[find(c)] for c in cells}

    def region_of_cell(self, fi, s):
        return self.cell_region[(fi, s)]

    # -- curves ---------------------------------------------------------------

    def _trace_curves(self):
        """Order each curve's edge lifts into a cyclic path."""
        g = self.graph
        self.curves = {}
        for cid, lifts in self.curve_edges.items():
            # adjacency on (edge, sheet): consecutive when sharing a vertex
            # lift; sheet flips when passing through nothing here because
            # curve lifts already record their sheets, and transitions at
            # branch points connect sheet 0 to sheet 1 copies.
            ends = {}
            for (e, s) in lifts:
                v0, v1, _ = g.edges[e]
                for w, v in ((0, v0), (1, v1)):
                    key = self._vertex_lift_key(v, e, w, s)
                    ends.setdefault(key, []).append((e, s, w))
            for key, incident in ends.items():
                assert len(incident) == 2, (
                    f"curve {cid} does not pass straight through {key}: {incident}"
                )
            path = []
            (e0, s0) = sorted(lifts)[0]
            cur = (e0, s0, 1)  # travel toward end 1
            seen = set()
            while True:
                e, s, w = cur
                path.append((e, s) if w == 1 else (e, s, -1))
                seen.add((e, s))
                v = g.edges[e][w]
                key = self._vertex_lift_key(v, e, w, s)
                nxts = [t for t in ends[key] if (t[0], t[1]) != (e, s)]
                if not nxts:
                    # passing through the same edge pair; pick the other end
                    nxts = [t for t in ends[key] if t != (e, s, w)]
                e2, s2, w2 = nxts[0]
                cur = (e2, s2, 1 - w2)
                if (e2, s2) in seen:
                    break
            assert len(seen) == len(lifts), f"curve {cid} is not a single circle"
            self.curves[cid] = path

    def _vertex_lift_key(self, v, e, w, s):
        """Which vertex lift the end (e,w) on sheet s attaches to.

        Branch points have a single lift.  At other vertices the lift is
        determined by the sheet, except that ends reached after crossing a
        cut (z-vertices) pair sheets: lifts are orbits of the corner walk,
        so we name the lift by the orbit of a corner adjacent to this end.
        """
        if v[0] in ("b", "q"):
            return (v,)
        orbits = self._vertex_orbits(v)
        for oi, orbit in enumerate(orbits):
            if (e, w, s) in orbit["ends"]:
                return (v, oi)
        raise AssertionError((v, e, w, s))

    def _vertex_orbits(self, v):
        if not hasattr(self, "_orbit_cache"):
            self._orbit_cache = {}
        if v in self._orbit_cache:
            return self._orbit_cache[v]
        g = self.graph
        ends = g.rot[v]
        n = len(ends)
        # walk corners (k, s): corner k between ends[k] and ends[k+1]
        seen = set()
        orbits = []
        for k0 in range(n):
            for s0 in (0, 1):
                if (k0, s0) in seen:
                    continue
                corners = []
                end_set = set()
                k, s = k0, s0
                while (k, s) not in seen:
                    seen.add((k, s))
                    corners.append((k, s))
                    nxt_end = ends[(k + 1) % n]
                    s2 = s ^ (1 if nxt_end[0] in self.cut_edges else 0)
                    end_set.add((nxt_end[0], nxt_end[1], s2 if nxt_end[0] in self.cut_edges else s))
                    # the end itself is attached on the sheet it is left on
                    k, s = (k + 1) % n, s2
                orbits.append({"corners": corners, "ends": end_set})
        for orbit in orbits:
            # normalize: ends recorded with the sheet on which they attach
            pass
        self._orbit_cache[v] = orbits
        return orbits

    # -- intersections and quadrants -----------------------------------------

    def _find_crossings(self):
        """All transverse curve-curve intersection points with quadrant data.

        A crossing is a vertex lift through which two distinct curves pass.
        Quadrants are the cyclic corner groups after dissolving non-curve
        ends; each quadrant maps to a region.
        """
        g = self.graph
        self.crossings = {}
        verts = set()
        for cid, path in self.curves.items():
            for item in path:
                e, s = item[0], item[1]
                v0, v1, _ = g.edges[e]
                for w, v in ((0, v0), (1, v1)):
                    verts.add((v, e, w, s))
        lifted = {}
        for (v, e, w, s) in verts:
            key = self._vertex_lift_key(v, e, w, s)
            lifted.setdefault(key, set()).add(self._lift_owner[(e, s)])
        for key, owners in lifted.items():
            if len(owners) == 2:
                self.crossings[key] = self._quadrants(key)

    def _quadrants(self, key):
        """Quadrant regions at a crossing lift, as a list of dicts.

        Corners around the vertex lift are grouped into quadrants by the
        curve edge-ends; dissolved ends (cuts, phantom lifts) merge their
        two neighbouring corners.
        """
        g = self.graph
        v = key[0]
        ends = g.rot[v]
        n = len(ends)
        if v[0] in ("b", "q"):
            corners = []
            k, s = 0, 0
            for _ in range(2 * n):
                corners.append((k, s))
                nxt_end = ends[(k + 1) % n]
                s = s ^ (1 if nxt_end[0] in self.cut_edges else 0)
                k = (k + 1) % n
        else:
            corners = self._vertex_orbits(v)[key[1]]["corners"]
        m = len(corners)
        # the end separating corner idx from corner idx+1
        def sep(idx):
            k, s = corners[idx]
            e, w = ends[(k + 1) % n]
            if e in self.cut_edges:
                return None  # dissolved
            s_att = s
            if (e, s_att) in self._lift_owner:
                return (e, s_att)
            return None
        curve_breaks = [idx for idx in range(m) if sep(idx) is not None]
        if not curve_breaks:
            return []
        quads = []
        for j, start in enumerate(curve_breaks):
            stop = curve_breaks[(j + 1) % len(curve_breaks)]
            idx = (start + 1) % m
            group = []
            while True:
                group.append(corners[idx])
                if idx == stop:
                    break
                idx = (idx + 1) % m
            k0, s0 = group[0]
            fi = self._corner_face(v, k0)
            quads.append(
                {"region": self.region_of_cell(fi, s0), "corners": group}
            )
        return quads

    def _corner_face(self, v, k):
        """Downstairs face of corner k at vertex v (between ends k, k+1)."""
        g = self.graph
        ends = g.rot[v]
        e, w = ends[(k + 1) % len(ends)]
        return self.side_face[(e, w)]

    # -- basepoints -----------------------------------------------------------

    def place_basepoints(self, w_face, z_face=None):
        """Lift diagram-face basepoints to region pairs.

        w_face/z_face are face ids of the underlying diagram; each lifts to
        the two sheets of a downstairs face inside that diagram face.
        """
        self.basepoints = {}
        down = self._downstairs_face_for(w_face)
        self.basepoints["w"] = (
            self.region_of_cell(down, 0),
            self.region_of_cell(down, 1),
        )
        if z_face is not None:
            down_z = self._downstairs_face_for(z_face)
            self.basepoints["z"] = (
                self.region_of_cell(down_z, 0),
                self.region_of_cell(down_z, 1),
            )
        return self.basepoints

    def _downstairs_face_for(self, face_id):
        """A downstairs face lying in the given diagram face, away from the
        crossing templates."""
        D = self.diagram
        f = D.face(face_id)
        target_region = self.resolved.region_of_face[f.id]
        if f.id.startswith("o:"):
            for fi, reg in self.face_region_tag.items():
                if reg == target_region:
                    owners = {
                        self.graph.edges[e][2][0] for (e, _w) in self.down_faces[fi]
                    }
                    if "cut" in owners:
                        return fi
        boundary = f.boundary
        if boundary and boundary[0] and not isinstance(boundary[0][0], int):
            boundary = [p for cyc in boundary for p in cyc]
        for (arc, side) in boundary:
            for e, (v0, v1, owner) in self.graph.edges.items():
                if owner == ("arc", arc):
                    return self.side_face[(e, 0 if side == 0 else 1)]
        # zero-crossing diagrams: the outer face
        for fi, reg in self.face_region_tag.items():
            if reg == target_region:
                return fi
        raise AssertionError(f"no downstairs face for {face_id}")

    # -- counts ----------------------------------------------------------------

    def genus(self):
        branch = sum(1 for v in self.graph.rot if v[0] in ("b", "q"))
        return (branch - 2) // 2

    def curve_count(self):
        a = sum(1 for cid in self.curves if cid[0] == "A")
        b = sum(1 for cid in self.curves if cid[0] in ("B", "Cx"))
        return a, b


class HFGenerator:
    """A generator: one intersection point on every curve pair."""

    __slots__ = ("bits", "points", "gr", "alex", "qprime")

    def __init__(self, bits, points):
        self.bits = bits
        self.points = frozenset(points)
        self.gr = None
        self.alex = None
        self.qprime = None

    def __repr__(self):
        return f"HFGen({''.join(map(str, self.bits))})"


def build_branched(rd):
    return BranchedDiagram(rd, "branched")


def build_bouquet(rd):
    return BranchedDiagram(rd, "bouquet")


def generators(bd):
    """All 2^n generators, in orientation-bitmask order.

    Bit k chooses the matching of circle k between red arcs and blue
    strands; the intersection points are branch-point lifts.
    """
    if bd.variant != "branched":
        raise UnsupportedForBouquet(
            "generator combinatorics are only provided for branched diagrams"
        )
    rd = bd.resolved
    circles = rd.circles
    n = len(circles)
    per_circle = []
    for circ in circles:
        if circ.free_index is not None:
            i = circ.free_index
            per_circle.append(
                ([(("q", i, 0),)], [(("q", i, 1),)])
            )
            continue
        match0 = []
        match1 = []
        for (ci, s_in, s_out) in circ.walk:
            match0.append((("b", ci, s_in),))
            match1.append((("b", ci, s_out),))
        per_circle.append((match0, match1))
    out = []
    for code in range(1 << n):
        points = []
        bits = []
        for k in range(n):
            b = (code >> (n - 1 - k)) & 1
            bits.append(b)
            points.extend(per_circle[k][b])
        out.append(HFGenerator(tuple(bits), points))
    return out


def _curve_conditions(bd, x_points, y_points, alpha_of=None):
    """Rows of the corner linear system for a domain from x to y.

    Returns (rows, nvars): each row is (dict var->coef, rhs).
    ``alpha_of`` decides which curves play the alpha role (default: the
    "A" system).
    """
    if alpha_of is None:
        alpha_of = lambda cid: cid[0] == "A"
    rows = []
    nreg = len(bd.regions)
    for cid, path in bd.curves.items():
        a_type = alpha_of(cid)
        # walk the path, computing jumps and occupied vertices between edges
        jumps = []
        verts = []
        g = bd.graph
        for item in path:
            e, s = item[0], item[1]
            direction = 1 if len(item) == 2 else -1
            fL = bd.side_face[(e, 1)]
            fR = bd.side_face[(e, 0)]
            L = bd.region_of_cell(fL, s)
            R = bd.region_of_cell(fR, s)
            if direction == -1:
                L, R = R, L
            jumps.append((L, R))
            # the vertex at the forward end of this traversal
            w_end = 1 if direction == 1 else 0
            v = g.edges[e][w_end]
            verts.append(bd._vertex_lift_key(v, e, w_end, s))
        m = len(path)
        for k in range(m):
            v = verts[k]
            c = 0
            if v in x_points:
                c += 1 if a_type else -1
            if v in y_points:
                c -= 1 if a_type else -1
            L2, R2 = jumps[(k + 1) % m]
            L1, R1 = jumps[k]
            row = {}
            for reg, coef in ((L2, 1), (R2, -1), (L1, -1), (R1, 1)):
                row[reg] = row.get(reg, 0) + coef
            row = {r: c2 for r, c2 in row.items() if c2}
            rows.append((row, c))
    return rows, nreg


def _solve_rational(rows, nvars, pins=()):
    """Solve the sparse rational system; returns (particular, kernel basis).

    pins: list of (var, value) constraints appended as rows.
    """
    aug = []
    for row, rhs in rows:
        aug.append((dict(row), Fraction(rhs)))
    for var, val in pins:
        aug.append(({var: 1}, Fraction(val)))
    pivots = {}
    for row, rhs in aug:
        row = {k: Fraction(v) for k, v in row.items()}
        placed = False
        while row:
            p = min(row)
            if p in pivots:
                prow, prhs = pivots[p]
                coef = row[p] / prow[p]
                for k, v in prow.items():
                    row[k] = row.get(k, Fraction(0)) - coef * v
                    if row[k] == 0:
                        del row[k]
                rhs = rhs - coef * prhs
            else:
                pivots[p] = (row, rhs)
                placed = True
                break
        if not placed and rhs != 0:
            return None, None
    particular = {}
    kernel_free = [v for v in range(nvars) if v not in pivots]
    for p in sorted(pivots, reverse=True):
        prow, prhs = pivots[p]
        val = prhs
        for k, v in prow.items():
            if k != p:
                val -= v * Fraction(particular.get(k, 0))
        particular[p] = val / prow[p]
    sol = [Fraction(particular.get(v, 0)) for v in range(nvars)]
    basis = []
    for free in kernel_free:
        vec = {free: Fraction(1)}
        for p in sorted(pivots, reverse=True):
            prow, _ = pivots[p]
            val = Fraction(0)
            for k, v in prow.items():
                if k != p:
                    val -= v * vec.get(k, Fraction(0))
            if val:
                vec[p] = val / prow[p]
        basis.append([vec.get(v, Fraction(0)) for v in range(nvars)])
    return sol, basis


def _integralize(vec):
    den = 1
    for v in vec:
        den = den * v.denominator // _gcd(den, v.denominator)
    return [int(v * den) for v in vec], den


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


class Domain:
    """An integer 2-chain: coefficient per region."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = list(coeffs)

    def __repr__(self):
        return f"Domain({self.coeffs})"

    def is_zero(self):
        return not any(self.coeffs)

    def has_mixed_signs(self):
        return any(c > 0 for c in self.coeffs) and any(c < 0 for c in self.coeffs)


def domain_between(bd, x, y, alpha_of=None):
    """Some domain connecting x to y, or None.

    x, y are HFGenerators (or point sets).  The solution is unique up to
    the kernel of the boundary conditions.
    """
    xp = x.points if isinstance(x, HFGenerator) else frozenset(x)
    yp = y.points if isinstance(y, HFGenerator) else frozenset(y)
    rows, nvars = _curve_conditions(bd, xp, yp, alpha_of)
    sol, _basis = _solve_rational(rows, nvars, pins=[(0, 0)])
    if sol is None:
        return None
    ints, den = _integralize(sol)
    if den != 1:
        ints2 = [v * den for v in ints]  # pragma: no cover - should not occur
        raise ArithmeticError("non-integral connecting domain")
    return Domain(ints)


def euler_measures(bd):
    """Euler measure e(R) of every region, as Fractions."""
    cells_by_region = {}
    for cell, reg in bd.cell_region.items():
        cells_by_region.setdefault(reg, set()).add(cell)
    # interior walls per region
    interior = {}
    g = bd.graph
    for e in g.edges:
        fL = bd.side_face[(e, 1)]
        fR = bd.side_face[(e, 0)]
        if e in bd.cut_edges:
            for s in (0, 1):
                reg = bd.region_of_cell(fL, s)
                interior[reg] = interior.get(reg, 0) + 1
        else:
            for s in (0, 1):
                if (e, s) not in bd._lift_owner:
                    reg = bd.region_of_cell(fL, s)
                    interior[reg] = interior.get(reg, 0) + 1
                else:
                    pass
    boundary_sides = {}
    for e in g.edges:
        fL = bd.side_face[(e, 1)]
        fR = bd.side_face[(e, 0)]
        for s in (0, 1):
            if (e, s) in bd._lift_owner:
                for f in (fL, fR):
                    reg = bd.region_of_cell(f, s)
                    boundary_sides[reg] = boundary_sides.get(reg, 0) + 1
    # vertex contributions: corner groups
    vgroups = {}
    for v in g.rot:
        lifts = _all_vertex_lifts(bd, v)
        for corners, breaks in lifts:
            if not breaks:
                # fully interior vertex lift
                k0, s0 = corners[0]
                reg = bd.region_of_cell(bd._corner_face(v, k0), s0)
                vgroups[reg] = vgroups.get(reg, 0) + 1
                continue
            m = len(corners)
            for j, start in enumerate(breaks):
                k0, s0 = corners[(start + 1) % m]
                reg = bd.region_of_cell(bd._corner_face(v, k0), s0)
                vgroups[reg] = vgroups.get(reg, 0) + 1
    # corner counts at crossings
    corner_counts = {}
    for key, quads in bd.crossings.items():
        for qd in quads:
            corner_counts[qd["region"]] = corner_counts.get(qd["region"], 0) + 1
    out = {}
    for reg in range(len(bd.regions)):
        F = len(cells_by_region.get(reg, ()))
        E = interior.get(reg, 0) + boundary_sides.get(reg, 0)
        V = vgroups.get(reg, 0)
        chi = V - E + F
        out[reg] = Fraction(chi) - Fraction(corner_counts.get(reg, 0), 4)
    return out


def _all_vertex_lifts(bd, v):
    """Corner cycles of every lift of v, with curve-break positions."""
    g = bd.graph
    ends = g.rot[v]
    n = len(ends)
    if v[0] in ("b", "q"):
        corners = []
        k, s = 0, 0
        for _ in range(2 * n):
            corners.append((k, s))
            nxt = ends[(k + 1) % n]
            s = s ^ (1 if nxt[0] in bd.cut_edges else 0)
            k = (k + 1) % n
        cycles = [corners]
    else:
        cycles = [o["corners"] for o in bd._vertex_orbits(v)]
    out = []
    for corners in cycles:
        breaks = []
        for idx in range(len(corners)):
            k, s = corners[idx]
            e, w = ends[(k + 1) % n]
            if e not in bd.cut_edges and (e, s) in bd._lift_owner:
                breaks.append(idx)
        out.append((corners, breaks))
    return out


def maslov_index(bd, domain, x, y, measures=None):
    """Lipshitz index: e(D) + n_x(D) + n_y(D)."""
    if measures is None:
        measures = euler_measures(bd)
    e = sum(Fraction(c) * measures[r] for r, c in enumerate(domain.coeffs) if c)
    nx = Fraction(0)
    for p in x.points:
        quads = bd.crossings[p]
        nx += Fraction(sum(domain.coeffs[qd["region"]] for qd in quads), 4)
    ny = Fraction(0)
    for p in y.points:
        quads = bd.crossings[p]
        ny += Fraction(sum(domain.coeffs[qd["region"]] for qd in quads), 4)
    return e + nx + ny


def basepoint_multiplicity(bd, domain, which="w"):
    r1, r2 = bd.basepoints[which]
    return domain.coeffs[r1] + domain.coeffs[r2]


def periodic_domains(bd):
    """Basis of periodic domains missing both w-lifts."""
    rows, nvars = _curve_conditions(bd, frozenset(), frozenset())
    rw1, rw2 = bd.basepoints["w"]
    rows.append(({rw1: 1}, 0))
    rows.append(({rw2: 1}, 0))
    sol, basis = _solve_rational(rows, nvars)
    assert sol is not None and all(v == 0 for v in sol)
    out = []
    for vec in basis:
        ints, den = _integralize(vec)
        gg = 0
        for v in ints:
            gg = _gcd(gg, v)
        if gg > 1:
            ints = [v // gg for v in ints]
        out.append(Domain(ints))
    return out


def admissibility_check(bd, bound=2):
    """Every nonzero combination with coefficients in [-B, B] must have
    both positive and negative region coefficients."""
    basis = periodic_domains(bd)
    n = len(basis)
    bad = []
    for combo in product(range(-bound, bound + 1), repeat=n):
        if not any(combo):
            continue
        total = [0] * len(bd.regions)
        for c, dom in zip(combo, basis):
            if c:
                for r, v in enumerate(dom.coeffs):
                    total[r] += c * v
        if not any(v > 0 for v in total) or not any(v < 0 for v in total):
            if any(total):
                bad.append((combo, total))
            elif all(c == 0 for c in combo):
                pass
            else:
                bad.append((combo, total))
    return {"basis_size": n, "bound": bound, "violations": bad}


def relative_gradings(bd):
    """Per-generator (gr, alex) with the symmetric normalization.

    Requires basepoints: w always, z for alex (else alex is all zero).
    """
    gens = generators(bd)
    measures = euler_measures(bd)
    base = gens[0]
    gr = [Fraction(0)] * len(gens)
    alex = [Fraction(0)] * len(gens)
    has_z = "z" in bd.basepoints
    for i, g in enumerate(gens):
        if i == 0:
            continue
        dom = domain_between(bd, g, base)
        if dom is None:
            raise NoDomainError(f"no domain between generators 0 and {i}")
        mu = maslov_index(bd, dom, g, base, measures)
        nw = basepoint_multiplicity(bd, dom, "w")
        gr[i] = mu - 2 * nw
        if has_z:
            nz = basepoint_multiplicity(bd, dom, "z")
            alex[i] = Fraction(nz - nw)
    # symmetric normalization: centre so each circle contributes +-1/2
    mean_gr = sum(gr, Fraction(0)) / len(gr)
    mean_al = sum(alex, Fraction(0)) / len(alex)
    gr = [v - mean_gr for v in gr]
    alex = [v - mean_al for v in alex]
    for i, g in enumerate(gens):
        g.gr = gr[i]
        g.alex = alex[i]
    return gens
