"""Configurations: circles with oriented surgery arcs, up to sphere diffeo.

A configuration records the active picture of a cube face: the starting
circles touched by surgery arcs, the cyclic order of arc endpoints around
each circle, the side each arc leaves on, and the arc orientations.  This
data is exactly a 3-valent graph embedded in the oriented sphere (circle
segments plus arc edges with a rotation system), so configurations are
classified by the canonical form of that embedded graph.

Surgery is performed combinatorially on directed segments; the splice rule
depends on whether the two attachment sides agree (orientation-preserving
splice) or differ (orientation-reversing splice).
"""

from __future__ import annotations

from .errors import NotComparable


class Configuration:
    """The active picture of a face of the cube of resolutions.

    Attributes:
        cycles: per starting circle, the cyclic list of events
            (arc_index, end) with end in {0, 1}.
        sides:  per arc, the pair of side flags ("L"/"R") at end0/end1,
            relative to the traced direction of the carrying circle.
        tails:  per arc, which end (0/1) is the tail of its orientation.
        chunk_arcs: per circle, per event position k, the tuple of diagram
            arcs on the segment from event k to event k+1 (cyclic); empty
            tuples for standalone fixtures.
    """

    def __init__(self, cycles, sides, tails, chunk_arcs=None):
        self.cycles = [list(cy) for cy in cycles]
        self.sides = [tuple(s) for s in sides]
        self.tails = list(tails)
        if chunk_arcs is None:
            chunk_arcs = [[() for _ in cy] for cy in cycles]
        self.chunk_arcs = [list(ch) for ch in chunk_arcs]
        self.dimension = len(self.sides)
        self._end_pos = {}
        for c, cy in enumerate(self.cycles):
            for p, (a, e) in enumerate(cy):
                self._end_pos[(a, e)] = (c, p)

    # -- basic structure ----------------------------------------------------

    @property
    def start_count(self):
        return len(self.cycles)

    def is_connected(self):
        if not self.cycles:
            return False
        seen = {0}
        stack = [0]
        while stack:
            c = stack.pop()
            for a, e in self.cycles[c]:
                oc = self._end_pos[(a, 1 - e)][0]
                if oc not in seen:
                    seen.add(oc)
                    stack.append(oc)
        return len(seen) == len(self.cycles)

    def reversed_decorations(self):
        return Configuration(
            self.cycles, self.sides, [1 - t for t in self.tails], self.chunk_arcs
        )

    # -- surgery --------------------------------------------------------------

    def surgered_circles(self):
        """Perform surgery on every arc.

        Returns a list of ending circles, each a tuple of directed segments
        (circle, position, direction) in cyclic order; direction +1 means
        the segment from event p to event p+1 is traversed forward.
        Segment (c, p) is the piece of circle c after event p.
        """
        succ = {}
        for c, cy in enumerate(self.cycles):
            n = len(cy)
            for p in range(n):
                nxt = (p + 1) % n
                succ[(c, p, +1)] = (c, nxt, +1)
                succ[(c, nxt, -1)] = (c, p, -1)
        for a in range(self.dimension):
            c1, p1 = self._end_pos[(a, 0)]
            c2, p2 = self._end_pos[(a, 1)]
            s1, s2 = self.sides[a]
            n1 = len(self.cycles[c1])
            n2 = len(self.cycles[c2])
            in1 = (c1, (p1 - 1) % n1, +1)
            out1 = (c1, p1, +1)
            in2 = (c2, (p2 - 1) % n2, +1)
            out2 = (c2, p2, +1)

            def rev(seg):
                return (seg[0], seg[1], -seg[2])

            if s1 == s2:
                # direction-preserving splice
                succ[in1] = out2
                succ[in2] = out1
                succ[rev(out2)] = rev(in1)
                succ[rev(out1)] = rev(in2)
            else:
                # direction-reversing splice
                succ[in1] = rev(in2)
                succ[in2] = rev(in1)
                succ[rev(out1)] = out2
                succ[rev(out2)] = out1
        circles = []
        seen = set()
        for start in sorted(succ):
            if start in seen:
                continue
            orbit = []
            cur = start
            while cur not in seen:
                seen.add(cur)
                orbit.append(cur)
                cur = succ[cur]
            undirected = frozenset((c, p) for c, p, _ in orbit)
            if any(frozenset((c, p) for c, p, _ in o) == undirected for o in circles):
                continue
            circles.append(tuple(orbit))
        return circles

    def end_arc_sets(self):
        """Diagram-arc content of each ending circle (for cube matching)."""
        out = []
        for orbit in self.surgered_circles():
            arcs = set()
            for c, p, _ in orbit:
                arcs.update(self.chunk_arcs[c][p])
            out.append(frozenset(arcs))
        return out

    def segment_end_circle(self):
        """Map (circle, position) segment -> ending circle index."""
        mapping = {}
        for i, orbit in enumerate(self.surgered_circles()):
            for c, p, _ in orbit:
                mapping[(c, p)] = i
        return mapping

    # -- canonical form -------------------------------------------------------

    def _darts(self):
        """Dart structure of the embedded graph.

        Darts: ('s', c, p, w) with w in {0,1}: segment (c,p) end at event p
        (w=0) or event p+1 (w=1); ('a', a, e): arc end at its end-e vertex.
        """
        alpha = {}
        sigma = {}
        tags = {}
        for c, cy in enumerate(self.cycles):
            n = len(cy)
            for p in range(n):
                d0 = ("s", c, p, 0)
                d1 = ("s", c, p, 1)
                alpha[d0] = d1
                alpha[d1] = d0
                tags[d0] = tags[d1] = "s"
        for a in range(self.dimension):
            e0 = ("a", a, 0)
            e1 = ("a", a, 1)
            alpha[e0] = e1
            alpha[e1] = e0
            tags[e0] = "t" if self.tails[a] == 0 else "h"
            tags[e1] = "t" if self.tails[a] == 1 else "h"
        for c, cy in enumerate(self.cycles):
            n = len(cy)
            for p, (a, e) in enumerate(cy):
                out = ("s", c, p, 0)
                inn = ("s", c, (p - 1) % n, 1)
                arc = ("a", a, e)
                side = self.sides[a][e]
                order = (out, arc, inn) if side == "L" else (out, inn, arc)
                for k in range(3):
                    sigma[order[k]] = order[(k + 1) % 3]
        return alpha, sigma, tags

    def canonical(self):
        """Canonical key plus circle orders and automorphisms.

        Returns (key, start_orders, end_orders): start_orders is a list of
        equally-canonical orderings (each a tuple of local circle indices,
        canonical position -> circle); end_orders the matching orderings of
        ending circles (canonical position -> ending-circle index as in
        surgered_circles()).  Multiple entries encode automorphisms.
        """
        alpha, sigma, tags = self._darts()
        darts = sorted(alpha)
        best = None
        best_data = []
        for d0 in darts:
            num = {d0: 0}
            order = [d0]
            i = 0
            while i < len(order):
                d = order[i]
                i += 1
                for nxt in (alpha[d], sigma[d]):
                    if nxt not in num:
                        num[nxt] = len(order)
                        order.append(nxt)
            if len(order) != len(darts):
                raise NotComparable("configuration graph is not connected")
            enc = tuple(
                (num[alpha[d]], num[sigma[d]], tags[d]) for d in order
            )
            if best is None or enc < best:
                best = enc
                best_data = [order]
            elif enc == best:
                best_data.append(order)
        start_orders = []
        end_orders = []
        seg_to_end = self.segment_end_circle()
        n_end = len(set(seg_to_end.values()))
        for order in best_data:
            first_seen = {}
            seg_first = {}
            for k, d in enumerate(order):
                if d[0] == "s":
                    c = d[1]
                    if c not in first_seen:
                        first_seen[c] = k
                    seg = (d[1], d[2])
                    if seg not in seg_first:
                        seg_first[seg] = k
            so = tuple(sorted(first_seen, key=lambda c: first_seen[c]))
            end_first = {}
            for seg, k in seg_first.items():
                e = seg_to_end[seg]
                if e not in end_first or k < end_first[e]:
                    end_first[e] = k
            eo = tuple(sorted(range(n_end), key=lambda e: end_first[e]))
            if (so, eo) not in zip(start_orders, end_orders):
                start_orders.append(so)
                end_orders.append(eo)
        key = "|".join(f"{a},{s},{t}" for a, s, t in best)
        return key, start_orders, end_orders


def effective_class(config):
    """Class data respecting decoration-reversal invariance.

    Returns (key, start_orders, end_orders) of whichever of the
    configuration and its decoration-reversal has the smaller key.
    """
    k1 = config.canonical()
    k2 = config.reversed_decorations().canonical()
    return k1 if k1[0] <= k2[0] else k2


def build_face_configuration(rd_i, rd_j, decoration_bits):
    """The configuration of a cube face, with attachment data.

    ``rd_i`` and ``rd_j`` are the resolved diagrams at the two corners.
    Returns (config, active_start_circles, end_match) where
    active_start_circles maps local config circle index -> circle index in
    the starting resolution, and end_match maps ending-circle index (as in
    config.surgered_circles()) -> circle index in the ending resolution.
    """
    I, J = rd_i.resolution, rd_j.resolution
    if not (I < J):
        raise NotComparable(f"{I!r} is not strictly below {J!r}")
    active = [k for k in range(len(I.bits)) if I.bits[k] != J.bits[k]]
    arc_index = {x: a for a, x in enumerate(active)}
    events_by_circle = {}
    for x in active:
        for site_no, (idx, pos, side, _strand) in enumerate(rd_i.sites[x]):
            events_by_circle.setdefault(idx, []).append(
                (pos, arc_index[x], site_no, side)
            )
    local = sorted(events_by_circle)
    local_index = {ci: k for k, ci in enumerate(local)}
    cycles = []
    chunk_arcs = []
    sides = [[None, None] for _ in active]
    for ci in local:
        events = sorted(events_by_circle[ci])
        circ = rd_i.circles[ci]
        cy = []
        chunks = []
        m = len(events)
        for k, (pos, a, site_no, side) in enumerate(events):
            # arc end numbering: end = site number (site0/site1)
            cy.append((a, site_no))
            sides[a][site_no] = side
            nxt_pos = events[(k + 1) % m][0]
            npos = len(circ.walk)
            arcs = []
            p = pos
            while True:
                arcs.append(circ.arc_seq[p])
                p = (p + 1) % npos
                if p == nxt_pos:
                    break
            chunks.append(tuple(arcs))
        cycles.append(cy)
        chunk_arcs.append(chunks)
    tails = [decoration_bits[x] for x in active]
    config = Configuration(cycles, sides, tails, chunk_arcs)
    # match ending circles to the ending resolution by arc content
    end_sets = config.end_arc_sets()
    end_match = {}
    for e, arcs in enumerate(end_sets):
        candidates = [
            j
            for j, circ in enumerate(rd_j.circles)
            if circ.free_index is None and circ.arcs == arcs
        ]
        if len(candidates) != 1:
            raise AssertionError(
                f"ending circle match failed for face {I!r}->{J!r}: {candidates}"
            )
        end_match[e] = candidates[0]
    return config, local, end_match
