"""The geometric-spectral-sequence chain complex (Szabó's differential).

The differential is a sum over all faces of the cube of resolutions.
One-dimensional faces carry the Khovanov merge/split maps.  Higher faces
carry maps determined by the diffeomorphism class of their decorated
configuration; the nonzero classes and their matrices live in a bundled
table (data/szabo_table.json) derived by solving the d^2 = 0 equations
for the whole cube against the structural rules:

  (1) sphere-diffeomorphism invariance  (canonical forms; equivariance)
  (2) zero on disconnected active parts
  (3) identity on passive circles
  (4) q~-degree of an i-dimensional map is exactly i - 2
  (5) invariance under reversing all decorations
  (6) duality
  (7) x_p naturality (image filtration at marked points)

with the two-circle two-rung configuration pinned to v+v+ -> v+v+.
Solutions of that system that also pass the rank and invariance oracles
are chain-isomorphic; the bundled one is the minimal-support solution.
"""

from __future__ import annotations

import importlib.resources
import json
from itertools import combinations, product

from .complexes import FilteredComplex
from .configurations import Configuration, build_face_configuration, effective_class
from .diagram import Resolution
from .errors import DecorationsDifferElsewhere, UnclassifiedConfiguration
from .f2 import F2Matrix
from .khovanov import CubeComplex, circle_matching, edge_map


class Decorations:
    """One orientation bit per crossing, interpreted at the all-zeros cube
    corner; every other resolution inherits orientations by quarter-turns.

    With surgery-arc attachment sites numbered so that site 0 is the
    smoothing strand containing slot 0 of the crossing, the quarter-turn
    rule fixes the induced orientation at every resolution to the same
    bit: 0 means the arc points from site 0 to site 1.
    """

    __slots__ = ("bits",)

    def __init__(self, bits):
        self.bits = tuple(int(b) & 1 for b in bits)

    @classmethod
    def from_mask(cls, mask, crossings):
        return cls([(mask >> i) & 1 for i in range(crossings)])

    def flip(self, i):
        bits = list(self.bits)
        bits[i] ^= 1
        return Decorations(bits)

    def __eq__(self, other):
        return isinstance(other, Decorations) and self.bits == other.bits

    def __hash__(self):
        return hash(self.bits)

    def __repr__(self):
        return "t" + "".join(map(str, self.bits))


_TABLE = None


def _load_table():
    global _TABLE
    if _TABLE is None:
        text = (
            importlib.resources.files("linkhom.data")
            .joinpath("szabo_table.json")
            .read_text()
        )
        raw = json.loads(text)
        _TABLE = {k: [tuple(p) for p in v] for k, v in raw.items()}
    return _TABLE


def face_configuration(diagram, I, J, decorations, zero="B"):
    """The decorated configuration of the cube face I -> J."""
    from .diagram import resolve

    rd_i = resolve(diagram, I, zero)
    rd_j = resolve(diagram, J, zero)
    cfg, _, _ = build_face_configuration(rd_i, rd_j, decorations.bits)
    return cfg


def classify(config):
    """Family tag of a configuration.

    Tags: KhovanovEdge (dimension 1), Disconnected, Zero (connected but
    carrying the zero map), and the five families:
      A: merges (one ending circle), E: splits (one starting circle),
      B: mixed one-hub shapes and the self-dual identity shapes,
      C: the all-plus ladder series, D: its all-minus dual.
    """
    if config.dimension == 1:
        return "KhovanovEdge"
    if not config.is_connected():
        return "Disconnected"
    entries = _table_entries(config)
    if not entries:
        return "Zero"
    s = config.start_count
    e = len(config.surgered_circles())
    i = config.dimension
    plus_only = all("-" not in win and "-" not in wout for win, wout in entries)
    minus_only = all("+" not in win and "+" not in wout for win, wout in entries)
    if plus_only and minus_only:
        return "B"
    if plus_only:
        return "C"
    if minus_only:
        return "D"
    if s + e == i + 2:
        if e == 1:
            return "A"
        if s == 1:
            return "E"
        return "B"
    return "B"


def _table_entries(config):
    table = _load_table()
    key, sos, eos = effective_class(config)
    return table.get(key, [])


def config_map(config):
    """Entries of the configuration's map over canonical circle orders.

    Returns (entries, start_order, end_order) where entries is a list of
    (input word, output word) over {+,-}; words follow the canonical
    orders.  One-dimensional configurations return the merge/split map.
    """
    if config.dimension == 1:
        key, sos, eos = effective_class(config)
        s = config.start_count
        e = len(config.surgered_circles())
        if (s, e) == (2, 1):
            entries = [("++", "+"), ("+-", "-"), ("-+", "-")]
        elif (s, e) == (1, 2):
            entries = [("+", "+-"), ("+", "-+"), ("-", "--")]
        else:
            raise UnclassifiedConfiguration(
                f"one-dimensional face with {s} -> {e} circles"
            )
        return entries, sos[0], eos[0]
    if not config.is_connected():
        return [], (), ()
    table = _load_table()
    key, sos, eos = effective_class(config)
    return table.get(key, []), sos[0], eos[0]


def reverse_configuration(config):
    """r(C): all decorations reversed; carries the same map."""
    return config.reversed_decorations()


def dual_configuration(config):
    """C*: the configuration from ending circles back to starting circles.

    Each surgery arc is replaced by its quarter-turn: an arc joining the
    two splice junctions through the surgered band.  In a local picture
    with the band vertical, the dual arc is horizontal: its side flags are
    the originals flipped, and its orientation is the original rotated a
    quarter turn counterclockwise (tail and head junctions swap relative
    to the band).
    """
    succ = {}
    for c, cy in enumerate(config.cycles):
        n = len(cy)
        for p in range(n):
            succ[(c, p, +1)] = (c, (p + 1) % n, +1)
            succ[(c, (p + 1) % n, -1)] = (c, p, -1)
    junctions = {}
    degenerate_flip = {}
    for a in range(config.dimension):
        c1, p1 = config._end_pos[(a, 0)]
        c2, p2 = config._end_pos[(a, 1)]
        s1, s2 = config.sides[a]
        n1 = len(config.cycles[c1])
        n2 = len(config.cycles[c2])
        in1 = (c1, (p1 - 1) % n1, +1)
        out1 = (c1, p1, +1)
        in2 = (c2, (p2 - 1) % n2, +1)
        out2 = (c2, p2, +1)
        # each coincidence among the four local strand pieces (a one-event
        # circle at either end, or feet on adjacent positions of a shared
        # circle) degenerates the band picture and absorbs a half-turn
        coincidences = sum(
            1
            for x, y in ((in1, out1), (in2, out2), (in1, out2), (in2, out1))
            if x == y
        )
        degenerate_flip[a] = coincidences & 1

        def rev(seg):
            return (seg[0], seg[1], -seg[2])

        if s1 == s2:
            pairs = [(in1, out2, s1), (in2, out1, s2)]
            succ[in1] = out2
            succ[in2] = out1
            succ[rev(out2)] = rev(in1)
            succ[rev(out1)] = rev(in2)
        else:
            pairs = [(in1, rev(in2), s1), (rev(out1), out2, s2)]
            succ[in1] = rev(in2)
            succ[in2] = rev(in1)
            succ[rev(out1)] = out2
            succ[rev(out2)] = out1
        junctions[a] = pairs

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
        if any(
            frozenset((c, p) for c, p, _ in o) == undirected for o in circles
        ):
            continue
        circles.append(tuple(orbit))

    where = {}
    for ci, orbit in enumerate(circles):
        for k, seg in enumerate(orbit):
            where[seg] = (ci, k)
    events = {}  # (a, end) -> (circle, insertion slot, side)
    for a, pairs in junctions.items():
        for end, (frm, to, s_orig) in enumerate(pairs):
            # at a self-loop splice (a one-segment bite) the dual arc
            # leaves on the original side; at a through junction it leaves
            # on the far side of the band
            unflip = frm == to
            if to in where:
                spot = where[to]
                side = s_orig if unflip else _flip(s_orig)
            else:
                # the orbit traverses this junction backwards
                spot = where[(frm[0], frm[1], -frm[2])]
                side = _flip(s_orig) if unflip else s_orig
            events[(a, end)] = (spot[0], spot[1], side)
    order = {}
    for (a, end), (ci, k, side) in events.items():
        order.setdefault(ci, []).append((k, a, end, side))
    cycles = [[] for _ in circles]
    sides = [[None, None] for _ in range(config.dimension)]
    for ci in range(len(circles)):
        for (k, a, end, side) in sorted(order.get(ci, [])):
            cycles[ci].append((a, end))
            sides[a][end] = side
    # quarter-turn of the orientation: in the local band picture the dual
    # tail sits at junction 1 - t when the band lies left of the end-0
    # strand, and at junction t otherwise; a degenerate (one-segment bite)
    # junction absorbs one extra half-turn
    tails = []
    for a, t in enumerate(config.tails):
        flip = 1 if config.sides[a][0] == "L" else 0
        flip ^= degenerate_flip[a]
        tails.append(t ^ flip)
    dual = Configuration(cycles, [tuple(s) for s in sides], tails)
    # correspondences: the dual's circle ci is the surgered circle ci of
    # the original; each dual segment carries the original start circle
    # its pieces came from, so the dual's ending circles can be matched
    # back to original starting circles
    slots = {}
    for ci in range(len(circles)):
        evs = sorted(order.get(ci, []))
        slots[ci] = [k for (k, _a, _e, _s) in evs]
    origin = {}
    for ci in range(len(circles)):
        sl = slots[ci]
        for k in range(len(sl)):
            seg = circles[ci][sl[k]]
            origin[(ci, k)] = seg[0]
    dual._segment_origin = origin
    return dual


def end_correspondence(config):
    """Map ending-circle index -> original starting circle, for duals.

    Defined for configurations carrying _segment_origin (duals and their
    mirrors).  Every segment of an ending circle must agree on its origin;
    this is asserted."""
    origin = config._segment_origin
    out = {}
    for e, orbit in enumerate(config.surgered_circles()):
        origins = {origin[(ci, k)] for ci, k, _dir in orbit}
        assert len(origins) == 1, (
            f"inconsistent segment origins for ending circle {e}: {origins}"
        )
        out[e] = origins.pop()
    return out


def _flip(side):
    return "R" if side == "L" else "L"


def mirror_dual_configuration(config):
    """m(C*): the dual configuration reflected (antipodal image)."""
    return mirror_configuration(dual_configuration(config))


def mirror_configuration(config):
    """The reflected configuration: cyclic orders reversed, sides flipped."""
    cycles = []
    for c, cy in enumerate(config.cycles):
        n = len(cy)
        rev = [cy[(n - 1 - k) % n] for k in range(n)]
        cycles.append(rev)
    sides = [(_flip(s0), _flip(s1)) for s0, s1 in config.sides]
    out = Configuration(cycles, sides, list(config.tails))
    if hasattr(config, "_segment_origin"):
        origin = {}
        for (ci, k), circ in config._segment_origin.items():
            n = len(config.cycles[ci])
            origin[(ci, (n - 2 - k) % n)] = circ
        out._segment_origin = origin
    return out


def symmetries(config):
    """(r(C), C*, m(C*)) per the reversal and duality rules."""
    return (
        reverse_configuration(config),
        dual_configuration(config),
        mirror_dual_configuration(config),
    )


def label_dual(word):
    """The label duality x -> x*: swap + and - signs."""
    return "".join("+" if ch == "-" else "-" for ch in word)


class SzaboComplex(FilteredComplex):
    """The full complex with its cube bookkeeping attached."""

    def __init__(self, cube, decorations, differential):
        self.cube = cube
        self.decorations = decorations
        gradings = {
            "h": cube.h,
            "qt": cube.qt,
            "q": cube.q,
        }
        super().__init__(cube.total, gradings, list(cube.weight), differential)


def _face_entries(cube, I, J, decorations):
    """Global (src, dst) index pairs contributed by the face I -> J."""
    dim = J.weight - I.weight
    rd_i = cube.resolved[I.bits]
    rd_j = cube.resolved[J.bits]
    oi = cube.offsets[I.bits]
    oj = cube.offsets[J.bits]
    if dim == 1:
        return [(oi + u, oj + v) for u, v in edge_map(cube, I, J)]
    cfg, local, end_match = build_face_configuration(rd_i, rd_j, decorations.bits)
    if not cfg.is_connected():
        return []
    entries, so, eo = config_map(cfg)
    if not entries:
        return []
    ni, nj = rd_i.circle_count, rd_j.circle_count
    active_src = set(local)
    active_dst = set(end_match.values())
    passive_pairs = [
        (a, b)
        for a, b in circle_matching(rd_i, rd_j)[0]
        if a not in active_src and b not in active_dst
    ]
    out = []
    for win, wout in entries:
        for pcode in range(1 << len(passive_pairs)):
            src_labels = [0] * ni
            dst_labels = [0] * nj
            for t, (a, b) in enumerate(passive_pairs):
                bit = (pcode >> t) & 1
                src_labels[a] = bit
                dst_labels[b] = bit
            for pos in range(len(so)):
                src_labels[local[so[pos]]] = 1 if win[pos] == "+" else 0
            for pos in range(len(eo)):
                dst_labels[end_match[eo[pos]]] = 1 if wout[pos] == "+" else 0
            u = sum(b << (ni - 1 - k) for k, b in enumerate(src_labels))
            v = sum(b << (nj - 1 - k) for k, b in enumerate(dst_labels))
            out.append((oi + u, oj + v))
    return out


def szabo_complex(diagram, decorations=None, zero="B"):
    """Assemble the full differential over all faces of the cube."""
    if decorations is None:
        decorations = Decorations([0] * diagram.crossing_count)
    cube = CubeComplex(diagram, zero)
    c = cube.c
    diff = {}
    for code in range(1 << c):
        I = Resolution(tuple((code >> (c - 1 - i)) & 1 for i in range(c)))
        free = [i for i in range(c) if not I.bits[i]]
        for r in range(1, len(free) + 1):
            for chosen in combinations(free, r):
                J = I
                for i in chosen:
                    J = J.flip(i)
                for u, v in _face_entries(cube, I, J, decorations):
                    diff[u] = diff.get(u, 0) ^ (1 << v)
    diff = {u: bits for u, bits in diff.items() if bits}
    return SzaboComplex(cube, decorations, diff)


def differential_by_dimension(complex_):
    """Split the differential by face dimension (= weight shift)."""
    out = {}
    w = complex_.filtration
    for u, bits in complex_.differential.items():
        b = bits
        while b:
            low = b & -b
            v = low.bit_length() - 1
            b ^= low
            i = w[v] - w[u]
            out.setdefault(i, []).append((u, v))
    return out


def edge_homotopy(diagram, t, t_prime, crossing, zero="B"):
    """A map H with (Id + H) d_t = d_t' (Id + H), localized at the flipped
    crossing.

    H is found by solving the chain-map equation over GF(2).  Its support
    is local: components act on the labels of the circles at the flipped
    crossing, within one resolution or along cube faces that flip it,
    always strictly below the identity in the descending-q filtration
    (q-degree >= 1, like the higher differentials).  Identity on all other
    circles.  Deterministic pivoting makes the result reproducible.
    """
    if t.bits[crossing] == t_prime.bits[crossing] or any(
        a != b
        for i, (a, b) in enumerate(zip(t.bits, t_prime.bits))
        if i != crossing
    ):
        raise DecorationsDifferElsewhere(
            "decorations must differ exactly at the given crossing"
        )
    c1 = szabo_complex(diagram, t, zero)
    c2 = szabo_complex(diagram, t_prime, zero)
    cube = c1.cube
    d1 = c1.matrix()
    d2 = c2.matrix()
    target = d1 + d2  # = d2 H + H d1 required

    # unknowns: local label maps, expanded over passive labelings
    unknowns = []  # list of entry lists [(u, v), ...] sharing one variable
    qt = cube.qt
    for I in cube.resolutions:
        rd = cube.resolved[I.bits]
        base = cube.offsets[I.bits]
        n = rd.circle_count
        touched = sorted({idx for idx, _, _, _ in rd.sites.get(crossing, ())})
        if not touched:
            continue
        tbits = 0
        for idx in touched:
            tbits |= 1 << (n - 1 - idx)
        rest_positions = [k for k in range(n) if not (tbits >> (n - 1 - k)) & 1]
        # diagonal components: q~ strictly rises on the touched circles
        # (the filtration descends in q: every differential part has
        # q-degree 2i-2 >= 0 and H sits strictly above the identity)
        for src_local in _submasks(tbits):
            for dst_local in _submasks(tbits):
                if bin(dst_local).count("1") <= bin(src_local).count("1"):
                    continue
                entries = []
                for rest in _submasks(
                    ((1 << n) - 1) & ~tbits
                ):
                    u = base + (rest | src_local)
                    v = base + (rest | dst_local)
                    entries.append((u, v))
                unknowns.append(entries)
        # components along every face that flips the crossing
        if not I.bits[crossing]:
            others = [k for k in range(cube.c) if k != crossing and not I.bits[k]]
            from .configurations import build_face_configuration
            from .khovanov import circle_matching

            for r in range(len(others) + 1):
                for extra in combinations(others, r):
                    J = I.flip(crossing)
                    for k in extra:
                        J = J.flip(k)
                    rd_j = cube.resolved[J.bits]
                    base_j = cube.offsets[J.bits]
                    nj = rd_j.circle_count
                    dh = J.weight - I.weight
                    cfg, local, end_match = build_face_configuration(
                        rd, rd_j, t.bits
                    )
                    if not cfg.is_connected():
                        continue
                    active_src = set(local)
                    active_dst = set(end_match.values())
                    passive = [
                        (a, b)
                        for a, b in circle_matching(rd, rd_j)[0]
                        if a not in active_src and b not in active_dst
                    ]
                    ends = sorted(active_dst)
                    for src_word in product((0, 1), repeat=len(local)):
                        for dst_word in product((0, 1), repeat=len(ends)):
                            dqt = (
                                2 * sum(dst_word) - len(ends)
                                - (2 * sum(src_word) - len(local))
                            )
                            if dqt + dh <= 0:  # q-degree must be >= +1
                                continue
                            entries = []
                            for pcode in range(1 << len(passive)):
                                su = [0] * n
                                sv = [0] * nj
                                for tpos, (a, b) in enumerate(passive):
                                    bit = (pcode >> tpos) & 1
                                    su[a] = bit
                                    sv[b] = bit
                                for k, idx in enumerate(local):
                                    su[idx] = src_word[k]
                                for k, idx in enumerate(ends):
                                    sv[idx] = dst_word[k]
                                u = base + sum(
                                    b << (n - 1 - k) for k, b in enumerate(su)
                                )
                                v = base_j + sum(
                                    b << (nj - 1 - k) for k, b in enumerate(sv)
                                )
                                entries.append((u, v))
                            unknowns.append(entries)

    rows = {}
    d1_into = {}
    for u in range(cube.total):
        bits = d1.column(u)
        while bits:
            low = bits & -bits
            v = low.bit_length() - 1
            bits ^= low
            d1_into.setdefault(v, []).append(u)
    for k, entries in enumerate(unknowns):
        for (u, v) in entries:
            bits = d2.column(v)
            while bits:
                low = bits & -bits
                w = low.bit_length() - 1
                bits ^= low
                rows[(u, w)] = rows.get((u, w), 0) ^ (1 << k)
            for u2 in d1_into.get(u, ()):
                rows[(u2, v)] = rows.get((u2, v), 0) ^ (1 << k)
    for u in range(cube.total):
        bits = target.column(u)
        while bits:
            low = bits & -bits
            w = low.bit_length() - 1
            bits ^= low
            rows.setdefault((u, w), 0)

    pivots = {}
    for (u, w), mask in sorted(rows.items()):
        cst = target.get(w, u)
        placed = False
        while mask:
            p = (mask & -mask).bit_length() - 1
            if p in pivots:
                pm, pc = pivots[p]
                mask ^= pm
                cst ^= pc
            else:
                pivots[p] = (mask, cst)
                placed = True
                break
        if not placed and cst:
            raise ArithmeticError(
                "no local edge homotopy exists; widen the support"
            )
    assign = {}
    for p in sorted(pivots, reverse=True):
        mask, cst = pivots[p]
        val = cst
        m2 = mask & ~(1 << p)
        while m2:
            q = (m2 & -m2).bit_length() - 1
            m2 ^= 1 << q
            val ^= assign.get(q, 0)
        assign[p] = val
    cols = {}
    for k, entries in enumerate(unknowns):
        if assign.get(k, 0):
            for (u, v) in entries:
                cols.setdefault(u, 0)
                cols[u] ^= 1 << v
    H = F2Matrix(cube.total, cube.total, {u: b for u, b in cols.items() if b})
    one_plus_h = F2Matrix.identity(cube.total) + H
    if one_plus_h.compose(d1) != d2.compose(one_plus_h):
        raise ArithmeticError("edge homotopy verification failed")
    return H


def decoration_seeds(crossings, count=5):
    """Deterministic decoration sample: all-zeros, all-ones, alternating,
    plus seeded random masks."""
    import random as _random

    seeds = [
        Decorations([0] * crossings),
        Decorations([1] * crossings),
        Decorations([i % 2 for i in range(crossings)]),
    ]
    rng = _random.Random(1234 + crossings)
    while len(seeds) < count:
        cand = Decorations([rng.randint(0, 1) for _ in range(crossings)])
        if cand not in seeds:
            seeds.append(cand)
    return seeds[:count]


def _submasks(mask):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask
