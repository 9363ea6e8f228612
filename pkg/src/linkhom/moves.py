"""Reidemeister-move surgery on PD codes.

Used to build move-related diagram pairs and random planar diagrams for
property sweeps.  Moves are performed on the PD data directly; the parser
re-validates planarity afterwards.
"""

from __future__ import annotations

import random

from .diagram import PlanarDiagram


def _fresh_labels(diagram, k):
    top = max(diagram.arcs, default=0)
    return list(range(top + 1, top + 1 + k))


def add_kink(diagram, arc, positive=True):
    """R1: insert a kink on the given arc.  Adds one crossing."""
    b, loop = _fresh_labels(diagram, 2)
    crossings = [list(t) for t in diagram.crossings]
    ci, p = diagram.arc_darts[arc][1]
    crossings[ci][p] = b
    if positive:
        crossings.append([arc, b, loop, loop])
    else:
        crossings.append([arc, loop, loop, b])
    signs = list(diagram.signs) + [1 if positive else -1]
    return PlanarDiagram(crossings, signs, diagram.free_circles)


def poke(diagram, face, arc_a, arc_c):
    """R2: push a bight of arc_a across arc_c through the given face.

    Both arcs must lie on the face boundary.  Adds two crossings of
    opposite sign.  Orienting each arc so the face sits on its right, the
    bight of ``arc_a`` dips across ``arc_c``; the two new crossings are
        P = X(e, a, d, m),   Q = X(c, b, e, m)
    with m the bight bottom, b the tail of arc_a past the poke, e the piece
    of arc_c between the crossings and d its tail.
    """
    sides = {}
    for arc, s in face.boundary:
        sides.setdefault(arc, s)
    if arc_a == arc_c or arc_a not in sides or arc_c not in sides:
        raise ValueError("poke needs two distinct arcs on the face boundary")
    m, b, e, d = _fresh_labels(diagram, 4)
    crossings = [list(t) for t in diagram.crossings]
    # the traversal with the face on the right runs min-dart -> max-dart
    # when the recorded side is 0; the far end is where the tail attaches
    da = diagram.arc_darts[arc_a][1 if sides[arc_a] == 0 else 0]
    dc = diagram.arc_darts[arc_c][1 if sides[arc_c] == 0 else 0]
    crossings[da[0]][da[1]] = b
    crossings[dc[0]][dc[1]] = d
    crossings.append([e, arc_a, d, m])
    crossings.append([arc_c, b, e, m])
    signs = list(diagram.signs) + [None, None]
    return PlanarDiagram(crossings, signs, diagram.free_circles)


def random_knot_diagram(max_crossings, seed):
    """A random planar knot diagram built from R1/R2 moves on the unknot.

    Always a one-component diagram, so signs are derivable.
    """
    rng = random.Random(seed)
    d = PlanarDiagram([(1, 2, 2, 1)], None, 0)  # one negative kink
    while d.crossing_count < max_crossings:
        room = max_crossings - d.crossing_count
        if room >= 2 and rng.random() < 0.5:
            faces = [f for f in d.faces() if len({a for a, _ in f.boundary}) >= 2]
            if not faces:
                continue
            f = rng.choice(faces)
            arcs = sorted({a for a, _ in f.boundary})
            a, c = rng.sample(arcs, 2)
            try:
                d = poke(d, f, a, c)
            except Exception:
                continue
        else:
            arc = rng.choice(d.arcs)
            d = add_kink(d, arc, positive=rng.random() < 0.5)
    return d
