"""The Khovanov chain complex of a diagram over GF(2).

Chain groups are V^(tensor n) per resolution with V = span{v+, v-}; a
generator is a bit vector over the circles of the resolution (bit 1 = v+).
Generators are globally indexed lexicographically in (resolution bits,
label bits), most significant first.

Gradings (per the conventions of this package):
    h(x) = |I| - n-            with the default resolution convention,
    q(x) = q~(x) + h(x) + n+ - 2 n-
and for the usual Khovanov convention (zero="A"):
    q(x) = q~(x) + |I| + n+ - 2 n-.
"""

from __future__ import annotations

from .diagram import Resolution, resolve
from .errors import NotASuccessor
from .f2 import F2Matrix


class Labeling:
    """A canonical generator: a resolution plus one bit per circle."""

    __slots__ = ("resolution", "labels")

    def __init__(self, resolution, labels):
        self.resolution = resolution
        self.labels = tuple(int(b) for b in labels)

    @property
    def qtilde(self):
        n = len(self.labels)
        plus = sum(self.labels)
        return 2 * plus - n

    def __eq__(self, other):
        return (
            isinstance(other, Labeling)
            and self.resolution == other.resolution
            and self.labels == other.labels
        )

    def __hash__(self):
        return hash((self.resolution, self.labels))

    def __repr__(self):
        word = "".join("+" if b else "-" for b in self.labels)
        return f"<{self.resolution!r}:{word}>"


def chain_group(resolved):
    """All 2^n labelings of a resolved diagram, in canonical order."""
    n = resolved.circle_count
    out = []
    for code in range(1 << n):
        labels = [(code >> (n - 1 - i)) & 1 for i in range(n)]
        out.append(Labeling(resolved.resolution, labels))
    return out


class CubeComplex:
    """Shared indexing for cube-of-resolutions complexes.

    Attributes:
        diagram, zero: inputs.
        resolved: dict Resolution.bits -> ResolvedDiagram.
        offsets:  dict Resolution.bits -> first global generator index.
        total:    generator count.
        h, qt, q: per-generator grading arrays.
        weight:   per-generator cube weight |I| (the filtration).
    """

    def __init__(self, diagram, zero="B"):
        self.diagram = diagram
        self.zero = zero
        c = diagram.crossing_count
        self.c = c
        np_, nm = (diagram.n_plus, diagram.n_minus) if c else (0, 0)
        self.n_plus, self.n_minus = np_, nm
        self.resolutions = []
        self.resolved = {}
        self.offsets = {}
        total = 0
        for code in range(1 << c):
            bits = tuple((code >> (c - 1 - i)) & 1 for i in range(c))
            res = Resolution(bits)
            rd = resolve(diagram, res, zero)
            self.resolutions.append(res)
            self.resolved[bits] = rd
            self.offsets[bits] = total
            total += 1 << rd.circle_count
        self.total = total
        self.h = [0] * total
        self.qt = [0] * total
        self.q = [0] * total
        self.weight = [0] * total
        for res in self.resolutions:
            rd = self.resolved[res.bits]
            n = rd.circle_count
            base = self.offsets[res.bits]
            w = res.weight
            hh = w - nm
            for code in range(1 << n):
                qt = 2 * bin(code).count("1") - n
                idx = base + code
                self.weight[idx] = w
                self.h[idx] = hh
                self.qt[idx] = qt
                if zero == "B":
                    self.q[idx] = qt + hh + np_ - 2 * nm
                else:
                    self.q[idx] = qt + w + np_ - 2 * nm

    def index(self, labeling):
        bits = labeling.resolution.bits
        rd = self.resolved[bits]
        n = rd.circle_count
        code = 0
        for i, b in enumerate(labeling.labels):
            code |= b << (n - 1 - i)
        return self.offsets[bits] + code

    def labeling(self, idx):
        for res in reversed(self.resolutions):
            base = self.offsets[res.bits]
            if idx >= base:
                n = self.resolved[res.bits].circle_count
                code = idx - base
                labels = [(code >> (n - 1 - i)) & 1 for i in range(n)]
                return Labeling(res, labels)
        raise IndexError(idx)

    def block(self, bits):
        """(offset, size) of one resolution's summand."""
        n = self.resolved[bits].circle_count
        return self.offsets[bits], 1 << n


def circle_matching(rd_from, rd_to):
    """Match circles across an edge or face of the cube by shared arcs.

    Returns (passive pairs, active_from, active_to) where passive pairs are
    (index_from, index_to) of circles with identical arc content.
    """
    to_lookup = {}
    for j, circ in enumerate(rd_to.circles):
        key = circ.arcs if circ.free_index is None else ("o", circ.free_index)
        to_lookup[key] = j
    passive = []
    active_from = []
    matched_to = set()
    for i, circ in enumerate(rd_from.circles):
        key = circ.arcs if circ.free_index is None else ("o", circ.free_index)
        if key in to_lookup:
            j = to_lookup[key]
            passive.append((i, j))
            matched_to.add(j)
        else:
            active_from.append(i)
    active_to = [j for j in range(len(rd_to.circles)) if j not in matched_to]
    return passive, active_from, active_to


def edge_map(cube, I, J):
    """The merge/split map along one cube edge, as a sparse block.

    Returns a list of (src_local, dst_local) index pairs relative to the two
    resolutions' blocks, plus the blocks' global offsets.
    """
    if not (I < J and J.weight == I.weight + 1):
        raise NotASuccessor(f"{I!r} is not an immediate predecessor of {J!r}")
    rd_i = cube.resolved[I.bits]
    rd_j = cube.resolved[J.bits]
    passive, act_i, act_j = circle_matching(rd_i, rd_j)
    ni, nj = rd_i.circle_count, rd_j.circle_count
    entries = []
    if len(act_i) == 2 and len(act_j) == 1:
        kind = "merge"
    elif len(act_i) == 1 and len(act_j) == 2:
        kind = "split"
    else:  # pragma: no cover - circle count always changes by one
        raise AssertionError("edge must merge or split exactly one circle")
    for code in range(1 << ni):
        labels = [(code >> (ni - 1 - k)) & 1 for k in range(ni)]
        out_base = [0] * nj
        for i_idx, j_idx in passive:
            out_base[j_idx] = labels[i_idx]
        if kind == "merge":
            a, b = labels[act_i[0]], labels[act_i[1]]
            # m(v+v+)=v+, m(v+v-)=m(v-v+)=v-, m(v-v-)=0
            if a and b:
                outs = [1]
            elif a or b:
                outs = [0]
            else:
                outs = None
            if outs is None:
                continue
            out_base[act_j[0]] = outs[0]
            targets = [tuple(out_base)]
        else:
            a = labels[act_i[0]]
            j1, j2 = act_j
            targets = []
            if a:
                # Delta(v+) = v+v- + v-v+
                t1 = list(out_base)
                t1[j1], t1[j2] = 1, 0
                t2 = list(out_base)
                t2[j1], t2[j2] = 0, 1
                targets = [tuple(t1), tuple(t2)]
            else:
                t1 = list(out_base)
                t1[j1] = t1[j2] = 0
                targets = [tuple(t1)]
        for t in targets:
            code_t = 0
            for k, b in enumerate(t):
                code_t |= b << (nj - 1 - k)
            entries.append((code, code_t))
    return entries


class GradedComplex:
    """A chain complex on a cube of resolutions with sparse GF(2) differential.

    ``differential`` maps generator index -> bitmask of target indices
    (column-sparse); use :meth:`matrix` for an F2Matrix view.
    """

    def __init__(self, cube, differential):
        self.cube = cube
        self.differential = differential

    @property
    def total(self):
        return self.cube.total

    def matrix(self):
        return F2Matrix(self.total, self.total, dict(self.differential))

    def d_squared_is_zero(self):
        m = self.matrix()
        return m.compose(m).is_zero()

    def gradings(self):
        return self.cube.h, self.cube.qt, self.cube.q


def khovanov_complex(diagram, zero="B"):
    """Assemble the full Khovanov complex over all 2^c resolutions."""
    cube = CubeComplex(diagram, zero)
    diff = {}
    c = cube.c
    for I in cube.resolutions:
        for i in range(c):
            if I.bits[i]:
                continue
            J = I.flip(i)
            oi = cube.offsets[I.bits]
            oj = cube.offsets[J.bits]
            for src, dst in edge_map(cube, I, J):
                g = oi + src
                diff[g] = diff.get(g, 0) ^ (1 << (oj + dst))
    return GradedComplex(cube, diff)


def bigraded_ranks(complex_, use_q=True):
    """Bigraded homology ranks of a complex whose differential preserves q.

    Returns dict (h, q) -> rank.
    """
    cube = complex_.cube
    m = complex_.matrix()
    groups = {}
    for idx in range(cube.total):
        key = (cube.h[idx], cube.q[idx] if use_q else cube.qt[idx])
        groups.setdefault(key, []).append(idx)
    pos = {}
    for key, idxs in groups.items():
        for k, idx in enumerate(idxs):
            pos[idx] = k
    ranks_in = {}
    ranks_out = {}
    for key, idxs in sorted(groups.items()):
        h, q = key
        tgt_key = (h + 1, q)
        tgt = groups.get(tgt_key, [])
        block = F2Matrix(len(tgt), len(idxs))
        for k, idx in enumerate(idxs):
            bits = m.column(idx)
            col = 0
            while bits:
                low = bits & -bits
                j = low.bit_length() - 1
                bits ^= low
                if (cube.h[j], cube.q[j] if use_q else cube.qt[j]) == tgt_key:
                    col |= 1 << pos[j]
            if col:
                block.cols[k] = col
        r = block.rank()
        ranks_out[key] = r
        ranks_in[tgt_key] = ranks_in.get(tgt_key, 0) + r
    out = {}
    for key, idxs in groups.items():
        rank = len(idxs) - ranks_out.get(key, 0) - ranks_in.get(key, 0)
        if rank:
            out[key] = rank
    return out


def graded_euler_characteristic(diagram, zero="B"):
    """Euler characteristic as a Laurent polynomial in q."""
    from .laurent import Laurent

    cube = CubeComplex(diagram, zero)
    coeffs = {}
    for idx in range(cube.total):
        sgn = -1 if cube.h[idx] % 2 else 1
        coeffs[cube.q[idx]] = coeffs.get(cube.q[idx], 0) + sgn
    return Laurent(coeffs)
