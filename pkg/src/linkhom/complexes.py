"""Filtered GF(2) chain complexes, graded homology, spectral-sequence pages.

The page algorithm is iterated cancellation: repeatedly cancel the
differential components of lowest filtration shift.  Survivors after all
shift-(< r) components are gone form page E_r, and the shift-r components
on those survivors are d_r.  For bounded filtrations this computes the
Leray pages of the filtration, with explicit d_r matrices.
"""

from __future__ import annotations

from .errors import NotAComplex
from .f2 import F2Matrix


class FilteredComplex:
    """Generators with gradings, an integer filtration, and a differential.

    ``gradings`` maps a name ("h", "q", ...) to a per-generator list.
    ``filtration`` is a per-generator integer list; every differential
    entry must strictly increase it.  The differential is column-sparse:
    dict source index -> bitmask of targets.
    """

    def __init__(self, total, gradings, filtration, differential):
        self.total = total
        self.gradings = {k: list(v) for k, v in gradings.items()}
        self.filtration = list(filtration)
        self.differential = {j: bits for j, bits in differential.items() if bits}
        for j, bits in self.differential.items():
            b = bits
            while b:
                low = b & -b
                i = low.bit_length() - 1
                b ^= low
                if self.filtration[i] <= self.filtration[j]:
                    raise ValueError(
                        f"differential entry {j}->{i} does not increase the filtration"
                    )

    def matrix(self):
        return F2Matrix(self.total, self.total, dict(self.differential))

    def check_d_squared(self):
        m = self.matrix()
        sq = m.compose(m)
        if not sq.is_zero():
            j = min(sq.cols)
            raise NotAComplex(f"d^2 != 0 (witness generator {j})", witness=j)

    def grading_vector(self, names):
        """Per-generator tuples of the named gradings."""
        cols = [self.gradings[n] for n in names]
        return [tuple(col[i] for col in cols) for i in range(self.total)]


def graded_homology(complex_, names=()):
    """Homology rank table keyed by the named grading tuple.

    Requires d^2 = 0 (checked) and a differential homogeneous with respect
    to the complementary structure: ranks are computed per graded block of
    the selected tuple, pairing each block with its image blocks.  With
    ``names=()`` this is the total rank.
    """
    complex_.check_d_squared()
    if not names:
        m = complex_.matrix()
        r = m.rank()
        return {(): complex_.total - 2 * r}
    keys = complex_.grading_vector(names)
    groups = {}
    for i, k in enumerate(keys):
        groups.setdefault(k, []).append(i)
    pos = {}
    for k, idxs in groups.items():
        for p, i in enumerate(idxs):
            pos[i] = p
    m = complex_.matrix()
    rank_out = {}
    rank_in = {}
    for k, idxs in sorted(groups.items()):
        # split the outgoing differential of this block by target block
        by_target = {}
        for p, j in enumerate(idxs):
            bits = m.column(j)
            while bits:
                low = bits & -bits
                i = low.bit_length() - 1
                bits ^= low
                tk = keys[i]
                by_target.setdefault(tk, F2Matrix(len(groups[tk]), len(idxs)))
                by_target[tk].add_entry(pos[i], p)
        total_rank = 0
        for tk, block in sorted(by_target.items()):
            r = block.rank()
            rank_in[tk] = rank_in.get(tk, 0) + r
            total_rank += r
        rank_out[k] = total_rank
    out = {}
    for k, idxs in groups.items():
        rank = len(idxs) - rank_out.get(k, 0) - rank_in.get(k, 0)
        if rank:
            out[k] = rank
    return out


class SpectralSequencePage:
    """One page: surviving generator indices, their ranks, and d_r."""

    def __init__(self, r, generators, rank_table, d_r_entries):
        self.r = r
        self.generators = generators  # original generator indices surviving
        self.rank_table = rank_table  # keyed by the requested grading tuple
        self.d_r_entries = d_r_entries  # list of (src, dst) original indices

    def total_rank(self):
        return len(self.generators)


def spectral_pages(complex_, r_max=None, names=("h", "q")):
    """Pages E_0, E_1, E_2, ... of the filtration spectral sequence.

    E_0 and E_1 both equal the full associated graded: the
    filtration-preserving part of the differential vanishes here, since
    every component strictly increases the filtration.  Pages are produced
    through stabilization, or through r_max when given.  Rank tables are
    keyed by the named gradings, which the cancellation preserves because
    every d_r is homogeneous for them (each shift-r component carries one
    fixed grading shift).
    """
    complex_.check_d_squared()
    filt = complex_.filtration
    keys = complex_.grading_vector(names) if names else [()] * complex_.total
    max_shift = (max(filt) - min(filt)) if filt else 0

    alive = sorted(
        range(complex_.total), key=lambda i: (filt[i], i)
    )
    alive_set = set(alive)
    # working differential, column sparse over original indices
    diff = {j: bits for j, bits in complex_.differential.items()}

    def shift_of(j, i):
        return filt[i] - filt[j]

    pages = []
    r = 0
    while True:
        # d_r = the shift-r components present on the current page
        d_r = []
        for j in sorted(diff):
            bits = diff[j]
            while bits:
                low = bits & -bits
                i = low.bit_length() - 1
                bits ^= low
                if shift_of(j, i) == r:
                    d_r.append((j, i))
        table = {}
        for i in alive:
            table[keys[i]] = table.get(keys[i], 0) + 1
        pages.append(SpectralSequencePage(r, list(alive), table, d_r))
        if r_max is not None and r >= r_max:
            break
        if r > max_shift and not diff:
            break
        if r > max_shift:
            # no further differentials possible; flush remaining (none)
            break
        # cancel all shift-r components (cancellation can create new ones)
        while True:
            pair = None
            for j in sorted(diff):
                bits = diff[j]
                while bits:
                    low = bits & -bits
                    i = low.bit_length() - 1
                    bits ^= low
                    if shift_of(j, i) == r:
                        pair = (j, i)
                        break
                if pair:
                    break
            if pair is None:
                break
            j0, i0 = pair
            # cancel generators j0 (source) and i0 (target):
            # for every u -> i0 and j0 -> v, add u -> v
            sources = [u for u, bits in diff.items() if (bits >> i0) & 1 and u != j0]
            targets_bits = diff[j0] & ~(1 << i0)
            for u in sources:
                diff[u] ^= 1 << i0
                diff[u] ^= targets_bits
                if not diff[u]:
                    del diff[u]
            del diff[j0]
            # drop any arrows out of i0 and clear the two generators
            diff.pop(i0, None)
            alive_set.discard(j0)
            alive_set.discard(i0)
            alive = [i for i in alive if i in alive_set]
            # prune arrows into j0 (arrows into a removed source)
            for u in list(diff):
                if (diff[u] >> j0) & 1:
                    diff[u] ^= 1 << j0
                    if not diff[u]:
                        del diff[u]
        r += 1
    return pages


def page_table_json(pages, names=("h", "q")):
    out = []
    for p in pages:
        for key, rank in sorted(p.rank_table.items()):
            row = {"r": p.r, "rank": rank}
            for n, v in zip(names, key):
                row[n] = v
            out.append(row)
    return out
