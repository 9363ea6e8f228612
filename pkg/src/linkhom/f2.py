"""Sparse linear algebra over GF(2).

Matrices are stored column-wise: column j is a Python int whose set bits
are the row indices hit by basis vector j.  Python ints give bit-packed
rows for free and XOR is the whole field arithmetic.

Pivoting is deterministic (lowest index first) so ranks, kernels and
reductions are reproducible run to run.
"""

from __future__ import annotations

from .errors import DimensionMismatch


class F2Matrix:
    """A sparse matrix over GF(2) viewed as a map F2^ncols -> F2^nrows."""

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows, ncols, cols=None):
        self.nrows = nrows
        self.ncols = ncols
        # column index -> bitmask of row indices; absent column = zero
        self.cols = {}
        if cols:
            for j, bits in cols.items():
                if bits:
                    if j < 0 or j >= ncols:
                        raise IndexError(f"column {j} out of range")
                    if bits >> nrows:
                        raise IndexError(f"row bits out of range in column {j}")
                    self.cols[j] = bits

    @classmethod
    def zero(cls, nrows, ncols):
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {j: 1 << j for j in range(n)})

    @classmethod
    def from_entries(cls, nrows, ncols, entries):
        cols = {}
        for i, j in entries:
            cols[j] = cols.get(j, 0) ^ (1 << i)
        return cls(nrows, ncols, cols)

    def entries(self):
        """Sorted (row, col) pairs of nonzero entries."""
        out = []
        for j, bits in self.cols.items():
            while bits:
                low = bits & -bits
                out.append((low.bit_length() - 1, j))
                bits ^= low
        out.sort()
        return out

    def get(self, i, j):
        return (self.cols.get(j, 0) >> i) & 1

    def add_entry(self, i, j):
        self.cols[j] = self.cols.get(j, 0) ^ (1 << i)
        if not self.cols[j]:
            del self.cols[j]

    def column(self, j):
        return self.cols.get(j, 0)

    def is_zero(self):
        return not self.cols

    def nnz(self):
        return sum(bits.bit_count() for bits in self.cols.values())

    def apply(self, vec):
        """Image of a vector given as a bitmask over columns."""
        out = 0
        v = vec
        while v:
            low = v & -v
            out ^= self.cols.get(low.bit_length() - 1, 0)
            v ^= low
        return out

    def compose(self, other):
        """self o other, i.e. apply other first."""
        if other.nrows != self.ncols:
            raise DimensionMismatch(
                f"cannot compose {self.nrows}x{self.ncols} with "
                f"{other.nrows}x{other.ncols}"
            )
        cols = {}
        for j, bits in other.cols.items():
            img = self.apply(bits)
            if img:
                cols[j] = img
        return F2Matrix(self.nrows, other.ncols, cols)

    def __add__(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatch("matrix shapes differ")
        cols = dict(self.cols)
        for j, bits in other.cols.items():
            cols[j] = cols.get(j, 0) ^ bits
            if not cols[j]:
                del cols[j]
        return F2Matrix(self.nrows, self.ncols, cols)

    def __eq__(self, other):
        return (
            isinstance(other, F2Matrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.cols == other.cols
        )

    def transpose(self):
        cols = {}
        for i, j in self.entries():
            cols[i] = cols.get(i, 0) ^ (1 << j)
        return F2Matrix(self.ncols, self.nrows, cols)

    def rank(self):
        return self._eliminate()[0]

    def kernel_basis(self):
        """Basis vectors (bitmasks over columns) of the kernel."""
        return self._eliminate()[1]

    def _eliminate(self):
        """Column elimination with lowest-pivot-first ordering.

        Returns (rank, kernel basis).  Each working column drags along the
        combination of original columns that produced it, so kernel vectors
        fall out of the zero columns.
        """
        pivots = {}  # pivot row -> (column bits, combination bits)
        kernel = []
        rank = 0
        for j in range(self.ncols):
            col = self.cols.get(j, 0)
            comb = 1 << j
            while col:
                p = (col & -col).bit_length() - 1
                if p in pivots:
                    pc, pcomb = pivots[p]
                    col ^= pc
                    comb ^= pcomb
                else:
                    pivots[p] = (col, comb)
                    rank += 1
                    col = 0
                    comb = 0
            if comb:
                kernel.append(comb)
        return rank, kernel

    def __repr__(self):
        return f"F2Matrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def f2_rank(mat):
    return mat.rank()


def f2_kernel(mat):
    return mat.kernel_basis()
