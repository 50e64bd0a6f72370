"""Linear algebra over F2 for the witness searches.

Unknowns are exponents e_g in {0, 1} of generators g; each equation says that
a sum of selected exponents equals a given bit.  Rows are int bitmasks."""

from typing import List, Optional, Sequence


def solve(rows: Sequence[int], rhs: Sequence[int], ncols: int) -> Optional[List[int]]:
    """Return one solution x in F2^ncols of  (row_i . x) = rhs_i  for all i,
    free variables set to zero, or None if inconsistent."""
    pivots = []  # (col, row_mask, rhs)
    for r, b in zip(rows, rhs):
        r &= (1 << ncols) - 1
        b &= 1
        for col, prow, pb in pivots:
            if r >> col & 1:
                r ^= prow
                b ^= pb
        if r == 0:
            if b:
                return None
            continue
        col = r.bit_length() - 1
        # keep the basis fully reduced on pivot columns
        reduced = []
        for c2, prow, pb in pivots:
            if prow >> col & 1:
                prow ^= r
                pb ^= b
            reduced.append((c2, prow, pb))
        pivots = reduced + [(col, r, b)]
    x = [0] * ncols
    for col, prow, pb in pivots:
        x[col] = pb  # free variables are 0, and rows are reduced on pivots
    return x


def columns_to_rows(columns: Sequence[Sequence[int]], nrows: int) -> List[int]:
    """Transpose a list of column bit-vectors into row bitmasks."""
    rows = [0] * nrows
    for j, col in enumerate(columns):
        for i in range(nrows):
            if col[i] & 1:
                rows[i] |= 1 << j
    return rows
