"""Block operator matrices over direct sums and their scalar compressions."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .berezin import SearchConfig, berezin_number
from .cmatrix import as_matrix, gelfand_spectral_radius, matrix_from_json, matrix_to_json, operator_norm
from .errors import ShapeMismatch
from .radii import numerical_radius
from .report import CheckReport, combine, make_report
from .rkhs import DirectSumSpace, block_offsets, parse_space

COMPRESS_MODES = ("hou-norm", "ber-diag")


@dataclass(frozen=True, eq=False)
class BlockOperator:
    blocks: tuple  # n x n tuple of tuples of arrays
    spaces: DirectSumSpace
    flat: np.ndarray

    @property
    def n(self) -> int:
        return len(self.blocks)

    def block(self, i: int, j: int) -> np.ndarray:
        return self.blocks[i][j]


def assemble(blocks, spaces: DirectSumSpace) -> BlockOperator:
    """Assemble an ``n x n`` grid of blocks into one matrix over ``spaces``.

    Block ``(i, j)`` maps component ``j`` into component ``i`` and must have
    shape ``(dim_i, dim_j)``.
    """
    dims = spaces.dims
    n = len(dims)
    if len(blocks) != n or any(len(row) != n for row in blocks):
        raise ShapeMismatch(f"expected a {n}x{n} block grid")
    offs = block_offsets(spaces)
    flat = np.zeros((spaces.dim, spaces.dim), dtype=np.complex128)
    grid = []
    for i, row in enumerate(blocks):
        out_row = []
        for j, blk in enumerate(row):
            m = as_matrix(blk)
            if m.shape != (dims[i], dims[j]):
                raise ShapeMismatch(f"block ({i}, {j}) has shape {m.shape}, expected {(dims[i], dims[j])}")
            m.setflags(write=False)
            flat[offs[i] : offs[i] + dims[i], offs[j] : offs[j] + dims[j]] = m
            out_row.append(m)
        grid.append(tuple(out_row))
    flat.setflags(write=False)
    return BlockOperator(tuple(grid), spaces, flat)


def disassemble(flat, spaces: DirectSumSpace) -> tuple:
    flat = np.asarray(flat)
    if flat.shape != (spaces.dim, spaces.dim):
        raise ShapeMismatch(f"flat operator shape {flat.shape} does not match {spaces.dim}")
    offs, dims = block_offsets(spaces), spaces.dims
    return tuple(
        tuple(flat[oi : oi + di, oj : oj + dj].copy() for oj, dj in zip(offs, dims))
        for oi, di in zip(offs, dims)
    )


def _zeros(r: int, c: int) -> np.ndarray:
    return np.zeros((r, c), dtype=np.complex128)


def off_diag(x, y, spaces: DirectSumSpace) -> BlockOperator:
    """``[[0, x], [y, 0]]`` over a two-component sum."""
    if len(spaces) != 2:
        raise ShapeMismatch("off-diagonal operators need exactly two components")
    d1, d2 = spaces.dims
    return assemble([[_zeros(d1, d1), x], [y, _zeros(d2, d2)]], spaces)


def embed_corner(x, spaces: DirectSumSpace) -> BlockOperator:
    """``x`` in the top-left block, zeros elsewhere."""
    dims = spaces.dims
    blocks = [[_zeros(di, dj) for dj in dims] for di in dims]
    blocks[0][0] = x
    return assemble(blocks, spaces)


def diag_blocks(ds, spaces: DirectSumSpace) -> BlockOperator:
    dims = spaces.dims
    blocks = [[_zeros(di, dj) for dj in dims] for di in dims]
    for i, d in enumerate(ds):
        blocks[i][i] = d
    return assemble(blocks, spaces)


def compress(t: BlockOperator, mode: str, cfg: SearchConfig | None = None) -> np.ndarray:
    """Entrywise-nonnegative ``n x n`` compression of a block operator.

    ``hou-norm`` puts ``||T_ij||`` everywhere; ``ber-diag`` puts the Berezin
    number estimate of ``T_ii`` (over component ``i``) on the diagonal.
    """
    if mode not in COMPRESS_MODES:
        raise ValueError(f"unknown compression mode {mode!r}")
    n = t.n
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            blk = t.blocks[i][j]
            if i == j and mode == "ber-diag":
                if blk.shape[0] != blk.shape[1]:
                    raise ShapeMismatch("diagonal blocks must be square")
                out[i, j] = berezin_number(blk, t.spaces.components[i], cfg).value
            else:
                out[i, j] = operator_norm(blk)
    return out


def hou_chain(t: BlockOperator, *, r_tol: float = 1e-3, w_tol: float = 1e-6, norm_tol: float = 1e-8) -> CheckReport:
    """Spectral radius, numerical radius and norm of ``T`` against those of ``[||T_ij||]``."""
    c = compress(t, "hou-norm")
    children = [
        make_report("hou.spectral", gelfand_spectral_radius(t.flat), gelfand_spectral_radius(c), r_tol),
        make_report("hou.numerical", numerical_radius(t.flat).value, numerical_radius(c).value, w_tol),
        make_report("hou.norm", operator_norm(t.flat), operator_norm(c), norm_tol),
    ]
    return combine("hou_chain", children, provenance={"dims": list(t.spaces.dims)})


def block_operator_to_json(t: BlockOperator, descriptors) -> dict:
    return {
        "spaces": list(descriptors),
        "blocks": [[matrix_to_json(b) for b in row] for row in t.blocks],
    }


def load_block_operator(path) -> BlockOperator:
    """Read ``{"spaces": [descriptors], "blocks": [[matrix objects]]}``.

    ``finite:<path>`` descriptors resolve relative to the file's directory.
    """
    path = Path(path)
    with open(path) as fh:
        obj = json.load(fh)
    try:
        spaces = DirectSumSpace(tuple(parse_space(d, base_dir=path.parent) for d in obj["spaces"]))
        blocks = [[matrix_from_json(b) for b in row] for row in obj["blocks"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed block operator file: {exc}") from exc
    return assemble(blocks, spaces)
