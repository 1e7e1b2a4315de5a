"""Cycle-count model for the two decoder architectures.

The baseline is a semi-parallel bit-by-bit list architecture with p
processing elements. The node-schedule architecture charges its LLR
computations per materialized layer (ceil(width / p) cycles each) plus a
fixed number of sorting cycles per candidate-expanded node. Partial-sum
updates are free in both models.
"""

from __future__ import annotations

from dataclasses import dataclass

from .tree import CodeTree, schedule


@dataclass(frozen=True)
class ArchParams:
    """Processing resources and clock rates of the modeled designs."""

    p: int = 128
    n_s: int = 4
    f_baseline_mhz: float = 412.0
    f_reduced_mhz: float = 400.0

    def __post_init__(self):
        if self.p < 1 or self.p & (self.p - 1):
            raise ValueError("p must be a power of two")
        if self.n_s < 0:
            raise ValueError("n_s must be nonnegative")


@dataclass(frozen=True)
class CycleReport:
    """Cycle counts and derived ratios for one code and one tree."""

    block_len: int
    k: int
    n_c: int
    n_l: int
    n_a: int
    n_p: int
    n_r: int
    cycle_ratio: float
    latency_ratio: float
    params: ArchParams

    def lines(self) -> list[str]:
        return [
            f"block length        {self.block_len}",
            f"information bits    {self.k}",
            f"baseline cycles     {self.n_c}",
            f"layer cycles        {self.n_l}",
            f"expansions          {self.n_a}",
            f"sorting cycles      {self.n_p}",
            f"reduced cycles      {self.n_r}",
            f"cycle ratio         {self.cycle_ratio:.2f}",
            f"latency ratio       {self.latency_ratio:.2f}",
        ]


def baseline_cycles(block_len: int, k: int, p: int = 128) -> int:
    """Decoding cycles of the semi-parallel bit-by-bit architecture.

    2N for the LLR schedule, (N/p) log2(N/(4p)) extra where the layer width
    exceeds the processing elements, and one pruning cycle per information
    bit.
    """
    if block_len < 1 or block_len & (block_len - 1):
        raise ValueError("block length must be a power of two")
    if p < 1 or p & (p - 1):
        raise ValueError("p must be a power of two")
    extra = 0
    if block_len > 4 * p:
        ratio = block_len // (4 * p)
        extra = (block_len // p) * (ratio.bit_length() - 1)
    return 2 * block_len + extra + k


def cycles_from_counts(block_len: int, k: int, n_l: int, n_a: int,
                       params: ArchParams = ArchParams()) -> CycleReport:
    """Report for externally measured layer-cycle and expansion counts."""
    n_p = n_a * params.n_s
    n_r = n_l + n_p
    n_c = baseline_cycles(block_len, k, params.p)
    cycle_ratio = n_c / n_r if n_r else float("inf")
    latency_ratio = ((n_c / params.f_baseline_mhz) /
                     (n_r / params.f_reduced_mhz) if n_r else float("inf"))
    return CycleReport(block_len, k, n_c, n_l, n_a, n_p, n_r,
                       cycle_ratio, latency_ratio, params)


def rlld_cycles(ctree: CodeTree, params: ArchParams = ArchParams()) -> CycleReport:
    """Cycle report for a pruned tree under the node-schedule architecture."""
    n = ctree.n
    p = params.p
    n_l = 0
    n_a = 0
    for act in schedule(ctree):
        if act.op == "compute":
            for t in range(max(act.i_s, 1), act.top + 1):
                width = 1 << (n - t)
                n_l += -(-width // p)
        elif act.op == "decode_t1":
            n_a += 1
    return cycles_from_counts(ctree.block_len, ctree.k, n_l, n_a, params)
