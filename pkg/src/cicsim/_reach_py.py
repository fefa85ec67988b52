"""Pure-Python reachability kernel.

Messages of a trace form a small directed graph (edge m -> m' when m' can
extend a zigzag chain that currently ends with m).  The oracle needs the
reflexive-transitive closure of that graph as per-node bitmasks.  This
implementation works for any node count; arbitrary-precision ints serve
as the bitsets.
"""

from __future__ import annotations


def closure_masks(adj: list[int]) -> list[int]:
    """Reflexive-transitive closure of a bitmask adjacency list.

    ``adj[i]`` has bit j set when there is an edge i -> j.  Returns
    ``reach`` with ``reach[i]`` covering i itself plus every node reachable
    from i.  Plain fixpoint iteration; graphs here have tens of nodes.
    """
    m = len(adj)
    reach = [(1 << i) | adj[i] for i in range(m)]
    changed = True
    while changed:
        changed = False
        for i in range(m):
            acc = reach[i]
            rest = adj[i]
            while rest:
                j = (rest & -rest).bit_length() - 1
                acc |= reach[j]
                rest &= rest - 1
            if acc != reach[i]:
                reach[i] = acc
                changed = True
    return reach
