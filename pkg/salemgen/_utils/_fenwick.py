"""Fenwick tree counting how many marked positions lie below a given one."""

from typing import List


class FenwickTree:
    """Binary indexed tree over positions ``1..size``."""

    def __init__(self, size: int) -> None:
        self.size = size
        self.tree: List[int] = [0] * (size + 1)

    def add(self, position: int, value: int = 1) -> None:
        while position <= self.size:
            self.tree[position] += value
            position += position & -position

    def prefix_sum(self, position: int) -> int:
        """Sum over positions ``1..position``."""
        total = 0
        while position > 0:
            total += self.tree[position]
            position -= position & -position
        return total

    def __repr__(self) -> str:
        return f"FenwickTree(size={self.size}, total={self.prefix_sum(self.size)})"
