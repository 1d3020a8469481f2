"""Annotated selections over a list, with index remapping.

A :class:`TrackedSelection` picks entries out of a list one step at a time.
Each step names a position in what is *left* of the list after the earlier
steps removed their picks, so the same value occurring twice can be picked
twice, but the same slot only once.  The helpers here translate between the
three index spaces that arise: the original list, the remainder after all
picks, and the concatenation of two lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Generic, Sequence, TypeVar

from .errors import IndexOutOfBounds

T = TypeVar("T")
A = TypeVar("A")
V = TypeVar("V")


def _check_index(i: int, n: int, what: str = "index") -> None:
    if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < n:
        raise IndexOutOfBounds(f"{what} {i!r} out of range for length {n}")


def delete_at(l: Sequence[T], i: int) -> list[T]:
    _check_index(i, len(l))
    return [*l[:i], *l[i + 1 :]]


def orig_index_after_delete(l: Sequence[T] | int, i: int, j: int) -> int:
    """Map index ``j`` of ``delete_at(l, i)`` back to the matching index of ``l``.

    ``l`` may be given as a length.
    """
    n = l if isinstance(l, int) else len(l)
    _check_index(i, n, "deleted index")
    _check_index(j, n - 1, "remainder index")
    return j if j < i else j + 1


@dataclass(frozen=True)
class TrackedSelection(Generic[A]):
    """Ordered picks ``(index, annotation)``; each index is relative to the then-current remainder."""

    steps: tuple[tuple[int, A], ...] = ()

    def __init__(self, steps=()):
        object.__setattr__(self, "steps", tuple((i, a) for i, a in steps))

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    @property
    def annotations(self) -> list[A]:
        return [a for _, a in self.steps]

    def is_valid_for(self, length: int) -> bool:
        return all(
            isinstance(i, int) and not isinstance(i, bool) and 0 <= i < length - k
            for k, (i, _) in enumerate(self.steps)
        )

    def check(self, length: int) -> None:
        for k, (i, _) in enumerate(self.steps):
            _check_index(i, length - k, f"selection step {k}")

    @classmethod
    def from_orig_indices(cls, picks: Sequence[tuple[int, A]], length: int) -> "TrackedSelection[A]":
        """Build a selection picking the given original positions, in the given order."""
        remaining = list(range(length))
        steps = []
        for orig, ann in picks:
            try:
                rel = remaining.index(orig)
            except ValueError:
                raise IndexOutOfBounds(f"position {orig} not available for selection") from None
            del remaining[rel]
            steps.append((rel, ann))
        return cls(steps)


def remainder(l: Sequence[T], sel: TrackedSelection) -> list[T]:
    sel.check(len(l))
    out = list(l)
    for i, _ in sel.steps:
        del out[i]
    return out


def selected(l: Sequence[T], sel: TrackedSelection[A]) -> list[tuple[T, A]]:
    """The picked elements with their annotations, in step order."""
    return [(x, a) for _, x, a in selected_with_orig_indices(l, sel)]


def selected_with_orig_indices(l: Sequence[T], sel: TrackedSelection[A]) -> list[tuple[int, T, A]]:
    sel.check(len(l))
    positions = list(range(len(l)))
    out = []
    for i, ann in sel.steps:
        orig = positions.pop(i)
        out.append((orig, l[orig], ann))
    return out


def remainder_index_to_orig(l: Sequence[T] | int, sel: TrackedSelection, i: int) -> int:
    """Map index ``i`` of ``remainder(l, sel)`` back to an index of ``l``.

    Follows the step-by-step unwinding: the index is pushed back through each
    deletion, last step first.  ``l`` may be given as a length.
    """
    n = l if isinstance(l, int) else len(l)
    sel.check(n)
    _check_index(i, n - len(sel), "remainder index")
    lengths = [n - k for k in range(len(sel))]
    for (deleted, _), length in zip(reversed(sel.steps), reversed(lengths)):
        i = orig_index_after_delete(length, deleted, i)
    return i


def concat_index_map(
    len_a: int, len_b: int, f_a: Callable[[int], V], f_b: Callable[[int], V], i: int
) -> V:
    _check_index(i, len_a + len_b)
    return f_a(i) if i < len_a else f_b(i - len_a)


def enumerate_indices(n: int) -> list[int]:
    return list(range(n))


def non_empty(l: Sequence[Any]) -> bool:
    return len(l) >= 1
