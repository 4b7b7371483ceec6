"""The event-input permutation group and its action on histories and spaces.

A group element permutes the events and, independently per source event,
optionally flips the binary input value. On ``n`` events the group has
``n! * 2**n`` elements. Elements are represented by a pair of sequences:
the images of the sorted events, and the per-source-event XOR masks.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from functools import lru_cache
from itertools import permutations, product

from .encoding import (
    Event,
    History,
    HistorySet,
    bitvec,
    history,
    history_dict,
    history_sort_key,
    idx_to_event,
    iter_bitvec,
    max_histories,
    sub_histories,
)

PermGroupEl = tuple[tuple[Event, ...], tuple[int, ...]]
"""A group element: (images of the sorted events, per-event input flips)."""


def identity_perm(events: Sequence[Event]) -> PermGroupEl:
    """The identity element on the given events."""
    evs = tuple(sorted(events))
    return (evs, (0,) * len(evs))


def iter_perm_group(events: Sequence[Event]) -> Iterator[PermGroupEl]:
    """Iterates through all event-input permutations of the given events.

    Elements are produced in (event permutation, flip vector) lexicographic
    order, so the identity comes first.
    """
    events = tuple(events)
    if len(set(events)) != len(events):
        raise ValueError("Events must not be repeated.")
    for events_perm in permutations(events):
        for value_perm in product((0, 1), repeat=len(events)):
            yield (events_perm, value_perm)


def permute_history(h: History, g: PermGroupEl) -> History:
    """The image of a history under a group element.

    The item ``(e, v)`` maps to ``(g(e), v ^ flip_e)``, where ``flip_e`` is
    the flip bit for the source event ``e``.
    """
    events_perm, value_perm = g
    h_dict = history_dict(h)
    return history(
        {
            e_img: h_dict[e] ^ value_perm[e_idx]
            for e_idx, (e, e_img) in enumerate(zip(sorted(events_perm), events_perm))
            if e in h_dict
        }
    )


def history_perms(
    h: History, perm_group: Iterable[PermGroupEl]
) -> Iterator[tuple[PermGroupEl, History]]:
    """Pairs each group element with the corresponding image of ``h``."""
    for g in perm_group:
        yield g, permute_history(h, g)


def history_stabiliser(
    h: History, perm_group: Iterable[PermGroupEl]
) -> tuple[PermGroupEl, ...]:
    """The group elements fixing a history, in encounter order."""
    return tuple(g for g, h_img in history_perms(h, perm_group) if h_img == h)


class PermTable:
    """Cached group elements and history-permutation tables for ``n`` events.

    The table covers every non-empty restriction of the total assignments
    on the first ``n`` events, which is all the enumerator and the space
    analyses ever permute.
    """

    def __init__(self, num_events: int) -> None:
        self.num_events = num_events
        self.events = tuple(idx_to_event(i) for i in range(num_events))
        self.group: tuple[PermGroupEl, ...] = tuple(iter_perm_group(self.events))
        hs = sorted(sub_histories(max_histories(num_events)), key=history_sort_key)
        self.histories = tuple(hs)
        by_history = {h: dict(history_perms(h, self.group)) for h in hs}
        self.action: dict[PermGroupEl, dict[History, History]] = {
            g: {h: by_history[h][g] for h in hs} for g in self.group
        }

    def permute_space(self, s: HistorySet, g: PermGroupEl) -> HistorySet:
        """The image of a history set under a group element."""
        act = self.action[g]
        return bitvec(act[h] for h in iter_bitvec(s))


@lru_cache(maxsize=None)
def perm_table(num_events: int) -> PermTable:
    """The shared, lazily built permutation table for ``n`` events."""
    return PermTable(num_events)


def space_orbit(s: HistorySet, table: PermTable) -> tuple[HistorySet, ...]:
    """Distinct images of a history set under the group, in encounter order."""
    seen: dict[HistorySet, None] = {}
    for g in table.group:
        img = table.permute_space(s, g)
        if img not in seen:
            seen[img] = None
    return tuple(seen)


def space_stabiliser(s: HistorySet, table: PermTable) -> tuple[PermGroupEl, ...]:
    """The group elements fixing a history set, in encounter order."""
    return tuple(g for g in table.group if table.permute_space(s, g) == s)


def canonical_rep(s: HistorySet, table: PermTable) -> HistorySet:
    """The numerically smallest history set in the orbit of ``s``."""
    return min(space_orbit(s, table))
