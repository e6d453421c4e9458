"""Hypothesis checks on the associated elements of a multiple HNN extension.

For every relation ``u_i s_i u_i^-1 = t_i`` this checks that ``s_i`` and
``t_i`` are nontrivial (hyperbolic on the Cayley tree of the base group),
that their translation lengths agree, and that the distinct words among
``s_i^{+-1}, t_i^{+-1}`` fall into pairwise distinct conjugacy classes.
It reports those conditions only; it does not construct a tree action.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from treefree.hnn import MultipleHnnPresentation
from treefree.words import Word, invert, is_conjugate, translation_length

__all__ = ["FreenessReport", "check_freeness_hypotheses"]

SCOPE = (
    "checks nontriviality, equal translation lengths and pairwise "
    "non-conjugacy of the associated elements and their inverses; "
    "the verdict is those checks only"
)


@dataclass
class FreenessReport:
    hyperbolic_ok: list[bool]
    length_pairs: list[tuple[int, int]]
    conjugacy_partition: list[list[Word]]
    distinctness_ok: bool
    lengths_ok: bool
    failures: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return all(self.hyperbolic_ok) and self.lengths_ok and self.distinctness_ok

    def to_json(self, p: MultipleHnnPresentation) -> dict:
        return {
            "verdict": self.verdict,
            "lengths": [list(pair) for pair in self.length_pairs],
            "classes": [[p.base.format(w) for w in block] for block in self.conjugacy_partition],
            "failures": list(self.failures),
            "scope": SCOPE,
        }


def check_freeness_hypotheses(p: MultipleHnnPresentation) -> FreenessReport:
    hyperbolic, lengths, failures = [], [], []
    family: list[Word] = []
    for name, (s, t) in zip(p.stable, p.relations):
        ok = bool(s) and bool(t)
        hyperbolic.append(ok)
        if not ok:
            failures.append(f"{name}: associated element is trivial")
        ls, lt = translation_length(s), translation_length(t)
        lengths.append((ls, lt))
        if ls != lt:
            failures.append(
                f"{name}: translation lengths differ "
                f"({p.base.format(s)} has {ls}, {p.base.format(t)} has {lt})"
            )
        for w in (s, invert(s), t, invert(t)):
            if w and w not in family:
                family.append(w)

    blocks: list[list[Word]] = []
    for w in family:
        for block in blocks:
            if is_conjugate(block[0], w):
                block.append(w)
                break
        else:
            blocks.append([w])
    for block in blocks:
        if len(block) > 1:
            failures.append(
                "conjugate associated elements: "
                + ", ".join(p.base.format(w) for w in block)
            )
    return FreenessReport(
        hyperbolic_ok=hyperbolic,
        length_pairs=lengths,
        conjugacy_partition=blocks,
        distinctness_ok=all(len(b) == 1 for b in blocks),
        lengths_ok=all(a == b for a, b in lengths),
        failures=failures,
    )
