"""Generalized torsion certificates.

A certificate ``(g; h_1, ..., h_n)`` claims ``g != 1`` and
``g^{h_1} g^{h_2} ... g^{h_n} = 1`` with ``g^h = h^-1 g h``.  Any group with
such an element admits no bi-order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from treefree.errors import BudgetExhausted, ParseError
from treefree.hnn import (
    HnnWord,
    MultipleHnnPresentation,
    format_hnn_word,
    hnn_conjugate,
    is_trivial,
    parse_hnn_word,
    pinch_reduce,
)

__all__ = [
    "TorsionCertificate",
    "verify_certificate",
    "search_certificate",
    "conjugator_candidates",
    "DEFAULT_SEARCH_BUDGET",
]

DEFAULT_SEARCH_BUDGET = 1_000_000


@dataclass(frozen=True)
class TorsionCertificate:
    g: HnnWord
    conjugators: tuple[HnnWord, ...]

    def __post_init__(self):
        object.__setattr__(self, "conjugators", tuple(self.conjugators))
        if not self.conjugators:
            raise ValueError("a certificate needs at least one conjugator")

    def to_json(self, p: MultipleHnnPresentation) -> dict:
        return {
            "g": format_hnn_word(p, self.g),
            "conjugators": [format_hnn_word(p, h) for h in self.conjugators],
        }

    @classmethod
    def from_json(cls, p: MultipleHnnPresentation, data: dict | str) -> "TorsionCertificate":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ParseError(f"certificate is not valid JSON: {exc}") from None
        if not isinstance(data, dict) or "g" not in data or "conjugators" not in data:
            raise ParseError("certificate needs keys 'g' and 'conjugators'")
        conj = data["conjugators"]
        if not isinstance(conj, list) or not conj:
            raise ParseError("'conjugators' must be a nonempty list")
        return cls(parse_hnn_word(p, data["g"]), tuple(parse_hnn_word(p, h) for h in conj))


def verify_certificate(p: MultipleHnnPresentation, cert: TorsionCertificate) -> bool:
    if is_trivial(p, cert.g):
        return False
    product = HnnWord()
    for h in cert.conjugators:
        product = product * hnn_conjugate(p, cert.g, h)
    return is_trivial(p, product)


def conjugator_candidates(p: MultipleHnnPresentation, max_len: int) -> list[HnnWord]:
    """Reduced words of length <= ``max_len`` over base and stable letters, shortlex."""
    return [
        HnnWord.from_combined_codes(w.codes, p.rank)
        for w in p.combined.words_up_to(max_len)
    ]


def search_certificate(
    p: MultipleHnnPresentation,
    g: HnnWord,
    max_factors: int,
    max_conj_len: int,
    *,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> TorsionCertificate | None:
    """First certificate for ``g`` within the bounds, or ``None``.

    Products with ``k = 1, ..., max_factors`` factors are tried in turn, the
    conjugator tuples in lexicographic order of the shortlex candidate list.
    Raises :class:`BudgetExhausted` after ``budget`` full products without
    reaching a verdict.
    """
    if max_factors < 1 or max_conj_len < 0:
        raise ValueError("need max_factors >= 1 and max_conj_len >= 0")
    if is_trivial(p, g):
        return None
    candidates = conjugator_candidates(p, max_conj_len)
    conjugates = [hnn_conjugate(p, g, h) for h in candidates]
    used = 0

    def extend(prefix: HnnWord, chosen: list[int], remaining: int):
        nonlocal used
        for idx, c in enumerate(conjugates):
            word = pinch_reduce(p, prefix * c)[0]
            if remaining == 1:
                used += 1
                if used > budget:
                    raise BudgetExhausted(
                        f"certificate search exceeded {budget} product evaluations",
                        used - 1,
                        budget,
                    )
                if len(word.syllables) == 1 and not word.syllables[0]:
                    return chosen + [idx]
            else:
                found = extend(word, chosen + [idx], remaining - 1)
                if found is not None:
                    return found
        return None

    for k in range(1, max_factors + 1):
        found = extend(HnnWord(), [], k)
        if found is not None:
            return TorsionCertificate(g, tuple(candidates[i] for i in found))
    return None
