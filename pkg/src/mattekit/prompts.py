"""Seeded prompt generation by traversing person attribute lists.

A prompt spec holds named attribute lists and a template with named
slots; prompts are drawn without replacement from the cross product of
the lists the template references, so every prompt is a distinct
attribute combination.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field

import numpy as np

from .errors import PromptTemplateError

DEFAULT_TEMPLATE = (
    "A {age} {gender} with {hair_color} {hair_length} hair{accessory}, "
    "wearing {style} {attire}, {action}."
)

DEFAULT_ATTRIBUTES: dict[str, tuple[str, ...]] = {
    "gender": ("man", "woman", "person"),
    "age": ("young", "middle-aged", "senior", "elderly"),
    "hair_length": ("short", "long", "shoulder-length", "curly"),
    "hair_color": ("black", "blonde", "brown", "white", "red"),
    "accessory": ("", " and glasses", " and a hat"),
    "style": ("casual", "formal", "elegant", "sporty"),
    "attire": ("jeans", "blouse", "dress", "suit", "t-shirt", "uniform"),
    "action": (
        "striking a pose",
        "looking thoughtful",
        "smiling",
        "waving",
        "crossing their arms",
        "reading a book",
    ),
    "emotion": ("cheerful", "calm", "confident", "surprised"),
    "occupation": ("teacher", "engineer", "artist", "doctor", "chef"),
}


@dataclass(frozen=True)
class PromptSpec:
    """Attribute vocabulary plus a slotted template."""

    attributes: dict[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_ATTRIBUTES)
    )
    template: str = DEFAULT_TEMPLATE

    def __post_init__(self):
        attrs = {str(k): tuple(str(v) for v in vals) for k, vals in self.attributes.items()}
        object.__setattr__(self, "attributes", attrs)
        for name, vals in attrs.items():
            if not vals:
                raise PromptTemplateError(f"attribute list {name!r} is empty")
        for slot in self.slots():
            if slot not in attrs:
                raise PromptTemplateError(f"template slot {slot!r} has no attribute list")

    def slots(self) -> tuple[str, ...]:
        """Slot names in template order, deduplicated."""
        seen: list[str] = []
        try:
            parsed = list(string.Formatter().parse(self.template))
        except ValueError as exc:
            raise PromptTemplateError(f"malformed template: {exc}") from exc
        for _, name, spec, conversion in parsed:
            if name is None:
                continue
            if name == "" or spec not in ("", None) or conversion is not None:
                raise PromptTemplateError(
                    f"template slots must be plain named fields, got {name!r}"
                )
            if name not in seen:
                seen.append(name)
        return tuple(seen)

    def combination_count(self) -> int:
        n = 1
        for slot in self.slots():
            n *= len(self.attributes[slot])
        return n

    def render(self, combo: dict[str, str]) -> str:
        text = self.template.format(**combo)
        # fix the leading article when the first attribute starts with a vowel
        if text.startswith("A ") and text[2:3].lower() in "aeiou":
            text = "An " + text[2:]
        return text

    def to_dict(self) -> dict:
        return {
            "attributes": {k: list(v) for k, v in self.attributes.items()},
            "template": self.template,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PromptSpec":
        return cls(
            attributes={k: tuple(v) for k, v in d["attributes"].items()},
            template=str(d["template"]),
        )


def _unrank(index: int, sizes: list[int]) -> list[int]:
    """Mixed-radix decode of a cross-product index, last slot fastest."""
    out = []
    for size in reversed(sizes):
        out.append(index % size)
        index //= size
    return out[::-1]


def _sample_indices(rng: np.random.Generator, total: int, count: int) -> list[int]:
    if total <= max(1_000_000, 4 * count):
        return rng.permutation(total)[:count].tolist()
    chosen: list[int] = []
    seen: set[int] = set()
    while len(chosen) < count:
        i = int(rng.integers(total))
        if i not in seen:
            seen.add(i)
            chosen.append(i)
    return chosen


def generate_prompts(spec: PromptSpec, limit: int, seed: int) -> list[str]:
    """Draw up to `limit` distinct prompts, deterministically for a seed.

    Fewer than `limit` prompts come back only when the attribute cross
    product is smaller.
    """
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    slots = spec.slots()
    sizes = [len(spec.attributes[s]) for s in slots]
    total = spec.combination_count()
    count = min(limit, total)
    rng = np.random.Generator(np.random.PCG64(seed))
    prompts = []
    for index in _sample_indices(rng, total, count):
        digits = _unrank(index, sizes)
        combo = {slot: spec.attributes[slot][d] for slot, d in zip(slots, digits)}
        prompts.append(spec.render(combo))
    return prompts
