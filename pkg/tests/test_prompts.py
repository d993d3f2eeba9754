"""Prompt generation: determinism, cross-product sampling, templates."""

import pytest

from mattekit import PromptSpec, PromptTemplateError, generate_prompts


def single_value_spec():
    return PromptSpec(
        attributes={
            "gender": ("man",),
            "age": ("young",),
            "hair_length": ("short",),
            "hair_color": ("black",),
            "accessory": ("",),
            "style": ("casual",),
            "attire": ("jeans",),
            "action": ("striking a pose",),
        },
    )


class TestPromptSpec:
    def test_single_value_lists_render_full_template(self):
        prompts = generate_prompts(single_value_spec(), limit=10, seed=7)
        assert prompts == [
            "A young man with black short hair, wearing casual jeans, striking a pose."
        ]

    def test_unknown_slot_rejected(self):
        with pytest.raises(PromptTemplateError):
            PromptSpec(attributes={"gender": ("man",)}, template="A {nope} here")

    def test_empty_attribute_list_rejected(self):
        with pytest.raises(PromptTemplateError):
            PromptSpec(attributes={"gender": ()}, template="A {gender}")

    def test_malformed_template_rejected(self):
        with pytest.raises(PromptTemplateError):
            PromptSpec(attributes={"g": ("x",)}, template="A {g!r}")

    def test_dict_round_trip(self):
        spec = single_value_spec()
        assert PromptSpec.from_dict(spec.to_dict()) == spec


class TestGenerate:
    def test_small_cross_product_exhausted(self):
        spec = PromptSpec(
            attributes={"a": ("x", "y"), "b": ("1", "2", "3"), "c": ("p", "q")},
            template="{a}-{b}-{c}",
        )
        prompts = generate_prompts(spec, limit=100, seed=3)
        assert len(prompts) == 12
        assert len(set(prompts)) == 12

    def test_deterministic_for_seed(self):
        spec = PromptSpec()
        assert generate_prompts(spec, 25, seed=42) == generate_prompts(spec, 25, seed=42)
        assert generate_prompts(spec, 25, seed=42) != generate_prompts(spec, 25, seed=43)

    def test_no_duplicates_within_sample(self):
        prompts = generate_prompts(PromptSpec(), 500, seed=11)
        assert len(prompts) == 500
        assert len(set(prompts)) == 500

    def test_limit_must_be_positive(self):
        with pytest.raises(ValueError):
            generate_prompts(PromptSpec(), 0, seed=1)

    def test_default_spec_shape(self):
        prompts = generate_prompts(PromptSpec(), 50, seed=0)
        for p in prompts:
            assert p.startswith(("A ", "An "))
            assert p.endswith(".")
            assert " wearing " in p

    def test_article_agrees_with_vowel(self):
        spec = PromptSpec(
            attributes={**PromptSpec().attributes, "age": ("elderly",)},
        )
        prompts = generate_prompts(spec, 5, seed=1)
        assert all(p.startswith("An elderly") for p in prompts)
