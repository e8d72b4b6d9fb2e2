"""Shared builders for the model tests."""

from __future__ import annotations

import pytest
import torch

from charparse import CharCompositionModel, ModelConfig


def tiny_model(
    chars: str = "abcd",
    morphs: tuple[str, ...] = ("a", "b", "c", "d", "ab", "cd", "abc"),
    dim: int = 16,
    seed: int = 0,
    double: bool = False,
    morph_override: bool = True,
) -> CharCompositionModel:
    torch.manual_seed(seed)
    config = ModelConfig(
        dim=dim, heads=2, comp_layers=1, lm_layers=1, morph_override=morph_override
    )
    model = CharCompositionModel(list(chars), list(morphs), config)
    if double:
        model.double()
    model.eval()
    return model


@pytest.fixture
def model() -> CharCompositionModel:
    return tiny_model()


acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
