import random
import string

import pytest

from codetree.coding import build_prompt, parse_response, render_proposal
from codetree.context import preview, summarize
from codetree.core import Stage
from codetree.errors import EmptyResponse, PreconditionViolation

from conftest import TreeBuilder


@pytest.fixture
def task_bits(tmp_path):
    (tmp_path / "train.csv").write_text("a,b\n1,2\n3,4\n5,6\n")
    b = TreeBuilder()
    return {
        "preview": preview(tmp_path),
        "empty_memory": summarize(b.tree, cap=1024),
        "task": "Predict b from a. Higher accuracy is better.",
    }


class TestBuildPrompt:
    def test_draft_bundle_carries_preview_and_instructions(self, task_bits):
        bundle = build_prompt(
            Stage.DRAFT, None, task_bits["empty_memory"], task_bits["preview"], task_bits["task"]
        )
        assert "3 rows" in bundle.user
        assert "VALIDATION_METRIC" in bundle.user
        assert "submission.csv" in bundle.user
        assert "from scratch" in bundle.user
        assert task_bits["task"] in bundle.user

    def test_debug_truncates_huge_term_out(self, task_bits):
        b = TreeBuilder()
        parent = b.add(term_out="E" * (100 * 1024))
        bundle = build_prompt(
            Stage.DEBUG,
            parent,
            task_bits["empty_memory"],
            task_bits["preview"],
            task_bits["task"],
            debug_output_cap=4096,
        )
        assert "middle truncated" in bundle.user
        assert len(bundle.user) < 100 * 1024

    def test_improve_carries_parent_code_and_atomic_instruction(self, task_bits):
        b = TreeBuilder()
        parent = b.add(metric=0.71, code="model = fit(train)")
        bundle = build_prompt(
            Stage.IMPROVE, parent, task_bits["empty_memory"], task_bits["preview"], task_bits["task"]
        )
        assert "model = fit(train)" in bundle.user
        assert "ONE atomic change" in bundle.user
        assert "0.71" in bundle.user

    def test_mode_parent_mismatches_rejected(self, task_bits):
        b = TreeBuilder()
        valid = b.add(metric=0.5)
        buggy = b.add()
        args = (task_bits["empty_memory"], task_bits["preview"], task_bits["task"])
        with pytest.raises(PreconditionViolation):
            build_prompt(Stage.DRAFT, valid, *args)
        with pytest.raises(PreconditionViolation):
            build_prompt(Stage.DEBUG, None, *args)
        with pytest.raises(PreconditionViolation):
            build_prompt(Stage.DEBUG, valid, *args)
        with pytest.raises(PreconditionViolation):
            build_prompt(Stage.IMPROVE, buggy, *args)

    def test_prompt_cap_holds_under_adversarial_inputs(self, task_bits):
        b = TreeBuilder()
        parent = b.add(term_out="x" * (1024 * 1024), code="c" * 50000, plan="p" * 5000)
        for _ in range(30):
            b.add(metric=0.5, plan="q" * 2000)
        memory = summarize(b.tree, cap=100_000)  # deliberately oversized memory budget
        for cap in (2048, 8192, 32 * 1024):
            bundle = build_prompt(
                Stage.DEBUG,
                parent,
                memory,
                task_bits["preview"],
                task_bits["task"],
                prompt_cap=cap,
            )
            assert len(bundle.user) <= cap


class TestParseResponse:
    def test_single_fence(self):
        proposal = parse_response(
            "Plan: use gradient boosting.\n```\nprint(1)\n```", Stage.DRAFT
        )
        assert proposal.plan == "Plan: use gradient boosting."
        assert proposal.code == "print(1)"

    def test_largest_fence_wins(self):
        small = "x" * 10
        large = "y = 1\n" * 40
        text = f"intro\n```\n{small}\n```\nmiddle\n```python\n{large}```"
        proposal = parse_response(text, Stage.DRAFT)
        assert proposal.code.startswith("y = 1")
        assert proposal.plan == "intro"

    def test_no_fence_treats_text_as_code(self):
        proposal = parse_response("x = 1", Stage.IMPROVE)
        assert proposal.plan == ""
        assert proposal.code == "x = 1"

    def test_whitespace_only_rejected(self):
        with pytest.raises(EmptyResponse):
            parse_response("   \n\t  ", Stage.DRAFT)

    def test_empty_fences_fall_back_to_whole_text(self):
        proposal = parse_response("use this\n```\n\n```", Stage.DRAFT)
        assert "use this" in proposal.code

    def test_round_trip_on_random_plan_code_pairs(self):
        rng = random.Random(23)
        alphabet = string.ascii_letters + string.digits + " _.,()\n"
        for _ in range(300):
            plan = "".join(rng.choices(alphabet, k=rng.randint(0, 80))).strip()
            code = "".join(rng.choices(alphabet, k=rng.randint(1, 200))).strip()
            if not code:
                continue
            proposal = parse_response(render_proposal(plan, code), Stage.DRAFT)
            assert proposal.plan == plan
            assert proposal.code == code
