import json

import pytest

from codetree.core import ExecutionResult, ExitStatus
from codetree.provider import PlaybookEntry, PlaybookProvider
from codetree.review import review


def result(term_out="", status=ExitStatus.SUCCESS, code=0, exec_time=0.1):
    return ExecutionResult(
        term_out=term_out,
        exit_status=status,
        exit_code=code if status is ExitStatus.NON_ZERO_EXIT else (0 if status is ExitStatus.SUCCESS else None),
        exec_time=exec_time,
    )


def test_sentinel_extracted():
    verdict = review(result("loading\nVALIDATION_METRIC: 0.8423\n"), lower_is_better=False)
    assert not verdict.is_buggy
    assert verdict.metric.value == pytest.approx(0.8423)
    assert verdict.metric.lower_is_better is False


def test_nonzero_exit_is_buggy_with_traceback_summary():
    term = "Traceback (most recent call last):\n  ...\nValueError: shapes misaligned"
    verdict = review(result(term, status=ExitStatus.NON_ZERO_EXIT, code=1), False)
    assert verdict.is_buggy
    assert verdict.metric is None
    assert "ValueError: shapes misaligned" in verdict.summary


def test_no_sentinel_no_provider_is_buggy():
    verdict = review(result("finished fine but printed nothing useful"), False)
    assert verdict.is_buggy
    assert verdict.summary == "no metric reported"


def test_timeout_is_buggy():
    verdict = review(result("partial", status=ExitStatus.TIMEOUT, exec_time=2.0), False)
    assert verdict.is_buggy
    assert "timed out" in verdict.summary


def test_spawn_error_is_buggy():
    verdict = review(result("cannot spawn 'x'", status=ExitStatus.SPAWN_ERROR), False)
    assert verdict.is_buggy


def test_last_sentinel_wins():
    term = "VALIDATION_METRIC: 0.1\nmore work\nVALIDATION_METRIC: 0.9\n"
    verdict = review(result(term), False)
    assert verdict.metric.value == pytest.approx(0.9)


@pytest.mark.parametrize("bad", ["nan", "inf", "-inf"])
def test_non_finite_sentinel_is_buggy(bad):
    verdict = review(result(f"VALIDATION_METRIC: {bad}\n"), False)
    assert verdict.is_buggy
    assert "non-finite" in verdict.summary


def test_sentinel_must_be_numeric():
    verdict = review(result("VALIDATION_METRIC: great\n"), False)
    assert verdict.is_buggy


def test_direction_flag_propagates():
    verdict = review(result("VALIDATION_METRIC: 0.25\n"), lower_is_better=True)
    assert verdict.metric.lower_is_better is True


def test_sentinel_beats_provider():
    # provider would fail loudly if consulted; the sentinel short-circuits it
    provider = PlaybookProvider([PlaybookEntry(reply="never", mode="wrong-mode")])
    verdict = review(result("VALIDATION_METRIC: 0.5\n"), False, provider=provider)
    assert not verdict.is_buggy


def test_provider_review_parses_structured_verdict():
    reply = json.dumps({"is_bug": False, "metric": 0.77, "summary": "looks healthy"})
    provider = PlaybookProvider([PlaybookEntry(reply=reply, mode="review")])
    verdict = review(result("acc = 0.77 but no sentinel"), False, provider=provider)
    assert not verdict.is_buggy
    assert verdict.metric.value == pytest.approx(0.77)
    assert verdict.summary == "looks healthy"


def test_provider_review_bug_verdict():
    reply = json.dumps({"is_bug": True, "metric": None, "summary": "silent failure"})
    provider = PlaybookProvider([PlaybookEntry(reply=reply)])
    verdict = review(result("ran ok"), False, provider=provider)
    assert verdict.is_buggy
    assert verdict.summary == "silent failure"


def test_provider_review_accepts_fenced_json():
    reply = "```json\n" + json.dumps({"is_bug": False, "metric": 1.5, "summary": "s"}) + "\n```"
    provider = PlaybookProvider([PlaybookEntry(reply=reply)])
    verdict = review(result("done"), False, provider=provider)
    assert verdict.metric.value == pytest.approx(1.5)


def test_unparseable_provider_reply_falls_back_to_buggy():
    provider = PlaybookProvider([PlaybookEntry(reply="not json at all")])
    verdict = review(result("done"), False, provider=provider)
    assert verdict.is_buggy
    assert "unparseable" in verdict.summary


def test_no_metric_ever_from_failed_execution():
    for status in (ExitStatus.NON_ZERO_EXIT, ExitStatus.TIMEOUT, ExitStatus.SPAWN_ERROR):
        verdict = review(result("VALIDATION_METRIC: 0.9\n", status=status), False)
        assert verdict.is_buggy
        assert verdict.metric is None
