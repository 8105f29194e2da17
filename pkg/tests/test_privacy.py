"""Redaction patterns, policy parsing, and soundness of the filtered output."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tilecast.privacy import PATTERNS, REDACTED, PrivacyPolicy, apply_privacy_filter, redact
from tilecast.textindex import TextRun


def run(text):
    return TextRun(text=text, x=5, y=6, w=100, h=14, url="https://p.test/")


class TestPatterns:
    def test_email(self):
        policy = PrivacyPolicy(email=True, ssn=False, phone=False, street_address=False)
        assert redact("contact bob@example.com now", policy) == f"contact {REDACTED} now"

    def test_ssn(self):
        policy = PrivacyPolicy(email=False, ssn=True, phone=False, street_address=False)
        assert redact("SSN 123-45-6789", policy) == f"SSN {REDACTED}"

    def test_street_address(self):
        policy = PrivacyPolicy(email=False, ssn=False, phone=False, street_address=True)
        assert redact("3400 Hillview Ave", policy) == REDACTED
        assert redact("visit 12 Oak Tree Lane today", policy) == f"visit {REDACTED} today"

    @pytest.mark.parametrize("number", [
        "1(650)842-4821",
        "650-842-4821",
        "650 842 4821",
        "+1 650.842.4821",
    ])
    def test_phone_variants(self, number):
        policy = PrivacyPolicy(email=False, ssn=False, phone=True, street_address=False)
        assert REDACTED in redact(f"call {number} today", policy)
        assert number not in redact(f"call {number} today", policy)

    def test_paren_without_leading_one_is_not_matched(self):
        # the pattern opens with \b, which cannot assert before "(" mid-text;
        # a bare parenthesized area code therefore passes through untouched
        policy = PrivacyPolicy(email=False, ssn=False, phone=True, street_address=False)
        text = "call (650) 842-4821 today"
        assert redact(text, policy) == text

    def test_multiple_entities_in_one_run(self):
        text = "mail a@b.co or call 650-842-4821; SSN 123-45-6789 at 3400 Hillview Ave."
        out = redact(text, PrivacyPolicy.all())
        for name, pattern in PATTERNS.items():
            assert not pattern.search(out), (name, out)
        assert out.count(REDACTED) == 4

    def test_case_insensitive_street_suffix(self):
        policy = PrivacyPolicy(email=False, ssn=False, phone=False, street_address=True)
        assert redact("9 elm STREET", policy) == REDACTED

    def test_non_matching_text_untouched(self):
        text = "plain text with numbers 12 34 and words"
        assert redact(text, PrivacyPolicy.all()) == text


class TestPolicy:
    def test_parse_subsets(self):
        p = PrivacyPolicy.parse("email,ssn")
        assert (p.email, p.ssn, p.phone, p.street_address) == (True, True, False, False)
        p = PrivacyPolicy.parse("address")
        assert p.street_address and not p.email
        assert PrivacyPolicy.parse("all") == PrivacyPolicy.all()
        assert PrivacyPolicy.parse("none") == PrivacyPolicy.none()
        with pytest.raises(ValueError):
            PrivacyPolicy.parse("telepathy")

    def test_disabled_patterns_pass_through(self):
        text = "bob@example.com"
        assert redact(text, PrivacyPolicy.none()) == text


class TestApplyFilter:
    def test_bounding_boxes_preserved(self):
        runs = [run("email me: x@y.org"), run("nothing here")]
        out = apply_privacy_filter(runs, PrivacyPolicy.all())
        assert [r.bbox for r in out] == [r.bbox for r in runs]
        assert out[0].text == f"email me: {REDACTED}"
        assert out[1] is runs[1]

    def test_empty_input(self):
        assert apply_privacy_filter([], PrivacyPolicy.all()) == []


ENTITIES = [
    "alice.smith+spam@corp-mail.example.net",
    "987-65-4320",
    "1 (415) 555-0132",
    "221 Baker Street",
    "77 Sunset Blvd.",
]
WORDS = ["alpha", "bravo", "report", "figure", "2024", "x9", "review"]


class TestSoundness:
    @given(
        parts=st.lists(
            st.one_of(st.sampled_from(WORDS), st.sampled_from(ENTITIES)),
            min_size=1, max_size=8,
        ),
        sep=st.sampled_from([" ", "  ", " - ", ", "]),
    )
    @settings(max_examples=120, deadline=None)
    def test_no_enabled_pattern_matches_output(self, parts, sep):
        out = redact(sep.join(parts), PrivacyPolicy.all())
        for name, pattern in PATTERNS.items():
            assert not pattern.search(out), (name, out)

    def test_planted_entities_disappear(self):
        for entity in ENTITIES:
            out = redact(f"context {entity} trailing", PrivacyPolicy.all())
            assert entity not in out
            assert REDACTED in out
