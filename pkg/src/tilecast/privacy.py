"""Redaction of privacy-sensitive substrings before text leaves the publisher.

Every maximal substring matching an enabled pattern becomes "[REDACTED]";
bounding boxes are untouched. Patterns run in a fixed order so output is
deterministic regardless of which subset is enabled.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .textindex import TextRun

REDACTED = "[REDACTED]"

# Order matters: applied top to bottom.
PATTERNS: dict[str, re.Pattern[str]] = {
    "email": re.compile(r"\b[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}\b"),
    "ssn": re.compile(r"\b\d{3}-\d{2}-\d{4}\b"),
    "phone": re.compile(
        r"\b(\+?1[ .-]?)?(\(\d{3}\)|\d{3})[ .-]?\d{3}[ .-]?\d{4}\b"
    ),
    "street_address": re.compile(
        r"\b\d{1,6}\s+\w+(\s\w+){0,3}\s"
        r"(Ave|Avenue|St|Street|Rd|Road|Blvd|Boulevard|Dr|Drive|Ln|Lane)\.?\b",
        re.IGNORECASE,
    ),
}


@dataclass(frozen=True)
class PrivacyPolicy:
    """Which entity patterns are filtered out."""

    email: bool = True
    ssn: bool = True
    phone: bool = True
    street_address: bool = True

    @classmethod
    def all(cls) -> "PrivacyPolicy":
        return cls()

    @classmethod
    def none(cls) -> "PrivacyPolicy":
        return cls(email=False, ssn=False, phone=False, street_address=False)

    @classmethod
    def parse(cls, text: str) -> "PrivacyPolicy":
        """Parse the CLI spelling: "all", "none", or e.g. "email,ssn,address"."""
        text = text.strip().lower()
        if text in ("all", ""):
            return cls.all()
        if text == "none":
            return cls.none()
        aliases = {"email": "email", "ssn": "ssn", "phone": "phone",
                   "address": "street_address", "street_address": "street_address"}
        enabled = set()
        for part in text.split(","):
            part = part.strip()
            if part not in aliases:
                raise ValueError(f"unknown privacy pattern {part!r}")
            enabled.add(aliases[part])
        return cls(**{name: name in enabled for name in PATTERNS})

    def enabled_patterns(self) -> list[str]:
        return [name for name in PATTERNS if getattr(self, name)]


def redact(text: str, policy: PrivacyPolicy) -> str:
    """Replace every match of each enabled pattern with [REDACTED]."""
    for name in policy.enabled_patterns():
        text = PATTERNS[name].sub(REDACTED, text)
    return text


def apply_privacy_filter(runs: list[TextRun], policy: PrivacyPolicy) -> list[TextRun]:
    """Redact run texts; bounding boxes and ordering are preserved."""
    out = []
    for run in runs:
        clean = redact(run.text, policy)
        if clean == run.text:
            out.append(run)
        else:
            out.append(TextRun(text=clean, x=run.x, y=run.y, w=run.w, h=run.h,
                               url=run.url, seq=run.seq))
    return out
