import re
from pathlib import Path


FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


# Acceptance outcomes, filled by tests/test_acceptance.py and printed at the end.
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(re.match(r"\d+", k).group()), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")


V = "https://v.example/"
WEBID = V + "profile/card#me"


def sample_web() -> dict[str, str]:
    """A small vault assembled from the container, profile and type-index samples."""
    return {
        V: fixture_text("container.ttl"),
        V + "profile/card": fixture_text("profile.ttl"),
        V + "publicTypeIndex.ttl": fixture_text("typeindex.ttl"),
        V + "file.ttl": "<> <http://ex.org/title> \"file\".\n",
        V + "posts/": "@prefix ldp: <http://www.w3.org/ns/ldp#>.\n<> a ldp:Container.\n",
        V + "profile/": "@prefix ldp: <http://www.w3.org/ns/ldp#>.\n<> ldp:contains <card>.\n",
    }
