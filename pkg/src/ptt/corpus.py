"""Corpus manifest loading and tiered runs.

A manifest is a plain text file: one entry per line,

    <tier> <path> <expectation>

with tier `core` or `stretch`, and expectation `all-ok`, `expect-fail`, or
`fail:<name>,<name>,...` (exactly those declarations fail, the rest pass).
Paths are relative to the manifest.  Core failures fail the run; stretch
results are reported but never gate.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from .checker import Definitions, DeclResult, check_file


@dataclass(frozen=True)
class ManifestEntry:
    tier: str  # core | stretch
    path: Path
    expectation: str  # all-ok | expect-fail | fail:<names>

    def expected_failures(self) -> set[str] | None:
        """None means the whole file may fail; a set means exactly these."""
        if self.expectation == "all-ok":
            return set()
        if self.expectation == "expect-fail":
            return None
        return set(self.expectation.removeprefix("fail:").split(","))


@dataclass(frozen=True)
class CorpusManifest:
    entries: tuple[ManifestEntry, ...]


@dataclass
class FileReport:
    entry: ManifestEntry
    results: list[DeclResult]
    ok: bool
    seconds: float
    error: str = ""


@dataclass
class CorpusReport:
    files: list[FileReport] = field(default_factory=list)

    @property
    def core_ok(self) -> bool:
        return all(f.ok for f in self.files if f.entry.tier == "core")


def load_manifest(path: str | Path) -> CorpusManifest:
    base = Path(path).parent
    entries = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] not in ("core", "stretch"):
            raise ValueError(f"bad manifest line: {raw!r}")
        entries.append(ManifestEntry(parts[0], base / parts[1], parts[2]))
    return CorpusManifest(tuple(entries))


def run_file(entry: ManifestEntry) -> FileReport:
    start = time.monotonic()
    try:
        results = check_file(str(entry.path), Definitions())
    except Exception as e:  # parse errors and the like fail the whole file
        return FileReport(entry, [], entry.expectation == "expect-fail",
                          time.monotonic() - start, error=str(e))
    expected = entry.expected_failures()
    failed = {r.name for r in results if not r.ok}
    if expected is None:
        ok = True  # expect-fail: any outcome is recorded, never gates
    else:
        ok = failed == expected
    return FileReport(entry, results, ok, time.monotonic() - start)


def run_corpus(manifest: CorpusManifest, tier: str = "core") -> CorpusReport:
    report = CorpusReport()
    for entry in manifest.entries:
        if tier == "core" and entry.tier != "core":
            continue
        report.files.append(run_file(entry))
    return report
