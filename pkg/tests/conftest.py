from __future__ import annotations

from dataclasses import dataclass

import pytest

from jxbw.ingest import (ARRAY, OBJECT, Node, SymbolTable, build_symbol_table, key_label,
                         normalize, number_label, parse_jsonl, string_label)
from jxbw.merge import merge_all
from jxbw.xbw import XbwIndex, build_xbw

PERSON_LINES = [
    '{"person":{"name":"Alice","age":30},"hobbies":["reading","cycling"]}',
    '{"person":{"name":"Bob","age":30},"hobbies":["reading"]}',
]

# symbols 1..11 in first-appearance order of a label-sorted walk of the merged tree
PERSON_LABELS = [OBJECT, key_label("hobbies"), ARRAY, string_label("reading"),
                 string_label("cycling"), key_label("person"), key_label("age"),
                 number_label(30), key_label("name"), string_label("Alice"), string_label("Bob")]
A, B, C, D, E, F, G, H, I, J, K = range(1, 12)


@dataclass
class Built:
    trees: list[Node]
    mt: Node
    symtab: SymbolTable
    index: XbwIndex


def build(lines, labels=None) -> Built:
    trees = parse_jsonl(lines)
    mt = merge_all(trees)
    symtab = SymbolTable(labels) if labels is not None else build_symbol_table([mt])
    return Built(trees, mt, symtab, build_xbw(normalize(mt, symtab), symtab))


@pytest.fixture(scope="session")
def person():
    return build(PERSON_LINES, PERSON_LABELS)


ACCEPTANCE_LINES: list[str] = []


class criterion:
    """Times a block against ``budget`` seconds and records one PASS/FAIL line."""

    def __init__(self, number: int, title: str, budget: float):
        self.number, self.title, self.budget = number, title, budget
        self.notes: list[str] = []

    def note(self, text: str) -> None:
        self.notes.append(text)

    def __enter__(self):
        import time
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        import time
        elapsed = time.perf_counter() - self._t0
        over = exc_type is None and elapsed > self.budget
        status = "PASS" if exc_type is None and not over else "FAIL"
        extra = f"; {'; '.join(self.notes)}" if self.notes else ""
        line = (f"criterion {self.number} {status}: {self.title} "
                f"({elapsed:.2f} s of {self.budget:g} s{extra})")
        ACCEPTANCE_LINES.append(line)
        print(line)
        if over:
            raise AssertionError(f"took {elapsed:.1f} s, budget {self.budget:g} s")
        return False


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
