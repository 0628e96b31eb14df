import json
from pathlib import Path

import pytest

from cogsimp import ParsedSentence, ParseToken
from cogsimp.ingest import attach_parses, load_coref, load_corpus, load_paraphrase_db, load_parse_sidecars
from cogsimp.tagger import TaggerResources

FIXTURES = Path(__file__).parent / "fixtures"
TAGGER_DIR = FIXTURES / "tagger"

WORKED_SOURCE = ("Now, normally during Disability Pride Month, we're showcasing our disability pride "
               "through various parades and events throughout the country.")
WORKED_TARGET = ("Most years, during Disability Pride Month we have parades and events all over the "
               "United States to show how proud we are.")


def sentence(rows: str, sid: str = "s") -> ParsedSentence:
    """Build a parse from lines of ``form lemma UPOS feats head deprel``."""
    tokens = []
    for n, line in enumerate(rows.strip().splitlines(), 1):
        form, lemma, upos, feats, head, rel = line.split()
        fmap = dict(kv.split("=") for kv in feats.split("|")) if feats != "_" else {}
        tokens.append(ParseToken(n, form, lemma, upos, fmap, int(head), rel))
    return ParsedSentence(sid, tuple(tokens))


def load_fixture_corpus():
    with open(TAGGER_DIR / "corpus.jsonl") as fh:
        instances = load_corpus(fh, filter_degenerate=False)
    index = load_parse_sidecars([TAGGER_DIR / "source.conllu", TAGGER_DIR / "target.conllu"])
    return attach_parses(instances, index)


def load_fixture_resources() -> TaggerResources:
    with open(TAGGER_DIR / "paraphrases.tsv") as fh:
        db = load_paraphrase_db(fh)
    with open(TAGGER_DIR / "coref.jsonl") as fh:
        coref = load_coref(fh)
    return TaggerResources(db, coref)


def load_fixture_expected() -> dict[str, list[str]]:
    with open(TAGGER_DIR / "expected.jsonl") as fh:
        return {r["id"]: r["ops"] for r in map(json.loads, fh)}


@pytest.fixture(scope="session")
def fixture_resources():
    return load_fixture_resources()


@pytest.fixture(scope="session")
def fixture_corpus():
    return {si.id: si for si in load_fixture_corpus()}


ACCEPTANCE_RESULTS: dict[int, tuple[str, bool, str]] = {}


def record_acceptance(number: int, title: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS[number] = (title, bool(ok), detail)
    print(f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title} {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, ok, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title} {detail}".rstrip())
