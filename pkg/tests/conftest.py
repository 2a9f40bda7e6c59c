from __future__ import annotations

import datetime as dt

import pytest

import narrative_index as ni
from narrative_index.corpus import SurveyRecord, TopicVocabulary, load_vocabulary
from narrative_index.extraction import load_clue_table


@pytest.fixture(scope="session")
def en_clues():
    return load_clue_table(ni.default_clues_en())


@pytest.fixture(scope="session")
def ja_clues():
    return load_clue_table(ni.default_clues_ja())


@pytest.fixture(scope="session")
def vocab13() -> TopicVocabulary:
    return load_vocabulary(ni.default_topics())


@pytest.fixture(scope="session")
def synthetic_corpus_path():
    return ni.data_path("synthetic/corpus.csv")


@pytest.fixture(scope="session")
def synthetic_di_path():
    return ni.data_path("synthetic/di.csv")


def make_record(
    text: str,
    record_id: int = 1,
    topic: str = "Sales Volume Movement",
    date: dt.date = dt.date(2021, 3, 5),
) -> SurveyRecord:
    return SurveyRecord(id=record_id, date=date, topic=topic, condition=None, text=text)
