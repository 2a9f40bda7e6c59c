from __future__ import annotations

import datetime as dt

import pytest

from narrative_index.corpus import (
    Condition,
    CorpusLoad,
    TopicVocabulary,
    load_corpus,
    load_vocabulary,
    parse_record_date,
)
from narrative_index.errors import InputError

HEADER = "date,topic,condition,text\n"


def write_corpus(tmp_path, body: str):
    path = tmp_path / "corpus.csv"
    path.write_text(HEADER + body, encoding="utf-8")
    return path


@pytest.fixture
def vocab():
    return TopicVocabulary(("Sales Volume Movement", "Number of Visitors"))


def test_survey_sample_row(tmp_path, vocab):
    path = write_corpus(
        tmp_path,
        "2010-03-05,Sales Volume Movement,×,"
        '"Due to early demand for eco-point electronic goods, the sales volume has now slowed."\n',
    )
    load = load_corpus(path, vocab)
    assert len(load.records) == 1
    record = load.records[0]
    assert record.id == 1
    assert record.date == dt.date(2010, 3, 5)
    assert record.topic == "Sales Volume Movement"
    assert record.condition is Condition.MUCH_WORSE
    assert record.text.startswith("Due to early demand")
    assert load.skipped_count == 0


def test_header_only_gives_empty_list(tmp_path, vocab):
    path = write_corpus(tmp_path, "")
    load = load_corpus(path, vocab)
    assert load.records == []
    assert load.skipped == []


def test_unknown_topic_strict_names_row_and_topic(tmp_path, vocab):
    path = write_corpus(tmp_path, "2021-01-02,Weather,○,Sunny all week.\n")
    with pytest.raises(InputError) as err:
        load_corpus(path, vocab, strict=True)
    assert "Weather" in str(err.value)
    assert ":2" in str(err.value)


def test_unknown_topic_lenient_skips_and_counts(tmp_path, vocab):
    path = write_corpus(
        tmp_path,
        "2021-01-02,Weather,○,Sunny all week.\n"
        "2021-01-03,Sales Volume Movement,,Sales held steady.\n"
        "2021-01-04,Climate,,Mild winter.\n",
    )
    load = load_corpus(path, vocab, strict=False)
    assert len(load.records) == 1
    assert load.skipped_count == 2
    assert [row for row, _ in load.skipped] == [2, 4]
    # Ids stay unique and in input order over the kept rows.
    assert [r.id for r in load.records] == [1]


def test_duplicate_rows_are_retained(tmp_path, vocab):
    row = "2021-01-03,Sales Volume Movement,□,Sales held steady.\n"
    path = write_corpus(tmp_path, row + row)
    load = load_corpus(path, vocab)
    assert len(load.records) == 2
    assert load.records[0].text == load.records[1].text
    assert load.records[0].id != load.records[1].id


def test_month_precision_normalizes_to_first(tmp_path, vocab):
    path = write_corpus(tmp_path, "2021-07,Number of Visitors,,Visitors rose.\n")
    load = load_corpus(path, vocab)
    assert load.records[0].date == dt.date(2021, 7, 1)


def test_malformed_row_column_count(tmp_path, vocab):
    path = write_corpus(tmp_path, "2021-01-02,Sales Volume Movement,○\n")
    with pytest.raises(InputError, match="columns"):
        load_corpus(path, vocab)


@pytest.mark.parametrize("bad", ["2021-13-02", "2021-02-30", "not-a-date", "2021/01/02"])
def test_invalid_dates_rejected(tmp_path, vocab, bad):
    path = write_corpus(tmp_path, f"{bad},Sales Volume Movement,,Fine.\n")
    with pytest.raises(InputError):
        load_corpus(path, vocab)


def test_empty_text_rejected(tmp_path, vocab):
    path = write_corpus(tmp_path, '2021-01-02,Sales Volume Movement,,"   "\n')
    with pytest.raises(InputError, match="empty explanation"):
        load_corpus(path, vocab)


def test_unknown_condition_mark_rejected(tmp_path, vocab):
    path = write_corpus(tmp_path, "2021-01-02,Sales Volume Movement,?,Fine week.\n")
    with pytest.raises(InputError, match="condition"):
        load_corpus(path, vocab)


def test_empty_condition_allowed(tmp_path, vocab):
    path = write_corpus(tmp_path, "2021-01-02,Sales Volume Movement,,Fine week.\n")
    assert load_corpus(path, vocab).records[0].condition is None


def test_load_is_deterministic(tmp_path, vocab):
    body = (
        "2021-01-02,Sales Volume Movement,◎,First.\n"
        "2021-02-03,Number of Visitors,▲,Second.\n"
    )
    path = write_corpus(tmp_path, body)
    first = load_corpus(path, vocab)
    second = load_corpus(path, vocab)
    assert first.records == second.records


def test_quoted_text_with_commas_and_newline(tmp_path, vocab):
    path = write_corpus(
        tmp_path,
        '2021-01-02,Sales Volume Movement,○,"Sales, which had sagged,\nrecovered."\n',
    )
    load = load_corpus(path, vocab)
    assert load.records[0].text == "Sales, which had sagged,\nrecovered."


def test_missing_file(tmp_path, vocab):
    with pytest.raises(InputError, match="not found"):
        load_corpus(tmp_path / "absent.csv", vocab)


def test_missing_header(tmp_path, vocab):
    path = tmp_path / "corpus.csv"
    path.write_text("", encoding="utf-8")
    with pytest.raises(InputError):
        load_corpus(path, vocab)


def test_bad_header(tmp_path, vocab):
    path = tmp_path / "corpus.csv"
    path.write_text("day,topic,condition,text\n", encoding="utf-8")
    with pytest.raises(InputError, match="header"):
        load_corpus(path, vocab)


def test_vocabulary_rejects_duplicates():
    with pytest.raises(InputError, match="duplicate"):
        TopicVocabulary(("A", "B", "A"))


def test_vocabulary_rejects_empty():
    with pytest.raises(InputError):
        TopicVocabulary(())


def test_vocabulary_order_and_pairs(tmp_path):
    path = tmp_path / "topics.txt"
    path.write_text("B\nA\nC\n", encoding="utf-8")
    vocab = load_vocabulary(path)
    assert vocab.topics == ("B", "A", "C")
    pairs = vocab.ordered_pairs()
    assert len(pairs) == 6
    assert pairs[0] == ("B", "A")


def test_shipped_vocabulary_has_13_topics(vocab13):
    assert len(vocab13.topics) == 13
    assert "Sales Volume Movement" in vocab13
    assert "Number of Visitors" in vocab13


def test_parse_record_date_variants():
    assert parse_record_date("2021-02-28") == dt.date(2021, 2, 28)
    assert parse_record_date("2021-02") == dt.date(2021, 2, 1)
    with pytest.raises(InputError):
        parse_record_date("2021")


def test_corpus_load_type():
    load = CorpusLoad(records=[])
    assert load.skipped_count == 0
