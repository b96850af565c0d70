"""Tests for oracles module"""

import json
import shutil

import pytest

from torsion_asymptotics.corpus import CORPUS_DIR
from torsion_asymptotics.errors import InputError
from torsion_asymptotics.oracles import (
    CONFIGS_FILE,
    GERMS_FILE,
    check_config_entry,
    check_germ_entry,
    corpus_check,
    load_corpus,
)


@pytest.fixture
def corpus_copy(tmp_path):
    for name in (GERMS_FILE, CONFIGS_FILE):
        shutil.copy(CORPUS_DIR / name, tmp_path / name)
    return tmp_path


def edit_entry(directory, file_name, key, entry_id, **changes):
    path = directory / file_name
    data = json.loads(path.read_text())
    for entry in data[key]:
        if entry["id"] == entry_id:
            entry.update(changes)
    path.write_text(json.dumps(data))


class TestBundledCorpus:
    def test_loads(self):
        corpus = load_corpus(CORPUS_DIR)

        assert len(corpus.germs) == 32
        assert len(corpus.configs) == 12

    def test_every_entry_agrees(self):
        result = corpus_check(load_corpus(CORPUS_DIR))

        assert result.ok, result.diffs
        assert result.checked == 44


class TestCorruptedCorpus:
    def test_wrong_milnor_number(self, corpus_copy):
        edit_entry(corpus_copy, GERMS_FILE, "germs", "bp-2-3", mu=3)
        result = corpus_check(load_corpus(corpus_copy))

        assert not result.ok
        assert [d.entry for d in result.diffs] == ["bp-2-3"]
        assert any("Kouchnirenko" in m for m in result.diffs[0].mismatches)

    def test_wrong_kappa(self, corpus_copy):
        edit_entry(corpus_copy, CONFIGS_FILE, "configs", "genus2-trivial", kappa="1/12")
        result = corpus_check(load_corpus(corpus_copy))

        assert [d.entry for d in result.diffs] == ["genus2-trivial"]
        assert len(result.diffs[0].mismatches) == 3

    def test_unreadable_entry(self, corpus_copy):
        edit_entry(corpus_copy, GERMS_FILE, "germs", "bp-3-3", exponents=[1, 3])
        result = corpus_check(load_corpus(corpus_copy))

        assert [d.entry for d in result.diffs] == ["bp-3-3"]
        assert "unreadable" in result.diffs[0].mismatches[0]


class TestLoading:
    def test_empty_directory_warns(self, tmp_path, caplog):
        result = corpus_check(load_corpus(tmp_path))

        assert result.ok
        assert result.checked == 0
        assert "empty" in caplog.text

    def test_missing_directory(self, tmp_path):
        with pytest.raises(InputError):
            load_corpus(tmp_path / "missing")

    def test_malformed_file(self, tmp_path):
        (tmp_path / GERMS_FILE).write_text("[")

        with pytest.raises(InputError):
            load_corpus(tmp_path)


class TestEntryChecks:
    def test_germ_entry(self):
        entry = {"id": "cusp", "exponents": [2, 3], "mu": 2, "spectralGenus": "1/6", "spectrum": ["5/6", "7/6"]}

        assert check_germ_entry(entry) == []

    def test_wrong_spectral_genus(self):
        entry = {"id": "cusp", "exponents": [2, 3], "mu": 2, "spectralGenus": "5/6", "spectrum": ["5/6", "7/6"]}

        assert len(check_germ_entry(entry)) == 1

    def test_config_entry(self):
        entry = {"genus": 0, "degXi": 3, "rankXi": 2, "degH": 1, "m": 1, "kappa": "-1/4"}

        assert check_config_entry(entry) == []
