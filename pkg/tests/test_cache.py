import json

import pytest

from hurwitz_toda import cache
from hurwitz_toda.partitions import mn_character
from hurwitz_toda.schur import schur_poly
from hurwitz_toda.suite import RunConfig, run_suite


@pytest.fixture
def store(tmp_path):
    previous = cache.get_store()
    s = cache.DiskCache(tmp_path / "cache")
    cache.set_store(s)
    cache.clear_memory()
    yield s
    cache.set_store(previous)
    cache.clear_memory()


def test_disk_round_trip(store):
    first = schur_poly((3, 2, 1), 6)
    chi = mn_character((3, 2, 1), (3, 3))
    assert store.misses > 0 and store.hits == 0
    cache.clear_memory()
    assert schur_poly((3, 2, 1), 6) == first
    assert mn_character((3, 2, 1), (3, 3)) == chi
    assert store.hits > 0


def test_corrupt_entry_is_a_miss(store):
    value = schur_poly((2, 2), 4)
    files = sorted(store.directory.rglob("*.json"))
    assert files
    for f in files:
        record = json.loads(f.read_text())
        record["payload"] = [[[9, 9, 9, 9], "7"]] if isinstance(record["payload"], list) else 12345
        f.write_text(json.dumps(record))
    files[0].write_text("{not json")
    cache.clear_memory()
    hits = store.hits
    assert schur_poly((2, 2), 4) == value
    assert store.hits == hits


def test_keys_are_content_addresses():
    assert cache.DiskCache.key("op", [1, 2]) == cache.DiskCache.key("op", [1, 2])
    assert cache.DiskCache.key("op", [1, 2]) != cache.DiskCache.key("op", [2, 1])
    assert cache.DiskCache.key("op", [1]) != cache.DiskCache.key("other", [1])


def test_suite_output_independent_of_cache(tmp_path):
    checks = ("hurwitz-oracle", "schur-special-value", "tau-linear-s-tbar1")
    plain = run_suite(RunConfig(checks=checks, reproducible=True, D=6)).to_json()
    cache.clear_memory()
    cold = run_suite(RunConfig(checks=checks, reproducible=True, D=6, cache_dir=str(tmp_path / "c"))).to_json()
    cache.clear_memory()
    warm = run_suite(RunConfig(checks=checks, reproducible=True, D=6, cache_dir=str(tmp_path / "c"))).to_json()
    strip = lambda text: {k: v for k, v in json.loads(text).items() if k != "config"}
    assert strip(plain) == strip(cold) == strip(warm)
