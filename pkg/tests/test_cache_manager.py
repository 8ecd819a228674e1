#!/usr/bin/env python3
# -*- coding: utf-8 -*-
import json

from utils.cache_manager import RunCache, run_key


def test_run_key_is_stable_and_sensitive():
    config = {"hidden_dim": 8, "gamma_a": 0.1}
    key = run_key("ved", config, "synthetic:task=reverse", 7)
    assert key == run_key("ved", dict(reversed(list(config.items()))), "synthetic:task=reverse", 7)
    assert key != run_key("ved", config, "synthetic:task=reverse", 8)
    assert key != run_key("ved-hinit", config, "synthetic:task=reverse", 7)


def test_put_get_persist(tmp_path):
    path = str(tmp_path / "cache.json")
    cache = RunCache(path)
    assert cache.get("k") is None
    cache.put("k", {"bleu2": 0.5})
    assert RunCache(path).get("k") == {"bleu2": 0.5}
    assert RunCache(path).get_cache_info()["total_runs"] == 1


def test_force_ignores_entries(tmp_path):
    path = str(tmp_path / "cache.json")
    RunCache(path).put("k", {"bleu2": 0.5})
    assert RunCache(path, force=True).get("k") is None


def test_corrupt_or_old_cache_starts_empty(tmp_path):
    path = tmp_path / "cache.json"
    path.write_text("{not json")
    assert RunCache(str(path)).get_cache_info()["total_runs"] == 0
    path.write_text(json.dumps({"version": "0.1", "runs": {"k": {}}}))
    assert RunCache(str(path)).get("k") is None


def test_clear_cache(tmp_path):
    cache = RunCache(str(tmp_path / "cache.json"))
    cache.put("k", {"x": 1})
    cache.clear_cache()
    assert RunCache(str(tmp_path / "cache.json")).get("k") is None
