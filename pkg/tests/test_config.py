import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wikiclaims.checkpoint import CheckpointMismatch, CheckpointStore, atomic_write_text
from wikiclaims.config import ConfigError, load_config

from .conftest import make_pipeline_config

CONFIG_YAML = """\
languages: [en, de]
dumps:
  en: /data/enwiki.xml.bz2
  de: /data/dewiki.xml.bz2
output_dir: /data/out
seed: 7
entry_sample_size: 100
chat:
  base_url: http://chat.example/v1
  api_key: ${TEST_CHAT_KEY}
nli:
  base_url: http://nli.example
  batch_size: 8
filter:
  enable_nli: true
  drop_over_length: true
"""


def write_config(tmp_path, text=CONFIG_YAML):
    path = tmp_path / "config.yaml"
    path.write_text(text, encoding="utf-8")
    return path


def test_load_config_with_env_interpolation(tmp_path, monkeypatch):
    monkeypatch.setenv("TEST_CHAT_KEY", "sekrit")
    config = load_config(write_config(tmp_path))
    assert config.languages == ["en", "de"]
    assert config.chat.api_key == "sekrit"
    assert config.chat.base_url == "http://chat.example/v1"
    assert config.nli.batch_size == 8
    assert config.seed == 7
    assert config.enable_nli and config.drop_over_length


def test_missing_env_var_is_config_error(tmp_path, monkeypatch):
    monkeypatch.delenv("TEST_CHAT_KEY", raising=False)
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path))


def test_seed_override_wins(tmp_path, monkeypatch):
    monkeypatch.setenv("TEST_CHAT_KEY", "k")
    assert load_config(write_config(tmp_path), seed_override=99).seed == 99


def test_env_fallbacks_for_endpoints(tmp_path, monkeypatch):
    monkeypatch.setenv("CHAT_BASE_URL", "http://chat.env/v1")
    monkeypatch.setenv("CHAT_API_KEY", "env-key")
    monkeypatch.setenv("NLI_BASE_URL", "http://nli.env")
    config = load_config(write_config(tmp_path, "languages: []\ndumps: {}\n"))
    assert config.chat.base_url == "http://chat.env/v1"
    assert config.chat.api_key == "env-key"
    assert config.nli.base_url == "http://nli.env"
    assert config.enable_nli  # implied by the configured endpoint


def test_missing_chat_endpoint_is_error(tmp_path, monkeypatch):
    for name in ("CHAT_BASE_URL", "CHAT_API_KEY", "NLI_BASE_URL"):
        monkeypatch.delenv(name, raising=False)
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, "languages: []\ndumps: {}\n"))


def test_language_without_dump_rejected(tmp_path, monkeypatch):
    monkeypatch.setenv("CHAT_BASE_URL", "http://chat.env/v1")
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, "languages: [fr]\ndumps: {}\n"))


# --- fingerprint ----------------------------------------------------------------


def base_config(tmp_path):
    return make_pipeline_config({"en": "/data/en.xml"}, tmp_path / "out")


def test_fingerprint_stable_for_equal_configs(tmp_path):
    assert base_config(tmp_path).fingerprint() == base_config(tmp_path).fingerprint()


@settings(max_examples=40)
@given(
    field=st.sampled_from(
        ["seed", "entry_sample_size", "prompt_version", "drop_over_length", "output_dir"]
    ),
    nonce=st.integers(1, 10_000),
)
def test_fingerprint_changes_when_any_field_changes(field, nonce, tmp_path_factory):
    tmp_path = tmp_path_factory.mktemp("fp")
    config = base_config(tmp_path)
    mutated = base_config(tmp_path)
    if field == "seed":
        mutated.seed = config.seed + nonce
    elif field == "entry_sample_size":
        mutated.entry_sample_size = config.entry_sample_size + nonce
    elif field == "prompt_version":
        mutated.prompt_version = f"{config.prompt_version}-{nonce}"
    elif field == "drop_over_length":
        mutated.drop_over_length = not config.drop_over_length
    else:
        mutated.output_dir = config.output_dir + f"-{nonce}"
    assert mutated.fingerprint() != config.fingerprint()


def test_fingerprint_sees_nested_endpoint_settings(tmp_path):
    config = base_config(tmp_path)
    mutated = base_config(tmp_path)
    mutated.chat = dataclasses.replace(config.chat, temperature=0.2)
    assert mutated.fingerprint() != config.fingerprint()


# --- checkpoint store -------------------------------------------------------------


def test_checkpoint_round_trip(tmp_path):
    path = tmp_path / "checkpoint.json"
    store = CheckpointStore(path, "fp1")
    store.mark_completed("generated", "en:1:page_random_5")
    store.set_stage("generated")

    fresh = CheckpointStore(path, "fp1")
    assert fresh.try_resume()
    assert fresh.stage == "generated"
    assert fresh.completed("generated") == {"en:1:page_random_5"}


def test_checkpoint_fingerprint_mismatch(tmp_path):
    path = tmp_path / "checkpoint.json"
    CheckpointStore(path, "fp1").save()
    with pytest.raises(CheckpointMismatch):
        CheckpointStore(path, "fp2").try_resume()


def test_try_resume_false_when_absent(tmp_path):
    assert not CheckpointStore(tmp_path / "missing.json", "fp").try_resume()


def test_atomic_write_leaves_no_temp_file(tmp_path):
    target = tmp_path / "file.txt"
    atomic_write_text(target, "hello\n")
    assert target.read_text(encoding="utf-8") == "hello\n"
    assert list(tmp_path.iterdir()) == [target]
