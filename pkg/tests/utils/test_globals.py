import pytest

import network_aggregation.globals as GV


def test_resolve_threads(monkeypatch):
    monkeypatch.delenv(GV.THREADS_ENV, raising=False)
    assert GV.resolve_threads(None) is None
    assert GV.resolve_threads(3) == 3

    monkeypatch.setenv(GV.THREADS_ENV, "4")
    assert GV.resolve_threads(None) == 4
    assert GV.resolve_threads(2) == 2

    with pytest.raises(ValueError):
        GV.resolve_threads(0)


@pytest.mark.parametrize("value", ["zero", "0", "-2", "1.5"])
def test_bad_thread_environment(monkeypatch, value):
    monkeypatch.setenv(GV.THREADS_ENV, value)
    with pytest.raises(EnvironmentError):
        GV.resolve_threads(None)


def test_global_parse_args(monkeypatch):
    monkeypatch.delenv(GV.THREADS_ENV, raising=False)
    args = GV.global_parse_args("-vv scan --seed 5 --threads 2")
    assert args.command == "scan"
    assert args.seed == 5
    assert GV.VERBOSE_LEVEL == 2
    assert GV.THREADS == 2
    assert GV.verbosity(2)
    assert not GV.verbosity(3)


def test_command_required():
    with pytest.raises(SystemExit):
        GV.global_parse_args([])
