import pytest

from network_aggregation.utils.timer import TimeDict, Timer


def test_nested_phases():
    timer = Timer()
    with timer.measure("outer"):
        with timer.measure("inner"):
            pass
        with timer.measure("inner"):
            pass
    timer.start("second")
    assert timer.stop() >= 0

    timings = timer.as_dict()
    assert list(timings) == ["outer", "second"]
    assert list(timings["outer"]["children"]) == ["inner"]
    assert timings["outer"]["seconds"] >= \
        timings["outer"]["children"]["inner"]["seconds"]

    timer.start("fresh", reset=True)
    timer.stop()
    assert list(timer.as_dict()) == ["fresh"]


def test_time_dict_misuse():
    measurement = TimeDict("event")
    with pytest.raises(RuntimeError):
        measurement.stop()
    measurement.start()
    with pytest.raises(RuntimeError):
        measurement.start()
