import math

import pandas as pd

from network_aggregation.scripts.plot_scan import plot_summary


def test_plot_summary(tmp_path):
    summary = pd.DataFrame({
        "D": [3, 6, 12, 3, 6, 12],
        "M": [3, 3, 3, 4, 4, 4],
        "excess_mean": [0.2, 0.13, 0.08, 0.21, 0.14, 0.09],
        "excess_sem": [0.01, math.nan, 0.005, 0.01, 0.01, 0.01],
        "predicted_excess": [0.2, 0.133, 0.08, math.nan, math.nan, math.nan],
        "upper_bound": [5.0, 3.5, 2.5, math.nan, 4.0, 3.0]})
    output_path = tmp_path / "scan.png"
    assert plot_summary(summary, str(output_path)) == str(output_path)
    assert output_path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
