"""
Plot the excess loss curves of a scan

    python -m network_aggregation.scripts.plot_scan <scan_summary.csv>
        [--output <png>]
"""
import argparse
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # pylint: disable=wrong-import-position
import pandas as pd  # pylint: disable=wrong-import-position


def plot_summary(summary: pd.DataFrame, output_path: str) -> str:
    """
    Draw the seed mean excess against the depth D for every window M,
        together with the fitted C/(p+1) curve and the convergence bound

    Args:
        summary (pd.DataFrame): contents of scan_summary.csv
        output_path (str): destination png

    Returns:
        str: output_path
    """
    figure, axis = plt.subplots(figsize=(7, 5))
    for window, window_rows in summary.groupby("M"):
        window_rows = window_rows.sort_values("D")
        axis.errorbar(window_rows["D"], window_rows["excess_mean"],
                      yerr=window_rows["excess_sem"].fillna(0.0),
                      marker="o", capsize=3, label=f"excess M={window}")
        fitted = window_rows.dropna(subset=["predicted_excess"])
        if not fitted.empty:
            axis.plot(fitted["D"], fitted["predicted_excess"], "--",
                      label=f"C/(p+1) M={window}")
        bounded = window_rows.dropna(subset=["upper_bound"])
        if not bounded.empty:
            axis.plot(bounded["D"], bounded["upper_bound"], ":",
                      label=f"bound M={window}")

    axis.set_xscale("log")
    axis.set_yscale("log")
    axis.set_xlabel("path depth D")
    axis.set_ylabel("sink excess loss")
    axis.legend()
    figure.tight_layout()
    figure.savefig(output_path)
    plt.close(figure)
    return output_path


def main():
    parser = argparse.ArgumentParser(
        description="Plot excess loss against depth from a scan summary")
    parser.add_argument("summary", type=str,
                        help="Path to scan_summary.csv written by scan")
    parser.add_argument("--output", type=str, default=None,
                        help="Destination png, defaults to scan_summary.png "
                        "next to the summary")
    args = parser.parse_args()

    output_path = args.output
    if output_path is None:
        output_path = os.path.join(os.path.dirname(args.summary),
                                   "scan_summary.png")
    plot_summary(pd.read_csv(args.summary), output_path)
    print(f"Wrote {output_path}")


if __name__ == "__main__":
    main()
