"""Change-point error against signal strength, two regimes sharing the communities."""
from _common import main

if __name__ == "__main__":
    main("changepoint", __doc__, q=(3,), p=(30,), n=(40,), tau0=20, n_counts_snapshots=False,
         signal_levels=(0.02, 0.05, 0.1, 1.0))
