"""Community recovery (ARI/NMI) and block-rate error for the dynamic Laplacian and the mean-adjacency baseline."""
from _common import main

if __name__ == "__main__":
    main("table2", __doc__, q=(6, 10), p=(80, 120), n=(4, 10, 40, 100))
