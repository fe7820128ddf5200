"""Per-edge MLE error and interval coverage, uniform rates on pairs and triples."""
from _common import main

if __name__ == "__main__":
    main("table1", __doc__, p=(100, 200), n=(4, 20, 50, 100, 200))
