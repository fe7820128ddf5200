"""How often BIC and AIC pick the true number of communities."""
from _common import main

if __name__ == "__main__":
    main("selection", __doc__, q=(3,), p=(30,), n=(10,), q_range=(2, 3, 4, 5, 6))
