SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact

#: Default number of trials per Monte Carlo cell.
DEFAULT_TRIALS = 100_000
