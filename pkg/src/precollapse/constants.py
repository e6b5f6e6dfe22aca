"""Physical constants (CODATA 2018, SI) and the nominal apparatus values."""

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact
PLANCK = 6.626_070_15e-34  # J s, exact
HBAR = 1.054_571_817e-34  # J s

SODIUM_MASS = 3.818e-26  # kg
HYDROGEN_MASS = 1.6735e-27  # kg

# nominal apparatus (sodium beam, 3 m separation)
NOMINAL_BEAM_SPEED = 3000.0  # m/s
NOMINAL_SEPARATION = 3.0  # m
NOMINAL_SPOT_WIDTH = 15e-6  # m
NOMINAL_LIFETIME = 16e-9  # s
NOMINAL_WAVELENGTH = 589e-9  # m, Na D line
NOMINAL_FLUX = 1e7  # atoms/s
