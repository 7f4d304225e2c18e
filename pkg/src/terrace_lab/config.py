"""Configuration constants for terrace-lab."""

# Named parameter sets (d, r, a, b) used by the bundled scenarios and tests
PARAM_SETS = {
    "p_star": {"d": 1.0, "r": 1.21, "a": 0.5, "b": 1.1},  # accelerated invasion
    "p_llw": {"d": 1.0, "r": 9.0, "a": 0.5, "b": 1.1},  # c2 = c_LLW
    "p_extinction": {"d": 1.0, "r": 0.25, "a": 0.5, "b": 1.1},  # v dies out
}

# Tolerances
BOUNDARY_TOL = 1e-9  # relative, regime boundaries are flagged not classified
QUADRATIC_TOL = 1e-12
ROOT_XTOL = 1e-12
COMPARISON_TOL = 1e-9
CERTIFY_SLACK = 1e-8
INVARIANT_TOL = 1e-12
PROFILE_TOL = 1e-11
MONOTONE_SLACK = 1e-8

# Solver defaults
DEFAULT_DX = 0.1
DEFAULT_T_END = 150.0
DEFAULT_DT_FACTOR = 0.9  # dt = factor * cfl_limit when a scenario leaves it out
DOMAIN_SIZE_FACTOR = 1.3
DOMAIN_PADDING = 100.0
ESCAPE_CELLS = 10

# Fronts
FRONT_LEVEL = 0.5
WINDOW_FRACTION = 0.5
MIN_FIT_SAMPLES = 10
SPEED_REL_TOL = 0.03

# Waves
WAVE_DX = 0.2
WAVE_TRUNCATION_MIN = 50.0
WAVE_TRUNCATION_MAX = 800.0
WAVE_TRUNCATION_DECADES = 80.0  # truncation = this / slowest decay rate
WAVE_CONTINUATION_START = 60.0
NEWTON_MAX_ITER = 50
LLW_T_END = 200.0
LLW_DX = 0.2

# Barrier certification
CERT_T_END = 40.0
CERT_LATTICE = (200, 400)  # (time samples, space samples)
INTERFACE_MARGIN_CELLS = 3
DELTA_CANDIDATES = (0.1, 0.05, 0.02, 0.01)

# Artifacts
CSV_DIGITS = 17
SCENARIO_SCHEMA_VERSION = 1
THREADS_ENV_VAR = "TERRACE_LAB_THREADS"

BANNER = """
████████╗███████╗██████╗ ██████╗  █████╗  ██████╗███████╗
╚══██╔══╝██╔════╝██╔══██╗██╔══██╗██╔══██╗██╔════╝██╔════╝
   ██║   █████╗  ██████╔╝██████╔╝███████║██║     █████╗
   ██║   ██╔══╝  ██╔══██╗██╔══██╗██╔══██║██║     ██╔══╝
   ██║   ███████╗██║  ██║██║  ██║██║  ██║╚██████╗███████╗
   ╚═╝   ╚══════╝╚═╝  ╚═╝╚═╝  ╚═╝╚═╝  ╚═╝ ╚═════╝╚══════╝
"""

TAGLINE = "Terrace Lab - spreading speeds of competing species"

# Barrier construction
KPP_START = 1e-8  # relative distance to the upper state where front integration starts
BVP_TOL = 1e-8
WAVE_TAIL_FLOOR = 1e-7  # below this the wave pair is continued by its exponential tail
WAVE_TAIL_FIT_TOP = 1e-4  # the ψ tail rate is fitted where WAVE_TAIL_FLOOR ≤ ψ ≤ this
INTERFACE_SCAN = 200
INTERFACE_XTOL = 1e-11
CONTINUITY_TOL = 1e-8
KAPPA_TILDE = 0.1
INTERFACE_GAP = 5.0
CERT_WINDOW_PAD = 40.0
