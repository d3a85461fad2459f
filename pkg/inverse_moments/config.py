"""
Default settings. Each class groups the knobs of one concern; functions take the same values as
keyword arguments, so these are only the fallbacks.
"""


class Precision:
    # Guard digits on top of the cancellation estimate
    base_dps = 30
    max_dps = 2000


class Tables:
    stirling_max_order = 64
    max_expansion_order = 8


class Oracle:
    pdf_sum_tolerance = 1e-12
    default_tol = 1e-15
    calibration_tol = 1e-30
    # Automatic k_max of an expanded PDF, and the weaker bound a caller-supplied k_max must meet
    pdf_tail_eps = 1e-40
    display_tail_eps = 1e-16


class Crossover:
    # r: (mu_star, M1, M2) reaching relative error 1e-5 and 1e-10
    table_1e5 = {
        1: (13.671, 31, 10),
        2: (17.061, 35, 15),
        3: (20.544, 39, 20),
        4: (24.775, 44, 26),
        5: (28.966, 49, 32),
        6: (32.969, 53, 38),
    }
    table_1e10 = {
        1: (25.734, 63, 20),
        2: (29.206, 67, 26),
        3: (33.998, 74, 33),
        4: (37.903, 79, 39),
        5: (42.573, 85, 46),
        6: (47.068, 90, 53),
    }
    tables = {1e-5: table_1e5, 1e-10: table_1e10}

    grid_step = 0.05
    search_upper = 150.0
    max_ascending_terms = 600
    max_asymptotic_terms = 120
    bisection_steps = 40
    # Closed forms are used for mu <= a + closed_form_margin
    closed_form_margin = 5.0


class SweepDefaults:
    grid_count = 500
    grid_lo = 1.0 / 500
    grid_hi = 1.0
    orders = (1, 2, 3, 4, 5, 6)
    terms = tuple(range(1, 11))
    significant_digits = 17
