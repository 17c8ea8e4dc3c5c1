"""Published exponent tables, checked in as the oracle for table regeneration.

Cells are ``(label, c0, c1, e1)``: the kernel z^(c0 + c1/k) (1 - z)^e1, orientation (1 - z).
Rows are indexed by the Jordan case of gamma, columns by the case of alpha. Never regenerate these.
"""

from sympy import Rational

# 1/x1^2 for the four Jordan cases
I_PRIME = (
    ("", Rational(-1), Rational(-1), Rational(-1, 2)),
    ("", Rational(-1), Rational(-1), Rational(-3, 2)),
    ("", Rational(-1), Rational(1), Rational(-1, 2)),
    ("", Rational(-1), Rational(1), Rational(-3, 2)),
)

# Phi' = z^E0 (1 - z)^E1 J_gamma J_alpha^2; "alg" marks an integer exponent
PHI_ALG = (
    (
        ("", 0, Rational(1), Rational(-1, 2)),
        ("", 0, Rational(1), Rational(1, 2)),
        ("", 0, Rational(-1), Rational(-1, 2)),
        ("", 0, Rational(-1), Rational(1, 2)),
    ),
    (
        ("alg", 0, Rational(1), 0),
        ("alg", 0, Rational(1), Rational(1)),
        ("alg", 0, Rational(-1), 0),
        ("alg", 0, Rational(-1), Rational(1)),
    ),
    (
        ("alg", 0, 0, Rational(-1, 2)),
        ("alg", 0, 0, Rational(1, 2)),
        ("", 0, Rational(-2), Rational(-1, 2)),
        ("", 0, Rational(-2), Rational(1, 2)),
    ),
    (("alg", 0, 0, 0), ("alg", 0, 0, Rational(1)), ("alg", 0, Rational(-2), 0), ("alg", 0, Rational(-2), Rational(1))),
)

# Psi'_alpha = Phi I'_alpha without the J_alpha^2 denominator
PSI_ALPHA = (
    (("R", 0, 0, 0), ("R", 0, 0, 0), ("R", 0, 0, 0), ("R", 0, 0, 0)),
    (
        ("Q", 0, 0, Rational(-1, 2)),
        ("Q", 0, 0, Rational(-3, 2)),
        ("Q", 0, 0, Rational(-1, 2)),
        ("Q", 0, 0, Rational(-3, 2)),
    ),
    (
        ("Q", Rational(-1), Rational(-1), 0),
        ("Q", Rational(-1), Rational(-1), 0),
        ("R", 0, Rational(-1), 0),
        ("R", 0, Rational(-1), 0),
    ),
    (
        ("Q", 0, Rational(-1), Rational(-1, 2)),
        ("Q", 0, Rational(-1), Rational(-3, 2)),
        ("Q", 0, Rational(-1), Rational(-1, 2)),
        ("Q", 0, Rational(-1), Rational(-3, 2)),
    ),
)

# Psi'_gamma = Phi I'_gamma without the J_gamma^2 denominator
PSI_GAMMA = (
    (("R", 0, 0, 0), ("R", 0, 0, Rational(1)), ("R", 0, Rational(-2), 0), ("R", 0, Rational(-2), Rational(1))),
    (
        ("Q", 0, 0, Rational(-3, 2)),
        ("Q", 0, 0, Rational(-3, 2)),
        ("Q", 0, Rational(-2), Rational(-3, 2)),
        ("Q", 0, Rational(-2), Rational(-3, 2)),
    ),
    (
        ("Q", Rational(-1), Rational(1), 0),
        ("Q", Rational(-1), Rational(1), Rational(1)),
        ("R", 0, Rational(-1), 0),
        ("R", 0, Rational(-1), Rational(1)),
    ),
    (
        ("Q", 0, Rational(1), Rational(-3, 2)),
        ("Q", 0, Rational(1), Rational(-3, 2)),
        ("Q", 0, Rational(-1), Rational(-3, 2)),
        ("Q", 0, Rational(-1), Rational(-3, 2)),
    ),
)

# necessary condition for an Ostrowski relation between I_gamma and I_alpha
I_DEPENDENCE = (
    ("?", "?", "Ind", "Ind"),
    ("?", "?", "Ind", "Ind"),
    ("Ind", "Ind", "?", "?"),
    ("Ind", "Ind", "?", "?"),
)

# (eps_gamma, eps_beta, eps_alpha) -> Delta_{beta, alpha} as a multiple of 1/k
DELTA_ROWS = (
    ("L0", (1, 1, 1), Rational(1)),
    ("L4", (-1, -1, -1), Rational(-2)),
    ("L5", (-1, -1, 1), Rational(1)),
    ("L6", (-1, 1, -1), Rational(-3)),
    ("L7", (1, -1, -1), Rational(-1)),
)

EX2_CENSUS = {
    "E0_int": 24,
    "E1_int": 32,
    "both": 12,
    "algebraic_by_exponent": 44,
    "possibly_transcendental": 20,
    "all_algebraic": 16,
}

# case-cell probabilities of an obstruction for VE2 (|k| >= 5)
VE2_PROBABILITIES = {
    "p_phi": Rational(5, 16),
    "p_alg": Rational(7, 16),
    "p_total": Rational(3, 4),
}

LETTERS = (
    ("A", "A'", None, None),
    ("B", "B'", "C", "C'"),
    ("D", "D'", None, None),
    ("E", "E'", "F", "F'"),
)

REFERENCE = {
    "I": I_PRIME,
    "phialg": PHI_ALG,
    "psialpha": PSI_ALPHA,
    "psigamma": PSI_GAMMA,
    "Idep": I_DEPENDENCE,
}
