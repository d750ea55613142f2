"""Worked examples used across the test suite, with their expected artifacts."""

from __future__ import annotations

from termreflect.abstractions import AffineTS, TransitionFormula
from termreflect.lia import parse_formula
from termreflect.qlinalg import QMatrix

# a loop that adds x + 1 to w and moves x or y by z depending on the parity of x - y
PARITY_WALK_VARS = ("w", "x", "y", "z")
PARITY_WALK_TEXT = (
    "x >= 0 && y >= 0 && w' == 3*w + x + 1 && z' == z && "
    "((2 | x - y && x' == x - z && y' == y) || (!(2 | x - y) && y' == y - z && x' == x))"
)
PARITY_WALK_BODY = parse_formula(PARITY_WALK_TEXT)
PARITY_WALK = TransitionFormula(PARITY_WALK_VARS, PARITY_WALK_BODY)

# its affine hull: w' = 3w + x + 1, x' + y' = x + y - z, z' = z
PARITY_WALK_HULL = AffineTS.from_matrices(
    QMatrix.from_rows([[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 0, 1]]),
    QMatrix.from_rows([[3, 1, 0, 0], [0, 1, 1, -1], [0, 0, 0, 1]]),
    [1, 0, 0],
)

# a linear system whose successors exist only when x = y; the omega-domain is x = y, z = 0
SHRINKING_DOMAIN = AffineTS.from_matrices(
    QMatrix.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 0]]),
    QMatrix.from_rows([[2, 0, 1], [0, 2, 2], [0, 0, 3], [1, -1, 0]]),
    [0, 0, 0, 0],
)

# a system mixing eigenvalue 2 with a rotation; only the eigenvalue-2 part is rational
MIXED_SPECTRUM = AffineTS.from_matrices(
    QMatrix.from_rows([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0]]),
    QMatrix.from_rows([[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0], [1, -1, 0, 0]]),
    [0, 0, 0, 0, 0],
)

# count trailing zero bits: halve x while it is even
TRAILING_ZEROS_VARS = ("x", "c")
TRAILING_ZEROS = TransitionFormula(
    TRAILING_ZEROS_VARS, parse_formula("2 | x && x - 1 <= 2*x' && 2*x' <= x && c' == c + 1"))
# homogenized halving dynamics over (x, c, h): 2x' = x, c' = c + h, h' = h
HALVING_SYSTEM = AffineTS.from_matrices(
    QMatrix.from_rows([[2, 0, 0], [0, 1, 0], [0, 0, 1]]),
    QMatrix.from_rows([[1, 0, 0], [0, 1, 1], [0, 0, 1]]),
    [0, 0, 0],
)

# dynamics for characteristic sequences over (x, y, z, a, b)
CHI_MATRIX = QMatrix.from_rows([
    [1, 1, 0, 0, 0],
    [0, 1, 1, 0, 0],
    [0, 0, 1, 0, 0],
    [0, 0, 0, -3, 0],
    [0, 0, 0, 0, 2],
])
CHI_NAMES = ("x", "y", "z", "a", "b")
# eventually x >= 0 along the shear
CHI_X_NONNEG = parse_formula("z > 0 || (z == 0 && 2*y - z > 0) || (z == 0 && 2*y - z == 0 && x >= 0)")
# a - b >= 0 on even and odd steps
CHI_A_MINUS_B = (
    parse_formula("a > 0 || (a == 0 && -b >= 0)"),
    parse_formula("-a > 0 || (-a == 0 && -b >= 0)"),
)

# dynamics for divisibility sequences over (x, y, z)
DIV_MATRIX = QMatrix.from_rows([[1, 1, 0], [0, 1, 0], [0, 0, 5]])
DIV_NAMES = ("x", "y", "z")
