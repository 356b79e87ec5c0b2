"""Common fixed vectors of two stochastic matrices.

Two uniform blocks of size two against one uniform block of size four: each
matrix has its own stationary distributions, and the vectors fixed by both
form a single line spanned by the uniform distribution.
"""
from fractions import Fraction as F

from gptclone.exact import format_rational
from gptclone.stochastic import StochasticMatrix, common_fixed_oracle, fixed_point_basis, intersect_fixed_spaces

H, Q = F(1, 2), F(1, 4)


def show(v):
    return "(" + ", ".join(format_rational(x) for x in v) + ")"


def main():
    blocks = StochasticMatrix([[H, H, 0, 0], [H, H, 0, 0], [0, 0, H, H], [0, 0, H, H]])
    uniform = StochasticMatrix([[Q] * 4 for _ in range(4)])
    for name, m in (("two blocks", blocks), ("uniform", uniform)):
        print(f"{name}: fixed basis", ", ".join(show(v) for v in fixed_point_basis(m).vectors))
    res = intersect_fixed_spaces(blocks, uniform)
    print("common fixed basis:", ", ".join(show(v) for v in res.basis))
    print("ratios mu_J / lambda_I:", {k: format_rational(v) for k, v in res.beta.items()})
    print("oracle dimension:", len(common_fixed_oracle(blocks, uniform)))


if __name__ == "__main__":
    main()
