"""Which sets of square states can be cloned?

The square has four pure states.  A set can be cloned into the maximal
tensor square exactly when one observable tells its members apart with
certainty.  Every pair passes, since two corners always differ on one of
the two tests, but no observable separates all four corners at once.
"""
import itertools

from gptclone import zoo
from gptclone.clone import find_cloning_map, find_distinguishing_observable
from gptclone.exact import format_rational
from gptclone.tensor import max_tensor


def show(v):
    return "(" + ", ".join(format_rational(x) for x in v) + ")"


def main():
    sq = zoo.square()
    t = max_tensor(sq, sq)
    print(f"square: {len(sq.vertices)} pure states in R^{sq.dim}")
    for i, j in itertools.combinations(range(len(sq.vertices)), 2):
        pair = [sq.vertices[i], sq.vertices[j]]
        d = find_distinguishing_observable(pair, sq)
        c = find_cloning_map(pair, sq, t)
        print(f"  {show(pair[0])} and {show(pair[1])}: "
              f"distinguishable={d.feasible} cloneable={c.feasible}")
        assert d.feasible == c.feasible
    whole = find_cloning_map(sq.vertices, sq, t)
    print(f"all four states cloneable: {whole.feasible}")


if __name__ == "__main__":
    main()
