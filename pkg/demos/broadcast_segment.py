"""Broadcast sets of three maps on a two-outcome classical bit.

Classical copying broadcasts every state.  The swap map sends each pure
state to a product with the other one; its marginals agree only at the
fair coin, which is therefore the one state it broadcasts.  A constant
map to a product of two different pure states broadcasts nothing.
"""
from gptclone import zoo
from gptclone.broadcast import broadcast_set
from gptclone.exact import format_rational, outer
from gptclone.model import map_from_vertex_images
from gptclone.tensor import max_tensor


def show(poly):
    if poly.is_empty:
        return "empty"
    return ", ".join("(" + ", ".join(format_rational(x) for x in v) + ")" for v in poly.vertices)


def main():
    s = zoo.delta2()
    t = max_tensor(s, s)
    e1, e2 = s.vertices
    maps = {
        "copy": zoo.kappa_map(s, t),
        "swap": zoo.swap_broadcast_map(s, t),
        "constant": map_from_vertex_images(s, t, [outer(e1, e2), outer(e1, e2)]),
    }
    for name, B in maps.items():
        a = broadcast_set(B)
        print(f"{name:9s} fixed set of the averaged marginal: {show(a.gamma_prime)}")
        print(f"{'':9s} broadcast set: {show(a.gamma)}  checks ok: {a.ok}")


if __name__ == "__main__":
    main()
