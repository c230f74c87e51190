"""Walk one exponential connection through the transform and back.

Run as: python3 demos/transform_walkthrough.py
"""

from localfourier import (
    FormalConnection,
    LaurentSeries,
    canonicalize,
    elementary,
    fourier_0_inf,
    fourier_inf_0,
    is_isomorphic,
    rational,
    relabel_variable,
    render_connection,
)

S = LaurentSeries


def show(label: str, conn) -> None:
    print(f"{label:>14}  {render_connection(relabel_variable(conn, 'u'))}")


def main() -> None:
    # El(u, 2 u^-3, triv): a pole of order 3 at the origin
    el = elementary(S.identity(), S({-3: rational(2)}))
    show("input", FormalConnection([el]))
    print(f"{'':>14}  rank {el.rank}, irregularity {el.irregularity}, slope {el.slope}")

    tr = fourier_0_inf(el, sign="-")
    show("at infinity", FormalConnection([tr]))
    print(
        f"{'':>14}  rank {tr.rank} = {el.rank} + {el.irregularity},"
        f" slope {tr.slope}"
    )
    show("canonical", canonicalize(FormalConnection([tr])))

    back = fourier_inf_0(tr, sign="+")
    show("back at 0", FormalConnection([back]))
    same = is_isomorphic(FormalConnection([back]), FormalConnection([el]))
    print(f"{'':>14}  round trip isomorphic: {same}")


if __name__ == "__main__":
    main()
