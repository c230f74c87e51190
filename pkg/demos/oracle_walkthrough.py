"""Show the operator route agreeing with the closed form, stage by stage.

Run as: python3 demos/oracle_walkthrough.py
"""

from localfourier import oracle_check, rational


def main() -> None:
    for a, q in [(rational(1), 1), (rational(2), 3), (rational("-3/2"), 2)]:
        for line in oracle_check(a, q).lines():
            print(line)
        print()


if __name__ == "__main__":
    main()
