import sys

sys.path.insert(0, "src")

from SEDAtom.sed_utils.cli import main


if __name__ == "__main__":
    main()
