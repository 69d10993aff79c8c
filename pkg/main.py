import sys

from bm_census.cli import main

if __name__ == "__main__":
    sys.exit(main())
