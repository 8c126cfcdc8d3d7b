import sys

from config import Config
from gpk.cli import main

if __name__ == '__main__':
    sys.exit(main(sys.argv[1:], Config))
