import sys

from centerstone.cli import main

sys.exit(main())
