import sys

from qsv.cli import main

sys.exit(main())
