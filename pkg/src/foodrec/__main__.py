import sys

from foodrec.cli import main

sys.exit(main())
