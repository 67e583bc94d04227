import sys

from krylov.cli import main

sys.exit(main())
