import sys

from adfa.cli import main

sys.exit(main())
