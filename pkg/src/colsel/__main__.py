import sys

from colsel.cli import main

sys.exit(main())
