import sys

from copri.cli import main

sys.exit(main())
