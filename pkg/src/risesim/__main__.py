import sys

from risesim.cli import main

sys.exit(main())
