import sys

from petdensity.cli import main

sys.exit(main())
