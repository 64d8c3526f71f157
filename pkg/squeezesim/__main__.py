import sys

from squeezesim.cli import main

sys.exit(main())
