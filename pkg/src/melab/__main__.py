import sys

from melab.cli import main

sys.exit(main())
