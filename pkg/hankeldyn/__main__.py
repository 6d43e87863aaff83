import sys

from hankeldyn.cli import main

sys.exit(main())
