import sys

from hibench.cli import main

sys.exit(main())
