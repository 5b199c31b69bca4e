import sys

from sofa.cli import main

sys.exit(main())
