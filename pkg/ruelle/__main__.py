import sys

from ruelle.main import main

sys.exit(main())
