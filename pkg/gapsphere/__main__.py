import sys

from gapsphere.gs import main

sys.exit(main())
