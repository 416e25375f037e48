#!/usr/bin/env python
# SPDX-License-Identifier: Apache-2.0
# Copyright Contributors to the WNCS project

import sys

from wncs.cli import main


if __name__ == "__main__":
    sys.exit(main())
