#!/usr/bin/env python
# This file is part of the pilotsic project
# https://github.com/pilotsic/pilotsic
#
# Copyright (c) 2023-2026 pilotsic contributors - MIT License
# SPDX-License-Identifier: MIT
"""
__main__ module for pilotsic.

Enables use as module: $ python -m pilotsic
"""


if __name__ == '__main__':
    from . import cli

    cli.main()
