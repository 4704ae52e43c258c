# This file is part of the pilotsic project
# https://github.com/pilotsic/pilotsic
#
# Copyright (c) 2023-2026 pilotsic contributors - MIT License
# SPDX-License-Identifier: MIT
"""pilotsic: Pilot access with successive interference cancellation.

A library and cli to simulate coded random access over contaminated
pilots in a single cell massive MIMO uplink.
"""

__version__ = "2026.1001-beta"
