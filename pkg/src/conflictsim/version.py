"""Single source of the tool version string."""

VERSION = "0.1.0"
