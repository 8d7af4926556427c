"""Allow `python -m frappe_bench`."""

from frappe_bench.main import cli

cli()
