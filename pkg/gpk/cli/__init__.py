import sys
from typing import Optional, Sequence

import click

from config import Config


@click.group()
@click.option("--log-level", default=None, help="Override the configured log level.")
@click.option("--budget-ms", type=int, default=None, help="Wall-time cap in milliseconds (0 = none).")
@click.pass_obj
def cli(workbench, log_level: Optional[str], budget_ms: Optional[int]):
    """Graph polynomials from recursion tables, subset expansions and oracles."""
    if log_level:
        workbench.logger.setLevel(log_level.upper())
    if budget_ms is not None:
        workbench.config["BUDGET_MS"] = budget_ms


def main(argv: Optional[Sequence[str]] = None, config_class: type = Config) -> int:
    """Run the CLI and return its exit code."""
    from gpk import create_app
    from gpk.cli import commands  # noqa: F401  registers the commands

    workbench = create_app(config_class)
    try:
        result = cli.main(args=list(argv) if argv is not None else None, prog_name="gpk",
                          standalone_mode=False, obj=workbench)
    except click.ClickException as err:
        err.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except Exception as err:
        code = workbench.handle(err)
        if code is None:
            raise
        click.echo(f"error: {err}", err=True)
        return code
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(main())
