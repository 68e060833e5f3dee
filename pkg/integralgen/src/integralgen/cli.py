"""Command line interface for fixture generation."""

import sys

import click

from .scf import SCFError
from .systems import available_systems, generate


@click.group()
def main():
    """Generate FCIDUMP fixtures with reference energies."""


@main.command("generate")
@click.option("--system", "name", required=True, help="System name, see list-systems.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def cmd_generate(name, out_dir):
    if name not in available_systems():
        click.echo(f"unknown system '{name}'", err=True)
        sys.exit(2)
    try:
        ref = generate(name, out_dir)
    except SCFError as exc:
        click.echo(f"SCF failed: {exc}", err=True)
        sys.exit(1)
    fci = ref["fci_energy"]
    fci_text = "n/a" if fci is None else f"{fci:.10f}"
    click.echo(f"{name}: HF {ref['hf_energy']:.10f}  FCI {fci_text}")


@main.command("list-systems")
def cmd_list():
    for name in available_systems():
        click.echo(name)


if __name__ == "__main__":
    main()
