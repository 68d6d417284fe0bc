import click

from . import __version__
from .figspec import load_spec
from .reading import FormatError


@click.group()
@click.version_option(__version__)
def main():
    """Render figures from result bundles."""


@main.command()
@click.option("--spec", "spec_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="FigureSpec JSON file")
@click.option("--out", "out_dir", required=True,
              type=click.Path(file_okay=False), help="output directory")
def render(spec_path, out_dir):
    """Render one figure described by --spec into --out."""
    from .figures import render_spec  # defer: pulls in matplotlib

    try:
        path = render_spec(load_spec(spec_path), out_dir)
    except FormatError as e:
        raise click.ClickException(str(e))
    click.echo(str(path))
