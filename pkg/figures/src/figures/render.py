"""Command line front end: render <recipe.json> [more recipes...]."""

import sys

from .recipes import FigureRecipe, RecipeError, render


def main(argv=None):
    args = sys.argv[1:] if argv is None else argv
    if not args:
        print("usage: render <recipe.json> [recipe2.json ...]",
              file=sys.stderr)
        return 2
    status = 0
    for path in args:
        try:
            recipe = FigureRecipe.from_json(path)
            fig, _, _ = render(recipe)
            print(recipe.output_path)
        except RecipeError as exc:
            print(f"recipe error in {path}: {exc}", file=sys.stderr)
            status = 2
    return status


if __name__ == "__main__":
    sys.exit(main())
