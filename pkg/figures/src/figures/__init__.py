from .recipes import FigureRecipe, RecipeError, read_csv, render
