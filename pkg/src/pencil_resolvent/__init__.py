"""Laurent expansions, spectral projections and Jordan chains of linear pencils."""
