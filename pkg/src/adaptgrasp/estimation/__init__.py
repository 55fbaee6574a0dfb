"""Property estimation: descriptor grammar, prompts, aggregation and estimators."""
