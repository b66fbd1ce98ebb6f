# Repository layer for file input and report output.
