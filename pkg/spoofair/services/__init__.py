# Services layer: evaluation pipeline and oracles.
