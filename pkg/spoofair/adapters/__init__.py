# Adapters that turn report bundles into output formats.
