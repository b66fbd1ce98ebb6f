# Core package for shared config and errors.
