# Library package: physics, numerics and run plumbing
