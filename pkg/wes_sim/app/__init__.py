"""
Application layer: the ``wes-sim`` command-line entry point.
"""
