"""
Test suite for the RSCL solver suite

Unit, integration and acceptance tests for the solver, diagnostics, sweep
and command line modules.
"""
