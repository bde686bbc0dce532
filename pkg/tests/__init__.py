"""
Test package for qudit-broadcast
Contains unit tests and property-based tests for the numerical kernel,
the broadcasting protocol and the configuration system
"""
