"""Command-line driver for kdvfactor"""
