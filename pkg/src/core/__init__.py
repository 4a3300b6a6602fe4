"""Exact differential algebra engine for kdvfactor"""
