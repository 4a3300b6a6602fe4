"""Utility modules for kdvfactor"""
