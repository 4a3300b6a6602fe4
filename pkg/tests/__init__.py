"""Test suite for kdvfactor"""
