"""Computational services: exact arithmetic, root isolation, searches and checks."""
