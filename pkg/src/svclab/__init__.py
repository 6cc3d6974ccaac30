"""Desk-scale toolkit for equations over finite groups, retracts and verbal closedness."""

__version__ = "0.1.0"
